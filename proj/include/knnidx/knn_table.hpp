#pragma once

#include <algorithm>
#include <compare>
#include <span>
#include <tuple>
#include <vector>

#include "knnidx/types.hpp"

namespace knnidx {

/// One (object, distance) pair of a kNN list. Lists are ordered by
/// (distance, object) ascending everywhere in the library.
struct KnnEntry {
    Vertex object = kNoVertex;
    Distance distance = kInfinity;

    friend bool operator==(const KnnEntry&, const KnnEntry&) = default;
};

inline bool entry_less(const KnnEntry& a, const KnnEntry& b) {
    return std::tie(a.distance, a.object) < std::tie(b.distance, b.object);
}

/// Fixed-stride storage of n lists with capacity k each.
class KnnTable {
public:
    KnnTable() = default;
    KnnTable(std::size_t num_vertices, std::size_t k)
        : k_(k), slots_(num_vertices * k), lengths_(num_vertices, 0) {
        if (k == 0) throw UsageError("k must be at least 1");
        if (k > 0xFFFF) throw UsageError("k must fit in 16 bits");
    }

    std::size_t num_vertices() const noexcept { return lengths_.size(); }
    std::size_t k() const noexcept { return k_; }
    std::size_t length(Vertex v) const { return lengths_[v]; }
    bool full(Vertex v) const { return lengths_[v] == k_; }

    std::span<const KnnEntry> list(Vertex v) const { return {slots_.data() + v * k_, lengths_[v]}; }

    /// Largest stored distance, or kInfinity when the list has free capacity.
    Distance kth_distance(Vertex v) const {
        return full(v) ? slots_[v * k_ + k_ - 1].distance : kInfinity;
    }

    void assign(Vertex v, std::span<const KnnEntry> entries) {
        if (entries.size() > k_) throw UsageError("list longer than k");
        std::copy(entries.begin(), entries.end(), slots_.begin() + static_cast<std::ptrdiff_t>(v * k_));
        lengths_[v] = static_cast<std::uint16_t>(entries.size());
    }

    /// Inserts at the sorted position, dropping the last entry when full.
    void insert_sorted(Vertex v, KnnEntry e) {
        KnnEntry* first = slots_.data() + v * k_;
        std::size_t len = lengths_[v];
        if (len == k_) --len;
        KnnEntry* pos = std::upper_bound(first, first + len, e, entry_less);
        std::move_backward(pos, first + len, first + len + 1);
        *pos = e;
        lengths_[v] = static_cast<std::uint16_t>(len + 1);
    }

    /// Removes `object` if present; returns whether it was.
    bool erase(Vertex v, Vertex object) {
        KnnEntry* first = slots_.data() + v * k_;
        KnnEntry* last = first + lengths_[v];
        KnnEntry* it = std::find_if(first, last, [&](const KnnEntry& e) { return e.object == object; });
        if (it == last) return false;
        std::move(it + 1, last, it);
        --lengths_[v];
        return true;
    }

    bool contains(Vertex v, Vertex object) const {
        const auto l = list(v);
        return std::any_of(l.begin(), l.end(), [&](const KnnEntry& e) { return e.object == object; });
    }

    std::size_t total_entries() const {
        std::size_t total = 0;
        for (auto len : lengths_) total += len;
        return total;
    }

    friend bool operator==(const KnnTable& a, const KnnTable& b) {
        if (a.k_ != b.k_ || a.lengths_ != b.lengths_) return false;
        for (Vertex v = 0; v < a.num_vertices(); ++v)
            if (!std::ranges::equal(a.list(v), b.list(v))) return false;
        return true;
    }

private:
    std::size_t k_ = 0;
    std::vector<KnnEntry> slots_;
    std::vector<std::uint16_t> lengths_;
};

/// V_k^<: per-vertex kNN restricted to the decreasing-rank subgraph, under
/// decreasing-rank distance.
struct PartialKnn {
    KnnTable table;

    std::size_t k() const noexcept { return table.k(); }
    std::span<const KnnEntry> list(Vertex v) const { return table.list(v); }
    friend bool operator==(const PartialKnn&, const PartialKnn&) = default;
};

/// V_k: the index proper. Each list holds min(k, |M|) entries sorted by (distance, object).
struct KnnIndex {
    KnnTable table;

    std::size_t num_vertices() const noexcept { return table.num_vertices(); }
    std::size_t k() const noexcept { return table.k(); }
    std::span<const KnnEntry> list(Vertex v) const { return table.list(v); }
    std::size_t total_entries() const { return table.total_entries(); }
    friend bool operator==(const KnnIndex&, const KnnIndex&) = default;
};

}  // namespace knnidx
