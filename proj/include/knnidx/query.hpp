#pragma once

#include <iterator>
#include <optional>
#include <vector>

#include "knnidx/knn_table.hpp"

namespace knnidx {

/// Counts list entries read by queries. Plain counter: one per reader thread.
struct TouchCounter {
    std::uint64_t entries = 0;
};

namespace detail {
inline void check_query(const KnnIndex& index, Vertex u, std::size_t k) {
    if (u >= index.num_vertices()) throw UsageError("unknown vertex " + std::to_string(u + 1));
    if (k == 0) throw UsageError("k must be at least 1");
    if (k > index.k())
        throw UsageError("requested k=" + std::to_string(k) + " exceeds the index's k=" + std::to_string(index.k()) +
                         "; rebuild the index with a larger k");
}
}  // namespace detail

/// Writes the first min(k, stored) entries of u's list into `out`.
inline std::size_t knn_query_into(const KnnIndex& index, Vertex u, std::size_t k, std::vector<KnnEntry>& out,
                                  TouchCounter* counter = nullptr) {
    detail::check_query(index, u, k);
    const auto list = index.list(u);
    const std::size_t take = std::min(k, list.size());
    out.assign(list.begin(), list.begin() + static_cast<std::ptrdiff_t>(take));
    if (counter) counter->entries += take;
    return take;
}

inline std::vector<KnnEntry> knn_query(const KnnIndex& index, Vertex u, std::size_t k,
                                       TouchCounter* counter = nullptr) {
    std::vector<KnnEntry> out;
    knn_query_into(index, u, k, out, counter);
    return out;
}

/// Emits u's neighbours one at a time, nearest first. Each step reads one entry.
class ProgressiveQuery {
public:
    ProgressiveQuery(const KnnIndex& index, Vertex u, TouchCounter* counter = nullptr)
        : list_((detail::check_query(index, u, 1), index.list(u))), counter_(counter) {}

    std::optional<KnnEntry> next() {
        if (pos_ == list_.size()) return std::nullopt;
        if (counter_) ++counter_->entries;
        return list_[pos_++];
    }

    std::size_t emitted() const noexcept { return pos_; }

    class iterator {
    public:
        using iterator_category = std::input_iterator_tag;
        using value_type = KnnEntry;
        using difference_type = std::ptrdiff_t;

        iterator() = default;
        explicit iterator(ProgressiveQuery* q) : q_(q) { advance(); }

        const KnnEntry& operator*() const { return *cur_; }
        iterator& operator++() {
            advance();
            return *this;
        }
        void operator++(int) { advance(); }
        friend bool operator==(const iterator& it, std::default_sentinel_t) { return !it.cur_; }

    private:
        void advance() { cur_ = q_->next(); }
        ProgressiveQuery* q_ = nullptr;
        std::optional<KnnEntry> cur_;
    };

    iterator begin() { return iterator(this); }
    std::default_sentinel_t end() { return {}; }

private:
    std::span<const KnnEntry> list_;
    std::size_t pos_ = 0;
    TouchCounter* counter_;
};

inline ProgressiveQuery progressive_query(const KnnIndex& index, Vertex u, TouchCounter* counter = nullptr) {
    return ProgressiveQuery(index, u, counter);
}

}  // namespace knnidx
