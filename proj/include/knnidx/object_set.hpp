#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "knnidx/dimacs.hpp"
#include "knnidx/generators.hpp"

namespace knnidx {

/// Candidate objects: a subset of the vertices with O(1) membership,
/// O(1) insertion and O(1) removal.
class ObjectSet {
public:
    ObjectSet() = default;

    ObjectSet(std::size_t num_vertices, std::span<const Vertex> members) : slot_(num_vertices, kNoVertex) {
        for (Vertex v : members) {
            if (v >= num_vertices) throw UsageError("object id out of range: " + std::to_string(v + 1));
            if (!contains(v)) add(v);
        }
        if (members_.empty()) throw UsageError("object set must not be empty");
    }

    std::size_t num_vertices() const noexcept { return slot_.size(); }
    std::size_t size() const noexcept { return members_.size(); }
    bool contains(Vertex v) const { return v < slot_.size() && slot_[v] != kNoVertex; }

    /// Members in insertion order (not sorted).
    std::span<const Vertex> members() const noexcept { return members_; }

    std::vector<Vertex> sorted() const {
        std::vector<Vertex> out(members_);
        std::sort(out.begin(), out.end());
        return out;
    }

    double density() const { return slot_.empty() ? 0.0 : static_cast<double>(size()) / slot_.size(); }

    void insert(Vertex v) {
        if (v >= slot_.size()) throw UsageError("unknown vertex " + std::to_string(v + 1));
        if (contains(v)) throw UsageError("vertex " + std::to_string(v + 1) + " is already an object");
        add(v);
    }

    void erase(Vertex v) {
        if (!contains(v)) throw UsageError("vertex " + std::to_string(v + 1) + " is not an object");
        if (members_.size() == 1) throw UsageError("cannot delete the last object");
        const Vertex pos = slot_[v];
        members_[pos] = members_.back();
        slot_[members_[pos]] = pos;
        members_.pop_back();
        slot_[v] = kNoVertex;
    }

    /// Order-insensitive equality.
    friend bool operator==(const ObjectSet& a, const ObjectSet& b) {
        return a.num_vertices() == b.num_vertices() && a.sorted() == b.sorted();
    }

private:
    void add(Vertex v) {
        slot_[v] = static_cast<Vertex>(members_.size());
        members_.push_back(v);
    }

    std::vector<Vertex> slot_;  // position in members_, or kNoVertex
    std::vector<Vertex> members_;
};

/// Uniformly samples max(1, round(density * n)) distinct vertices.
inline ObjectSet sample_objects(std::size_t num_vertices, double density, std::uint64_t seed) {
    if (!(density > 0.0) || density > 1.0) throw UsageError("density must lie in (0, 1]");
    const auto want = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(density * num_vertices)));
    const std::size_t count = std::min(want, num_vertices);
    std::vector<Vertex> pool(num_vertices);
    for (std::size_t i = 0; i < num_vertices; ++i) pool[i] = static_cast<Vertex>(i);
    Rng rng(seed);
    for (std::size_t i = 0; i < count; ++i) std::swap(pool[i], pool[i + rng.below(num_vertices - i)]);
    pool.resize(count);
    return ObjectSet(num_vertices, pool);
}

inline ObjectSet sample_objects(const RoadNetwork& g, double density, std::uint64_t seed) {
    return sample_objects(g.num_vertices(), density, seed);
}

/// One 1-based vertex id per line; blank lines and '#' comments are ignored.
inline ObjectSet parse_objects(std::istream& in, std::size_t num_vertices) {
    std::string line;
    std::size_t lineno = 0;
    std::vector<Vertex> ids;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        const auto tok = detail::split_ws(line);
        if (tok.empty()) continue;
        if (tok.size() != 1) throw ParseError(lineno, "expected a single vertex id");
        const auto id = detail::parse_int<std::int64_t>(tok[0]);
        if (!id) throw ParseError(lineno, "not an integer: '" + std::string(tok[0]) + "'");
        if (*id < 1 || *id > static_cast<std::int64_t>(num_vertices))
            throw ParseError(lineno, "object id out of range: " + std::string(tok[0]));
        ids.push_back(static_cast<Vertex>(*id - 1));
    }
    if (ids.empty()) throw ParseError(0, "object list is empty");
    return ObjectSet(num_vertices, ids);
}

inline ObjectSet parse_objects(std::string_view text, std::size_t num_vertices) {
    std::istringstream in{std::string(text)};
    return parse_objects(in, num_vertices);
}

inline ObjectSet load_objects(const std::string& path, std::size_t num_vertices) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open object file: " + path);
    return parse_objects(in, num_vertices);
}

inline void write_objects(std::ostream& out, const ObjectSet& objects) {
    for (Vertex v : objects.sorted()) out << v + 1 << '\n';
}

}  // namespace knnidx
