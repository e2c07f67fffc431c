#pragma once

// DIMACS 9th challenge shortest-path format (.gr).
//
//   c <comment>
//   p sp <n> <m>
//   a <u> <v> <w>        1-based ids, w >= 1
//
// Reciprocal arcs collapse into one undirected edge; if the two directions
// disagree, or an arc repeats, the smaller weight wins.

#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "knnidx/road_network.hpp"

namespace knnidx {

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

template <typename Int>
std::optional<Int> parse_int(std::string_view s) {
    Int value{};
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, value);
    if (ec != std::errc{} || ptr != end) return std::nullopt;
    return value;
}

}  // namespace detail

inline RoadNetwork parse_dimacs_gr(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    std::optional<std::uint64_t> n;
    std::uint64_t declared_arcs = 0;
    std::uint64_t seen_arcs = 0;
    std::vector<EdgeTriple> edges;

    while (std::getline(in, line)) {
        ++lineno;
        const auto tok = detail::split_ws(line);
        if (tok.empty() || tok[0] == "c") continue;
        if (tok[0] == "p") {
            if (n) throw ParseError(lineno, "duplicate problem line");
            if (tok.size() != 4 || tok[1] != "sp") throw ParseError(lineno, "expected 'p sp <n> <m>'");
            const auto nv = detail::parse_int<std::uint64_t>(tok[2]);
            const auto mv = detail::parse_int<std::uint64_t>(tok[3]);
            if (!nv || !mv) throw ParseError(lineno, "bad vertex or arc count");
            if (*nv == 0) throw ParseError(lineno, "graph must have at least one vertex");
            if (*nv >= (std::uint64_t{1} << 31)) throw ParseError(lineno, "vertex count too large");
            n = *nv;
            declared_arcs = *mv;
            edges.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(declared_arcs, 1u << 26)));
        } else if (tok[0] == "a") {
            if (!n) throw ParseError(lineno, "arc before problem line");
            if (tok.size() != 4) throw ParseError(lineno, "expected 'a <u> <v> <w>'");
            const auto u = detail::parse_int<std::int64_t>(tok[1]);
            const auto v = detail::parse_int<std::int64_t>(tok[2]);
            const auto w = detail::parse_int<std::int64_t>(tok[3]);
            if (!u || !v || !w) throw ParseError(lineno, "non-integer field in arc");
            const auto nn = static_cast<std::int64_t>(*n);
            if (*u < 1 || *u > nn) throw ParseError(lineno, "vertex id out of range: " + std::string(tok[1]));
            if (*v < 1 || *v > nn) throw ParseError(lineno, "vertex id out of range: " + std::string(tok[2]));
            if (*w < 1) throw ParseError(lineno, "arc weight must be >= 1, got " + std::string(tok[3]));
            if (*w > static_cast<std::int64_t>(std::numeric_limits<Weight>::max()))
                throw ParseError(lineno, "arc weight exceeds 32 bits");
            ++seen_arcs;
            edges.push_back({static_cast<Vertex>(*u - 1), static_cast<Vertex>(*v - 1), static_cast<Weight>(*w)});
        } else {
            throw ParseError(lineno, "unrecognized line type '" + std::string(tok[0]) + "'");
        }
    }
    if (!n) throw ParseError(0, "missing problem line");
    if (seen_arcs != declared_arcs)
        throw ParseError(0, "problem line declares " + std::to_string(declared_arcs) + " arcs, found " +
                                std::to_string(seen_arcs));
    return RoadNetwork::from_edges(static_cast<std::size_t>(*n), edges);
}

inline RoadNetwork parse_dimacs_gr(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_dimacs_gr(in);
}

inline RoadNetwork load_dimacs_gr(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open graph file: " + path);
    return parse_dimacs_gr(in);
}

/// Writes both arc directions for every edge, so `m` in the problem line is 2x edges.
inline void write_dimacs_gr(std::ostream& out, const RoadNetwork& g) {
    out << "p sp " << g.num_vertices() << ' ' << 2 * g.num_edges() << '\n';
    for (Vertex u = 0; u < g.num_vertices(); ++u)
        for (const auto& a : g.neighbors(u)) out << "a " << u + 1 << ' ' << a.to + 1 << ' ' << a.weight << '\n';
}

inline std::string to_dimacs_gr(const RoadNetwork& g) {
    std::ostringstream out;
    write_dimacs_gr(out, g);
    return out.str();
}

}  // namespace knnidx
