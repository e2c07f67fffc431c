#pragma once

// Binary bundle: everything needed to answer and maintain queries without
// rebuilding. Little-endian, fixed-width fields.
//
//   header   magic "KNNIDX1\0" | version u32 | n u32 | m u64 | k u32 | |M| u32
//            | flags u32 | graph fingerprint u64 | section count u32 | checksum u64
//   section  tag u32 | payload length u64 | payload | checksum u64 (FNV-1a of payload)
//
// Sections, in this order:
//   ORDR  rank of each vertex, u32
//   BNGR  per vertex: count u32, then (neighbour u32, weight u64) in stored order
//   STAT  ten u64 counters (see detail::stat_fields)
//   OBJS  object ids ascending, u32
//   PKNN  per vertex: count u16, then (object u32, distance u64)
//   KNNI  same layout as PKNN

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>
#include <vector>

#include "knnidx/knn_builder.hpp"

namespace knnidx {

static_assert(std::endian::native == std::endian::little, "bundle I/O assumes a little-endian host");

inline constexpr std::uint32_t kBundleVersion = 1;
inline constexpr std::uint32_t kFlagBottomUp = 1u << 0;      // index produced by the bottom-up builder
inline constexpr std::uint32_t kFlagUpdated = 1u << 1;       // maintenance ran since the build
inline constexpr std::uint32_t kFlagPartialStale = 1u << 2;  // V_k^< no longer matches M (never set here)

class BundleError : public std::runtime_error {
public:
    enum class Kind { io, magic, version, checksum, truncated, malformed, fingerprint };
    BundleError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

/// Content hash of a road network: vertex count plus the sorted edge list.
inline std::uint64_t graph_fingerprint(const RoadNetwork& g) {
    Fnv1a h;
    h.update_value(static_cast<std::uint64_t>(g.num_vertices()));
    for (const auto& e : g.edges()) {
        h.update_value(e.u);
        h.update_value(e.v);
        h.update_value(e.weight);
    }
    return h.digest();
}

struct Bundle {
    std::uint64_t graph_fingerprint = 0;
    std::uint64_t graph_edges = 0;
    std::uint32_t flags = 0;
    BnGraph bn;
    PartialKnn partial;
    KnnIndex index;
    ObjectSet objects;
    BuildStats stats;

    std::size_t num_vertices() const noexcept { return index.num_vertices(); }
    std::size_t k() const noexcept { return index.k(); }

    friend bool operator==(const Bundle& a, const Bundle& b) {
        return a.graph_fingerprint == b.graph_fingerprint && a.graph_edges == b.graph_edges && a.flags == b.flags &&
               a.bn == b.bn && a.partial == b.partial && a.index == b.index && a.objects == b.objects &&
               a.stats == b.stats;
    }
};

inline Bundle make_bundle(const RoadNetwork& g, BuiltIndex built, ObjectSet objects, BuildAlgorithm algorithm) {
    Bundle b;
    b.graph_fingerprint = graph_fingerprint(g);
    b.graph_edges = g.num_edges();
    b.flags = algorithm == BuildAlgorithm::bottom_up ? kFlagBottomUp : 0;
    b.bn = std::move(built.bn);
    b.partial = std::move(built.partial);
    b.index = std::move(built.index);
    b.objects = std::move(objects);
    b.stats = built.stats;
    return b;
}

inline Bundle build_bundle(const RoadNetwork& g, ObjectSet objects, std::size_t k,
                           BuildAlgorithm algorithm = BuildAlgorithm::bidirectional) {
    auto built = build_knn_index(g, objects, k, algorithm);
    return make_bundle(g, std::move(built), std::move(objects), algorithm);
}

namespace bundle_layout {
inline constexpr std::array<char, 8> kMagic = {'K', 'N', 'N', 'I', 'D', 'X', '1', '\0'};
inline constexpr std::size_t kHeaderBytes = 8 + 4 + 4 + 8 + 4 + 4 + 4 + 8 + 4 + 8;
inline constexpr std::size_t kSectionOverhead = 4 + 8 + 8;
inline constexpr std::size_t kSectionCount = 6;
inline constexpr std::size_t kStatFields = 10;
inline constexpr std::size_t kEntryBytes = 4 + 8;
inline constexpr std::size_t kArcBytes = 4 + 8;

constexpr std::uint32_t tag(const char (&s)[5]) {
    return static_cast<std::uint32_t>(static_cast<unsigned char>(s[0])) |
           static_cast<std::uint32_t>(static_cast<unsigned char>(s[1])) << 8 |
           static_cast<std::uint32_t>(static_cast<unsigned char>(s[2])) << 16 |
           static_cast<std::uint32_t>(static_cast<unsigned char>(s[3])) << 24;
}
inline constexpr std::uint32_t kOrder = tag("ORDR");
inline constexpr std::uint32_t kGraph = tag("BNGR");
inline constexpr std::uint32_t kStats = tag("STAT");
inline constexpr std::uint32_t kObjects = tag("OBJS");
inline constexpr std::uint32_t kPartial = tag("PKNN");
inline constexpr std::uint32_t kIndex = tag("KNNI");
}  // namespace bundle_layout

/// Bytes taken by one persisted list table: a 16-bit count per vertex plus the entries.
inline std::size_t table_bytes(std::size_t num_vertices, std::size_t entries) {
    return 2 * num_vertices + bundle_layout::kEntryBytes * entries;
}

/// Persisted size of the index section payload (the index-size statistic).
inline std::size_t index_bytes(const KnnIndex& index) {
    return table_bytes(index.num_vertices(), index.total_entries());
}

/// Exact file size for a bundle with the given shape.
inline std::size_t predicted_bundle_size(std::size_t n, std::size_t bn_edges, std::size_t objects,
                                         std::size_t partial_entries, std::size_t index_entries) {
    using namespace bundle_layout;
    return kHeaderBytes + kSectionCount * kSectionOverhead + 4 * n                       // ORDR
           + 4 * n + 2 * bn_edges * kArcBytes                                             // BNGR
           + 8 * kStatFields                                                              // STAT
           + 4 * objects                                                                  // OBJS
           + table_bytes(n, partial_entries) + table_bytes(n, index_entries);             // PKNN, KNNI
}

inline std::size_t predicted_bundle_size(const Bundle& b) {
    return predicted_bundle_size(b.num_vertices(), b.bn.num_edges(), b.objects.size(), b.partial.table.total_entries(),
                                 b.index.total_entries());
}

namespace detail {

class ByteWriter {
public:
    template <typename T>
    void put(T value) {
        const auto* p = reinterpret_cast<const std::byte*>(&value);
        bytes_.insert(bytes_.end(), p, p + sizeof(T));
    }
    void put_bytes(std::span<const std::byte> b) { bytes_.insert(bytes_.end(), b.begin(), b.end()); }
    std::vector<std::byte>& bytes() noexcept { return bytes_; }

private:
    std::vector<std::byte> bytes_;
};

class ByteReader {
public:
    explicit ByteReader(std::span<const std::byte> bytes) : bytes_(bytes) {}

    template <typename T>
    T get() {
        need(sizeof(T));
        T value;
        std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return value;
    }
    std::span<const std::byte> take(std::size_t len) {
        need(len);
        auto out = bytes_.subspan(pos_, len);
        pos_ += len;
        return out;
    }
    std::size_t position() const noexcept { return pos_; }
    bool at_end() const noexcept { return pos_ == bytes_.size(); }

private:
    void need(std::size_t len) const {
        if (bytes_.size() - pos_ < len)
            throw BundleError(BundleError::Kind::truncated,
                              "bundle truncated at byte " + std::to_string(bytes_.size()) + " (needed " +
                                  std::to_string(pos_ + len) + ")");
    }
    std::span<const std::byte> bytes_;
    std::size_t pos_ = 0;
};

inline void write_table(ByteWriter& w, const KnnTable& t) {
    for (Vertex v = 0; v < t.num_vertices(); ++v) {
        w.put(static_cast<std::uint16_t>(t.length(v)));
        for (const auto& e : t.list(v)) {
            w.put(e.object);
            w.put(e.distance);
        }
    }
}

inline std::array<std::uint64_t, bundle_layout::kStatFields> stat_fields(const BuildStats& s) {
    return {s.graph.rho,          s.graph.tau, s.graph.tau_prime,  s.graph.edges_inserted, s.graph.edges_relaxed,
            s.graph.edges_removed, s.eta,       s.sssp_invocations, s.max_candidate_set,    s.max_partial_candidate_set};
}

[[noreturn]] inline void malformed(const std::string& what) {
    throw BundleError(BundleError::Kind::malformed, "malformed bundle: " + what);
}

inline KnnTable read_table(ByteReader& r, std::size_t n, std::size_t k, std::size_t num_objects_plus,
                           const char* name) {
    KnnTable t(n, k);
    std::vector<KnnEntry> list;
    for (Vertex v = 0; v < n; ++v) {
        const auto len = r.get<std::uint16_t>();
        if (len > k) malformed(std::string(name) + " list of vertex " + std::to_string(v + 1) + " exceeds k");
        list.resize(len);
        for (auto& e : list) {
            e.object = r.get<Vertex>();
            e.distance = r.get<Distance>();
            if (e.object >= num_objects_plus) malformed(std::string(name) + " entry names an unknown vertex");
        }
        for (std::size_t i = 1; i < list.size(); ++i)
            if (!entry_less(list[i - 1], list[i])) malformed(std::string(name) + " list is not sorted");
        t.assign(v, list);
    }
    return t;
}

}  // namespace detail

inline std::vector<std::byte> serialize_bundle(const Bundle& b) {
    using namespace bundle_layout;
    const std::size_t n = b.num_vertices();
    if (b.bn.num_vertices() != n || b.partial.table.num_vertices() != n || b.objects.num_vertices() != n ||
        b.partial.k() != b.k())
        throw UsageError("bundle parts disagree in size");

    detail::ByteWriter out;
    for (char c : kMagic) out.put(static_cast<std::uint8_t>(c));
    out.put(kBundleVersion);
    out.put(static_cast<std::uint32_t>(n));
    out.put(b.graph_edges);
    out.put(static_cast<std::uint32_t>(b.k()));
    out.put(static_cast<std::uint32_t>(b.objects.size()));
    out.put(b.flags);
    out.put(b.graph_fingerprint);
    out.put(static_cast<std::uint32_t>(kSectionCount));
    out.put(fnv1a(out.bytes()));

    auto section = [&](std::uint32_t tag, auto&& fill) {
        detail::ByteWriter payload;
        fill(payload);
        out.put(tag);
        out.put(static_cast<std::uint64_t>(payload.bytes().size()));
        out.put_bytes(payload.bytes());
        out.put(fnv1a(payload.bytes()));
    };
    section(kOrder, [&](detail::ByteWriter& w) {
        for (Vertex r : b.bn.order().ranks()) w.put(r);
    });
    section(kGraph, [&](detail::ByteWriter& w) {
        for (Vertex v = 0; v < n; ++v) {
            w.put(static_cast<std::uint32_t>(b.bn.neighbors(v).size()));
            for (const auto& a : b.bn.neighbors(v)) {
                w.put(a.to);
                w.put(a.weight);
            }
        }
    });
    section(kStats, [&](detail::ByteWriter& w) {
        for (auto x : detail::stat_fields(b.stats)) w.put(x);
    });
    section(kObjects, [&](detail::ByteWriter& w) {
        for (Vertex v : b.objects.sorted()) w.put(v);
    });
    section(kPartial, [&](detail::ByteWriter& w) { detail::write_table(w, b.partial.table); });
    section(kIndex, [&](detail::ByteWriter& w) { detail::write_table(w, b.index.table); });
    return std::move(out.bytes());
}

inline Bundle deserialize_bundle(std::span<const std::byte> bytes) {
    using namespace bundle_layout;
    using Kind = BundleError::Kind;
    detail::ByteReader in(bytes);

    const auto magic = in.take(kMagic.size());
    if (std::memcmp(magic.data(), kMagic.data(), kMagic.size()) != 0)
        throw BundleError(Kind::magic, "not a knn index bundle (bad magic)");
    const auto version = in.get<std::uint32_t>();
    if (version != kBundleVersion)
        throw BundleError(Kind::version, "unsupported bundle version " + std::to_string(version) + " (expected " +
                                             std::to_string(kBundleVersion) + ")");
    Bundle b;
    const std::size_t n = in.get<std::uint32_t>();
    b.graph_edges = in.get<std::uint64_t>();
    const std::size_t k = in.get<std::uint32_t>();
    const std::size_t num_objects = in.get<std::uint32_t>();
    b.flags = in.get<std::uint32_t>();
    b.graph_fingerprint = in.get<std::uint64_t>();
    const auto sections = in.get<std::uint32_t>();
    const auto header_sum = fnv1a(bytes.first(in.position()));
    if (in.get<std::uint64_t>() != header_sum) throw BundleError(Kind::checksum, "header checksum mismatch");
    if (sections != kSectionCount) detail::malformed("expected 6 sections, found " + std::to_string(sections));
    if (n == 0 || k == 0 || k > 0xFFFF || num_objects == 0 || num_objects > n)
        detail::malformed("header fields out of range");

    auto open_section = [&](std::uint32_t want, const char* name) {
        const auto tag = in.get<std::uint32_t>();
        if (tag != want) detail::malformed(std::string("expected section ") + name);
        const auto len = in.get<std::uint64_t>();
        if (len > bytes.size()) throw BundleError(Kind::truncated, std::string("section ") + name + " truncated");
        const auto payload = in.take(static_cast<std::size_t>(len));
        if (in.get<std::uint64_t>() != fnv1a(payload))
            throw BundleError(Kind::checksum, std::string("checksum mismatch in section ") + name);
        return detail::ByteReader(payload);
    };
    auto close_section = [](const detail::ByteReader& r, const char* name) {
        if (!r.at_end()) detail::malformed(std::string("trailing bytes in section ") + name);
    };

    auto ordr = open_section(kOrder, "ORDR");
    std::vector<Vertex> ranks(n);
    for (auto& r : ranks) r = ordr.get<Vertex>();
    close_section(ordr, "ORDR");
    VertexOrder order;
    try {
        order = VertexOrder::from_ranks(std::move(ranks));
    } catch (const std::exception& e) {
        detail::malformed(std::string("vertex order: ") + e.what());
    }

    auto bngr = open_section(kGraph, "BNGR");
    std::vector<std::vector<WeightedArc>> adjacency(n);
    for (auto& list : adjacency) {
        const auto count = bngr.get<std::uint32_t>();
        if (count >= n) detail::malformed("BN-Graph degree out of range");
        list.resize(count);
        for (auto& a : list) {
            a.to = bngr.get<Vertex>();
            a.weight = bngr.get<Distance>();
        }
    }
    close_section(bngr, "BNGR");

    auto stat = open_section(kStats, "STAT");
    std::array<std::uint64_t, kStatFields> f{};
    for (auto& x : f) x = stat.get<std::uint64_t>();
    close_section(stat, "STAT");
    b.stats.graph = {f[0], f[1], f[2], f[3], f[4], f[5]};
    b.stats.eta = f[6];
    b.stats.sssp_invocations = f[7];
    b.stats.max_candidate_set = f[8];
    b.stats.max_partial_candidate_set = f[9];
    try {
        b.bn = BnGraph::from_adjacency(std::move(order), adjacency, b.stats.graph);
    } catch (const std::exception& e) {
        detail::malformed(std::string("BN-Graph: ") + e.what());
    }
    if (b.bn.stats() != b.stats.graph) detail::malformed("stored tau / tau' disagree with the BN-Graph");

    auto objs = open_section(kObjects, "OBJS");
    std::vector<Vertex> members(num_objects);
    for (std::size_t i = 0; i < num_objects; ++i) {
        members[i] = objs.get<Vertex>();
        if (members[i] >= n || (i > 0 && members[i] <= members[i - 1])) detail::malformed("object list");
    }
    close_section(objs, "OBJS");
    b.objects = ObjectSet(n, members);

    auto pknn = open_section(kPartial, "PKNN");
    b.partial.table = detail::read_table(pknn, n, k, n, "PKNN");
    close_section(pknn, "PKNN");
    auto knni = open_section(kIndex, "KNNI");
    b.index.table = detail::read_table(knni, n, k, n, "KNNI");
    close_section(knni, "KNNI");

    if (!in.at_end()) detail::malformed("trailing bytes after last section");
    return b;
}

inline void save_bundle(const std::string& path, const Bundle& b) {
    const auto bytes = serialize_bundle(b);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw BundleError(BundleError::Kind::io, "cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw BundleError(BundleError::Kind::io, "write failed: " + path);
}

inline std::vector<std::byte> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw BundleError(BundleError::Kind::io, "cannot open " + path);
    std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::vector<std::byte> bytes(raw.size());
    std::memcpy(bytes.data(), raw.data(), raw.size());
    return bytes;
}

inline Bundle load_bundle(const std::string& path) { return deserialize_bundle(read_file_bytes(path)); }

/// Loads and checks that the bundle was built for `g`.
inline Bundle load_bundle(const std::string& path, const RoadNetwork& g) {
    auto b = load_bundle(path);
    const auto fp = graph_fingerprint(g);
    if (b.graph_fingerprint != fp || b.num_vertices() != g.num_vertices())
        throw BundleError(BundleError::Kind::fingerprint,
                          "bundle " + path + " was built for a different graph (fingerprint mismatch)");
    return b;
}

}  // namespace knnidx
