#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace knnidx {

/// Internal vertex id, 0-based and dense.
using Vertex = std::uint32_t;

/// Edge weight as read from input, always >= 1.
using Weight = std::uint32_t;

/// Path length. Sums of at most n 32-bit weights fit comfortably.
using Distance = std::uint64_t;

inline constexpr Distance kInfinity = std::numeric_limits<Distance>::max();
inline constexpr Vertex kNoVertex = std::numeric_limits<Vertex>::max();

/// Malformed textual input. Carries the 1-based line number when known.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Input that parses but violates a structural requirement (connectivity, ranges).
class GraphError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad argument to a library call (unknown vertex, k out of range, ...).
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace knnidx
