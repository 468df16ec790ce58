#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace nsmp {

using EntityId = std::uint32_t;
using RelationId = std::uint32_t;

// Edge traversal direction relative to the stored (head, relation, tail) atom.
enum class Direction { HeadToTail, TailToHead };

enum class Polarity { Positive, Negative };

inline const char* to_string(Direction d) {
    return d == Direction::HeadToTail ? "head->tail" : "tail->head";
}

inline const char* to_string(Polarity p) {
    return p == Polarity::Positive ? "positive" : "negative";
}

class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

// Malformed input text (triple files, formulas, JSONL records).
class ParseError : public Error {
   public:
    using Error::Error;
};

// Binary file layout violations.
class FormatError : public Error {
   public:
    using Error::Error;
};

// Shape or size disagreement between components.
class DimensionError : public Error {
   public:
    using Error::Error;
};

// Structurally valid query the engine refuses to evaluate.
class UnsupportedQuery : public Error {
   public:
    using Error::Error;
};

}  // namespace nsmp
