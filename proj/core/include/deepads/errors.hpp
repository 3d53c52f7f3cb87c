#pragma once

#include <stdexcept>

namespace deepads {

// Common base so the CLI can catch the whole family at its boundary.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ShapeError : Error { using Error::Error; };       // bad or mismatched dimensions
struct NumericError : Error { using Error::Error; };     // non-finite value produced
struct StateError : Error { using Error::Error; };       // stale/mismatched cache or state
struct DomainError : Error { using Error::Error; };      // value outside its contract
struct EmptyInputError : Error { using Error::Error; };  // empty dataset or list
struct IoError : Error { using Error::Error; };
struct FormatError : Error { using Error::Error; };      // undecodable file
struct CheckpointError : Error { using Error::Error; };  // corrupt model checkpoint
struct AnnotationError : Error { using Error::Error; };  // invalid quad annotation

}  // namespace deepads
