#ifndef GRIDPACK_ERRORS_HPP
#define GRIDPACK_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gridpack {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad dimensions, channel mismatches, grouping divisibility violations.
struct ShapeError : Error {
  using Error::Error;
};

// Bad argument values (empty lists, zero counts, non-finite weights).
struct ArgumentError : Error {
  using Error::Error;
};

// Inconsistent packing/chunking layouts, non-integer scaled offsets.
struct LayoutError : Error {
  using Error::Error;
};

// Malformed input files (CSV, PGM, model containers).
struct ParseError : Error {
  using Error::Error;
};

// Memory budget cannot hold even a single example.
struct CapacityError : Error {
  using Error::Error;
};

// A strided stage would produce an empty output for a too-small example.
struct StageUnderflowError : Error {
  using Error::Error;
};

}  // namespace gridpack

#endif
