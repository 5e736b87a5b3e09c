#ifndef GRIDPACK_GRID_IO_HPP
#define GRIDPACK_GRID_IO_HPP

#include <iosfwd>
#include <string>

#include "gridpack/grid.hpp"

namespace gridpack {

// Binary PGM (P5, maxval 255); pixel p maps to p / 255.0, channels = 1.
ImageGrid read_pgm(const std::string& path);
ImageGrid read_pgm(std::istream& is, const std::string& origin);

// Rows of comma-separated reals, one grid row per line, channels = 1.
ImageGrid read_csv_grid(const std::string& path);
ImageGrid read_csv_grid(std::istream& is, const std::string& origin);

}  // namespace gridpack

#endif
