#include "gridpack/grid_io.hpp"

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gridpack/errors.hpp"

namespace gridpack {

namespace {

// Next whitespace-separated token, skipping '#' comment lines.
std::string pgm_token(std::istream& is) {
  std::string tok;
  int ch;
  while ((ch = is.get()) != EOF) {
    if (ch == '#') {
      while ((ch = is.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  return tok;
}

int parse_positive(const std::string& tok, const std::string& origin,
                   const char* what) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(tok, &pos);
    if (pos != tok.size() || v < 1) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(origin + ": bad " + std::string(what) + " '" + tok + "'");
  }
}

}  // namespace

ImageGrid read_pgm(std::istream& is, const std::string& origin) {
  const std::string magic = pgm_token(is);
  if (magic != "P5") {
    throw ParseError(origin + ": expected P5 magic, got '" + magic + "'");
  }
  const int width = parse_positive(pgm_token(is), origin, "width");
  const int height = parse_positive(pgm_token(is), origin, "height");
  const int maxval = parse_positive(pgm_token(is), origin, "maxval");
  if (maxval != 255) {
    throw ParseError(origin + ": only 8-bit (maxval 255) PGM is supported");
  }
  std::vector<unsigned char> raw(static_cast<std::size_t>(width) * height);
  if (!is.read(reinterpret_cast<char*>(raw.data()),
               static_cast<std::streamsize>(raw.size()))) {
    throw ParseError(origin + ": truncated pixel data");
  }
  ImageGrid g = grid_create(height, width, 1, 0.0f);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    g.data[i] = static_cast<float>(raw[i]) / 255.0f;
  }
  return g;
}

ImageGrid read_pgm(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ParseError("cannot open " + path);
  return read_pgm(is, path);
}

ImageGrid read_csv_grid(std::istream& is, const std::string& origin) {
  std::vector<std::vector<float>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<float> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t pos = 0;
        row.push_back(std::stof(cell, &pos));
        while (pos < cell.size() && std::isspace(cell[pos])) ++pos;
        if (pos != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ParseError(origin + ":" + std::to_string(line_no) +
                         ": bad value '" + cell + "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(origin + ":" + std::to_string(line_no) +
                       ": row has " + std::to_string(row.size()) +
                       " values, expected " +
                       std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty() || rows.front().empty()) {
    throw ParseError(origin + ": no data rows");
  }
  ImageGrid g = grid_create(static_cast<int>(rows.size()),
                            static_cast<int>(rows.front().size()), 1, 0.0f);
  for (int r = 0; r < g.height; ++r) {
    for (int c = 0; c < g.width; ++c) {
      g.at(r, c) = rows[r][c];
    }
  }
  return g;
}

ImageGrid read_csv_grid(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open " + path);
  return read_csv_grid(is, path);
}

}  // namespace gridpack
