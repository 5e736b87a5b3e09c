#ifndef GRIDPACK_MATRIX_HPP
#define GRIDPACK_MATRIX_HPP

#include <cstddef>
#include <vector>

namespace gridpack {

// Small row-major matrix for cell weights.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<float> v;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), v(static_cast<std::size_t>(r) * c) {}

  float& at(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
  float at(int r, int c) const {
    return v[static_cast<std::size_t>(r) * cols + c];
  }
};

// acc[j] += x . M[:, j] for all j. x has M.rows entries, acc has M.cols.
inline void add_vec_mat(const float* x, const Mat& m, float* acc) {
  for (int k = 0; k < m.rows; ++k) {
    const float xk = x[k];
    const float* row = m.v.data() + static_cast<std::size_t>(k) * m.cols;
    for (int j = 0; j < m.cols; ++j) acc[j] += xk * row[j];
  }
}

}  // namespace gridpack

#endif
