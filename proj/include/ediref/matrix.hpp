#ifndef EDIREF_MATRIX_HPP
#define EDIREF_MATRIX_HPP

#include <cassert>
#include <cstddef>
#include <vector>

namespace ediref {

// Dense row-major double matrix. Small and boring on purpose: every model in
// this project is desk-scale, and doubles keep gradient checks and metric
// oracles exact to tight tolerances.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

  double& at(int r, int c) {
    assert(r >= 0 && r < rows && c >= 0 && c < cols);
    return data[static_cast<std::size_t>(r) * cols + c];
  }
  double at(int r, int c) const {
    assert(r >= 0 && r < rows && c >= 0 && c < cols);
    return data[static_cast<std::size_t>(r) * cols + c];
  }

  bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
};

// out = a * b, (m x k) * (k x n).
inline Matrix matmul(const Matrix& a, const Matrix& b) {
  assert(a.cols == b.rows);
  Matrix out(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i) {
    for (int k = 0; k < a.cols; ++k) {
      const double aik = a.at(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols; ++j) {
        out.at(i, j) += aik * b.at(k, j);
      }
    }
  }
  return out;
}

}  // namespace ediref

#endif  // EDIREF_MATRIX_HPP
