#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pbrs/error.hpp"

// Dense matrix algebra over GF(2^8): Vandermonde construction,
// systematization, Gauss-Jordan inversion. Matrices are immutable in
// practice after construction; all operations return new values.
namespace pbrs {

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), cells_(rows * cols, 0) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  std::uint8_t& at(std::size_t r, std::size_t c) { return cells_[r * cols_ + c]; }
  std::uint8_t at(std::size_t r, std::size_t c) const { return cells_[r * cols_ + c]; }

  std::span<const std::uint8_t> row(std::size_t r) const {
    return {cells_.data() + r * cols_, cols_};
  }

  Matrix mul(const Matrix& rhs) const;

  // new matrix formed from the given rows, in order
  Matrix select_rows(std::span<const int> row_indices) const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<std::uint8_t> cells_;
};

// row i = [1, p_i, p_i^2, ..., p_i^(cols-1)]; points must be distinct
Matrix vandermonde(std::span<const std::uint8_t> points, std::size_t cols);

// Gauss-Jordan with first-nonzero pivoting; throws SingularMatrix
Matrix invert(const Matrix& m);

bool is_invertible(const Matrix& m);

std::vector<std::uint8_t> mat_vec_mul(const Matrix& m, std::span<const std::uint8_t> v);

// Systematic (k+r) x k encoding matrix. Rows 0..k-1 are the identity; rows
// k..k+r-1 are the parity combinations.
struct GeneratorMatrix {
  int k = 0;
  int r = 0;
  Matrix matrix;

  std::span<const std::uint8_t> parity_row(int j) const { return matrix.row(k + j); }
};

// Right-multiplies m by the inverse of its top square block, yielding a
// systematic generator; rank of every row subset is preserved.
GeneratorMatrix systematize(const Matrix& m);

// Generator used by the RS codec: identity on top, parity row j evaluates
// the data polynomial at alpha^j (alpha = field generator). Parity row 0 is
// all-ones and row 1 is [1, 2, 4, ...], so a (2,2) code produces the
// parities (d0+d1, d0+2*d1).
GeneratorMatrix rs_generator(int k, int r);

// exhaustive any-k-rows invertibility check; feasible for small k+r only
bool is_mds(const GeneratorMatrix& g);

// fixture format: one matrix row per line, space-separated two-digit hex
std::string matrix_to_hex(const Matrix& m);
Matrix matrix_from_hex(std::istream& in);

}  // namespace pbrs
