#include "pbrs/matrix.hpp"

#include <algorithm>
#include <istream>
#include <sstream>
#include <utility>

#include "pbrs/gf256.hpp"

namespace pbrs {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

Matrix Matrix::mul(const Matrix& rhs) const {
  if (cols_ != rhs.rows_) throw DimensionMismatch("matrix product shape mismatch");
  Matrix out(rows_, rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t t = 0; t < cols_; ++t) {
      const std::uint8_t a = at(i, t);
      if (a == 0) continue;
      const std::uint8_t* row = gf256::mul_row(a);
      for (std::size_t j = 0; j < rhs.cols_; ++j)
        out.at(i, j) ^= row[rhs.at(t, j)];
    }
  }
  return out;
}

Matrix Matrix::select_rows(std::span<const int> row_indices) const {
  Matrix out(row_indices.size(), cols_);
  for (std::size_t i = 0; i < row_indices.size(); ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      out.at(i, j) = at(static_cast<std::size_t>(row_indices[i]), j);
  return out;
}

Matrix vandermonde(std::span<const std::uint8_t> points, std::size_t cols) {
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      if (points[i] == points[j])
        throw DuplicateEvaluationPoint("duplicate evaluation point " +
                                       std::to_string(points[i]));
  Matrix m(points.size(), cols);
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j)
      m.at(i, j) = gf256::pow(points[i], static_cast<unsigned>(j));
  return m;
}

Matrix invert(const Matrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("inversion of non-square matrix");
  const std::size_t n = m.rows();
  Matrix a = m;
  Matrix out = Matrix::identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    // first nonzero pivot; exact field, no magnitude concerns
    std::size_t piv = col;
    while (piv < n && a.at(piv, col) == 0) ++piv;
    if (piv == n) throw SingularMatrix("singular matrix");
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a.at(col, j), a.at(piv, j));
        std::swap(out.at(col, j), out.at(piv, j));
      }
    }
    const std::uint8_t pinv = gf256::inv(a.at(col, col));
    const std::uint8_t* prow = gf256::mul_row(pinv);
    for (std::size_t j = 0; j < n; ++j) {
      a.at(col, j) = prow[a.at(col, j)];
      out.at(col, j) = prow[out.at(col, j)];
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const std::uint8_t f = a.at(r, col);
      if (f == 0) continue;
      const std::uint8_t* frow = gf256::mul_row(f);
      for (std::size_t j = 0; j < n; ++j) {
        a.at(r, j) ^= frow[a.at(col, j)];
        out.at(r, j) ^= frow[out.at(col, j)];
      }
    }
  }
  return out;
}

bool is_invertible(const Matrix& m) {
  try {
    invert(m);
    return true;
  } catch (const SingularMatrix&) {
    return false;
  }
}

std::vector<std::uint8_t> mat_vec_mul(const Matrix& m, std::span<const std::uint8_t> v) {
  if (v.size() != m.cols()) throw DimensionMismatch("vector length != matrix cols");
  std::vector<std::uint8_t> out(m.rows(), 0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    std::uint8_t acc = 0;
    for (std::size_t j = 0; j < m.cols(); ++j)
      acc ^= gf256::mul(m.at(i, j), v[j]);
    out[i] = acc;
  }
  return out;
}

GeneratorMatrix systematize(const Matrix& m) {
  if (m.rows() < m.cols()) throw DimensionMismatch("systematize needs rows >= cols");
  const std::size_t k = m.cols();
  std::vector<int> top(k);
  for (std::size_t i = 0; i < k; ++i) top[i] = static_cast<int>(i);
  Matrix t = invert(m.select_rows(top));
  GeneratorMatrix g;
  g.k = static_cast<int>(k);
  g.r = static_cast<int>(m.rows() - k);
  g.matrix = m.mul(t);
  return g;
}

GeneratorMatrix rs_generator(int k, int r) {
  if (k < 1 || r < 1 || k + r > 256)
    throw DimensionMismatch("code parameters out of range: k=" + std::to_string(k) +
                            " r=" + std::to_string(r));
  GeneratorMatrix g;
  g.k = k;
  g.r = r;
  g.matrix = Matrix(static_cast<std::size_t>(k + r), static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) g.matrix.at(i, i) = 1;
  for (int j = 0; j < r; ++j) {
    const std::uint8_t alpha = gf256::pow(gf256::kGenerator, static_cast<unsigned>(j));
    for (int c = 0; c < k; ++c)
      g.matrix.at(static_cast<std::size_t>(k + j), static_cast<std::size_t>(c)) =
          gf256::pow(alpha, static_cast<unsigned>(c));
  }
  return g;
}

bool is_mds(const GeneratorMatrix& g) {
  const int n = g.k + g.r;
  std::vector<int> idx(static_cast<std::size_t>(g.k));
  for (int i = 0; i < g.k; ++i) idx[static_cast<std::size_t>(i)] = i;
  // iterate all k-combinations of the n rows
  while (true) {
    if (!is_invertible(g.matrix.select_rows(idx))) return false;
    int i = g.k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - g.k + i) --i;
    if (i < 0) break;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < g.k; ++j)
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
  return true;
}

std::string matrix_to_hex(const Matrix& m) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(m.rows() * (m.cols() * 3 + 1));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out.push_back(' ');
      const std::uint8_t v = m.at(i, j);
      out.push_back(digits[v >> 4]);
      out.push_back(digits[v & 0xf]);
    }
    out.push_back('\n');
  }
  return out;
}

Matrix matrix_from_hex(std::istream& in) {
  std::vector<std::vector<std::uint8_t>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::vector<std::uint8_t> row;
    std::string tok;
    while (ls >> tok) row.push_back(static_cast<std::uint8_t>(std::stoul(tok, nullptr, 16)));
    if (!rows.empty() && row.size() != rows.front().size())
      throw DimensionMismatch("ragged hex matrix");
    rows.push_back(std::move(row));
  }
  Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m.at(i, j) = rows[i][j];
  return m;
}

}  // namespace pbrs
