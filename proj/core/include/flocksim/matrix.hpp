#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace flocksim {

/// Dense row-major matrix of doubles.  Deliberately minimal: the analysis
/// routines below and the simulator need products, row statistics, and
/// entrywise scans on small matrices (tens of rows), nothing more.
class DenseMatrix {
public:
  DenseMatrix() = default;

  /// rows x cols matrix filled with `value`.  Throws std::invalid_argument
  /// for non-positive dimensions.
  DenseMatrix(int rows, int cols, double value = 0.0);

  /// Build from nested initializer-style data; every row must have the same
  /// length and every entry must be finite.
  static DenseMatrix from_rows(const std::vector<std::vector<double>>& rows);

  static DenseMatrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& at(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  double at(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  /// True when every entry is finite (no NaN, no infinity).
  bool all_finite() const;

  bool same_shape(const DenseMatrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

/// Ergodicity coefficient  mu(A) = min over row pairs (i, j) of
/// sum_k min(a_ik, a_jk).  For a 1x1 matrix this degenerates to a_11.
/// Throws std::invalid_argument on non-square input or any negative entry.
double ergodicity_coefficient(const DenseMatrix& a);

/// A nonnegative matrix is scrambling when mu(A) > tol.  `tol` defaults to
/// exact zero; pass a small positive value (e.g. 1e-12) when the entries are
/// themselves results of floating-point computation.
bool is_scrambling(const DenseMatrix& a, double tol = 0.0);

/// Row-stochastic test: every entry >= -tol and every row sums to 1 within
/// tol.  Requires a square matrix.
bool is_stochastic(const DenseMatrix& a, double tol);

/// Largest Euclidean distance between any two rows (0 for a single row).
double row_diameter(const DenseMatrix& m);

/// Frobenius norm, computed as the direct sum of squared entries.
double frobenius_norm(const DenseMatrix& m);

/// Left-to-right product of a non-empty list of conformable matrices.
/// Throws std::invalid_argument on an empty list or a dimension mismatch.
DenseMatrix matrix_product(const std::vector<DenseMatrix>& factors);

DenseMatrix matrix_multiply(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix matrix_add(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix matrix_scale(const DenseMatrix& a, double s);

/// Entrywise comparison helpers.
double max_abs_difference(const DenseMatrix& a, const DenseMatrix& b);

/// CSV round-trip: one line per row, entries comma-separated, printed with
/// 17 significant digits so values survive the round trip bit-exactly.
std::string matrix_to_csv(const DenseMatrix& m);
DenseMatrix matrix_from_csv(const std::string& text);

}  // namespace flocksim
