#include "flocksim/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace flocksim {

DenseMatrix::DenseMatrix(int rows, int cols, double value) : rows_(rows), cols_(cols) {
  if (rows <= 0 || cols <= 0) {
    throw std::invalid_argument("DenseMatrix: dimensions must be positive");
  }
  data_.assign(static_cast<std::size_t>(rows) * cols, value);
}

DenseMatrix DenseMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows.front().empty()) {
    throw std::invalid_argument("DenseMatrix::from_rows: empty input");
  }
  const int r = static_cast<int>(rows.size());
  const int c = static_cast<int>(rows.front().size());
  DenseMatrix m(r, c);
  for (int i = 0; i < r; ++i) {
    if (static_cast<int>(rows[i].size()) != c) {
      throw std::invalid_argument("DenseMatrix::from_rows: ragged rows");
    }
    for (int j = 0; j < c; ++j) {
      if (!std::isfinite(rows[i][j])) {
        throw std::invalid_argument("DenseMatrix::from_rows: non-finite entry");
      }
      m.at(i, j) = rows[i][j];
    }
  }
  return m;
}

DenseMatrix DenseMatrix::identity(int n) {
  DenseMatrix m(n, n, 0.0);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

bool DenseMatrix::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

double ergodicity_coefficient(const DenseMatrix& a) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("ergodicity_coefficient: matrix must be square");
  }
  const int n = a.rows();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (a.at(i, j) < 0.0) {
        throw std::invalid_argument("ergodicity_coefficient: negative entry");
      }
    }
  }
  if (n == 1) return a.at(0, 0);

  double mu = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += std::min(a.at(i, k), a.at(j, k));
      mu = std::min(mu, s);
    }
  }
  return mu;
}

bool is_scrambling(const DenseMatrix& a, double tol) {
  return ergodicity_coefficient(a) > tol;
}

bool is_stochastic(const DenseMatrix& a, double tol) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("is_stochastic: matrix must be square");
  }
  for (int i = 0; i < a.rows(); ++i) {
    double sum = 0.0;
    for (int j = 0; j < a.cols(); ++j) {
      if (a.at(i, j) < -tol) return false;
      sum += a.at(i, j);
    }
    if (std::abs(sum - 1.0) > tol) return false;
  }
  return true;
}

double row_diameter(const DenseMatrix& m) {
  double best = 0.0;
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = i + 1; j < m.rows(); ++j) {
      double d2 = 0.0;
      for (int k = 0; k < m.cols(); ++k) {
        const double diff = m.at(i, k) - m.at(j, k);
        d2 += diff * diff;
      }
      best = std::max(best, d2);
    }
  }
  return std::sqrt(best);
}

double frobenius_norm(const DenseMatrix& m) {
  double s = 0.0;
  for (double v : m.data()) s += v * v;
  return std::sqrt(s);
}

DenseMatrix matrix_multiply(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("matrix_multiply: dimension mismatch");
  }
  DenseMatrix out(a.rows(), b.cols(), 0.0);
  for (int i = 0; i < a.rows(); ++i) {
    for (int k = 0; k < a.cols(); ++k) {
      const double aik = a.at(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols(); ++j) {
        out.at(i, j) += aik * b.at(k, j);
      }
    }
  }
  return out;
}

DenseMatrix matrix_product(const std::vector<DenseMatrix>& factors) {
  if (factors.empty()) {
    throw std::invalid_argument("matrix_product: empty factor list");
  }
  DenseMatrix acc = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) {
    acc = matrix_multiply(acc, factors[i]);
  }
  return acc;
}

DenseMatrix matrix_add(const DenseMatrix& a, const DenseMatrix& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("matrix_add: shape mismatch");
  DenseMatrix out = a;
  for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] += b.data()[i];
  return out;
}

DenseMatrix matrix_scale(const DenseMatrix& a, double s) {
  DenseMatrix out = a;
  for (double& v : out.data()) v *= s;
  return out;
}

double max_abs_difference(const DenseMatrix& a, const DenseMatrix& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("max_abs_difference: shape mismatch");
  double best = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    best = std::max(best, std::abs(a.data()[i] - b.data()[i]));
  }
  return best;
}

std::string matrix_to_csv(const DenseMatrix& m) {
  std::string out;
  char buf[64];
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", m.at(i, j));
      out += buf;
      out += (j + 1 < m.cols()) ? ',' : '\n';
    }
  }
  return out;
}

DenseMatrix matrix_from_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      std::size_t pos = 0;
      double v;
      try {
        v = std::stod(cell, &pos);
      } catch (const std::exception&) {
        throw std::invalid_argument("matrix_from_csv: unparsable cell '" + cell + "'");
      }
      row.push_back(v);
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  return DenseMatrix::from_rows(rows);
}

}  // namespace flocksim
