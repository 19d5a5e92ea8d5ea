#include "sbmsdp/matrix.hpp"

#include <cmath>

namespace sbmsdp {

SymmetricMatrix::SymmetricMatrix(Eigen::Index n)
    : entries_(Eigen::MatrixXd::Zero(n, n)) {
  if (n < 0) throw std::invalid_argument("SymmetricMatrix: negative dimension");
}

SymmetricMatrix::SymmetricMatrix(Eigen::MatrixXd entries)
    : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols()) {
    throw DimensionError("SymmetricMatrix: matrix is not square");
  }
  const Eigen::Index n = entries_.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double v = entries_(i, j);
      if (!std::isfinite(v)) {
        throw std::invalid_argument("SymmetricMatrix: non-finite entry at (" +
                                    std::to_string(i) + ", " +
                                    std::to_string(j) + ")");
      }
      if (i < j && v != entries_(j, i)) {
        throw std::invalid_argument("SymmetricMatrix: asymmetric entry at (" +
                                    std::to_string(i) + ", " +
                                    std::to_string(j) + ")");
      }
    }
  }
}

SymmetricMatrix SymmetricMatrix::from_upper(const Eigen::MatrixXd& entries) {
  if (entries.rows() != entries.cols()) {
    throw DimensionError("SymmetricMatrix::from_upper: matrix is not square");
  }
  Eigen::MatrixXd full = entries.triangularView<Eigen::Upper>();
  full.triangularView<Eigen::StrictlyLower>() =
      full.transpose().triangularView<Eigen::StrictlyLower>();
  return SymmetricMatrix(std::move(full));
}

SymmetricMatrix SymmetricMatrix::diagonal(std::span<const double> d) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d.size()),
                                            static_cast<Eigen::Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) {
    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = d[i];
  }
  return SymmetricMatrix(std::move(m));
}

SymmetricMatrix SymmetricMatrix::constant(Eigen::Index n, double value) {
  return SymmetricMatrix(Eigen::MatrixXd::Constant(n, n, value));
}

void SymmetricMatrix::set(Eigen::Index i, Eigen::Index j, double value) {
  if (!std::isfinite(value)) {
    throw std::invalid_argument("SymmetricMatrix::set: non-finite value");
  }
  entries_(i, j) = value;
  entries_(j, i) = value;
}

double SymmetricMatrix::inner(const Eigen::MatrixXd& other) const {
  require_same_dim(n(), other.rows(), "SymmetricMatrix::inner");
  require_same_dim(n(), other.cols(), "SymmetricMatrix::inner");
  return entries_.cwiseProduct(other).sum();
}

double SymmetricMatrix::max_abs() const {
  return n() == 0 ? 0.0 : entries_.cwiseAbs().maxCoeff();
}

bool SymmetricMatrix::is_zero() const {
  return n() == 0 || (entries_.array() == 0.0).all();
}

SymmetricMatrix SymmetricMatrix::operator-() const {
  return SymmetricMatrix(Eigen::MatrixXd(-entries_), Trusted{});
}

SymmetricMatrix operator+(const SymmetricMatrix& a, const SymmetricMatrix& b) {
  require_same_dim(a.n(), b.n(), "SymmetricMatrix +");
  return SymmetricMatrix(Eigen::MatrixXd(a.entries_ + b.entries_),
                         SymmetricMatrix::Trusted{});
}

SymmetricMatrix operator-(const SymmetricMatrix& a, const SymmetricMatrix& b) {
  require_same_dim(a.n(), b.n(), "SymmetricMatrix -");
  return SymmetricMatrix(Eigen::MatrixXd(a.entries_ - b.entries_),
                         SymmetricMatrix::Trusted{});
}

SymmetricMatrix operator*(double c, const SymmetricMatrix& a) {
  if (!std::isfinite(c)) {
    throw std::invalid_argument("SymmetricMatrix *: non-finite scalar");
  }
  return SymmetricMatrix(Eigen::MatrixXd(c * a.entries_),
                         SymmetricMatrix::Trusted{});
}

}  // namespace sbmsdp
