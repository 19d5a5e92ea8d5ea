#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

namespace sbmsdp {

// Dense real symmetric matrix with finite entries. Symmetry is exact
// (entries[i][j] == entries[j][i] bitwise), which every constructor enforces.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;

  // Zero matrix of dimension n.
  explicit SymmetricMatrix(Eigen::Index n);

  // Validates exact symmetry and finiteness; throws std::invalid_argument.
  explicit SymmetricMatrix(Eigen::MatrixXd entries);

  // Builds from the upper triangle of `entries`, mirroring it below.
  static SymmetricMatrix from_upper(const Eigen::MatrixXd& entries);

  static SymmetricMatrix diagonal(std::span<const double> d);
  static SymmetricMatrix constant(Eigen::Index n, double value);

  Eigen::Index n() const { return entries_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const {
    return entries_(i, j);
  }
  const Eigen::MatrixXd& dense() const { return entries_; }

  // Sets (i, j) and (j, i) together.
  void set(Eigen::Index i, Eigen::Index j, double value);

  double trace() const { return entries_.trace(); }
  // Frobenius inner product <A, B> = sum_ij A_ij B_ij.
  double inner(const Eigen::MatrixXd& other) const;
  double max_abs() const;
  bool is_zero() const;

  SymmetricMatrix operator-() const;
  friend SymmetricMatrix operator+(const SymmetricMatrix& a,
                                   const SymmetricMatrix& b);
  friend SymmetricMatrix operator-(const SymmetricMatrix& a,
                                   const SymmetricMatrix& b);
  friend SymmetricMatrix operator*(double c, const SymmetricMatrix& a);

  friend bool operator==(const SymmetricMatrix& a, const SymmetricMatrix& b) {
    return a.entries_.rows() == b.entries_.rows() &&
           a.entries_.cols() == b.entries_.cols() &&
           (a.entries_.array() == b.entries_.array()).all();
  }

 private:
  struct Trusted {};
  SymmetricMatrix(Eigen::MatrixXd entries, Trusted)
      : entries_(std::move(entries)) {}

  Eigen::MatrixXd entries_;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline void require_same_dim(Eigen::Index a, Eigen::Index b,
                             const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" +
                         std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

}  // namespace sbmsdp
