#include "sbmsdp/matrix_io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace sbmsdp {

SymmetricMatrix read_matrix(std::istream& in) {
  long long n = -1;
  if (!(in >> n) || n < 0) throw std::runtime_error("read_matrix: missing or invalid dimension");
  Eigen::MatrixXd m(n, n);
  for (long long i = 0; i < n; ++i) {
    for (long long j = 0; j < n; ++j) {
      if (!(in >> m(i, j))) {
        throw std::runtime_error("read_matrix: expected " + std::to_string(n * n) +
                                 " entries, stopped at row " + std::to_string(i));
      }
    }
  }
  std::string extra;
  if (in >> extra) throw std::runtime_error("read_matrix: trailing data after matrix");
  return SymmetricMatrix(std::move(m));
}

SymmetricMatrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_matrix(in);
}

void write_matrix(std::ostream& out, const SymmetricMatrix& M) {
  const Eigen::Index n = M.n();
  out << n << '\n';
  char buf[32];
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", M(i, j));
      if (j > 0) out << ' ';
      out << buf;
    }
    out << '\n';
  }
}

void write_matrix_file(const std::string& path, const SymmetricMatrix& M) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_matrix(out, M);
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace sbmsdp
