#pragma once

#include "sbmsdp/matrix.hpp"

#include <iosfwd>
#include <string>

namespace sbmsdp {

// Flat text: first line n, then n rows of n space-separated reals.
// Throws std::runtime_error on malformed input and std::invalid_argument
// when the entries are not symmetric.
SymmetricMatrix read_matrix(std::istream& in);
SymmetricMatrix read_matrix_file(const std::string& path);

// Writes with 17 significant digits so a round trip is exact.
void write_matrix(std::ostream& out, const SymmetricMatrix& M);
void write_matrix_file(const std::string& path, const SymmetricMatrix& M);

}  // namespace sbmsdp
