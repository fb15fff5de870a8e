#pragma once

#include <iosfwd>
#include <string>

#include "psdg/sparse.hpp"

namespace psdg {

/// Reads `%%MatrixMarket matrix coordinate (real|integer|pattern)
/// (general|symmetric)`. Symmetric files are expanded to both triangles.
SparseMatrix read_matrix_market(std::istream& in);
SparseMatrix read_matrix_market_file(const std::string& path);

/// Writes coordinate real general, one-based indices, 17 significant digits.
void write_matrix_market(std::ostream& out, const SparseMatrix& m,
                         const std::string& comment = {});
void write_matrix_market_file(const std::string& path, const SparseMatrix& m,
                              const std::string& comment = {});

}  // namespace psdg
