#include "psdg/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace psdg {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

SparseMatrix read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty Matrix Market stream");
  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%MatrixMarket" || lower(object) != "matrix" ||
      lower(format) != "coordinate") {
    throw std::invalid_argument("only coordinate Matrix Market matrices are supported");
  }
  field = lower(field);
  symmetry = lower(symmetry);
  const bool pattern = field == "pattern";
  if (!pattern && field != "real" && field != "integer" && field != "double") {
    throw std::invalid_argument("unsupported Matrix Market field '" + field + "'");
  }
  const bool symmetric = symmetry == "symmetric";
  if (!symmetric && symmetry != "general") {
    throw std::invalid_argument("unsupported Matrix Market symmetry '" + symmetry + "'");
  }
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '%') break;
  }
  std::istringstream size_line(line);
  std::size_t rows = 0, cols = 0, entries = 0;
  if (!(size_line >> rows >> cols >> entries)) {
    throw std::invalid_argument("bad Matrix Market size line");
  }
  std::vector<Triplet> t;
  t.reserve(symmetric ? 2 * entries : entries);
  for (std::size_t k = 0; k < entries; ++k) {
    std::size_t i = 0, j = 0;
    double v = 1.0;
    if (!(in >> i >> j) || (!pattern && !(in >> v))) {
      throw std::invalid_argument("truncated Matrix Market data");
    }
    if (i == 0 || j == 0 || i > rows || j > cols) {
      throw std::invalid_argument("Matrix Market index out of range");
    }
    t.push_back({i - 1, j - 1, v});
    if (symmetric && i != j) t.push_back({j - 1, i - 1, v});
  }
  return SparseMatrix::from_triplets(rows, cols, std::move(t));
}

SparseMatrix read_matrix_market_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  return read_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const SparseMatrix& m,
                         const std::string& comment) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  if (!comment.empty()) {
    std::istringstream lines(comment);
    std::string l;
    while (std::getline(lines, l)) out << "% " << l << '\n';
  }
  out << m.rows() << ' ' << m.cols() << ' ' << m.nnz() << '\n';
  out << std::setprecision(17);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t k = m.row_offsets()[r]; k < m.row_offsets()[r + 1]; ++k) {
      out << r + 1 << ' ' << m.col_indices()[k] + 1 << ' ' << m.values()[k] << '\n';
    }
  }
}

void write_matrix_market_file(const std::string& path, const SparseMatrix& m,
                              const std::string& comment) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_matrix_market(out, m, comment);
}

}  // namespace psdg
