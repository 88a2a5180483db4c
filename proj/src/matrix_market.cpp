#include "sdpcut/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <vector>

#include "sdpcut/errors.hpp"

namespace sdpcut {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// Next non-comment, non-blank line; returns false at EOF.
bool next_data_line(std::istream& in, std::string& line, int& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '%') continue;
    return true;
  }
  return false;
}

}  // namespace

SymMat read_matrix_market(std::istream& in) {
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line)) throw ParseError("empty Matrix Market stream", 0);
  ++lineno;
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (lower(banner) != "%%matrixmarket" || lower(object) != "matrix") {
    throw ParseError("missing '%%MatrixMarket matrix' banner", lineno);
  }
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (format != "coordinate" && format != "array") {
    throw ParseError("unknown format '" + format + "'", lineno);
  }
  if (field != "real" && field != "double" && field != "integer") {
    throw UnsupportedError("Matrix Market field '" + field + "' is not supported");
  }
  if (symmetry != "symmetric" && symmetry != "general") {
    throw UnsupportedError("Matrix Market symmetry '" + symmetry + "' is not supported");
  }
  const bool symmetric = symmetry == "symmetric";

  if (!next_data_line(in, line, lineno)) throw ParseError("missing size line", lineno);
  std::istringstream size_line(line);
  long rows = 0, cols = 0, nnz = 0;
  size_line >> rows >> cols;
  if (format == "coordinate") size_line >> nnz;
  if (!size_line || rows <= 0 || rows != cols) {
    throw ParseError("size line must describe a non-empty square matrix", lineno);
  }
  const int n = static_cast<int>(rows);
  Eigen::MatrixXd full = Eigen::MatrixXd::Constant(n, n, std::numeric_limits<double>::quiet_NaN());

  auto read_value = [&](std::istringstream& ss) {
    double v = 0.0;
    if (!(ss >> v) || !std::isfinite(v)) throw ParseError("bad numeric value", lineno);
    return v;
  };

  if (format == "coordinate") {
    full.setZero();
    for (long k = 0; k < nnz; ++k) {
      if (!next_data_line(in, line, lineno)) {
        throw ParseError("expected " + std::to_string(nnz) + " entries, found " +
                             std::to_string(k),
                         lineno);
      }
      std::istringstream ss(line);
      long i = 0, j = 0;
      if (!(ss >> i >> j)) throw ParseError("bad index pair", lineno);
      if (i < 1 || j < 1 || i > n || j > n) throw ParseError("index out of range", lineno);
      const double v = read_value(ss);
      full(i - 1, j - 1) = v;
      if (symmetric) full(j - 1, i - 1) = v;
    }
  } else {
    for (int j = 0; j < n; ++j) {
      for (int i = symmetric ? j : 0; i < n; ++i) {
        if (!next_data_line(in, line, lineno)) throw ParseError("too few array entries", lineno);
        std::istringstream ss(line);
        const double v = read_value(ss);
        full(i, j) = v;
        if (symmetric) full(j, i) = v;
      }
    }
  }

  try {
    return SymMat::from_dense(full, 1e-12);
  } catch (const DomainError& e) {
    throw ParseError(std::string("general matrix is not symmetric: ") + e.what(), 0);
  }
}

SymMat read_matrix_market_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'", 0);
  return read_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const SymMat& m) {
  const int n = m.order();
  std::size_t nnz = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = j; i < n; ++i) {
      if (m(i, j) != 0.0) ++nnz;
    }
  }
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << n << ' ' << n << ' ' << nnz << '\n';
  out << std::setprecision(17);
  for (int j = 0; j < n; ++j) {
    for (int i = j; i < n; ++i) {
      if (m(i, j) != 0.0) out << (i + 1) << ' ' << (j + 1) << ' ' << m(i, j) << '\n';
    }
  }
}

void write_matrix_market_file(const std::string& path, const SymMat& m) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  write_matrix_market(out, m);
}

}  // namespace sdpcut
