#pragma once

// Text format shared by matrices, subspace frames and relations:
//   line 1: "n m"
//   then n lines of m whitespace-separated entries "re,im".
// Relation files carry an extra first line "RELATION" and store the resolvent.

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "oprange/psd.hpp"
#include "oprange/subspace.hpp"

namespace oprange {

inline std::string format_real(double x) {
  if (x == 0.0) x = 0.0;  // drop the sign of negative zero
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string format_entry(Scalar z) { return format_real(z.real()) + "," + format_real(z.imag()); }

inline Scalar parse_entry(const std::string& token) {
  const auto comma = token.find(',');
  try {
    std::size_t used = 0;
    if (comma == std::string::npos) {
      const double re = std::stod(token, &used);
      require(used == token.size(), ErrorKind::Parse, "bad entry '" + token + "'");
      return {re, 0.0};
    }
    const std::string re_text = token.substr(0, comma);
    const std::string im_text = token.substr(comma + 1);
    const double re = std::stod(re_text, &used);
    require(used == re_text.size(), ErrorKind::Parse, "bad entry '" + token + "'");
    const double im = std::stod(im_text, &used);
    require(used == im_text.size(), ErrorKind::Parse, "bad entry '" + token + "'");
    return {re, im};
  } catch (const std::logic_error&) {
    fail(ErrorKind::Parse, "bad entry '" + token + "'");
  }
}

inline Matrix read_matrix(std::istream& in) {
  long rows = -1;
  long cols = -1;
  require(static_cast<bool>(in >> rows >> cols) && rows >= 0 && cols >= 0, ErrorKind::Parse,
          "expected header 'n m'");
  Matrix m(rows, cols);
  std::string token;
  for (long r = 0; r < rows; ++r)
    for (long c = 0; c < cols; ++c) {
      require(static_cast<bool>(in >> token), ErrorKind::Parse, "matrix truncated");
      m(r, c) = parse_entry(token);
    }
  require(!(in >> token), ErrorKind::Parse, "trailing data after matrix");
  return m;
}

inline void write_matrix(std::ostream& out, const Matrix& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      if (c) out << ' ';
      out << format_entry(m(r, c));
    }
    out << '\n';
  }
}

inline std::string matrix_to_string(const Matrix& m) {
  std::ostringstream s;
  write_matrix(s, m);
  return s.str();
}

inline Matrix matrix_from_string(const std::string& text) {
  std::istringstream s(text);
  return read_matrix(s);
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot open " + path);
  return in;
}

inline Matrix load_matrix(const std::string& path) {
  auto in = open_input(path);
  return read_matrix(in);
}

inline Subspace load_subspace(const std::string& path, const ToleranceContext& ctx = {}) {
  const Matrix frame = load_matrix(path);
  return Subspace::span(frame, ctx);
}

// Resolvent matrix of a relation file.
inline Matrix read_relation_resolvent(std::istream& in) {
  std::string header;
  require(static_cast<bool>(in >> header) && header == "RELATION", ErrorKind::Parse,
          "relation file must start with RELATION");
  return read_matrix(in);
}

inline Matrix load_relation_resolvent(const std::string& path) {
  auto in = open_input(path);
  return read_relation_resolvent(in);
}

inline void write_relation_resolvent(std::ostream& out, const Matrix& resolvent) {
  out << "RELATION\n";
  write_matrix(out, resolvent);
}

inline void save_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot write " + path);
  out << text;
  require(static_cast<bool>(out), ErrorKind::Io, "write failed for " + path);
}

}  // namespace oprange
