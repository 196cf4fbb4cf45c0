#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gw/types.hpp"

namespace gw {

// File-format violation; the message carries the offending line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, int line, const std::string& detail);
  int line() const { return line_; }

 private:
  int line_;
};

// Edge-list format: one edge per line as two whitespace-separated 0-based node
// indices; `#` lines are comments; node count is 1 + max index unless a
// header line `n <count>` appears first.
Graph read_edge_list(std::istream& in, const std::string& source = "<stream>");
Graph read_edge_list_file(const std::string& path);
void write_edge_list(std::ostream& out, const Graph& g);

// Dense matrix as headerless CSV of reals.
Matrix read_dense_csv(std::istream& in, const std::string& source = "<stream>");
Matrix read_dense_csv_file(const std::string& path);
Matrix read_square_csv_file(const std::string& path);  // rejects non-square

// Coupling file: header line `n,m`, then n rows of m comma-separated reals.
Matrix read_coupling_csv(std::istream& in, const std::string& source = "<stream>");
Matrix read_coupling_csv_file(const std::string& path);
void write_coupling_csv(std::ostream& out, const Matrix& pi);
void write_coupling_csv_file(const std::string& path, const Matrix& pi);

// Probability vector: one weight per line (or a single CSV row).
ProbabilityVector read_weights_file(const std::string& path);

}  // namespace gw
