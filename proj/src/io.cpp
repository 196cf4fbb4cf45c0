#include "gw/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gw {

ParseError::ParseError(const std::string& source, int line,
                       const std::string& detail)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + detail),
      line_(line) {}

namespace {

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return in;
}

bool blank_or_comment(const std::string& line) {
  const auto pos = line.find_first_not_of(" \t\r");
  return pos == std::string::npos || line[pos] == '#';
}

std::vector<double> split_csv_line(const std::string& line,
                                   const std::string& source, int lineno) {
  std::vector<double> values;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(field, &used);
      while (used < field.size() &&
             (field[used] == ' ' || field[used] == '\t' || field[used] == '\r')) {
        ++used;
      }
      if (used != field.size()) throw std::invalid_argument(field);
      values.push_back(v);
    } catch (const std::exception&) {
      throw ParseError(source, lineno, "cannot parse real '" + field + "'");
    }
  }
  if (values.empty()) throw ParseError(source, lineno, "empty row");
  return values;
}

}  // namespace

Graph read_edge_list(std::istream& in, const std::string& source) {
  std::vector<std::pair<int, int>> edges;
  long declared_nodes = -1;
  bool saw_data = false;
  int max_index = -1;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank_or_comment(line)) continue;
    std::istringstream ss(line);
    std::string first;
    ss >> first;
    if (!saw_data && declared_nodes < 0 && first == "n") {
      if (!(ss >> declared_nodes) || declared_nodes <= 0) {
        throw ParseError(source, lineno, "bad node-count header");
      }
      std::string extra;
      if (ss >> extra) throw ParseError(source, lineno, "trailing tokens after header");
      continue;
    }
    int a = 0, b = 0;
    try {
      std::size_t used = 0;
      a = std::stoi(first, &used);
      if (used != first.size()) throw std::invalid_argument(first);
    } catch (const std::exception&) {
      throw ParseError(source, lineno, "cannot parse node index '" + first + "'");
    }
    if (!(ss >> b)) throw ParseError(source, lineno, "expected two node indices");
    std::string extra;
    if (ss >> extra) throw ParseError(source, lineno, "trailing tokens after edge");
    if (a < 0 || b < 0) throw ParseError(source, lineno, "negative node index");
    if (a == b) throw ParseError(source, lineno, "self-loop");
    saw_data = true;
    max_index = std::max({max_index, a, b});
    edges.emplace_back(a, b);
  }
  const long nodes = declared_nodes > 0 ? declared_nodes : max_index + 1;
  if (nodes <= 0) throw ParseError(source, lineno, "no nodes found");
  if (max_index >= nodes) {
    throw ParseError(source, lineno,
                     "edge index " + std::to_string(max_index) +
                         " exceeds declared node count " + std::to_string(nodes));
  }
  return Graph(nodes, std::move(edges));
}

Graph read_edge_list_file(const std::string& path) {
  auto in = open_or_throw(path);
  return read_edge_list(in, path);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << "n " << g.num_nodes() << "\n";
  for (auto [a, b] : g.edges()) out << a << " " << b << "\n";
}

Matrix read_dense_csv(std::istream& in, const std::string& source) {
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank_or_comment(line)) continue;
    rows.push_back(split_csv_line(line, source, lineno));
    if (rows.back().size() != rows.front().size()) {
      throw ParseError(source, lineno, "ragged row");
    }
  }
  if (rows.empty()) throw ParseError(source, lineno, "empty matrix");
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

Matrix read_dense_csv_file(const std::string& path) {
  auto in = open_or_throw(path);
  return read_dense_csv(in, path);
}

Matrix read_square_csv_file(const std::string& path) {
  Matrix m = read_dense_csv_file(path);
  if (m.rows() != m.cols()) {
    throw ParseError(path, 1,
                     "expected a square matrix, got " + std::to_string(m.rows()) +
                         "x" + std::to_string(m.cols()));
  }
  return m;
}

Matrix read_coupling_csv(std::istream& in, const std::string& source) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!blank_or_comment(line)) break;
  }
  const auto header = split_csv_line(line, source, lineno);
  if (header.size() != 2 || header[0] != std::floor(header[0]) ||
      header[1] != std::floor(header[1]) || header[0] < 1 || header[1] < 1) {
    throw ParseError(source, lineno, "expected header 'n,m'");
  }
  const auto n = static_cast<Eigen::Index>(header[0]);
  const auto m = static_cast<Eigen::Index>(header[1]);
  Matrix pi(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::getline(in, line)) {
      throw ParseError(source, lineno, "expected " + std::to_string(n) + " rows");
    }
    ++lineno;
    const auto values = split_csv_line(line, source, lineno);
    if (static_cast<Eigen::Index>(values.size()) != m) {
      throw ParseError(source, lineno,
                       "expected " + std::to_string(m) + " columns");
    }
    for (Eigen::Index j = 0; j < m; ++j) pi(i, j) = values[j];
  }
  return pi;
}

Matrix read_coupling_csv_file(const std::string& path) {
  auto in = open_or_throw(path);
  return read_coupling_csv(in, path);
}

void write_coupling_csv(std::ostream& out, const Matrix& pi) {
  out << pi.rows() << "," << pi.cols() << "\n";
  char buf[32];
  for (Eigen::Index i = 0; i < pi.rows(); ++i) {
    for (Eigen::Index j = 0; j < pi.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", pi(i, j));
      out << (j ? "," : "") << buf;
    }
    out << "\n";
  }
}

void write_coupling_csv_file(const std::string& path, const Matrix& pi) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_coupling_csv(out, pi);
}

ProbabilityVector read_weights_file(const std::string& path) {
  auto in = open_or_throw(path);
  std::vector<double> values;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank_or_comment(line)) continue;
    const auto row = split_csv_line(line, path, lineno);
    values.insert(values.end(), row.begin(), row.end());
  }
  if (values.empty()) throw ParseError(path, lineno, "no weights found");
  Vector v(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = values[i];
  }
  return ProbabilityVector(std::move(v));
}

}  // namespace gw
