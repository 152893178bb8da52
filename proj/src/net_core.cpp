#include "topola/net_core.hpp"

#include "topola/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <system_error>

namespace topola {

namespace {

std::vector<std::string_view> split_fields(std::string_view line, bool csv) {
  std::vector<std::string_view> fields;
  if (csv) {
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return fields;
  }
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_real(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return value;
}

Matrix permute_symmetric(const Matrix& a, const std::vector<std::size_t>& old_to_new) {
  Matrix out(a.rows(), a.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out(static_cast<Index>(old_to_new[static_cast<std::size_t>(i)]),
          static_cast<Index>(old_to_new[static_cast<std::size_t>(j)])) = a(i, j);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// NodeIndex

NodeIndex::NodeIndex(std::vector<std::string> labels) {
  for (auto& label : labels) {
    if (index_.count(label)) throw_config("duplicate node label '" + label + "'");
    index_.emplace(label, labels_.size());
    labels_.push_back(std::move(label));
  }
}

NodeIndex NodeIndex::sequential(std::size_t n) {
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = std::to_string(i);
  return NodeIndex(std::move(labels));
}

std::size_t NodeIndex::insert(const std::string& label) {
  const auto [it, inserted] = index_.emplace(label, labels_.size());
  if (inserted) labels_.push_back(label);
  return it->second;
}

std::optional<std::size_t> NodeIndex::find(const std::string& label) const {
  const auto it = index_.find(label);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t NodeIndex::at(const std::string& label) const {
  const auto found = find(label);
  if (!found) throw_config("unknown node label '" + label + "'");
  return *found;
}

std::pair<NodeIndex, std::vector<std::size_t>> NodeIndex::sorted() const {
  std::vector<std::size_t> order(labels_.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return labels_[a] < labels_[b]; });
  std::vector<std::size_t> old_to_new(labels_.size());
  std::vector<std::string> labels;
  labels.reserve(labels_.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    old_to_new[order[k]] = k;
    labels.push_back(labels_[order[k]]);
  }
  return {NodeIndex(std::move(labels)), std::move(old_to_new)};
}

// ---------------------------------------------------------------------------
// AdjacencyMatrix

bool is_symmetric(const Matrix& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  const double scale = a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

AdjacencyMatrix::AdjacencyMatrix(Matrix values, bool declare_symmetric)
    : values_(std::move(values)), symmetric_(declare_symmetric) {
  if (values_.rows() < 1 || values_.cols() < 1) throw_config("adjacency matrix must be at least 1x1");
  if (!values_.allFinite()) throw_config("adjacency matrix contains NaN or Inf");
  if (declare_symmetric && !is_symmetric(values_))
    throw_config("matrix declared symmetric but is not symmetric within tolerance");
}

AdjacencyMatrix AdjacencyMatrix::detect(Matrix values) {
  AdjacencyMatrix a(std::move(values));
  a.symmetric_ = is_symmetric(a.values_);
  return a;
}

void AdjacencyMatrix::set_labels(std::vector<std::string> rows, std::vector<std::string> cols) {
  if (static_cast<Index>(rows.size()) != values_.rows() ||
      static_cast<Index>(cols.size()) != values_.cols())
    throw_config("label count does not match matrix shape");
  row_labels_ = std::move(rows);
  col_labels_ = std::move(cols);
}

// ---------------------------------------------------------------------------
// Edge lists

Graph parse_edge_list(std::istream& in, const EdgeListOptions& options) {
  NodeIndex index;
  // Keyed on (row, col); undirected edges are stored once with row <= col.
  std::map<std::pair<std::size_t, std::size_t>, double> cells;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = trim(line);
    if (body.empty()) continue;
    if (body.front() == '#') {
      if (body.rfind("#!", 0) == 0) {
        const auto fields = split_fields(body.substr(2), false);
        if (!fields.empty() && fields.front() == "nodes")
          for (std::size_t k = 1; k < fields.size(); ++k) index.insert(std::string(fields[k]));
      }
      continue;
    }
    const auto fields = split_fields(body, false);
    if (fields.size() < 2 || fields.size() > 3)
      throw_parse("line " + std::to_string(line_no) + ": expected 'u v [w]', got " +
                  std::to_string(fields.size()) + " fields");
    double w = 1.0;
    if (fields.size() == 3 && options.weighted) {
      const auto parsed = parse_real(fields[2]);
      if (!parsed || !std::isfinite(*parsed))
        throw_parse("line " + std::to_string(line_no) + ": invalid weight '" +
                    std::string(fields[2]) + "'");
      w = *parsed;
    }
    std::size_t u = index.insert(std::string(fields[0]));
    std::size_t v = index.insert(std::string(fields[1]));
    if (!options.directed && u > v) std::swap(u, v);
    const auto [it, inserted] = cells.emplace(std::make_pair(u, v), w);
    if (!inserted && it->second != w)
      throw_parse("line " + std::to_string(line_no) + ": edge " + std::string(fields[0]) + " " +
                  std::string(fields[1]) + " repeated with conflicting weight");
  }
  if (index.size() == 0) throw_parse("edge list is empty");

  const auto n = static_cast<Index>(index.size());
  Matrix a = Matrix::Zero(n, n);
  for (const auto& [cell, w] : cells) {
    const auto i = static_cast<Index>(cell.first);
    const auto j = static_cast<Index>(cell.second);
    a(i, j) = w;
    if (!options.directed) a(j, i) = w;
  }
  if (options.sort_labels) {
    auto [sorted_index, old_to_new] = index.sorted();
    a = permute_symmetric(a, old_to_new);
    index = std::move(sorted_index);
  }
  AdjacencyMatrix matrix = options.directed ? AdjacencyMatrix::detect(std::move(a))
                                            : AdjacencyMatrix(std::move(a), true);
  matrix.set_labels(index.labels(), index.labels());
  return Graph{std::move(matrix), std::move(index)};
}

Graph load_edge_list(const std::filesystem::path& path, const EdgeListOptions& options) {
  std::ifstream in(path);
  if (!in) throw_io("cannot open edge list " + path.string());
  return parse_edge_list(in, options);
}

void write_edge_list(std::ostream& out, const AdjacencyMatrix& a, const NodeIndex& index) {
  if (a.rows() != a.cols() || static_cast<Index>(index.size()) != a.rows())
    throw_config("edge-list output needs a square matrix and one label per node");
  for (const auto& label : index.labels())
    if (label.empty() || label.find_first_of(" \t\r\n#") != std::string::npos)
      throw_config("node label '" + label + "' cannot be written to an edge list");
  out << "#! nodes";
  for (const auto& label : index.labels()) out << ' ' << label;
  out << '\n';
  const bool sym = a.symmetric();
  const Matrix& m = a.values();
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = sym ? i : 0; j < m.cols(); ++j)
      if (m(i, j) != 0.0)
        out << index.label(static_cast<std::size_t>(i)) << ' '
            << index.label(static_cast<std::size_t>(j)) << ' ' << format_double(m(i, j)) << '\n';
}

void save_edge_list(const AdjacencyMatrix& a, const NodeIndex& index,
                    const std::filesystem::path& path) {
  write_atomically(path, [&](std::ostream& out) { write_edge_list(out, a, index); });
}

// ---------------------------------------------------------------------------
// Dense CSV

AdjacencyMatrix parse_dense_matrix(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line, true);
    std::vector<double> row;
    row.reserve(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const auto value = parse_real(fields[c]);
      if (!value || !std::isfinite(*value))
        throw_parse("row " + std::to_string(rows.size() + 1) + " col " + std::to_string(c + 1) +
                    ": non-numeric cell '" + std::string(trim(fields[c])) + "'");
      row.push_back(*value);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw_parse("row " + std::to_string(rows.size() + 1) + " has " + std::to_string(row.size()) +
                  " columns, expected " + std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw_parse("matrix file is empty");

  Matrix a(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      a(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return AdjacencyMatrix::detect(std::move(a));
}

AdjacencyMatrix load_dense_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw_io("cannot open matrix file " + path.string());
  return parse_dense_matrix(in);
}

void write_dense_matrix(std::ostream& out, const Matrix& a) {
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(a(i, j));
    }
    out << '\n';
  }
}

void save_dense_matrix(const Matrix& a, const std::filesystem::path& path) {
  write_atomically(path, [&](std::ostream& out) { write_dense_matrix(out, a); });
}

// ---------------------------------------------------------------------------

std::string format_double(double x) {
  if (x == 0.0) return "0";  // also folds -0
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw_numeric("cannot format value");
  return std::string(buf, ptr);
}

void write_atomically(const std::filesystem::path& path,
                      const std::function<void(std::ostream&)>& writer) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw_io("cannot open " + tmp.string() + " for writing");
    writer(out);
    out.flush();
    if (!out) throw_io("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw_io("cannot move output into place at " + path.string());
  }
}

}  // namespace topola
