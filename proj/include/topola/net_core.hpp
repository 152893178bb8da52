#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace topola {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Relative tolerance used when declaring or detecting a symmetric matrix.
inline constexpr double kSymmetryTolerance = 1e-12;

/// Bijection between node labels and zero-based matrix indices.
class NodeIndex {
 public:
  NodeIndex() = default;
  explicit NodeIndex(std::vector<std::string> labels);

  /// Integer labels "0", "1", ... for an unlabeled matrix.
  static NodeIndex sequential(std::size_t n);

  /// Returns the index of `label`, inserting it at the end if unseen.
  std::size_t insert(const std::string& label);
  std::optional<std::size_t> find(const std::string& label) const;
  std::size_t at(const std::string& label) const;
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }

  /// Lexicographically sorted copy together with the old->new permutation.
  std::pair<NodeIndex, std::vector<std::size_t>> sorted() const;

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct Edge {
  std::string u;
  std::string v;
  double w = 1.0;
};

using EdgeList = std::vector<Edge>;

/// Dense real network matrix. Entries are finite; the symmetric flag is only
/// set after it has been verified.
class AdjacencyMatrix {
 public:
  /// Validates finiteness and shape. When `declare_symmetric` is true the
  /// matrix must be square and symmetric within kSymmetryTolerance.
  explicit AdjacencyMatrix(Matrix values, bool declare_symmetric = false);

  /// Builds the matrix and sets the symmetric flag if the values allow it.
  static AdjacencyMatrix detect(Matrix values);

  Index rows() const { return values_.rows(); }
  Index cols() const { return values_.cols(); }
  const Matrix& values() const { return values_; }
  bool symmetric() const { return symmetric_; }

  const std::optional<std::vector<std::string>>& row_labels() const { return row_labels_; }
  const std::optional<std::vector<std::string>>& col_labels() const { return col_labels_; }
  void set_labels(std::vector<std::string> rows, std::vector<std::string> cols);

 private:
  Matrix values_;
  bool symmetric_ = false;
  std::optional<std::vector<std::string>> row_labels_;
  std::optional<std::vector<std::string>> col_labels_;
};

/// max|A - A^T| <= rel_tol * max|A| for square A.
bool is_symmetric(const Matrix& a, double rel_tol = kSymmetryTolerance);

struct EdgeListOptions {
  bool directed = false;
  /// When false a third column is ignored and every edge has weight 1.
  bool weighted = false;
  bool sort_labels = false;
};

struct Graph {
  AdjacencyMatrix matrix;
  NodeIndex index;
};

Graph parse_edge_list(std::istream& in, const EdgeListOptions& options = {});
Graph load_edge_list(const std::filesystem::path& path, const EdgeListOptions& options = {});

AdjacencyMatrix parse_dense_matrix(std::istream& in);
AdjacencyMatrix load_dense_matrix(const std::filesystem::path& path);

void write_dense_matrix(std::ostream& out, const Matrix& a);
void save_dense_matrix(const Matrix& a, const std::filesystem::path& path);

/// Writes `#! nodes` with every label in index order, then one `u v w` line
/// per nonzero cell (upper triangle only when the matrix is symmetric).
/// The directive line is an ordinary comment to other readers.
void write_edge_list(std::ostream& out, const AdjacencyMatrix& a, const NodeIndex& index);
void save_edge_list(const AdjacencyMatrix& a, const NodeIndex& index,
                    const std::filesystem::path& path);

/// Shortest decimal string that parses back to exactly `x`.
std::string format_double(double x);

/// Writes through a sibling temp file and renames it over `path`.
void write_atomically(const std::filesystem::path& path,
                      const std::function<void(std::ostream&)>& writer);

}  // namespace topola
