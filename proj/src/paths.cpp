#include "topola/error.hpp"
#include "topola/topola.hpp"

#include <string>

namespace topola {

namespace {

std::uint64_t checked_add(std::uint64_t x, std::uint64_t y) {
  std::uint64_t out = 0;
  if (__builtin_add_overflow(x, y, &out)) throw_numeric("walk count exceeds the exact 64-bit range");
  return out;
}

std::uint64_t checked_mul(std::uint64_t x, std::uint64_t y) {
  std::uint64_t out = 0;
  if (__builtin_mul_overflow(x, y, &out)) throw_numeric("walk count exceeds the exact 64-bit range");
  return out;
}

void require_binary_square(const Matrix& a, const char* op) {
  if (a.rows() != a.cols()) throw_config(std::string(op) + ": matrix must be square");
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      if (a(i, j) != 0.0 && a(i, j) != 1.0)
        throw_config(std::string(op) + ": matrix must contain only 0/1 entries");
}

void require_node(const Matrix& a, Index v, const char* op) {
  if (v < 0 || v >= a.rows())
    throw_config(std::string(op) + ": node index " + std::to_string(v) + " out of range");
}

void require_enumerable(const Matrix& a, const char* op) {
  if (a.rows() > kMaxEnumerationNodes)
    throw_config(std::string(op) + ": simple-path enumeration is limited to " +
                 std::to_string(kMaxEnumerationNodes) + " nodes");
}

// counts[l] = number of simple paths with l edges from `from` to `target`.
void enumerate_simple_paths(const Matrix& a, Index from, Index target, int max_len,
                            std::vector<bool>& visited, int depth,
                            std::vector<std::uint64_t>& counts) {
  if (depth == max_len) return;
  for (Index next = 0; next < a.cols(); ++next) {
    if (a(from, next) == 0.0 || visited[static_cast<std::size_t>(next)]) continue;
    if (next == target) {
      ++counts[static_cast<std::size_t>(depth + 1)];
      continue;
    }
    visited[static_cast<std::size_t>(next)] = true;
    enumerate_simple_paths(a, next, target, max_len, visited, depth + 1, counts);
    visited[static_cast<std::size_t>(next)] = false;
  }
}

std::vector<std::uint64_t> simple_path_counts(const Matrix& a, int max_len, Index i, Index j) {
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(max_len) + 1, 0);
  if (i == j) return counts;
  std::vector<bool> visited(static_cast<std::size_t>(a.rows()), false);
  visited[static_cast<std::size_t>(i)] = true;
  enumerate_simple_paths(a, i, j, max_len, visited, 0, counts);
  return counts;
}

std::uint64_t ipow(std::uint64_t base, int exp) {
  std::uint64_t out = 1;
  for (int e = 0; e < exp; ++e) out = checked_mul(out, base);
  return out;
}

}  // namespace

std::uint64_t walk_count(const Matrix& a, int hops, Index i, Index j) {
  if (hops < 1) throw_config("walk_count: hop count must be >= 1");
  require_binary_square(a, "walk_count");
  require_node(a, i, "walk_count");
  require_node(a, j, "walk_count");

  const auto n = static_cast<std::size_t>(a.rows());
  // Row i of A^t, advanced one hop at a time.
  std::vector<std::uint64_t> row(n, 0), next(n, 0);
  row[static_cast<std::size_t>(i)] = 1;
  for (int t = 0; t < hops; ++t) {
    std::fill(next.begin(), next.end(), 0);
    for (std::size_t k = 0; k < n; ++k) {
      if (row[k] == 0) continue;
      for (std::size_t c = 0; c < n; ++c)
        if (a(static_cast<Index>(k), static_cast<Index>(c)) != 0.0) next[c] = checked_add(next[c], row[k]);
    }
    row.swap(next);
  }
  return row[static_cast<std::size_t>(j)];
}

std::uint64_t loop_free_paths(const Matrix& a, int length, Index i, Index j) {
  if (length < 1) throw_config("loop_free_paths: length must be >= 1");
  require_binary_square(a, "loop_free_paths");
  require_enumerable(a, "loop_free_paths");
  require_node(a, i, "loop_free_paths");
  require_node(a, j, "loop_free_paths");
  return simple_path_counts(a, length, i, j)[static_cast<std::size_t>(length)];
}

PathCensus path_census(const Matrix& a, int hops, Index i, Index j) {
  if (hops < 2 || hops % 2 != 0) throw_config("path_census: hop count must be even and >= 2");
  require_binary_square(a, "path_census");
  if (!is_symmetric(a)) throw_config("path_census: graph must be undirected");
  require_enumerable(a, "path_census");
  require_node(a, i, "path_census");
  require_node(a, j, "path_census");

  PathCensus census;
  census.hops = hops;
  census.total = walk_count(a, hops, i, j);
  census.loop_free = simple_path_counts(a, hops, i, j);
  census.degree_i = static_cast<std::uint64_t>(a.row(i).sum());
  census.degree_j = static_cast<std::uint64_t>(a.row(j).sum());

  // Loops i->u->i before and j->v->j after a simple even path of 2t edges;
  // the t = hops/2 term has no loops and is |a_hops| itself, kept out of here.
  const int half = hops / 2;
  std::uint64_t decorated = 0;
  for (int t = 1; t < half; ++t) {
    std::uint64_t weight = 0;
    for (int h = 0; h <= half - t; ++h)
      weight = checked_add(weight, checked_mul(ipow(census.degree_i, h),
                                               ipow(census.degree_j, half - t - h)));
    decorated = checked_add(decorated, checked_mul(weight, census.loop_free[static_cast<std::size_t>(2 * t)]));
  }
  census.endpoint_loops = decorated;

  const std::uint64_t accounted = checked_add(census.loop_free[static_cast<std::size_t>(hops)], decorated);
  if (accounted > census.total)
    throw_numeric("path_census: decorated paths exceed the walk count");
  census.remainder = census.total - accounted;
  return census;
}

}  // namespace topola
