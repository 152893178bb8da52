#include "topola/error.hpp"
#include "topola/eval.hpp"
#include "topola/random.hpp"

#include <set>

namespace topola {

namespace {

void require_edge_budget(Index n, Index edges, const char* op) {
  if (n < 2) throw_config(std::string(op) + ": need at least two nodes");
  if (edges < 0 || edges > n * (n - 1) / 2)
    throw_config(std::string(op) + ": edge count outside [0, n(n-1)/2]");
}

}  // namespace

Matrix random_graph_gnm(Index n, Index edges, std::uint64_t seed) {
  require_edge_budget(n, edges, "random_graph_gnm");
  Rng rng(derive_seed(seed, "gnm"));
  std::uniform_int_distribution<Index> pick(0, n - 1);
  Matrix a = Matrix::Zero(n, n);
  Index placed = 0;
  while (placed < edges) {
    const Index u = pick(rng);
    const Index v = pick(rng);
    if (u == v || a(u, v) != 0.0) continue;
    a(u, v) = a(v, u) = 1.0;
    ++placed;
  }
  return a;
}

Matrix preferential_attachment_graph(Index n, Index edges, std::uint64_t seed) {
  require_edge_budget(n, edges, "preferential_attachment_graph");
  const Index m = std::max<Index>(1, edges / n);
  if (m >= n || m * (n - m) > edges)
    throw_config("preferential_attachment_graph: too few edges for the requested node count");

  Rng rng(derive_seed(seed, "preferential"));
  Matrix a = Matrix::Zero(n, n);
  // Every edge endpoint appears once, so uniform draws are degree-proportional.
  std::vector<Index> endpoints;
  endpoints.reserve(static_cast<std::size_t>(2 * edges));

  std::vector<Index> targets(static_cast<std::size_t>(m));
  for (Index t = 0; t < m; ++t) targets[static_cast<std::size_t>(t)] = t;
  for (Index v = m; v < n; ++v) {
    for (const Index t : targets) {
      a(v, t) = a(t, v) = 1.0;
      endpoints.push_back(t);
      endpoints.push_back(v);
    }
    std::set<Index> next;
    std::uniform_int_distribution<std::size_t> pick(0, endpoints.size() - 1);
    while (static_cast<Index>(next.size()) < m) next.insert(endpoints[pick(rng)]);
    targets.assign(next.begin(), next.end());
  }

  Index placed = m * (n - m);
  while (placed < edges) {
    std::uniform_int_distribution<std::size_t> pick(0, endpoints.size() - 1);
    const Index u = endpoints[pick(rng)];
    const Index v = endpoints[pick(rng)];
    if (u == v || a(u, v) != 0.0) continue;
    a(u, v) = a(v, u) = 1.0;
    endpoints.push_back(u);
    endpoints.push_back(v);
    ++placed;
  }
  return a;
}

Matrix planted_partition(Index n, Index blocks, double p_in, double p_out, std::uint64_t seed) {
  if (n < 2 || blocks < 1 || blocks > n) throw_config("planted_partition: invalid size or block count");
  if (!(p_in >= 0.0 && p_in <= 1.0 && p_out >= 0.0 && p_out <= 1.0))
    throw_config("planted_partition: probabilities must lie in [0, 1]");
  Rng rng(derive_seed(seed, "planted"));
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  Matrix a = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      const bool same = (i * blocks / n) == (j * blocks / n);
      if (coin(rng) < (same ? p_in : p_out)) a(i, j) = a(j, i) = 1.0;
    }
  return a;
}

}  // namespace topola
