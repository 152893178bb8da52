#include "topola/error.hpp"
#include "topola/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace topola {

namespace {

void require_same_length(std::size_t a, std::size_t b, const char* op) {
  if (a != b) throw_config(std::string(op) + ": inputs have different lengths");
}

// Ascending ranks starting at 1, tied values sharing their average rank.
std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  std::size_t start = 0;
  while (start < order.size()) {
    std::size_t end = start + 1;
    while (end < order.size() && x[order[end]] == x[order[start]]) ++end;
    const double rank = 0.5 * static_cast<double>(start + 1 + end);
    for (std::size_t k = start; k < end; ++k) ranks[order[k]] = rank;
    start = end;
  }
  return ranks;
}

double comb2(double n) { return 0.5 * n * (n - 1.0); }

struct Contingency {
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> rows;
  std::map<int, double> cols;
  double n = 0.0;
};

Contingency contingency(std::span<const int> a, std::span<const int> b) {
  Contingency t;
  for (std::size_t k = 0; k < a.size(); ++k) {
    t.joint[{a[k], b[k]}] += 1.0;
    t.rows[a[k]] += 1.0;
    t.cols[b[k]] += 1.0;
  }
  t.n = static_cast<double>(a.size());
  return t;
}

}  // namespace

double auc(std::span<const double> scores, std::span<const int> labels) {
  require_same_length(scores.size(), labels.size(), "auc");
  double positives = 0.0;
  double rank_sum = 0.0;
  const std::vector<double> ranks = average_ranks(scores);
  for (std::size_t k = 0; k < labels.size(); ++k)
    if (labels[k] != 0) {
      positives += 1.0;
      rank_sum += ranks[k];
    }
  const double negatives = static_cast<double>(labels.size()) - positives;
  if (positives == 0.0 || negatives == 0.0) throw_config("auc: need at least one positive and one negative");
  return (rank_sum - positives * (positives + 1.0) / 2.0) / (positives * negatives);
}

double aupr(std::span<const double> scores, std::span<const int> labels) {
  require_same_length(scores.size(), labels.size(), "aupr");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double hits = 0.0;
  double precision_sum = 0.0;
  for (std::size_t r = 0; r < order.size(); ++r)
    if (labels[order[r]] != 0) {
      hits += 1.0;
      precision_sum += hits / static_cast<double>(r + 1);
    }
  if (hits == 0.0) throw_config("aupr: need at least one positive");
  return precision_sum / hits;
}

double ari(std::span<const int> a, std::span<const int> b) {
  require_same_length(a.size(), b.size(), "ari");
  if (a.empty()) throw_config("ari: empty partitions");
  const Contingency t = contingency(a, b);
  double index = 0.0;
  for (const auto& [cell, count] : t.joint) index += comb2(count);
  double sum_rows = 0.0;
  double sum_cols = 0.0;
  for (const auto& [label, count] : t.rows) sum_rows += comb2(count);
  for (const auto& [label, count] : t.cols) sum_cols += comb2(count);
  const double pairs = comb2(t.n);
  const double expected = pairs > 0.0 ? sum_rows * sum_cols / pairs : 0.0;
  const double max_index = 0.5 * (sum_rows + sum_cols);
  const double denom = max_index - expected;
  // Both partitions trivial in the same way (all singletons or one block).
  if (denom == 0.0) return 1.0;
  return (index - expected) / denom;
}

double nmi(std::span<const int> a, std::span<const int> b) {
  require_same_length(a.size(), b.size(), "nmi");
  if (a.empty()) throw_config("nmi: empty partitions");
  const Contingency t = contingency(a, b);
  auto entropy = [&](const std::map<int, double>& sizes) {
    double h = 0.0;
    for (const auto& [label, count] : sizes) {
      const double p = count / t.n;
      h -= p * std::log(p);
    }
    return h;
  };
  const double hu = entropy(t.rows);
  const double hv = entropy(t.cols);
  const bool u_constant = t.rows.size() == 1;
  const bool v_constant = t.cols.size() == 1;
  if (u_constant && v_constant) return 1.0;
  if (u_constant || v_constant) return 0.0;
  double mi = 0.0;
  for (const auto& [cell, count] : t.joint) {
    const double pu = t.rows.at(cell.first) / t.n;
    const double pv = t.cols.at(cell.second) / t.n;
    const double p = count / t.n;
    mi += p * std::log(p / (pu * pv));
  }
  return std::clamp(mi / std::max(hu, hv), 0.0, 1.0);
}

double spearman(std::span<const double> x, std::span<const double> y) {
  require_same_length(x.size(), y.size(), "spearman");
  if (x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < rx.size(); ++k) {
    sxy += (rx[k] - mx) * (ry[k] - my);
    sxx += (rx[k] - mx) * (rx[k] - mx);
    syy += (ry[k] - my) * (ry[k] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

RetrievalAccuracy retrieval_accuracy(const Matrix& similarity, std::span<const int> classes,
                                     std::optional<Index> k) {
  const Index n = similarity.rows();
  if (similarity.cols() != n) throw_config("retrieval_accuracy: similarity must be square");
  if (n < 2) throw_config("retrieval_accuracy: need at least two items");
  if (static_cast<Index>(classes.size()) != n) throw_config("retrieval_accuracy: one class label per item");
  if (k && *k < 1) throw_config("retrieval_accuracy: k must be >= 1");

  std::map<int, Index> class_size;
  for (const int c : classes) ++class_size[c];

  RetrievalAccuracy out;
  out.per_query.assign(static_cast<std::size_t>(n), std::numeric_limits<double>::quiet_NaN());
  double total = 0.0;
  Index used = 0;
  std::vector<Index> others;
  for (Index q = 0; q < n; ++q) {
    const int cq = classes[static_cast<std::size_t>(q)];
    const Index same = class_size[cq] - 1;
    if (same == 0) continue;
    others.clear();
    for (Index j = 0; j < n; ++j)
      if (j != q) others.push_back(j);
    std::stable_sort(others.begin(), others.end(),
                     [&](Index x, Index y) { return similarity(q, x) > similarity(q, y); });
    const Index top = std::min<Index>(k.value_or(same), static_cast<Index>(others.size()));
    Index hits = 0;
    for (Index r = 0; r < top; ++r)
      if (classes[static_cast<std::size_t>(others[static_cast<std::size_t>(r)])] == cq) ++hits;
    const double acc = static_cast<double>(hits) / static_cast<double>(std::min(k.value_or(same), same));
    out.per_query[static_cast<std::size_t>(q)] = acc;
    total += acc;
    ++used;
  }
  if (used == 0) throw_config("retrieval_accuracy: every class is a singleton");
  out.average = total / static_cast<double>(used);
  return out;
}

}  // namespace topola
