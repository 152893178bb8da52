#include "topola/error.hpp"
#include "topola/eval.hpp"

#include <cmath>
#include <ostream>

namespace topola {

std::vector<PairRecord> pair_analysis(const Matrix& a, double lambda, const PairAnalysisOptions& options) {
  if (a.rows() != a.cols() || !is_symmetric(a)) throw_config("pair_analysis: graph must be undirected");
  if (((a.array() != 0.0) && (a.array() != 1.0)).any())
    throw_config("pair_analysis: graph must be unweighted (0/1)");
  const Matrix d = topola_distance(a, TopoLaParams{lambda}).values;
  const Matrix common = cn_matrix(a);
  const Vector degree = a.rowwise().sum();

  std::vector<PairRecord> records;
  const Index n = a.rows();
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      PairRecord r;
      r.i = i;
      r.j = j;
      r.cn = std::llround(common(i, j));
      r.union_size = std::llround(degree(i) + degree(j)) - r.cn;
      if (r.union_size <= 0) continue;
      r.jaccard = static_cast<double>(r.cn) / static_cast<double>(r.union_size);
      r.dtopo = d(i, j);
      for (const double band : options.bands)
        if (std::abs(r.jaccard - band) <= options.band_width + 1e-12) {
          r.band = band;
          break;
        }
      records.push_back(r);
    }
  return records;
}

std::vector<BandCorrelation> band_correlations(const std::vector<PairRecord>& records,
                                               const std::vector<double>& bands) {
  std::vector<BandCorrelation> out;
  for (const double band : bands) {
    std::vector<double> dtopo, unions;
    for (const auto& r : records)
      if (r.band && *r.band == band) {
        dtopo.push_back(r.dtopo);
        unions.push_back(static_cast<double>(r.union_size));
      }
    out.push_back(BandCorrelation{band, dtopo.size(), spearman(dtopo, unions)});
  }
  return out;
}

void write_pair_records(std::ostream& out, const std::vector<PairRecord>& records,
                        const std::vector<std::string>* labels) {
  out << "i,j,cn,union,jaccard,dtopo,band\n";
  auto name = [&](Index v) {
    return labels ? (*labels)[static_cast<std::size_t>(v)] : std::to_string(v);
  };
  for (const auto& r : records) {
    out << name(r.i) << ',' << name(r.j) << ',' << r.cn << ',' << r.union_size << ','
        << format_double(r.jaccard) << ',' << format_double(r.dtopo) << ',';
    if (r.band) out << format_double(*r.band);
    out << '\n';
  }
}

}  // namespace topola
