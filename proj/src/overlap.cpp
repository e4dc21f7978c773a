#include "epps/overlap.hpp"

#include <algorithm>
#include <string>

#include "epps/error.hpp"
#include "summation.hpp"

namespace epps {

std::vector<ReturnPairSample> compute_overlaps(const SampledPath& path1,
                                               const SampledPath& path2,
                                               const OverlapConfig& config) {
  if (path1.origin != path2.origin || path1.dt != path2.dt ||
      path1.points.size() != path2.points.size())
    throw Error(ErrorKind::config, "sampled paths are on different grids");
  if (!(config.w_max >= 1.0))
    throw Error(ErrorKind::config, "w_max must be at least 1");

  const auto& p1 = path1.points;
  const auto& p2 = path2.points;
  const Timestamp dt = path1.dt;
  std::vector<ReturnPairSample> out;
  out.reserve(path1.n_steps());

  for (std::size_t k = 0; k + 1 < p1.size(); ++k) {
    ReturnPairSample s;
    s.t = p1[k].t;
    s.dt = dt;
    s.price1 = p1[k].price;
    s.price2 = p2[k].price;
    s.change1 = p1[k + 1].price - p1[k].price;
    s.change2 = p2[k + 1].price - p2[k].price;
    s.r1 = s.change1 / s.price1;
    s.r2 = s.change2 / s.price2;
    s.dt_o = std::min(p1[k + 1].gamma, p2[k + 1].gamma) -
             std::max(p1[k].gamma, p2[k].gamma);
    if (s.dt_o > 0) {
      s.included = true;
      const double w = static_cast<double>(dt) / static_cast<double>(s.dt_o);
      s.capped = w > config.w_max;
      s.weight = s.capped ? config.w_max : w;
    }
    out.push_back(s);
  }
  return out;
}

OverlapStats overlap_stats(std::span<const ReturnPairSample> samples) {
  if (samples.empty())
    throw Error(ErrorKind::insufficient_data, "no samples");
  OverlapStats st;
  st.dt = samples.front().dt;
  detail::NeumaierSum frac;
  for (const auto& s : samples) {
    if (!s.included) {
      ++st.n_excluded;
      continue;
    }
    ++st.n_included;
    if (s.capped) ++st.n_capped;
    frac.add(static_cast<double>(s.dt_o) / static_cast<double>(s.dt));
  }
  if (st.n_included == 0)
    throw Error(ErrorKind::degenerate_statistics,
                "all " + std::to_string(st.n_excluded) +
                    " samples lack an overlap");
  st.mean_fractional_overlap = frac.value() / static_cast<double>(st.n_included);
  return st;
}

}  // namespace epps
