#pragma once

// Worst-case arrival sequences that drive OPT/ALG of the online algorithm
// toward its bound L * alpha.

#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "onum/allocator.hpp"
#include "onum/core.hpp"
#include "onum/csv.hpp"

namespace onum {

/// Parameters of the tightness construction on an L-link network.
struct WorstCaseSpec {
  std::size_t links = 2;
  double m = 1.0;
  double M = 1.0;
  std::size_t t1 = 1;  // flat-segment fillers
  std::size_t t2 = 1;  // slowly rising bidders (0 allowed for hand traces)
  double eps = 1e-3;
  std::size_t target = 0;

  void validate() const {
    if (links < 1) throw std::domain_error("worst case needs at least one link");
    if (!(m > 0.0) || !(M >= m)) throw std::domain_error("worst case needs 0 < m <= M");
    if (t1 < 1) throw std::domain_error("worst case needs t1 >= 1");
    if (!(eps > 0.0)) throw std::domain_error("worst case needs eps > 0");
    const double L = static_cast<double>(links);
    if (m * L + eps / 2.0 > M * L) {
      throw std::domain_error("eps too large: final arrival would exceed the marginal bound");
    }
    if (target >= links) throw std::domain_error("target link out of range");
  }
};

/// Group 1: t1 linear arrivals of slope m on the target link, budget
/// 1/(alpha t1) each, which exactly fill the flat price segment.
/// Group 2: t2 linear arrivals on the target link with slopes
/// m + j*eps/t2 (j = 1..t2) and unit budget; each buys the thin slice where
/// the price climbs to its slope.
/// Final: one linear arrival over all links with slope m*L + eps/2 and unit
/// budget, priced out by the online algorithm but taken entirely by OPT.
inline Instance build_worst_case(const WorstCaseSpec& spec) {
  spec.validate();
  const double alpha = std::log(spec.M / spec.m) + 1.0;
  std::vector<Arrival> arrivals;
  arrivals.reserve(spec.t1 + spec.t2 + 1);
  const double filler = 1.0 / (alpha * static_cast<double>(spec.t1));
  for (std::size_t i = 0; i < spec.t1; ++i) {
    arrivals.push_back({UtilityFunction::linear(spec.m), {spec.target}, filler});
  }
  for (std::size_t j = 1; j <= spec.t2; ++j) {
    const double slope =
        spec.m + static_cast<double>(j) * spec.eps / static_cast<double>(spec.t2);
    arrivals.push_back({UtilityFunction::linear(slope), {spec.target}, 1.0});
  }
  std::vector<std::size_t> all(spec.links);
  std::iota(all.begin(), all.end(), std::size_t{0});
  const double L = static_cast<double>(spec.links);
  arrivals.push_back({UtilityFunction::linear(spec.m * L + spec.eps / 2.0), all, 1.0});
  return Instance(Network(spec.links), std::move(arrivals));
}

/// The two-arrival instance from the proof of the bound: a single-link
/// slope-m user with budget beta, then an all-links slope m*L user with
/// unit budget. The online algorithm takes only the first.
inline Instance build_two_arrival_case(std::size_t links, double m, double M,
                                       std::size_t target = 0) {
  if (links < 1 || target >= links) throw std::domain_error("bad link count or target");
  const ValueFunction vf = make_value_function(m, M);
  std::vector<std::size_t> all(links);
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<Arrival> arrivals{
      {UtilityFunction::linear(m), {target}, vf.beta()},
      {UtilityFunction::linear(m * static_cast<double>(links)), all, 1.0},
  };
  return Instance(Network(links), std::move(arrivals));
}

struct RatioRow {
  std::size_t links = 0;
  std::size_t t1 = 0;
  std::size_t t2 = 0;
  double eps = 0.0;
  double alg = 0.0;
  double opt = 0.0;
  double ratio = 0.0;
  double l_alpha = 0.0;
};

/// One row of the tightness table. OPT is the final arrival at full rate,
/// which is optimal for L > 1.
inline RatioRow worst_case_row(std::size_t links, double m, double M, std::size_t t, double eps) {
  if (links < 2) {
    throw std::domain_error(
        "tightness construction needs L >= 2; use the two-arrival case for L = 1");
  }
  WorstCaseSpec spec{links, m, M, t, t, eps, 0};
  const Instance instance = build_worst_case(spec);
  const ValueFunction vf = make_value_function(m, M);
  RatioRow row;
  row.links = links;
  row.t1 = t;
  row.t2 = t;
  row.eps = eps;
  row.alg = run_online(instance, vf).total_utility;
  row.opt = m * static_cast<double>(links) + eps / 2.0;
  row.ratio = row.opt / row.alg;
  row.l_alpha = static_cast<double>(links) * vf.alpha();
  return row;
}

/// eps <= 0 selects the default eps = 1/t.
inline std::vector<RatioRow> ratio_curve(const std::vector<std::size_t>& link_counts, double m,
                                         double M, std::size_t t, double eps = 0.0) {
  if (t < 1) throw std::domain_error("ratio curve needs t >= 1");
  if (!(eps > 0.0)) eps = 1.0 / static_cast<double>(t);
  std::vector<RatioRow> rows;
  rows.reserve(link_counts.size());
  for (std::size_t links : link_counts) {
    rows.push_back(worst_case_row(links, m, M, t, eps));
  }
  return rows;
}

inline std::string ratio_curve_csv(const std::vector<RatioRow>& rows) {
  std::string out = "L,t1,t2,eps,ALG,OPT,ratio,L_alpha\n";
  for (const RatioRow& r : rows) {
    out += std::to_string(r.links) + ',' + std::to_string(r.t1) + ',' + std::to_string(r.t2) +
           ',' + csv::format(r.eps) + ',' + csv::format(r.alg) + ',' + csv::format(r.opt) + ',' +
           csv::format(r.ratio) + ',' + csv::format(r.l_alpha) + '\n';
  }
  return out;
}

}  // namespace onum
