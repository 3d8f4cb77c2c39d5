#include "bems/kpi.hpp"

#include <algorithm>
#include <cmath>

#include "bems/errors.hpp"

namespace bems::kpi {

KpiValues compute_kpis(const std::vector<double>& net_energy,
                       const std::vector<double>& price,
                       const std::vector<double>& carbon_intensity) {
  const std::size_t n = net_energy.size();
  if (price.size() != n || carbon_intensity.size() != n) {
    throw UsageError("KPI series lengths disagree");
  }
  if (n == 0 || n % 24 != 0) {
    throw UsageError("KPI series must cover whole days, got " +
                     std::to_string(n) + " steps");
  }

  KpiValues k;
  for (std::size_t t = 0; t < n; ++t) {
    const double draw = std::max(net_energy[t], 0.0);
    k.cost += price[t] * draw;
    k.carbon += carbon_intensity[t] * draw;
    k.consumption += draw;
    if (t >= 1) k.ramping += std::abs(net_energy[t] - net_energy[t - 1]);
  }
  const std::size_t days = n / 24;
  double peak_sum = 0.0;
  for (std::size_t d = 0; d < days; ++d) {
    double peak = net_energy[d * 24];
    for (std::size_t h = 1; h < 24; ++h) {
      peak = std::max(peak, net_energy[d * 24 + h]);
    }
    peak_sum += peak;
  }
  k.daily_peak = peak_sum / static_cast<double>(days);
  return k;
}

KpiReport ratio_report(const KpiValues& policy, const KpiValues& rbc) {
  auto ratio = [](double num, double den) -> std::optional<double> {
    if (!(den > 0.0)) return std::nullopt;  // undefined, never infinity
    return num / den;
  };
  KpiReport r;
  r.raw = policy;
  r.rbc_raw = rbc;
  r.ratios.cost = ratio(policy.cost, rbc.cost);
  r.ratios.carbon = ratio(policy.carbon, rbc.carbon);
  r.ratios.consumption = ratio(policy.consumption, rbc.consumption);
  r.ratios.ramping = ratio(policy.ramping, rbc.ramping);
  r.ratios.daily_peak = ratio(policy.daily_peak, rbc.daily_peak);
  return r;
}

KpiAggregate aggregate_seeds(const std::vector<KpiReport>& reports) {
  if (reports.empty()) throw UsageError("no reports to aggregate");

  auto stat = [&](std::optional<double> KpiRatios::*field) {
    std::vector<double> xs;
    xs.reserve(reports.size());
    for (const KpiReport& r : reports) {
      const auto& v = r.ratios.*field;
      if (!v) throw UsageError("undefined ratio in seed aggregate");
      xs.push_back(*v);
    }
    KpiStat s;
    for (double x : xs) s.mean += x;
    s.mean /= static_cast<double>(xs.size());
    if (xs.size() > 1) {
      double ss = 0.0;
      for (double x : xs) ss += (x - s.mean) * (x - s.mean);
      s.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return s;
  };

  KpiAggregate a;
  a.cost = stat(&KpiRatios::cost);
  a.carbon = stat(&KpiRatios::carbon);
  a.consumption = stat(&KpiRatios::consumption);
  a.ramping = stat(&KpiRatios::ramping);
  a.daily_peak = stat(&KpiRatios::daily_peak);
  a.n = static_cast<int>(reports.size());
  return a;
}

}  // namespace bems::kpi
