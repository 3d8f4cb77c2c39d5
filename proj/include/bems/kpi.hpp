#pragma once

#include <optional>
#include <vector>

namespace bems::kpi {

// The five district KPIs in raw units. Billing metrics (cost, carbon,
// consumption) count only positive draws; grid-stress metrics (ramping,
// daily peak) use the signed net profile.
struct KpiValues {
  double cost = 0.0;         // currency
  double carbon = 0.0;       // kgCO2
  double consumption = 0.0;  // kWh
  double ramping = 0.0;      // kWh
  double daily_peak = 0.0;   // kWh, mean over days of the daily maximum
};

// Ratios versus the RBC run; absent when the RBC denominator is zero.
struct KpiRatios {
  std::optional<double> cost, carbon, consumption, ramping, daily_peak;
};

struct KpiReport {
  KpiValues raw;
  KpiValues rbc_raw;
  KpiRatios ratios;
};

struct KpiStat {
  double mean = 0.0;
  double stddev = 0.0;  // sample (n-1); 0 by convention for a single report
};

struct KpiAggregate {
  KpiStat cost, carbon, consumption, ramping, daily_peak;
  int n = 0;
};

// cost = sum price_t * max(0, E_t); carbon and consumption likewise over
// positive draws; ramping = sum |E_t - E_{t-1}|; daily_peak = mean over
// days of max_t-in-day E_t. Fixed left-to-right summation. Series lengths
// must agree and cover whole days.
KpiValues compute_kpis(const std::vector<double>& net_energy,
                       const std::vector<double>& price,
                       const std::vector<double>& carbon_intensity);

// Element-wise division; a policy run against the RBC run it is anchored
// to. RBC against itself yields exactly 1.0 everywhere.
KpiReport ratio_report(const KpiValues& policy, const KpiValues& rbc);

// Mean and sample standard deviation of the ratios across seed reports.
// Throws UsageError on an empty list or when any input ratio is undefined.
KpiAggregate aggregate_seeds(const std::vector<KpiReport>& reports);

}  // namespace bems::kpi
