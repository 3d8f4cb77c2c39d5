#pragma once

namespace bems::comfort {

// The six PMV variables for one timestep. Construction validates ranges
// and throws DomainError naming the offending field.
struct ComfortInputs {
  double tdb;  // air temperature, degC
  double tr;   // mean radiant temperature, degC
  double vr;   // relative air speed, m/s
  double rh;   // relative humidity, % in [0, 100]
  double met;  // metabolic rate, met
  double clo;  // clothing insulation, clo

  ComfortInputs(double tdb, double tr, double vr, double rh, double met,
                double clo);
};

struct PmvResult {
  double pmv;  // not clamped; the Fanger balance can exceed +-3
  double ppd;  // percent dissatisfied, in [5, 100]
};

// Partial water-vapor pressure in Pa from dry-bulb temperature and
// relative humidity. Antoine-form saturation expression from the
// ISO 7730 computational annex.
double vapor_pressure(double tdb, double rh);

// Full Fanger heat-balance PMV/PPD. External work is fixed to zero
// (sedentary occupants). The clothing-surface-temperature fixed point is
// solved by damped iteration, threshold 1e-5 on the iterate, cap 200;
// non-convergence throws NumericalError with the inputs.
PmvResult compute_pmv(const ComfortInputs& in);

// PPD companion index from a PMV value. Even in pmv, minimum 5 at 0.
double ppd_from_pmv(double pmv);

// Seasonal clothing schedule: 0.5 clo for months 6-9, 1.0 otherwise.
double clothing_for_month(int month);

// Maps PMV to a comfort score in [0, 1]: 1 - min(|pmv|, 3) / 3.
// Maximum 1 at thermal neutrality, 0 for |pmv| >= 3.
double pmv_comfort_reward(double pmv);

}  // namespace bems::comfort
