#include "bems/comfort.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bems/errors.hpp"

namespace bems::comfort {

namespace {

void require_finite(double v, const char* field) {
  if (!std::isfinite(v)) {
    throw DomainError(std::string(field) + " must be finite");
  }
}

void require_range(double v, double lo, double hi, const char* field) {
  require_finite(v, field);
  if (v < lo || v > hi) {
    std::ostringstream os;
    os << field << " = " << v << " outside [" << lo << ", " << hi << "]";
    throw DomainError(os.str());
  }
}

}  // namespace

ComfortInputs::ComfortInputs(double tdb_, double tr_, double vr_, double rh_,
                             double met_, double clo_)
    : tdb(tdb_), tr(tr_), vr(vr_), rh(rh_), met(met_), clo(clo_) {
  require_range(tdb, -40.0, 60.0, "tdb");
  require_range(tr, -40.0, 60.0, "tr");
  require_range(rh, 0.0, 100.0, "rh");
  require_finite(vr, "vr");
  if (vr < 0.0) throw DomainError("vr must be >= 0");
  require_finite(met, "met");
  if (met <= 0.0) throw DomainError("met must be > 0");
  require_finite(clo, "clo");
  if (clo < 0.0) throw DomainError("clo must be >= 0");
}

double vapor_pressure(double tdb, double rh) {
  require_range(tdb, -40.0, 60.0, "tdb");
  require_range(rh, 0.0, 100.0, "rh");
  // Saturation pressure in kPa is exp(16.6536 - 4030.183/(t + 235));
  // rh/100 * 1000 folds to rh * 10 for the result in Pa.
  return rh * 10.0 * std::exp(16.6536 - 4030.183 / (tdb + 235.0));
}

PmvResult compute_pmv(const ComfortInputs& in) {
  const double pa = vapor_pressure(in.tdb, in.rh);
  const double icl = 0.155 * in.clo;     // m2K/W
  const double m = in.met * 58.15;       // W/m2
  const double mw = m;                   // external work fixed to 0

  const double fcl =
      icl <= 0.078 ? 1.0 + 1.29 * icl : 1.05 + 0.645 * icl;

  const double hcf = 12.1 * std::sqrt(in.vr);  // forced convection
  const double taa = in.tdb + 273.0;
  const double tra = in.tr + 273.0;

  // Clothing surface temperature, damped fixed point on tcl/100.
  const double t_cla = taa + (35.5 - in.tdb) / (3.5 * icl + 0.1);
  const double p1 = icl * fcl;
  const double p2 = p1 * 3.96;
  const double p3 = p1 * 100.0;
  const double p4 = p1 * taa;
  const double p5 = 308.7 - 0.028 * mw + p2 * std::pow(tra / 100.0, 4);

  double xn = t_cla / 100.0;
  double xf = t_cla / 50.0;
  double hc = hcf;
  constexpr double kEps = 1e-5;
  constexpr int kMaxIter = 200;
  int n = 0;
  while (std::abs(xn - xf) > kEps) {
    xf = (xf + xn) / 2.0;
    const double hcn = 2.38 * std::pow(std::abs(100.0 * xf - taa), 0.25);
    hc = std::max(hcf, hcn);
    xn = (p5 + p4 * hc - p2 * std::pow(xf, 4)) / (100.0 + p3 * hc);
    if (++n > kMaxIter) {
      std::ostringstream os;
      os << "clothing-temperature iteration did not converge: tdb=" << in.tdb
         << " tr=" << in.tr << " vr=" << in.vr << " rh=" << in.rh
         << " met=" << in.met << " clo=" << in.clo;
      throw NumericalError(os.str());
    }
  }
  const double tcl = 100.0 * xn - 273.0;

  // Heat-loss components, W/m2.
  const double hl1 = 3.05e-3 * (5733.0 - 6.99 * mw - pa);        // skin diffusion
  const double hl2 = mw > 58.15 ? 0.42 * (mw - 58.15) : 0.0;     // sweating
  const double hl3 = 1.7e-5 * m * (5867.0 - pa);                 // latent respiration
  const double hl4 = 0.0014 * m * (34.0 - in.tdb);               // dry respiration
  const double hl5 =
      3.96 * fcl * (std::pow(xn, 4) - std::pow(tra / 100.0, 4)); // radiation
  const double hl6 = fcl * hc * (tcl - in.tdb);                  // convection

  const double ts = 0.303 * std::exp(-0.036 * m) + 0.028;  // sensitivity
  const double pmv = ts * (mw - hl1 - hl2 - hl3 - hl4 - hl5 - hl6);
  return {pmv, ppd_from_pmv(pmv)};
}

double ppd_from_pmv(double pmv) {
  if (!std::isfinite(pmv)) throw DomainError("pmv must be finite");
  const double p2 = pmv * pmv;
  return 100.0 - 95.0 * std::exp(-0.03353 * p2 * p2 - 0.2179 * p2);
}

double clothing_for_month(int month) {
  if (month < 1 || month > 12) {
    throw DomainError("month = " + std::to_string(month) +
                      " outside [1, 12]");
  }
  return (month >= 6 && month <= 9) ? 0.5 : 1.0;
}

double pmv_comfort_reward(double pmv) {
  if (!std::isfinite(pmv)) throw DomainError("pmv must be finite");
  return 1.0 - std::min(std::abs(pmv), 3.0) / 3.0;
}

}  // namespace bems::comfort
