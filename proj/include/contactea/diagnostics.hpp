#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>

#include "contactea/contact.hpp"
#include "contactea/grid.hpp"

namespace contactea {

/// Conserved quantities and blowup monitor at one instant.
///   c0 = ∫ m,  c1 = ∫ m f,  c_minus_± = ∫ m_±^r with r = (n+1)/(n+2),
///   bkm_integral = ∫_0^t ‖E(f)‖∞ dτ.
struct DiagnosticsRecord {
  double t = 0.0;
  double c0 = 0.0;
  double c1 = 0.0;
  double c_minus_plus = 0.0;
  double c_minus_neg = 0.0;
  double bkm_integral = 0.0;
  double reeb_f_linf = 0.0;
  double m_linf = 0.0;
  double m_min = 0.0;
  // C_{-1,±} are only meaningful when m has one sign on the whole grid.
  bool casimir_valid = false;
};

inline double casimir_exponent(int n) { return (n + 1.0) / (n + 2.0); }

inline DiagnosticsRecord conserved_quantities(const ScalarField& m, const ScalarField& f, int n) {
  require_same_grid(m.grid(), f.grid(), "conserved_quantities");
  if (n < 0) throw std::invalid_argument("conserved_quantities: n must be >= 0");
  const double r = casimir_exponent(n);
  const double dv = m.grid().cell_volume();
  DiagnosticsRecord rec;
  double c0 = 0.0, c1 = 0.0, cp = 0.0, cn = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double v = m[i];
    c0 += v;
    c1 += v * f[i];
    if (v > 0.0) cp += std::pow(v, r);
    if (v < 0.0) cn += std::pow(-v, r);
  }
  rec.c0 = c0 * dv;
  rec.c1 = c1 * dv;
  rec.c_minus_plus = cp * dv;
  rec.c_minus_neg = cn * dv;
  rec.m_linf = m.max_abs();
  rec.m_min = m.min();
  const double m_max = m.max();
  rec.casimir_valid = rec.m_min > 0.0 || m_max < 0.0;
  return rec;
}

inline DiagnosticsRecord conserved_quantities(const ContactModel& model, const ScalarField& m, const ScalarField& f,
                                              int n) {
  require_model_grid(model, m, "conserved_quantities");
  return conserved_quantities(m, f, n);
}

/// Left-endpoint accumulation of the BKM integral.
inline DiagnosticsRecord bkm_update(DiagnosticsRecord record, double reeb_f_linf, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("bkm_update: dt must be positive");
  record.bkm_integral += dt * reeb_f_linf;
  record.reeb_f_linf = reeb_f_linf;
  return record;
}

inline DiagnosticsRecord bkm_update(DiagnosticsRecord record, const ContactModel& model, const ScalarField& f,
                                    double dt) {
  return bkm_update(record, reeb_derivative(model, f).max_abs(), dt);
}

/// ‖E(f)‖∞ on the Torus3 model: zero exactly on quantomorphism stream functions.
inline double quanto_invariance(const ContactModel& model, const ScalarField& f) {
  if (model.kind() != ContactKind::Torus3) {
    throw UnsupportedKind("quanto_invariance: the probe is defined on Torus3");
  }
  return reeb_derivative(model, f).max_abs();
}

/// True when the BKM integral never decreases along the series.
inline bool bkm_nondecreasing(std::span<const DiagnosticsRecord> records) {
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].bkm_integral < records[i - 1].bkm_integral) return false;
  }
  return true;
}

inline constexpr const char* diagnostics_csv_header = "t,c0,c1,cm1_plus,cm1_neg,bkm,reeb_f_linf,m_linf,m_min\n";

inline std::string diagnostics_csv_row(const DiagnosticsRecord& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t, r.c0, r.c1,
                r.c_minus_plus, r.c_minus_neg, r.bkm_integral, r.reeb_f_linf, r.m_linf, r.m_min);
  return buf;
}

inline void write_diagnostics_csv(std::ostream& os, std::span<const DiagnosticsRecord> records) {
  os << diagnostics_csv_header;
  for (const auto& r : records) os << diagnostics_csv_row(r);
}

}  // namespace contactea
