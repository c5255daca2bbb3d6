#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "contactea/diagnostics.hpp"

using namespace contactea;

TEST(Diagnostics, ConstantMomentum) {
  const Grid g = Grid::uniform(3, 8);
  const ScalarField m = ScalarField::constant(g, 2.0);
  const ScalarField f = ScalarField::constant(g, 2.0);
  const DiagnosticsRecord r = conserved_quantities(m, f, 1);
  const double vol = std::pow(two_pi, 3);
  EXPECT_NEAR(r.c0, 2.0 * vol, 1e-10);
  EXPECT_NEAR(r.c1, 4.0 * vol, 1e-10);
  EXPECT_NEAR(r.c_minus_plus, std::pow(2.0, 2.0 / 3.0) * vol, 1e-10);
  EXPECT_EQ(r.c_minus_neg, 0.0);
  EXPECT_TRUE(r.casimir_valid);
  EXPECT_DOUBLE_EQ(r.m_linf, 2.0);
  EXPECT_DOUBLE_EQ(r.m_min, 2.0);
  EXPECT_THROW(conserved_quantities(m, f, -1), std::invalid_argument);
}

TEST(Diagnostics, CasimirValidityNeedsOneSign) {
  const Grid g({16});
  // Square wave +2 / -2 on the two halves: both one-signed parts give 8 h 2^{1/2}.
  ScalarField m(g);
  for (std::size_t i = 0; i < 16; ++i) m[i] = i < 8 ? 2.0 : -2.0;
  const DiagnosticsRecord r = conserved_quantities(m, m, 0);
  EXPECT_FALSE(r.casimir_valid);
  EXPECT_NEAR(r.c_minus_plus, 8.0 * g.spacing(0) * std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(r.c_minus_neg, r.c_minus_plus, 1e-14);
  const DiagnosticsRecord neg = conserved_quantities(ScalarField::constant(g, -1.0), m, 0);
  EXPECT_TRUE(neg.casimir_valid);
  EXPECT_NEAR(neg.c_minus_neg, two_pi, 1e-12);
  EXPECT_DOUBLE_EQ(casimir_exponent(0), 0.5);
}

TEST(Diagnostics, BkmLeftEndpoint) {
  DiagnosticsRecord r;
  r = bkm_update(r, 2.0, 0.5);
  r = bkm_update(r, 4.0, 0.25);
  EXPECT_DOUBLE_EQ(r.bkm_integral, 2.0);
  EXPECT_DOUBLE_EQ(r.reeb_f_linf, 4.0);
  EXPECT_THROW(bkm_update(r, 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(bkm_update(r, 1.0, -0.1), std::invalid_argument);
  std::vector<DiagnosticsRecord> series(3);
  series[1].bkm_integral = 1.0;
  series[2].bkm_integral = 1.0;
  EXPECT_TRUE(bkm_nondecreasing(series));
  series[2].bkm_integral = 0.5;
  EXPECT_FALSE(bkm_nondecreasing(series));
}

TEST(Diagnostics, QuantoInvarianceProbe) {
  const ContactModel t3 = ContactModel::torus3(Grid::uniform(3, 16));
  // f depending on z only is annihilated by E = sin z ∂x + cos z ∂y.
  const ScalarField fz = ScalarField::sample(t3.grid(), [](const Point& x) { return std::cos(2.0 * x[2]); });
  EXPECT_LT(quanto_invariance(t3, fz), 1e-13);
  const ScalarField fx = ScalarField::sample(t3.grid(), [](const Point& x) { return std::cos(x[0]); });
  EXPECT_GT(quanto_invariance(t3, fx), 0.5);
  const ContactModel s1 = ContactModel::circle(Grid({16}));
  EXPECT_THROW(quanto_invariance(s1, ScalarField(s1.grid())), UnsupportedKind);
}

TEST(Diagnostics, CsvFullPrecision) {
  DiagnosticsRecord r;
  r.t = 0.1;
  r.c0 = 1.0 / 3.0;
  std::ostringstream os;
  const std::vector<DiagnosticsRecord> recs{r};
  write_diagnostics_csv(os, recs);
  std::istringstream is(os.str());
  std::string header, row;
  std::getline(is, header);
  std::getline(is, row);
  EXPECT_EQ(header, "t,c0,c1,cm1_plus,cm1_neg,bkm,reeb_f_linf,m_linf,m_min");
  const double t = std::stod(row.substr(0, row.find(',')));
  const std::string rest = row.substr(row.find(',') + 1);
  const double c0 = std::stod(rest.substr(0, rest.find(',')));
  EXPECT_EQ(t, 0.1);
  EXPECT_EQ(c0, 1.0 / 3.0);
  EXPECT_EQ(std::count(row.begin(), row.end(), ','), 8);
}
