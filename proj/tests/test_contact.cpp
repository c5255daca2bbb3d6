#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "contactea/contact.hpp"
#include "support/trig_poly.hpp"

using namespace contactea;

namespace {
std::mt19937_64& rng() {
  static std::mt19937_64 r(99);
  return r;
}
}  // namespace

TEST(ContactModel, Validation) {
  EXPECT_THROW(ContactModel::torus3(Grid::uniform(2, 16)), std::invalid_argument);
  EXPECT_THROW(ContactModel::circle(Grid::uniform(3, 16)), std::invalid_argument);
  EXPECT_THROW(ContactModel::quanto_torus2(Grid::uniform(1, 16)), std::invalid_argument);
  EXPECT_THROW(ContactModel::torus3(Grid({16, 16, 16}, {1.0, two_pi, two_pi})), std::invalid_argument);
  EXPECT_NO_THROW(ContactModel::circle(Grid({16}, {40.0})));
  EXPECT_EQ(ContactModel::circle(Grid({16})).n(), 0);
  EXPECT_EQ(ContactModel::torus3(Grid::uniform(3, 16)).n(), 1);
  EXPECT_DOUBLE_EQ(ContactModel::torus3(Grid::uniform(3, 16)).casimir_exponent(), 2.0 / 3.0);
  EXPECT_STREQ(to_string(ContactKind::QuantoTorus2), "QuantoTorus2");
}

TEST(Contact, ReebAndContactFieldMatchFrameFormulas) {
  const ContactModel model = ContactModel::torus3(Grid::uniform(3, 16));
  const Grid& g = model.grid();
  const auto p = oracle::TrigPoly::random(3, 2, rng(), 0.5);
  const auto px = p.derivative(0), py = p.derivative(1), pz = p.derivative(2);
  const ScalarField f = p.sample(g);

  const ScalarField ef = ScalarField::sample(g, [&](const Point& x) { return std::sin(x[2]) * px(x) + std::cos(x[2]) * py(x); });
  EXPECT_LT(max_abs_diff(reeb_derivative(model, f), ef), 1e-11);

  const auto u = contact_vector_field(model, f);
  ASSERT_EQ(u.size(), 3u);
  const ScalarField ux = ScalarField::sample(g, [&](const Point& x) { return p(x) * std::sin(x[2]) + pz(x) * std::cos(x[2]); });
  const ScalarField uy = ScalarField::sample(g, [&](const Point& x) { return p(x) * std::cos(x[2]) - pz(x) * std::sin(x[2]); });
  const ScalarField uz = ScalarField::sample(g, [&](const Point& x) { return py(x) * std::sin(x[2]) - px(x) * std::cos(x[2]); });
  EXPECT_LT(max_abs_diff(u[0], ux), 1e-11);
  EXPECT_LT(max_abs_diff(u[1], uy), 1e-11);
  EXPECT_LT(max_abs_diff(u[2], uz), 1e-11);
}

TEST(Contact, ContactFormEvaluatesToStreamFunction) {
  // θ(S_θ f) = f: sin z u_x + cos z u_y = f.
  const ContactModel model = ContactModel::torus3(Grid::uniform(3, 16));
  const ScalarField f = oracle::TrigPoly::random(3, 2, rng(), 1.0).sample(model.grid());
  const auto u = contact_vector_field(model, f);
  const auto [s, c] = torus_frame_trig(model.grid());
  EXPECT_LT(max_abs_diff(s * u[0] + c * u[1], f), 1e-11);
}

TEST(Contact, DivergenceLawOnCircleAndTorus) {
  const ContactModel circle = ContactModel::circle(Grid({64}));
  const ScalarField g = oracle::TrigPoly::random(1, 5, rng(), 1.0).sample(circle.grid());
  EXPECT_LT(max_abs_diff(divergence_of_contact_field(circle, g), reeb_derivative(circle, g)), 1e-11);

  const ContactModel torus = ContactModel::torus3(Grid::uniform(3, 16));
  const ScalarField f = oracle::TrigPoly::random(3, 2, rng(), 1.0).sample(torus.grid());
  EXPECT_LT(max_abs_diff(divergence_of_contact_field(torus, f), 2.0 * reeb_derivative(torus, f)), 1e-10);
}

TEST(Contact, QuantoTorus2IsSymplectic) {
  const ContactModel model = ContactModel::quanto_torus2(Grid::uniform(2, 32));
  const auto pf = oracle::TrigPoly::random(2, 3, rng(), 0.0);
  const auto pg = oracle::TrigPoly::random(2, 3, rng(), 0.0);
  const ScalarField f = pf.sample(model.grid()), g = pg.sample(model.grid());
  const auto fx = pf.derivative(0), fy = pf.derivative(1), gx = pg.derivative(0), gy = pg.derivative(1);
  const ScalarField exact =
      ScalarField::sample(model.grid(), [&](const Point& x) { return fx(x) * gy(x) - fy(x) * gx(x); });
  EXPECT_LT(max_abs_diff(contact_poisson(model, f, g), exact), 1e-10);
  EXPECT_EQ(reeb_derivative(model, f).max_abs(), 0.0);
  const auto h = hamiltonian_field(model, f);
  EXPECT_LT(max_abs_diff(h[0], -fy.sample(model.grid())), 1e-11);
  EXPECT_LT(max_abs_diff(h[1], fx.sample(model.grid())), 1e-11);
  EXPECT_THROW(contact_vector_field(model, f), UnsupportedKind);
  EXPECT_THROW(reeb_field(model), UnsupportedKind);
}

TEST(Contact, HamiltonianFieldRejectedOffQuotient) {
  const ContactModel model = ContactModel::circle(Grid({16}));
  EXPECT_THROW(hamiltonian_field(model, ScalarField(model.grid())), UnsupportedKind);
}

TEST(Contact, BracketOnCircleIsLieBracketOfVectorFields) {
  // {f, g} = f g' - g f' on S¹.
  const ContactModel model = ContactModel::circle(Grid({64}));
  const auto pf = oracle::TrigPoly::random(1, 4, rng(), 1.0), pg = oracle::TrigPoly::random(1, 4, rng(), -1.0);
  const auto fx = pf.derivative(0), gx = pg.derivative(0);
  const ScalarField exact = ScalarField::sample(model.grid(), [&](const Point& x) { return pf(x) * gx(x) - pg(x) * fx(x); });
  EXPECT_LT(max_abs_diff(contact_poisson(model, pf.sample(model.grid()), pg.sample(model.grid())), exact), 1e-11);
}

TEST(Contact, BracketWithConstantIsReebDerivative) {
  // {f, 1} = -E(f), {1, g} = E(g).
  const ContactModel model = ContactModel::torus3(Grid::uniform(3, 16));
  const ScalarField one = ScalarField::constant(model.grid(), 1.0);
  const ScalarField f = oracle::TrigPoly::random(3, 2, rng(), 0.0).sample(model.grid());
  EXPECT_LT(max_abs_diff(contact_poisson(model, f, one), -1.0 * dealias(reeb_derivative(model, f))), 1e-11);
  EXPECT_LT(max_abs_diff(contact_poisson(model, one, f), dealias(reeb_derivative(model, f))), 1e-11);
}

TEST(Contact, ContactLaplacianRoundTrip) {
  const ContactModel model = ContactModel::torus3(Grid::uniform(3, 16));
  const auto p = oracle::TrigPoly::random(3, 2, rng(), 0.2);
  const ScalarField f = p.sample(model.grid());
  const ScalarField m = contact_laplacian(model, f);
  EXPECT_LT(max_abs_diff(m, f - p.laplacian(3).sample(model.grid())), 1e-10);
  EXPECT_LT(max_abs_diff(inverse_contact_laplacian(model, m), f), 1e-12);
  EXPECT_THROW(contact_laplacian(model, ScalarField(Grid::uniform(3, 8))), std::invalid_argument);
}

TEST(Contact, PointFrameMatchesGridOperators) {
  const ContactModel model = ContactModel::torus3(Grid::uniform(3, 16));
  const auto p = oracle::TrigPoly::random(3, 2, rng(), 0.2);
  const ScalarField f = p.sample(model.grid());
  const auto u = contact_vector_field(model, f);
  const ScalarField ef = reeb_derivative(model, f);
  const std::size_t i = 1234;
  const Point x = model.grid().node(i);
  PointJet j;
  j.f = p(x);
  j.grad = {p.derivative(0)(x), p.derivative(1)(x), p.derivative(2)(x)};
  const PointVelocity v = frame_velocity(ContactKind::Torus3, x, j);
  for (std::size_t a = 0; a < 3; ++a) EXPECT_NEAR(v.u[a], u[a][i], 1e-11);
  EXPECT_NEAR(v.reeb, ef[i], 1e-11);
}
