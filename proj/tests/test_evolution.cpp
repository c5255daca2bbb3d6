#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "contactea/evolution.hpp"
#include "contactea/random_fields.hpp"
#include "support/trig_poly.hpp"

using namespace contactea;

namespace {
std::mt19937_64& rng() {
  static std::mt19937_64 r(31);
  return r;
}

StepperConfig stepper(double dt) {
  StepperConfig c;
  c.dt = dt;
  return c;
}
}  // namespace

TEST(Equation, Validation) {
  EXPECT_THROW(validate(CamassaHolm{ContactModel::torus3(Grid::uniform(3, 8))}), std::invalid_argument);
  EXPECT_THROW(validate(Quasigeostrophic{ContactModel::circle(Grid({16})), 1.0}), std::invalid_argument);
  EXPECT_THROW(validate(Quasigeostrophic{ContactModel::quanto_torus2(Grid::uniform(2, 16)), -1.0}),
               std::invalid_argument);
  const Grid g2 = Grid::uniform(2, 16);
  EXPECT_THROW(validate(BetaPlane{ContactModel::quanto_torus2(g2), 1.0, 1.0, ScalarField(Grid::uniform(2, 8))}),
               std::invalid_argument);
  EXPECT_THROW(validate(Reduced1D{Grid::uniform(2, 16)}), std::invalid_argument);
  EXPECT_NO_THROW(validate(Reduced1D{Grid({32}, {40.0})}));
  EXPECT_EQ(equation_name(Reduced1D{Grid({32})}), "reduced_1d");
  EXPECT_EQ(equation_n(CamassaHolm{ContactModel::circle(Grid({16}))}), 0);
}

TEST(Stepper, ConfigValidation) {
  EXPECT_THROW(stepper(0.0).validate(), std::invalid_argument);
  EXPECT_THROW(stepper(-1.0).validate(), std::invalid_argument);
  StepperConfig c = stepper(0.1);
  c.cfl_limit = 1.5;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.cfl_limit = 0.4;
  c.blowup_linf_threshold = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Stepper, CflPolicies) {
  const ContactModel model = ContactModel::circle(Grid({64}));
  const ScalarField m = ScalarField::sample(model.grid(), [](const Point& x) { return 5.0 + std::cos(x[0]); });
  StepperConfig c = stepper(1.0);
  c.cfl_policy = CflPolicy::Throw;
  EXPECT_THROW(step_rk4(SimState{CamassaHolm{model}, 0.0, m}, c), CflViolation);
  c.cfl_policy = CflPolicy::Warn;
  c.blowup_linf_threshold = 1e300;
  try {
    const SimState s = step_rk4(SimState{CamassaHolm{model}, 0.0, m}, c);
    EXPECT_EQ(s.cfl_warnings, 1u);
  } catch (const BlowupError&) {
    SUCCEED();
  }
  c.cfl_policy = CflPolicy::Ignore;
  c.dt = 1e-3;
  EXPECT_EQ(step_rk4(SimState{CamassaHolm{model}, 0.0, m}, c).cfl_warnings, 0u);
}

TEST(Stepper, BlowupThresholdAndNonFiniteInput) {
  const ContactModel model = ContactModel::circle(Grid({32}));
  const ScalarField m = ScalarField::constant(model.grid(), 2.0);
  StepperConfig c = stepper(0.01);
  c.blowup_linf_threshold = 1.0;
  EXPECT_THROW(step_rk4(SimState{CamassaHolm{model}, 0.0, m}, c), BlowupError);
  ScalarField bad = m;
  bad[3] = std::nan("");
  c.blowup_linf_threshold = 1e6;
  EXPECT_THROW(step_rk4(SimState{CamassaHolm{model}, 0.0, bad}, c), BlowupError);

  const RunSummary r = run(CamassaHolm{model}, m, [] {
    StepperConfig s;
    s.dt = 0.01;
    s.blowup_linf_threshold = 1.0;
    return s;
  }(), 1.0);
  EXPECT_EQ(r.status, RunStatus::Blowup);
  ASSERT_TRUE(r.blowup_time.has_value());
  EXPECT_NEAR(*r.blowup_time, 0.01, 1e-15);
  EXPECT_FALSE(r.message.empty());
}

TEST(Run, UniformStepAndCadence) {
  const ContactModel model = ContactModel::circle(Grid({32}));
  const ScalarField m = ScalarField::sample(model.grid(), [](const Point& x) { return 1.0 + 0.1 * std::cos(x[0]); });
  const RunSummary r = run(CamassaHolm{model}, m, stepper(0.03), 1.0,
                           RunOptions{.cadence = 4, .flow = {}, .particle_band = {}, .observers = {}});
  EXPECT_EQ(r.final_state.step_count, 34u);
  EXPECT_NEAR(r.dt_used, 1.0 / 34.0, 1e-15);
  EXPECT_DOUBLE_EQ(r.final_state.t, 1.0);
  // t = 0, every 4th step, and the final step.
  EXPECT_EQ(r.records.size(), 1u + 8u + 1u);
  EXPECT_DOUBLE_EQ(r.records.back().t, 1.0);
  EXPECT_TRUE(bkm_nondecreasing(r.records));
  EXPECT_THROW(run(CamassaHolm{model}, m, stepper(0.1), -1.0), std::invalid_argument);
  EXPECT_THROW(run(CamassaHolm{model}, m, stepper(0.1), 1.0,
                   RunOptions{.cadence = 0, .flow = {}, .particle_band = {}, .observers = {}}),
               std::invalid_argument);
  EXPECT_THROW(run(CamassaHolm{model}, ScalarField(Grid({16})), stepper(0.1), 1.0), std::invalid_argument);
}

TEST(Run, ObserversSeeEveryRecord) {
  const ContactModel model = ContactModel::circle(Grid({32}));
  const ScalarField m = ScalarField::constant(model.grid(), 1.0);
  std::size_t calls = 0;
  RunOptions opt{.cadence = 1, .flow = {}, .particle_band = {}, .observers = {}};
  opt.observers.push_back([&](const SimState&, const DiagnosticsRecord&, const FlowMap* f) {
    ++calls;
    EXPECT_EQ(f, nullptr);
  });
  const RunSummary r = run(CamassaHolm{model}, m, stepper(0.1), 0.5, opt);
  EXPECT_EQ(calls, r.records.size());
  EXPECT_EQ(calls, 6u);
}

TEST(Stepper, BackwardIntegrationReversesForward) {
  const ContactModel model = ContactModel::torus3(Grid::uniform(3, 16));
  const ScalarField m0 = random_trig_polynomial(model.grid(), 1, 5, 0.05) + ScalarField::constant(model.grid(), 1.0);
  StepperConfig c = stepper(0.02);
  SimState s{ContactEA{model}, 0.0, dealias(m0)};
  const ScalarField start = s.m;
  for (int i = 0; i < 5; ++i) s = step_rk4(s, c);
  c.backward = true;
  for (int i = 0; i < 5; ++i) s = step_rk4(s, c);
  EXPECT_NEAR(s.t, 0.0, 1e-15);
  EXPECT_LT(max_abs_diff(s.m, start), 1e-9);
}

TEST(Rhs, CamassaHolmBothFormsAgree) {
  // The contact form -S(f)(m) - 2 m E(f) on S¹ equals -f m' - 2 m f'.
  const ContactModel model = ContactModel::circle(Grid({128}));
  const ScalarField m = oracle::TrigPoly::random(1, 5, rng(), 2.0, 0.2).sample(model.grid());
  EXPECT_LT(max_abs_diff(rhs(CamassaHolm{model}, m), evaluate_rhs(CamassaHolm{model}, m).dmdt), 1e-11);
  EXPECT_LT(max_abs_diff(rhs(CamassaHolm{model}, m), rhs(ContactEA{model}, m)), 1e-11);
}

TEST(Rhs, Reduced1DMatchesCompactForm) {
  // φ_t = -y g φ_y + y g_y φ - 4 g φ with φ = g - g'', g = exp(-y²/2) centred at the origin.
  const Grid grid({256}, {40.0});
  const auto yof = [](const Point& x) { return x[0] < 20.0 ? x[0] : x[0] - 40.0; };
  const auto gauss = [&](const Point& x) { return std::exp(-yof(x) * yof(x) / 2.0); };
  ScalarField phi = ScalarField::sample(grid, [&](const Point& x) { return (2.0 - yof(x) * yof(x)) * gauss(x); });
  ScalarField expected = ScalarField::sample(grid, [&](const Point& x) {
    const double y = yof(x), g = gauss(x);
    const double gy = -y * g, ph = (2.0 - y * y) * g, phy = (y * y * y - 4.0 * y) * g;
    return -y * g * phy + y * gy * ph - 4.0 * g * ph;
  });
  EXPECT_LT(max_abs_diff(reduced_1d_rhs(phi, false), expected), 1e-9);
  EXPECT_LT(max_abs_diff(evaluate_rhs(Reduced1D{grid}, phi, false).dmdt, expected), 1e-9);
  const ScalarField g = helmholtz_inverse(phi);
  EXPECT_EQ(max_abs_diff(reeb_of_stream(Reduced1D{grid}, g), g), 0.0);
  EXPECT_LT(max_abs_diff(g, ScalarField::sample(grid, gauss)), 1e-12);
}

TEST(Rhs, BetaPlaneWithZeroBetaIsQuasigeostrophic) {
  const ContactModel model = ContactModel::quanto_torus2(Grid::uniform(2, 32));
  const ScalarField w = oracle::TrigPoly::random(2, 3, rng(), 0.0).sample(model.grid());
  const ScalarField psi = centered_coordinate_field(model.grid(), 1);
  EXPECT_LT(max_abs_diff(rhs(BetaPlane{model, 1.0, 0.0, psi}, w), rhs(Quasigeostrophic{model, 1.0}, w)), 1e-13);
}

TEST(Rhs, QuasigeostrophicIsMinusBracket) {
  // ω_t = -(ψ_x ω_y - ψ_y ω_x) with (Δ - α²) ψ = ω.
  const ContactModel model = ContactModel::quanto_torus2(Grid::uniform(2, 32));
  const auto pp = oracle::TrigPoly::random(2, 3, rng(), 0.0);
  const ScalarField psi = pp.sample(model.grid());
  const ScalarField w = pp.laplacian(2).sample(model.grid()) - psi;
  const auto px = pp.derivative(0), py = pp.derivative(1);
  const auto wp = [&] {
    auto q = pp.laplacian(2);
    for (std::size_t i = 0; i < q.modes.size(); ++i) {
      q.modes[i].a -= pp.modes[i].a;
      q.modes[i].b -= pp.modes[i].b;
    }
    return q;
  }();
  const auto wx = wp.derivative(0), wy = wp.derivative(1);
  const ScalarField exact =
      ScalarField::sample(model.grid(), [&](const Point& x) { return -(px(x) * wy(x) - py(x) * wx(x)); });
  EXPECT_LT(max_abs_diff(rhs(Quasigeostrophic{model, 1.0}, w), exact), 1e-9);
}

TEST(Diagnostics, StreamFunctionInversions) {
  const ContactModel q = ContactModel::quanto_torus2(Grid::uniform(2, 16));
  const auto p = oracle::TrigPoly::random(2, 3, rng(), 0.0);
  const ScalarField psi = p.sample(q.grid());
  EXPECT_LT(max_abs_diff(stream_function(Quasigeostrophic{q, 2.0}, p.laplacian(2).sample(q.grid()) - 4.0 * psi), psi),
            1e-12);
}
