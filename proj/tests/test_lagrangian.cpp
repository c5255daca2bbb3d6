#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "contactea/evolution.hpp"
#include "contactea/lagrangian.hpp"
#include "contactea/random_fields.hpp"

using namespace contactea;

TEST(FlowMap, SeedLattice) {
  const Grid g = Grid::uniform(3, 16);
  const ScalarField m = ScalarField::sample(g, [](const Point& x) { return 1.0 + x[0] + 10.0 * x[2]; });
  const FlowMap f = seed_lattice(m, 4);
  ASSERT_EQ(f.size(), 64u);
  EXPECT_NO_THROW(f.validate());
  for (std::size_t p = 0; p < f.size(); ++p) {
    EXPECT_DOUBLE_EQ(f.m0_samples[p], 1.0 + f.seeds[p][0] + 10.0 * f.seeds[p][2]);
    EXPECT_EQ(f.lambdas[p], 0.0);
    EXPECT_EQ(f.positions[p], f.seeds[p]);
  }
  EXPECT_DOUBLE_EQ(f.seeds[1][2], g.coordinate(2, 4));
  EXPECT_THROW(seed_lattice(m, 0), std::invalid_argument);
  EXPECT_THROW(seed_lattice(m, 17), std::invalid_argument);
  FlowMap broken = f;
  broken.lambdas.pop_back();
  EXPECT_THROW(broken.validate(), std::invalid_argument);
}

TEST(FlowMap, SeedPointsWrapAndInterpolate) {
  const Grid g = Grid::uniform(3, 16);
  const ScalarField m = ScalarField::sample(g, [](const Point& x) { return 2.0 + std::sin(x[0]) * std::cos(x[2]); });
  const FlowMap f = seed_points(m, {{-1.0, 7.0, 0.5}});
  ASSERT_EQ(f.size(), 1u);
  EXPECT_NEAR(f.positions[0][0], two_pi - 1.0, 1e-14);
  EXPECT_NEAR(f.positions[0][1], 7.0 - two_pi, 1e-14);
  EXPECT_NEAR(f.m0_samples[0], 2.0 + std::sin(-1.0) * std::cos(0.5), 1e-13);
}

TEST(FlowMap, ConstantStreamFunctionGivesStraightLines) {
  // f = c: S_θ f = c (sin z, cos z, 0) and E(f) = 0.
  const ContactModel model = ContactModel::torus3(Grid::uniform(3, 16));
  const double c = 0.7, dt = 0.1;
  const ScalarField f = ScalarField::constant(model.grid(), c);
  FlowMap flow = seed_points(f, {{1.0, 2.0, 0.3}, {3.0, 0.5, 4.0}});
  const FlowMap start = flow;
  for (int i = 0; i < 10; ++i) flow = advance_flow(flow, model, f, dt);
  for (std::size_t p = 0; p < flow.size(); ++p) {
    const double z = start.positions[p][2];
    const Point expect = model.grid().wrap(
        {start.positions[p][0] + c * std::sin(z), start.positions[p][1] + c * std::cos(z), z});
    for (std::size_t a = 0; a < 3; ++a) EXPECT_NEAR(flow.positions[p][a], expect[a], 1e-13);
    EXPECT_NEAR(flow.lambdas[p], 0.0, 1e-15);
  }
  const auto jac = jacobian_from_lambda(flow, 1);
  EXPECT_NEAR(jac[0], 1.0, 1e-14);
}

TEST(FlowMap, ResidualVanishesAtStartAndStaysSmall) {
  const ContactModel model = ContactModel::torus3(Grid::uniform(3, 16));
  const ScalarField m0 = dealias(random_trig_polynomial(model.grid(), 1, 3, 0.02) + ScalarField::constant(model.grid(), 1.0));
  FlowMap flow = seed_lattice(m0, 4);
  EXPECT_LT(transport_residual(flow, model, m0, 1).max_abs, 1e-12);
  StepperConfig c;
  c.dt = 0.05;
  RunOptions opt{.cadence = 1, .flow = flow, .particle_band = {}, .observers = {}};
  const RunSummary r = run(ContactEA{model}, m0, c, 0.25, opt);
  ASSERT_TRUE(r.flow.has_value());
  const auto res = transport_residual(*r.flow, model, r.final_state.m, 1, dealias_band(model.grid()));
  EXPECT_LT(res.max_abs, 1e-5);
  EXPECT_LE(res.rms, res.max_abs);
}

TEST(FlowMap, ReducedEquationRejectsParticles) {
  const Grid g({32}, {40.0});
  const ScalarField m(g);
  FlowMap flow = seed_lattice(ScalarField(Grid({32})), 2);
  SimState s{Reduced1D{g}, 0.0, m};
  StepperConfig c;
  c.dt = 0.01;
  EXPECT_THROW(step_rk4(s, c, flow), std::invalid_argument);
}

TEST(FlowMap, CsvLayout) {
  const Grid g = Grid::uniform(2, 8);
  const ContactModel model = ContactModel::quanto_torus2(g);
  const ScalarField m = ScalarField::constant(g, 1.5);
  const FlowMap flow = seed_lattice(m, 2);
  const auto res = transport_residual(flow, model, m, 1);
  std::ostringstream os;
  write_particles_csv_header(os, 2);
  write_particles_csv_rows(os, 0.25, flow, res, 2);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "t,particle_id,x,y,lambda,m_interp,residual");
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 6);
  }
  EXPECT_EQ(rows, 4u);
}
