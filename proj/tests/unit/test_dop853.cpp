#include "dop853.hpp"
#include "error.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace sectionscope;

TEST(Dop853, HarmonicOscillatorClosedForm) {
  Dop853 rk([](double, const VecX& y, VecX& d) { d << y[1], -y[0]; }, 1e-12, 1e-12);
  VecX y0(2);
  y0 << 1.0, 0.0;
  rk.reset(0.0, y0);
  while (rk.t() < 20.0) rk.step();
  EXPECT_NEAR(rk.y()[0], std::cos(rk.t()), 1e-10);
  EXPECT_NEAR(rk.y()[1], -std::sin(rk.t()), 1e-10);
}

TEST(Dop853, DenseOutputInterpolates) {
  Dop853 rk([](double, const VecX& y, VecX& d) { d << y[1], -y[0]; }, 1e-12, 1e-12);
  VecX y0(2);
  y0 << 1.0, 0.0;
  rk.reset(0.0, y0);
  double worst = 0.0;
  for (int s = 0; s < 20; ++s) {
    rk.step();
    const DenseStep d = rk.dense();
    EXPECT_LT((d(d.t_old) - rk.y_old()).norm(), 1e-15);
    EXPECT_LT((d(d.t_new()) - rk.y()).norm(), 1e-13);
    for (int k = 1; k < 10; ++k) {
      const double t = d.t_old + d.h * k / 10.0;
      worst = std::max(worst, std::abs(d(t)[0] - std::cos(t)));
    }
  }
  EXPECT_LT(worst, 1e-10);
}

TEST(Dop853, BackwardIntegration) {
  Dop853 rk([](double t, const VecX&, VecX& d) { d << std::cos(t); }, 1e-12, 1e-12);
  VecX y0(1);
  y0 << 0.0;
  rk.reset(0.0, y0, -1);
  while (rk.t() > -3.0) rk.step();
  EXPECT_NEAR(rk.y()[0], std::sin(rk.t()), 1e-11);
}

TEST(Dop853, SingularRhsUnderflows) {
  // y' = -1/(2y) from y = 1 reaches the singularity at t = 1.
  Dop853 rk([](double, const VecX& y, VecX& d) {
    if (y[0] <= 0.0) fail(ErrorCode::kCollision, "past singularity");
    d << -0.5 / y[0];
  }, 1e-12, 1e-12);
  VecX y0(1);
  y0 << 1.0;
  rk.reset(0.0, y0);
  try {
    for (int i = 0; i < 100000; ++i) rk.step();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kStepUnderflow);
  }
}

TEST(Dop853, FixedStepsAreSmoothInInitialData) {
  auto f = [](double, const VecX& y, VecX& d) { d << y[1], -std::sin(y[0]); };
  auto run = [&](double a) {
    Dop853 rk(f, 1e-12, 1e-12);
    VecX y0(2);
    y0 << a, 0.0;
    rk.reset(0.0, y0);
    for (int i = 0; i < 50; ++i) rk.step_fixed(0.1);
    return rk.y()[0];
  };
  const double h = 1e-6;
  const double d1 = (run(0.5 + h) - run(0.5 - h)) / (2 * h);
  const double d2 = (run(0.5 + 2 * h) - run(0.5 - 2 * h)) / (4 * h);
  EXPECT_NEAR(d1, d2, 1e-8);
}
