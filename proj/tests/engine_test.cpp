#include "fblf/engine.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace fblf {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ControllerConfig theorem_one(double bound = 0.5) {
  ControllerConfig cfg;
  cfg.bound = bound;
  cfg.gamma = 2.0;
  cfg.theta_bar = 1.0;
  return cfg;
}

ControllerConfig theorem_two(double eps, double bound = 0.5) {
  ControllerConfig cfg = theorem_one(bound);
  cfg.theorem = Theorem::Two;
  cfg.mode = RobustMode::Continuous;
  cfg.eps = eps;
  return cfg;
}

// Straight-line scalar re-implementation of the Model I switching loop on
// the built-in plant, written against the closed-form formulas only.
struct ReferenceLoop {
  double bound;
  double gamma;
  double theta_bar;
  std::size_t steps;
  std::vector<double> theta_star;

  ReferenceLoop(double b, double g, double tb, std::size_t n)
      : bound(b), gamma(g), theta_bar(tb), steps(n), theta_star(n + 1, 0.0) {}

  double clamp(double x) const { return std::clamp(x, -theta_bar, theta_bar); }

  double z(double e) const {
    const double gap = bound - 0.5 * e * e;
    return bound * bound / (gap * gap) * e;
  }

  static double robust(double z, double e) {
    const double rho = 0.5 * std::abs(e);
    return std::abs(z) < 1e-300 ? 0.0 : rho * (z > 0 ? 1.0 : -1.0);
  }

  // e' = -e + u + dw + theta with dw = 0.5 e and theta = 0.5 sin t
  static double rhs(double t, double e, double u) { return -e + u + 0.5 * e + 0.5 * std::sin(t); }

  std::vector<double> iterate() {
    const double dt = kTwoPi / static_cast<double>(steps);
    std::vector<double> es;
    double e = 0.0;
    for (std::size_t i = 0; i <= steps; ++i) {
      const double t = kTwoPi * static_cast<double>(i) / static_cast<double>(steps);
      es.push_back(e);
      const double zi = z(e);
      theta_star[i] = clamp(theta_star[i]) + gamma * zi;
      const double th = clamp(theta_star[i]);
      if (i == steps) break;
      const auto f = [&](double s, double x) { return rhs(s, x, -th - robust(z(x), x)); };
      const double k1 = rhs(t, e, -th - robust(zi, e));
      const double k2 = f(t + 0.5 * dt, e + 0.5 * dt * k1);
      const double k3 = f(t + 0.5 * dt, e + 0.5 * dt * k2);
      const double k4 = f(t + dt, e + dt * k3);
      e += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    return es;
  }
};

TEST(RunIteration, ZeroUncertaintyKeepsErrorAtZero) {
  auto m = builtin_examples().scalar_I;
  m.uncertainty.w = [](const Vec& x, double) -> Vec { return Vec::Zero(x.size()); };
  m.uncertainty.rho = [](const Vec&, double) { return 0.0; };
  const ErrorModel model = m;
  ParamMemory memory(TimeGrid(m.T, 200), 1, 1.0);
  const auto trace = run_iteration(model, theorem_one(), memory);
  ASSERT_EQ(trace.size(), 201u);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    EXPECT_EQ(trace.e[i](0), 0.0);
    EXPECT_EQ(trace.u[i](0), 0.0);
  }
  EXPECT_FALSE(trace.breach);
}

TEST(RunIteration, MatchesScalarReferenceLoop) {
  const ErrorModel model = builtin_examples().scalar_I;
  const std::size_t steps = 400;
  ParamMemory memory(TimeGrid(kTwoPi, steps), 1, 1.0);
  ReferenceLoop reference(0.5, 2.0, 1.0, steps);
  for (std::size_t k = 0; k < 4; ++k) {
    const auto trace = run_iteration(model, theorem_one(), memory, k);
    const auto expected = reference.iterate();
    ASSERT_EQ(trace.size(), expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
      ASSERT_NEAR(trace.e[i](0), expected[i], 1e-12) << "k=" << k << " i=" << i;
    }
    for (std::size_t i = 0; i <= steps; ++i) {
      ASSERT_NEAR(memory.theta_star(i)(0), reference.theta_star[i], 1e-10);
    }
  }
}

TEST(RunIteration, FirstIterationStaysInsideBarrier) {
  const ErrorModel model = builtin_examples().scalar_I;
  ParamMemory memory(TimeGrid(kTwoPi, 2000), 1, 1.0);
  const auto trace = run_iteration(model, theorem_one(), memory);
  ASSERT_EQ(trace.size(), 2001u);
  EXPECT_EQ(trace.e.front()(0), 0.0);
  EXPECT_EQ(trace.t.back(), kTwoPi);
  EXPECT_LT(*std::max_element(trace.V.begin(), trace.V.end()), 0.5);
}

double max_input_jump(const IterationTrace& trace) {
  double jump = 0.0;
  for (std::size_t i = 1; i < trace.size(); ++i) {
    jump = std::max(jump, (trace.u[i] - trace.u[i - 1]).norm());
  }
  return jump;
}

TEST(RunIteration, ContinuousModeInputIsLipschitzInTime) {
  // Jumps scale with dt: refining the grid halves the worst jump.
  const ErrorModel model = builtin_examples().scalar_I;
  const auto cfg = theorem_two(1e-2);
  std::vector<double> rates;
  for (std::size_t steps : {1000u, 2000u, 4000u}) {
    ParamMemory memory(TimeGrid(kTwoPi, steps), 1, 1.0);
    const auto trace = run_iteration(model, cfg, memory);
    rates.push_back(max_input_jump(trace) / memory.grid().dt());
  }
  EXPECT_LT(rates[1], 1.2 * rates[0]);
  EXPECT_LT(rates[2], 1.2 * rates[1]);
}

TEST(RunIteration, BreachTruncatesAndKeepsMemory) {
  auto m = builtin_examples().scalar_I;
  // theta = 5 sin t while the estimate is capped at 0.1: the loop cannot hold.
  m.x_d = [](double t) -> Vec { return Vec::Constant(1, 10.0 * std::sin(t)); };
  const ErrorModel model = m;
  auto cfg = theorem_one(0.05);
  cfg.theta_bar = 0.1;
  ParamMemory memory(TimeGrid(m.T, 500), 1, cfg.theta_bar);
  const auto trace = run_iteration(model, cfg, memory);
  EXPECT_TRUE(trace.breach);
  ASSERT_TRUE(trace.breach_time.has_value());
  EXPECT_LT(trace.size(), 501u);
  EXPECT_GT(trace.size(), 1u);
  EXPECT_GE(*trace.breach_time, trace.t.back());
  for (double v : trace.V) EXPECT_LT(v, cfg.bound);
  EXPECT_NE(memory.theta_star(trace.size() - 1)(0), 0.0);
  EXPECT_EQ(memory.theta_star(trace.size() + 1)(0), 0.0);

  const auto result = run(model, cfg, 3, 500);
  EXPECT_EQ(result.report.iterations.size(), 3u);
  EXPECT_EQ(result.report.total_violations(), 3u);
  EXPECT_TRUE(std::isnan(result.report.iterations[0].L_T));
  for (const auto& v : check_delta_L(result.report)) EXPECT_FALSE(v.holds);
}

TEST(RunIteration, RejectsMismatchedMemory) {
  const ErrorModel model = builtin_examples().scalar_I;
  ParamMemory wrong_horizon(TimeGrid(1.0, 10), 1, 1.0);
  EXPECT_THROW(run_iteration(model, theorem_one(), wrong_horizon), std::invalid_argument);
  ParamMemory wrong_dim(TimeGrid(kTwoPi, 10), 2, 1.0);
  EXPECT_THROW(run_iteration(model, theorem_one(), wrong_dim), DimensionError);
}

IterationTrace zero_error_trace(std::size_t steps, bool perfect_estimate) {
  const ErrorModel model = builtin_examples().scalar_I;
  IterationTrace trace;
  for (std::size_t i = 0; i <= steps; ++i) {
    const double t = kTwoPi * static_cast<double>(i) / static_cast<double>(steps);
    trace.t.push_back(t);
    trace.e.push_back(Vec::Zero(1));
    trace.u.push_back(Vec::Zero(1));
    trace.V.push_back(0.0);
    trace.theta_hat.push_back(perfect_estimate ? theta_true(model, t) : Vec::Zero(1));
  }
  return trace;
}

TEST(MonitorL, VanishesForPerfectEstimate) {
  const ErrorModel model = builtin_examples().scalar_I;
  for (double l : monitor_L(zero_error_trace(100, true), model, theorem_one())) EXPECT_EQ(l, 0.0);
}

TEST(MonitorL, ClosedFormWithZeroEstimate) {
  // 1/(2 gamma) int_0^{2 pi} (0.5 sin t)^2 dt = pi / (8 gamma); the trapezoid
  // rule is exact for sin^2 over a full period.
  const ErrorModel model = builtin_examples().scalar_I;
  const auto cfg = theorem_one();
  const auto L = monitor_L(zero_error_trace(64, false), model, cfg);
  EXPECT_EQ(L.front(), 0.0);
  EXPECT_NEAR(L.back(), std::numbers::pi / (8.0 * cfg.gamma), 1e-14);
  for (std::size_t i = 1; i < L.size(); ++i) EXPECT_GE(L[i], L[i - 1]);
}

TEST(CheckDeltaL, AllZeroReportPasses) {
  RunReport report;
  for (std::size_t k = 0; k < 4; ++k) {
    IterationSummary s;
    s.k = k;
    report.iterations.push_back(s);
  }
  const auto verdicts = check_delta_L(report);
  ASSERT_EQ(verdicts.size(), 3u);
  for (const auto& v : verdicts) {
    EXPECT_TRUE(v.holds);
    EXPECT_EQ(v.delta_L, 0.0);
    EXPECT_EQ(v.allowed, 0.0);
  }
}

class ShortRun : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    result_ = new RunResult(run(builtin_examples().scalar_I, theorem_one(), 6, 1000));
  }
  static void TearDownTestSuite() {
    delete result_;
    result_ = nullptr;
  }
  static RunResult* result_;
};

RunResult* ShortRun::result_ = nullptr;

TEST_F(ShortRun, ReportShape) {
  const auto& report = result_->report;
  ASSERT_EQ(report.iterations.size(), 6u);
  EXPECT_FALSE(report.iterations[0].delta_L.has_value());
  EXPECT_TRUE(report.iterations[1].delta_L.has_value());
  EXPECT_EQ(report.residual, 0.0);
  EXPECT_EQ(report.level_bound, 0.5);
  EXPECT_EQ(report.total_violations(), 0u);
  ASSERT_EQ(result_->traces.size(), 6u);
  for (const auto& trace : result_->traces) {
    EXPECT_EQ(trace.size(), 1001u);
    EXPECT_EQ(trace.L.size(), 1001u);
    EXPECT_EQ(trace.e.front()(0), 0.0);
  }
}

TEST_F(ShortRun, MonitorDecreases) {
  for (const auto& v : check_delta_L(result_->report)) {
    EXPECT_TRUE(v.holds) << "k=" << v.k << " dL=" << v.delta_L << " allowed=" << v.allowed;
  }
}

TEST_F(ShortRun, EstimatesStayBounded) {
  for (const auto& trace : result_->traces) {
    for (const auto& th : trace.theta_hat) EXPECT_LE(th.lpNorm<Eigen::Infinity>(), 1.0);
  }
  for (const auto& s : result_->report.iterations) EXPECT_LE(s.max_theta_hat, 1.0);
}

TEST_F(ShortRun, CorruptedMonitorIsCaught) {
  RunReport corrupted = result_->report;
  corrupted.iterations[3].L_T += 1.0;
  const auto verdicts = check_delta_L(corrupted);
  EXPECT_TRUE(std::any_of(verdicts.begin(), verdicts.end(), [](const auto& v) { return !v.holds; }));
}

TEST(Run, SingleIteration) {
  const auto result = run(builtin_examples().scalar_II, theorem_one(1.0), 1, 200);
  EXPECT_EQ(result.report.iterations.size(), 1u);
  EXPECT_EQ(result.report.level_bound, 1.0);
  EXPECT_TRUE(check_delta_L(result.report).empty());
}

TEST(Run, TheoremTwoCarriesResidual) {
  const auto result = run(builtin_examples().scalar_I, theorem_two(1e-2), 2, 200);
  EXPECT_DOUBLE_EQ(result.report.residual, 1e-2 * kTwoPi);
}

TEST(Run, RejectsBadArguments) {
  const ErrorModel model = builtin_examples().scalar_I;
  EXPECT_THROW(run(model, theorem_one(), 0, 100), std::invalid_argument);
  EXPECT_THROW(run(model, theorem_one(), 1, 1), std::invalid_argument);
  auto cfg = theorem_one();
  cfg.gamma = 0.0;
  EXPECT_THROW(run(model, cfg, 1, 100), std::invalid_argument);
}

}  // namespace
}  // namespace fblf
