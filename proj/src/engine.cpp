#include "fblf/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fmt/format.h>
#include <limits>

namespace fblf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_compatible(const ErrorModel& model, const ParamMemory& memory) {
  const double T = horizon(model);
  if (std::abs(memory.grid().horizon() - T) > 1e-12 * T) {
    throw std::invalid_argument(
        fmt::format("memory horizon {} does not match model horizon {}", memory.grid().horizon(), T));
  }
  if (memory.dim() != input_dim(model)) {
    throw DimensionError(
        fmt::format("memory dimension {} does not match input dimension {}", memory.dim(),
                    input_dim(model)));
  }
}

}  // namespace

std::size_t RunReport::total_violations() const {
  std::size_t total = 0;
  for (const auto& it : iterations) total += it.violations;
  return total;
}

IterationTrace run_iteration(const ErrorModel& model, const ControllerConfig& config,
                             ParamMemory& memory, std::size_t k) {
  check_compatible(model, memory);
  const TimeGrid& grid = memory.grid();
  const double dt = grid.dt();

  IterationTrace trace;
  trace.k = k;
  const std::size_t nodes = grid.nodes();
  trace.t.reserve(nodes);
  trace.e.reserve(nodes);
  trace.u.reserve(nodes);
  trace.V.reserve(nodes);
  trace.theta_hat.reserve(nodes);

  Vec e = initial_error(model);
  for (std::size_t i = 0; i < nodes; ++i) {
    const double t = grid.node(i);
    ControlTerms terms;
    try {
      terms = control_terms(model, config, t, e);
    } catch (const BarrierDomainError&) {
      trace.breach = true;
      trace.breach_time = t;
      break;
    }
    const auto update = memory.update_node(i, terms.z, config.gamma);
    const Vec u = compose(update.theta_hat, terms.robust);

    trace.t.push_back(t);
    trace.e.push_back(e);
    trace.u.push_back(u);
    trace.V.push_back(terms.level);
    trace.theta_hat.push_back(update.theta_hat);
    if (i + 1 == nodes) break;

    const Vec& held = update.theta_hat;
    const auto field = [&](double s, const Vec& x) {
      const ControlTerms stage = control_terms(model, config, s, x);
      return error_derivative(model, s, x, compose(held, stage.robust));
    };
    const double t_mid = t + 0.5 * dt;
    const double t_next = grid.node(i + 1);
    double stage_time = t;
    try {
      const Vec k1 = error_derivative(model, t, e, u);
      stage_time = t_mid;
      const Vec k2 = field(t_mid, e + 0.5 * dt * k1);
      const Vec k3 = field(t_mid, e + 0.5 * dt * k2);
      stage_time = t_next;
      const Vec k4 = field(t_next, e + dt * k3);
      e += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    } catch (const BarrierDomainError&) {
      trace.breach = true;
      trace.breach_time = stage_time;
      break;
    }
    if (!e.allFinite()) {
      throw IntegrationError(fmt::format("non-finite state at t = {} in iteration {}", t_next, k));
    }
  }
  return trace;
}

std::vector<double> monitor_L(const IterationTrace& trace, const ErrorModel& model,
                              const ControllerConfig& config) {
  std::vector<double> L(trace.size());
  double integral = 0.0;
  double previous = 0.0;
  const double weight = 1.0 / (2.0 * config.gamma);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const double mismatch = (theta_true(model, trace.t[i]) - trace.theta_hat[i]).squaredNorm();
    if (i > 0) integral += 0.5 * (trace.t[i] - trace.t[i - 1]) * (previous + mismatch);
    previous = mismatch;
    L[i] = monitor_barrier(model, config, trace.V[i]) + weight * integral;
  }
  return L;
}

IterationSummary summarize(const IterationTrace& trace, const ErrorModel& model,
                           const ControllerConfig& config) {
  IterationSummary s;
  s.k = trace.k;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    s.sup_e = std::max(s.sup_e, trace.e[i].norm());
    s.sup_V = std::max(s.sup_V, trace.V[i]);
    s.max_theta_hat = std::max(s.max_theta_hat, trace.theta_hat[i].lpNorm<Eigen::Infinity>());
  }
  s.violations = trace.breach ? 1 : 0;
  if (trace.breach || trace.size() == 0) {
    s.V_T = s.decrease_T = s.L_T = kNaN;
    return s;
  }
  s.V_T = trace.V.back();
  s.decrease_T = std::holds_alternative<ErrorModelII>(model)
                     ? monitor_barrier(model, config, s.V_T)
                     : s.V_T;
  s.L_T = trace.L.empty() ? monitor_L(trace, model, config).back() : trace.L.back();
  return s;
}

RunResult run(const ErrorModel& model, const ControllerConfig& config, std::size_t iterations,
              std::size_t steps) {
  if (iterations < 1) throw std::invalid_argument("iteration count K must be at least 1");
  validate(config);
  std::visit([](const auto& m) { validate(m); }, model);

  RunResult result{{}, {}, ParamMemory(TimeGrid(horizon(model), steps), input_dim(model),
                                       config.theta_bar)};
  auto& report = result.report;
  report.level_bound = barrier_level(model, config);
  report.theta_bar = config.theta_bar;
  report.residual = config.theorem == Theorem::Two ? config.eps * horizon(model) : 0.0;

  result.traces.reserve(iterations);
  report.iterations.reserve(iterations);
  for (std::size_t k = 0; k < iterations; ++k) {
    const auto start = std::chrono::steady_clock::now();
    IterationTrace trace = run_iteration(model, config, result.memory, k);
    trace.L = monitor_L(trace, model, config);
    IterationSummary summary = summarize(trace, model, config);
    if (k > 0) summary.delta_L = summary.L_T - report.iterations.back().L_T;
    summary.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.iterations.push_back(summary);
    result.traces.push_back(std::move(trace));
  }
  return result;
}

std::vector<DeltaLVerdict> check_delta_L(const RunReport& report) {
  std::vector<DeltaLVerdict> verdicts;
  const auto& its = report.iterations;
  for (std::size_t k = 1; k < its.size(); ++k) {
    DeltaLVerdict v;
    v.k = its[k].k;
    v.delta_L = its[k].L_T - its[k - 1].L_T;
    v.allowed = -its[k - 1].decrease_T + report.residual;
    v.slack = kDeltaLSlack * (1.0 + std::abs(its[k].L_T));
    // NaN from a breached iteration fails the comparison.
    v.holds = v.delta_L <= v.allowed + v.slack;
    verdicts.push_back(v);
  }
  return verdicts;
}

}  // namespace fblf
