#ifndef FBLF_ENGINE_HPP
#define FBLF_ENGINE_HPP

#include "fblf/controller.hpp"
#include "fblf/learner.hpp"
#include "fblf/plant.hpp"

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

namespace fblf {

/// The state left the finite range during integration.
class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Node-wise record of one learning iteration. Arrays hold one entry per
/// recorded node: N + 1 for a complete iteration, fewer after a breach.
struct IterationTrace {
  std::size_t k = 0;
  std::vector<double> t;
  std::vector<Vec> e;
  std::vector<Vec> u;
  /// Barrier argument: V(e, t) for Model I, e^T P e for Model II.
  std::vector<double> V;
  std::vector<Vec> theta_hat;
  /// Lyapunov-Krasovskii monitor; filled by run() or monitor_L().
  std::vector<double> L;
  bool breach = false;
  std::optional<double> breach_time;

  std::size_t size() const noexcept { return t.size(); }
};

struct IterationSummary {
  std::size_t k = 0;
  double sup_e = 0.0;
  double sup_V = 0.0;
  /// Barrier argument at T (NaN after a breach).
  double V_T = 0.0;
  /// The term the monitor must drop by in the next iteration: V_k(T) for
  /// Model I, W_k(T) for Model II.
  double decrease_T = 0.0;
  double L_T = 0.0;
  std::optional<double> delta_L;
  std::size_t violations = 0;
  /// max over nodes of |theta_hat|_inf.
  double max_theta_hat = 0.0;
  double wall_seconds = 0.0;
};

struct RunReport {
  std::vector<IterationSummary> iterations;
  /// Allowed per-iteration growth of L: eps T under Theorem::Two, else 0.
  double residual = 0.0;
  /// b_V, or b_e^2 for Model II.
  double level_bound = 0.0;
  double theta_bar = 0.0;

  std::size_t total_violations() const;
};

struct RunResult {
  RunReport report;
  std::vector<IterationTrace> traces;
  ParamMemory memory;
};

/// One pass over [0, T]. Per node: read the state, form z, update the
/// memory node, form u; then a classical RK4 step to the next node with the
/// estimate held at its node value while z, rho and the robust term follow
/// the stage states. A barrier breach at any stage truncates the trace and
/// sets `breach`; the memory keeps the updates made so far.
IterationTrace run_iteration(const ErrorModel& model, const ControllerConfig& config,
                             ParamMemory& memory, std::size_t k = 0);

/// L_k(t_i) = barrier(V_k(t_i)) + 1/(2 gamma) int_0^{t_i} |theta - theta_hat|^2,
/// trapezoid rule on the recorded nodes.
std::vector<double> monitor_L(const IterationTrace& trace, const ErrorModel& model,
                              const ControllerConfig& config);

/// Runs K iterations on an N-step grid from zero memory.
RunResult run(const ErrorModel& model, const ControllerConfig& config, std::size_t iterations,
              std::size_t steps);

IterationSummary summarize(const IterationTrace& trace, const ErrorModel& model,
                           const ControllerConfig& config);

struct DeltaLVerdict {
  std::size_t k = 0;
  double delta_L = 0.0;
  /// -decrease_{k-1}(T) + residual
  double allowed = 0.0;
  double slack = 0.0;
  bool holds = false;
};

inline constexpr double kDeltaLSlack = 1e-6;

/// Checks L_k(T) - L_{k-1}(T) <= -decrease_{k-1}(T) + residual + slack with
/// slack = 1e-6 (1 + |L_k(T)|) for every k >= 1. Iterations without a value
/// at T (breaches) fail.
std::vector<DeltaLVerdict> check_delta_L(const RunReport& report);

}  // namespace fblf

#endif  // FBLF_ENGINE_HPP
