#ifndef FBLF_CONTROLLER_HPP
#define FBLF_CONTROLLER_HPP

#include "fblf/barrier.hpp"
#include "fblf/plant.hpp"

namespace fblf {

enum class RobustMode { Discontinuous, Continuous };

/// Which convergence result the closed loop is configured for. One pairs the
/// b_V V / (b_V - V) barrier with the switching robust term; Two pairs
/// (b_V + 1) V / (b_V - V) with the smoothed term and tolerates a residual.
enum class Theorem { One = 1, Two = 2 };

struct ControllerConfig {
  Theorem theorem = Theorem::One;
  RobustMode mode = RobustMode::Discontinuous;
  /// Smoothing width; used only in continuous mode.
  double eps = 0.0;
  /// b_V for Model I, b_e for Model II (b_e^2 bounds e^T P e).
  double bound = 1.0;
  double gamma = 1.0;
  double theta_bar = 1.0;
};

/// Throws std::invalid_argument naming the offending field.
void validate(const ControllerConfig& config);

/// The bound the barrier argument must stay under: b_V, or b_e^2 for Model II.
double barrier_level(const ErrorModel& model, const ControllerConfig& config);

// Learning signals z_k. Each throws BarrierDomainError once the barrier
// argument reaches its bound.

/// b_V^2 / (b_V - V)^2 LgV
Vec z_model1_thm1(double V, const Vec& lgv, double bound);
/// b_e^2 b^T P e / (b_e^2 - e^T P e)^2
Vec z_model2_thm1(const Vec& error, const Mat& P, const Mat& b, double bound_sq);
/// b_V (b_V + 1) / (b_V - V)^2 LgV
Vec z_model1_thm2(double V, const Vec& lgv, double bound);
/// b_e^2 (b_e^2 + 1) / (b_e^2 - e^T P e)^2 b^T P e
Vec z_model2_thm2(const Vec& error, const Mat& P, const Mat& b, double bound_sq);

/// Switching term: rho z / |z|, and exactly zero once |z| < 1e-300.
Vec robust_disc(const Vec& z, double rho);
/// Smoothed term: mu / (|mu| + eps) rho with mu = z rho.
Vec robust_cont(const Vec& z, double rho, double eps);
/// u = -theta_hat - s
Vec compose(const Vec& theta_hat, const Vec& robust);

/// Everything the control law needs from one state sample.
struct ControlTerms {
  /// V(e, t) for Model I, e^T P e for Model II.
  double level = 0.0;
  Vec z;
  double rho = 0.0;
  Vec robust;
};

ControlTerms control_terms(const ErrorModel& model, const ControllerConfig& config, double t,
                           const Vec& error);

/// Barrier value entering the Lyapunov-Krasovskii monitor for this
/// model/theorem pair (W_k for Model II).
double monitor_barrier(const ErrorModel& model, const ControllerConfig& config, double level);

}  // namespace fblf

#endif  // FBLF_CONTROLLER_HPP
