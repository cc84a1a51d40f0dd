#include "fblf/controller.hpp"

#include <cmath>
#include <fmt/format.h>
#include <stdexcept>

namespace fblf {

namespace {

constexpr double kZeroSignal = 1e-300;

double quadratic_level(const Vec& error, const Mat& P) { return error.dot(P * error); }

Vec input_direction(const Vec& error, const Mat& P, const Mat& b) {
  return b.transpose() * (P * error);
}

}  // namespace

void validate(const ControllerConfig& config) {
  if (!(config.bound > 0.0)) throw std::invalid_argument("barrier bound must be positive");
  if (!(config.gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  if (!(config.theta_bar > 0.0)) throw std::invalid_argument("theta_bar must be positive");
  if (config.mode == RobustMode::Continuous && !(config.eps > 0.0)) {
    throw std::invalid_argument("eps must be positive in continuous mode");
  }
}

double barrier_level(const ErrorModel& model, const ControllerConfig& config) {
  return std::holds_alternative<ErrorModelII>(model) ? config.bound * config.bound : config.bound;
}

// The Model I gains are the first derivatives of FII and FV.
Vec z_model1_thm1(double V, const Vec& lgv, double bound) {
  return d1(BarrierKind::FII, V, bound) * lgv;
}

Vec z_model1_thm2(double V, const Vec& lgv, double bound) {
  return d1(BarrierKind::FV, V, bound) * lgv;
}

Vec z_model2_thm1(const Vec& error, const Mat& P, const Mat& b, double bound_sq) {
  const double x = quadratic_level(error, P);
  require_in_domain(x, bound_sq);
  const double gap = bound_sq - x;
  return bound_sq / (gap * gap) * input_direction(error, P, b);
}

Vec z_model2_thm2(const Vec& error, const Mat& P, const Mat& b, double bound_sq) {
  const double x = quadratic_level(error, P);
  require_in_domain(x, bound_sq);
  const double gap = bound_sq - x;
  return bound_sq * (bound_sq + 1.0) / (gap * gap) * input_direction(error, P, b);
}

Vec robust_disc(const Vec& z, double rho) {
  const double norm = z.norm();
  if (norm < kZeroSignal) return Vec::Zero(z.size());
  return (rho / norm) * z;
}

Vec robust_cont(const Vec& z, double rho, double eps) {
  const Vec mu = rho * z;
  return (rho / (mu.norm() + eps)) * mu;
}

Vec compose(const Vec& theta_hat, const Vec& robust) {
  if (theta_hat.size() != robust.size()) {
    throw DimensionError(fmt::format("estimate has size {}, robust term has size {}",
                                     theta_hat.size(), robust.size()));
  }
  return -theta_hat - robust;
}

ControlTerms control_terms(const ErrorModel& model, const ControllerConfig& config, double t,
                           const Vec& error) {
  ControlTerms terms;
  const bool thm1 = config.theorem == Theorem::One;
  if (const auto* m1 = std::get_if<ErrorModelI>(&model)) {
    terms.level = m1->certificate.V(error, t);
    const Vec lgv = m1->certificate.lgv(error, t);
    terms.z = thm1 ? z_model1_thm1(terms.level, lgv, config.bound)
                   : z_model1_thm2(terms.level, lgv, config.bound);
  } else {
    const auto& m2 = std::get<ErrorModelII>(model);
    const double bound_sq = config.bound * config.bound;
    terms.level = quadratic_level(error, m2.P);
    terms.z = thm1 ? z_model2_thm1(error, m2.P, m2.b, bound_sq)
                   : z_model2_thm2(error, m2.P, m2.b, bound_sq);
  }
  terms.rho = rho_bound(model, t, error);
  terms.robust = config.mode == RobustMode::Discontinuous
                     ? robust_disc(terms.z, terms.rho)
                     : robust_cont(terms.z, terms.rho, config.eps);
  return terms;
}

double monitor_barrier(const ErrorModel& model, const ControllerConfig& config, double level) {
  const BarrierKind kind = config.theorem == Theorem::One ? BarrierKind::FII : BarrierKind::FV;
  if (std::holds_alternative<ErrorModelII>(model)) {
    // W_k = 1/2 f(e^T P e; b_e^2)
    return 0.5 * eval(kind, level, config.bound * config.bound);
  }
  return eval(kind, level, config.bound);
}

}  // namespace fblf
