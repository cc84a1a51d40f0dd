#include "fblf/plant.hpp"

#include <cmath>
#include <fmt/format.h>
#include <numbers>
#include <random>

namespace fblf {

namespace {

constexpr double kLyapunovTolerance = 1e-10;

// Lipschitz constant of the built-in uncertainty w(x, t) = 0.5 x.
constexpr double kLw = 0.5;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_size(const Vec& v, int expected, const char* what) {
  if (v.size() != expected) {
    throw DimensionError(fmt::format("{} has size {}, expected {}", what, v.size(), expected));
  }
}

Vec uniform_vector(std::mt19937_64& rng, int n, double box) {
  std::uniform_real_distribution<double> dist(-box, box);
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = dist(rng);
  return v;
}

}  // namespace

int state_dim(const ErrorModel& model) {
  return std::visit(overloaded{[](const ErrorModelI& m) { return m.n; },
                               [](const ErrorModelII& m) { return static_cast<int>(m.A.rows()); }},
                    model);
}

int input_dim(const ErrorModel& model) {
  return std::visit(overloaded{[](const ErrorModelI& m) { return m.m; },
                               [](const ErrorModelII& m) { return static_cast<int>(m.b.cols()); }},
                    model);
}

double horizon(const ErrorModel& model) {
  return std::visit([](const auto& m) { return m.T; }, model);
}

const UncertaintySpec& uncertainty(const ErrorModel& model) {
  return std::visit([](const auto& m) -> const UncertaintySpec& { return m.uncertainty; }, model);
}

Vec desired_state(const ErrorModel& model, double t) {
  return std::visit([t](const auto& m) { return m.x_d(t); }, model);
}

Vec theta_true(const ErrorModel& model, double t) {
  return uncertainty(model).w(desired_state(model, t), t);
}

Vec delta_w(const ErrorModel& model, double t, const Vec& error) {
  const Vec xd = desired_state(model, t);
  const auto& w = uncertainty(model).w;
  return w(xd + error, t) - w(xd, t);
}

double rho_bound(const ErrorModel& model, double t, const Vec& error) {
  return uncertainty(model).rho(error, t);
}

namespace {

// Shared by both models: the uncertainty enters through the input channel.
Vec lumped_input(const Vec& xd, const UncertaintySpec& unc, double t, const Vec& error,
                 const Vec& input) {
  const Vec theta = unc.w(xd, t);
  const Vec dw = unc.w(xd + error, t) - theta;
  if (dw.size() != input.size()) {
    throw DimensionError(
        fmt::format("uncertainty has size {}, input has size {}", dw.size(), input.size()));
  }
  return input + dw + theta;
}

}  // namespace

Vec rhs_model1(const ErrorModelI& model, double t, const Vec& error, const Vec& input) {
  require_size(error, model.n, "error");
  require_size(input, model.m, "input");
  const Mat g = model.g(error, t);
  if (g.rows() != model.n || g.cols() != model.m) {
    throw DimensionError(fmt::format("g is {}x{}, expected {}x{}", g.rows(), g.cols(), model.n,
                                     model.m));
  }
  return model.f(error, t) + g * lumped_input(model.x_d(t), model.uncertainty, t, error, input);
}

Vec rhs_model2(const ErrorModelII& model, double t, const Vec& error, const Vec& input) {
  require_size(error, static_cast<int>(model.A.rows()), "error");
  require_size(input, static_cast<int>(model.b.cols()), "input");
  return model.A * error +
         model.b * lumped_input(model.x_d(t), model.uncertainty, t, error, input);
}

Vec error_derivative(const ErrorModel& model, double t, const Vec& error, const Vec& input) {
  return std::visit(
      overloaded{[&](const ErrorModelI& m) { return rhs_model1(m, t, error, input); },
                 [&](const ErrorModelII& m) { return rhs_model2(m, t, error, input); }},
      model);
}

Vec initial_error(const ErrorModel& model) { return Vec::Zero(state_dim(model)); }

void validate(const ErrorModelI& model) {
  if (model.n < 1 || model.m < 1) throw DimensionError("model dimensions must be positive");
  if (!(model.T > 0.0)) throw std::invalid_argument("horizon T must be positive");
  if (!model.f || !model.g || !model.x_d || !model.uncertainty.w || !model.uncertainty.rho ||
      !model.certificate.V || !model.certificate.lgv) {
    throw std::invalid_argument("model I is missing a required function");
  }
  const Vec e0 = Vec::Zero(model.n);
  require_size(model.x_d(0.0), model.n, "x_d");
  require_size(model.f(e0, 0.0), model.n, "f");
  require_size(model.uncertainty.w(model.x_d(0.0), 0.0), model.m, "w");
  require_size(model.certificate.lgv(e0, 0.0), model.m, "LgV");
  const Mat g = model.g(e0, 0.0);
  if (g.rows() != model.n || g.cols() != model.m) throw DimensionError("g has the wrong shape");
}

double lyapunov_residual(const ErrorModelII& model) {
  return (model.A.transpose() * model.P + model.P * model.A + model.Q).norm();
}

double min_eigenvalue(const Mat& symmetric) {
  Eigen::SelfAdjointEigenSolver<Mat> solver(symmetric, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

void validate(const ErrorModelII& model) {
  const auto n = model.A.rows();
  if (n < 1 || model.A.cols() != n) throw DimensionError("A must be square");
  if (model.b.rows() != n || model.b.cols() < 1) throw DimensionError("b must be n x m");
  if (model.P.rows() != n || model.P.cols() != n) throw DimensionError("P must be n x n");
  if (model.Q.rows() != n || model.Q.cols() != n) throw DimensionError("Q must be n x n");
  if (!(model.T > 0.0)) throw std::invalid_argument("horizon T must be positive");
  if (!model.x_d || !model.uncertainty.w || !model.uncertainty.rho) {
    throw std::invalid_argument("model II is missing a required function");
  }
  require_size(model.uncertainty.w(model.x_d(0.0), 0.0), static_cast<int>(model.b.cols()), "w");
  if ((model.P - model.P.transpose()).norm() > kLyapunovTolerance ||
      (model.Q - model.Q.transpose()).norm() > kLyapunovTolerance) {
    throw std::invalid_argument("P and Q must be symmetric");
  }
  if (!(min_eigenvalue(model.P) > 0.0) || !(min_eigenvalue(model.Q) > 0.0)) {
    throw std::invalid_argument("P and Q must be positive definite");
  }
  if (const double r = lyapunov_residual(model); !(r <= kLyapunovTolerance)) {
    throw std::invalid_argument(fmt::format("A^T P + P A + Q has norm {}", r));
  }
}

CertificateCheck check_certificate(const ErrorModelI& model, std::size_t samples,
                                   std::uint64_t seed, double box) {
  const auto& cert = model.certificate;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> time(0.0, model.T);
  CertificateCheck check;
  check.samples = samples;
  const Vec zero = Vec::Zero(model.n);
  for (std::size_t i = 0; i < samples; ++i) {
    const Vec e = uniform_vector(rng, model.n, box);
    const double t = time(rng);
    const double norm = e.norm();
    const double v = cert.V(e, t);
    // Relative slack for the equality cases of the sandwich.
    const double tol = 1e-12 * std::max(1.0, std::abs(v));
    if (cert.alpha1(norm) > v + tol || v > cert.alpha2(norm) + tol) ++check.sandwich_failures;
    if (cert.dissipation(e, t) > -cert.alpha(norm) + tol) ++check.dissipation_failures;
    if (cert.V(zero, t) != 0.0) ++check.origin_failures;
  }
  return check;
}

RhoCheck check_rho(const ErrorModel& model, std::size_t samples, std::uint64_t seed, double box) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> time(0.0, horizon(model));
  RhoCheck check;
  check.samples = samples;
  const int n = state_dim(model);
  const Vec zero = Vec::Zero(n);
  for (std::size_t i = 0; i < samples; ++i) {
    const Vec e = uniform_vector(rng, n, box);
    const double t = time(rng);
    const double rho = rho_bound(model, t, e);
    if (delta_w(model, t, e).norm() > rho * (1.0 + 1e-12)) ++check.bound_failures;
    if (rho_bound(model, t, zero) != 0.0) ++check.origin_failures;
  }
  return check;
}

BuiltinModels builtin_examples() {

  const double horizon = 2.0 * std::numbers::pi;

  UncertaintySpec unc;
  unc.w = [](const Vec& x, double) -> Vec { return kLw * x; };
  unc.rho = [](const Vec& e, double) { return kLw * e.norm(); };
  const auto xd = [](double t) -> Vec { return Vec::Constant(1, std::sin(t)); };

  ErrorModelI m1;
  m1.n = 1;
  m1.m = 1;
  m1.f = [](const Vec& e, double) -> Vec { return -e; };
  m1.g = [](const Vec&, double) -> Mat { return Mat::Identity(1, 1); };
  m1.x_d = xd;
  m1.uncertainty = unc;
  m1.T = horizon;
  auto& cert = m1.certificate;
  cert.V = [](const Vec& e, double) { return 0.5 * e.squaredNorm(); };
  cert.dissipation = [](const Vec& e, double) { return -e.squaredNorm(); };
  cert.lgv = [](const Vec& e, double) -> Vec { return e; };
  cert.alpha1 = [](double s) { return 0.5 * s * s; };
  cert.alpha2 = [](double s) { return 0.5 * s * s; };
  cert.alpha = [](double s) { return s * s; };
  cert.alpha1_inverse = [](double v) { return std::sqrt(2.0 * v); };

  ErrorModelII m2;
  m2.A = Mat::Constant(1, 1, -1.0);
  m2.b = Mat::Constant(1, 1, 1.0);
  m2.P = Mat::Constant(1, 1, 0.5);
  m2.Q = Mat::Constant(1, 1, 1.0);
  m2.x_d = xd;
  m2.uncertainty = unc;
  m2.T = horizon;

  return {std::move(m1), std::move(m2)};
}

ErrorModel builtin_model(std::string_view name) {
  auto models = builtin_examples();
  if (name == "scalar-I") return std::move(models.scalar_I);
  if (name == "scalar-II") return std::move(models.scalar_II);
  throw std::invalid_argument(fmt::format("unknown model '{}'", name));
}

}  // namespace fblf
