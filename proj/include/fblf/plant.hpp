#ifndef FBLF_PLANT_HPP
#define FBLF_PLANT_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace fblf {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Lumped uncertainty w(x, t) (an m-vector) and a norm bound rho(e, t) on
/// the residual w(x_d + e, t) - w(x_d, t). rho must vanish at e = 0.
struct UncertaintySpec {
  std::function<Vec(const Vec& state, double t)> w;
  std::function<double(const Vec& error, double t)> rho;
};

/// Lyapunov function of the nominal error system and its class-K-infinity
/// brackets. `dissipation` is dV/dt + L_f V; `lgv` is L_g V as an m-vector.
struct LyapunovCertificate {
  std::function<double(const Vec& error, double t)> V;
  std::function<double(const Vec& error, double t)> dissipation;
  std::function<Vec(const Vec& error, double t)> lgv;
  std::function<double(double)> alpha1;
  std::function<double(double)> alpha2;
  std::function<double(double)> alpha;
  std::function<double(double)> alpha1_inverse;
};

/// e' = f(e, t) + g(e, t) (u + dw + theta)
struct ErrorModelI {
  int n = 1;
  int m = 1;
  std::function<Vec(const Vec& error, double t)> f;
  std::function<Mat(const Vec& error, double t)> g;
  std::function<Vec(double t)> x_d;
  UncertaintySpec uncertainty;
  LyapunovCertificate certificate;
  double T = 0.0;
};

/// e' = A e + b (u + dw + theta), with A^T P + P A = -Q.
struct ErrorModelII {
  Mat A;
  Mat b;
  Mat P;
  Mat Q;
  std::function<Vec(double t)> x_d;
  UncertaintySpec uncertainty;
  double T = 0.0;
};

using ErrorModel = std::variant<ErrorModelI, ErrorModelII>;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

int state_dim(const ErrorModel& model);
int input_dim(const ErrorModel& model);
double horizon(const ErrorModel& model);
const UncertaintySpec& uncertainty(const ErrorModel& model);
Vec desired_state(const ErrorModel& model, double t);

/// w(x_d(t), t): the iteration-invariant part of the uncertainty. Only
/// monitors read this; the controller never does.
Vec theta_true(const ErrorModel& model, double t);

/// w(x_d(t) + e, t) - w(x_d(t), t)
Vec delta_w(const ErrorModel& model, double t, const Vec& error);

double rho_bound(const ErrorModel& model, double t, const Vec& error);

Vec rhs_model1(const ErrorModelI& model, double t, const Vec& error, const Vec& input);
Vec rhs_model2(const ErrorModelII& model, double t, const Vec& error, const Vec& input);
Vec error_derivative(const ErrorModel& model, double t, const Vec& error, const Vec& input);

/// The zero vector in the model's state space: x_k(0) = x_d(0) every iteration.
Vec initial_error(const ErrorModel& model);

/// Shape checks; Model II additionally requires symmetric positive definite
/// P and Q with ||A^T P + P A + Q|| <= 1e-10. Throws DimensionError or
/// std::invalid_argument.
void validate(const ErrorModelI& model);
void validate(const ErrorModelII& model);

double lyapunov_residual(const ErrorModelII& model);
double min_eigenvalue(const Mat& symmetric);

struct CertificateCheck {
  std::size_t samples = 0;
  std::size_t sandwich_failures = 0;
  std::size_t dissipation_failures = 0;
  std::size_t origin_failures = 0;
  bool ok() const { return sandwich_failures == 0 && dissipation_failures == 0 && origin_failures == 0; }
};

/// Samples e uniformly in [-box, box]^n and t in [0, T] and checks
/// alpha1(|e|) <= V <= alpha2(|e|), dissipation <= -alpha(|e|), V(0, t) = 0.
CertificateCheck check_certificate(const ErrorModelI& model, std::size_t samples,
                                   std::uint64_t seed, double box = 10.0);

struct RhoCheck {
  std::size_t samples = 0;
  std::size_t bound_failures = 0;
  std::size_t origin_failures = 0;
  bool ok() const { return bound_failures == 0 && origin_failures == 0; }
};

/// Samples (e, t) and checks ||dw(e, t)|| <= rho(e, t) and rho(0, t) = 0.
RhoCheck check_rho(const ErrorModel& model, std::size_t samples, std::uint64_t seed,
                   double box = 10.0);

struct BuiltinModels {
  ErrorModelI scalar_I;
  ErrorModelII scalar_II;
};

/// Scalar desk-scale plants on T = 2 pi with x_d = sin t, w(x, t) = 0.5 x
/// and rho = 0.5 |e|. Model I: f = -e, g = 1, V = e^2 / 2. Model II: A = -1,
/// b = 1, P = 0.5, Q = 1.
BuiltinModels builtin_examples();

/// "scalar-I" or "scalar-II"; throws std::invalid_argument otherwise.
ErrorModel builtin_model(std::string_view name);

}  // namespace fblf

#endif  // FBLF_PLANT_HPP
