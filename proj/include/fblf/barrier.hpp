#ifndef FBLF_BARRIER_HPP
#define FBLF_BARRIER_HPP

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fblf {

/// The seven barrier Lyapunov functions. Two logarithmic forms (LI, LII)
/// and five fractional forms (FI..FV); each is a function f(V; b_V) defined
/// on 0 <= V < b_V that grows without bound as V approaches b_V.
///
///   LI   log(b / (b - V))
///   LII  log(b e^V / (b - V))        = V + LI
///   FI   V / (b - V)
///   FII  b V / (b - V)
///   FIII (b + 1 - V) V / (b - V)     = V + FI
///   FIV  (2b - V) V / (b - V)        = V + FII
///   FV   (b + 1) V / (b - V)         = FI + FII
enum class BarrierKind { LI, LII, FI, FII, FIII, FIV, FV };

inline constexpr std::array<BarrierKind, 7> kAllBarrierKinds = {
    BarrierKind::LI,   BarrierKind::LII, BarrierKind::FI, BarrierKind::FII,
    BarrierKind::FIII, BarrierKind::FIV, BarrierKind::FV};

std::string_view to_string(BarrierKind kind);
std::optional<BarrierKind> parse_barrier_kind(std::string_view name);

/// Raised when a barrier is evaluated outside 0 <= V < b_V. In closed loop
/// this is a constraint breach, not an overflow.
class BarrierDomainError : public std::domain_error {
 public:
  BarrierDomainError(double value, double bound);
  double value() const noexcept { return value_; }
  double bound() const noexcept { return bound_; }

 private:
  double value_;
  double bound_;
};

/// Throws BarrierDomainError unless b_V > 0 and 0 <= V < b_V (NaN fails).
void require_in_domain(double value, double bound);

double eval(BarrierKind kind, double value, double bound);

/// First derivative with respect to V.
double d1(BarrierKind kind, double value, double bound);

/// Exact second derivative with respect to V. For the fractional kinds this
/// carries the factor 2 from differentiating (b - V)^-2; the commonly
/// tabulated b/(b - V)^3 style entries omit it.
double d2(BarrierKind kind, double value, double bound);

struct OrderVerdict {
  bool holds = true;
  /// Smallest sampled V at which some comparison failed.
  std::optional<double> first_violation;
  /// "value", "d1" or "d2" for the first failing comparison.
  std::string failed_quantity;
  std::size_t samples = 0;
};

inline constexpr double kOrderSlack = 1e-12;
inline constexpr double kOrderMargin = 0.01;

/// Checks lo <= hi for the value and both derivatives at `samples` evenly
/// spaced V in [0, b_V (1 - margin)]. The slack is relative to max(1, |hi|).
OrderVerdict verify_order(BarrierKind lo, BarrierKind hi, double bound,
                          std::size_t samples, double margin = kOrderMargin);

struct IbpResult {
  /// f(V, b) / V at every probed bound, in probe order.
  std::vector<double> ratios;
  /// Ratio at the largest bound.
  double limit_estimate = 0.0;
  /// Same as limit_estimate when it is a positive constant, else 0.
  double c_estimate = 0.0;
  bool ibp_holds = false;
};

/// Probes the infinite barrier property: f(V, b) -> c V as b -> infinity.
/// The bounds must be strictly increasing and all exceed V.
IbpResult ibp_probe(BarrierKind kind, double value, std::span<const double> bounds);

/// Geometric sequence of `count` bounds from `first` to `last` inclusive.
std::vector<double> geometric_bounds(double first, double last, std::size_t count);

}  // namespace fblf

#endif  // FBLF_BARRIER_HPP
