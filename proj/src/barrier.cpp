#include "fblf/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace fblf {

namespace {

// log(b / (b - V)) without cancellation when V << b.
double log_barrier(double value, double bound) { return -std::log1p(-value / bound); }

double sq(double x) { return x * x; }
double cube(double x) { return x * x * x; }

}  // namespace

std::string_view to_string(BarrierKind kind) {
  switch (kind) {
    case BarrierKind::LI: return "LI";
    case BarrierKind::LII: return "LII";
    case BarrierKind::FI: return "FI";
    case BarrierKind::FII: return "FII";
    case BarrierKind::FIII: return "FIII";
    case BarrierKind::FIV: return "FIV";
    case BarrierKind::FV: return "FV";
  }
  return "?";
}

std::optional<BarrierKind> parse_barrier_kind(std::string_view name) {
  for (auto kind : kAllBarrierKinds) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

BarrierDomainError::BarrierDomainError(double value, double bound)
    : std::domain_error(fmt::format("barrier argument {} outside [0, {})", value, bound)),
      value_(value),
      bound_(bound) {}

void require_in_domain(double value, double bound) {
  if (!(bound > 0.0) || !(value >= 0.0) || !(value < bound)) {
    throw BarrierDomainError(value, bound);
  }
}

double eval(BarrierKind kind, double value, double bound) {
  require_in_domain(value, bound);
  const double gap = bound - value;
  switch (kind) {
    case BarrierKind::LI: return log_barrier(value, bound);
    case BarrierKind::LII: return value + log_barrier(value, bound);
    case BarrierKind::FI: return value / gap;
    case BarrierKind::FII: return bound * value / gap;
    case BarrierKind::FIII: return (bound + 1.0 - value) * value / gap;
    case BarrierKind::FIV: return (2.0 * bound - value) * value / gap;
    case BarrierKind::FV: return (bound + 1.0) * value / gap;
  }
  return 0.0;
}

double d1(BarrierKind kind, double value, double bound) {
  require_in_domain(value, bound);
  const double gap = bound - value;
  switch (kind) {
    case BarrierKind::LI: return 1.0 / gap;
    case BarrierKind::LII: return 1.0 + 1.0 / gap;
    case BarrierKind::FI: return bound / sq(gap);
    case BarrierKind::FII: return sq(bound) / sq(gap);
    case BarrierKind::FIII: return 1.0 + bound / sq(gap);
    case BarrierKind::FIV: return 1.0 + sq(bound) / sq(gap);
    case BarrierKind::FV: return bound * (bound + 1.0) / sq(gap);
  }
  return 0.0;
}

double d2(BarrierKind kind, double value, double bound) {
  require_in_domain(value, bound);
  const double gap = bound - value;
  // Kinds differing by a linear term share the same expression, so ties in
  // the ordering checks compare bit-identical values.
  switch (kind) {
    case BarrierKind::LI:
    case BarrierKind::LII: return 1.0 / sq(gap);
    case BarrierKind::FI:
    case BarrierKind::FIII: return 2.0 * bound / cube(gap);
    case BarrierKind::FII:
    case BarrierKind::FIV: return 2.0 * sq(bound) / cube(gap);
    case BarrierKind::FV: return 2.0 * bound * (bound + 1.0) / cube(gap);
  }
  return 0.0;
}

OrderVerdict verify_order(BarrierKind lo, BarrierKind hi, double bound, std::size_t samples,
                          double margin) {
  if (samples < 2) throw std::invalid_argument("verify_order needs at least two samples");
  if (!(bound > 0.0)) throw std::invalid_argument("verify_order needs a positive bound");
  if (!(margin > 0.0 && margin < 1.0)) throw std::invalid_argument("margin must lie in (0, 1)");

  OrderVerdict verdict;
  verdict.samples = samples;
  const double top = bound * (1.0 - margin);
  const auto dominated = [](double a, double b) {
    return a <= b + kOrderSlack * std::max(1.0, std::abs(b));
  };
  for (std::size_t i = 0; i < samples; ++i) {
    const double v = top * static_cast<double>(i) / static_cast<double>(samples - 1);
    const char* failed = nullptr;
    if (!dominated(eval(lo, v, bound), eval(hi, v, bound))) {
      failed = "value";
    } else if (!dominated(d1(lo, v, bound), d1(hi, v, bound))) {
      failed = "d1";
    } else if (!dominated(d2(lo, v, bound), d2(hi, v, bound))) {
      failed = "d2";
    }
    if (failed != nullptr) {
      verdict.holds = false;
      verdict.first_violation = v;
      verdict.failed_quantity = failed;
      break;
    }
  }
  return verdict;
}

IbpResult ibp_probe(BarrierKind kind, double value, std::span<const double> bounds) {
  if (!(value > 0.0)) throw std::invalid_argument("ibp_probe needs V > 0");
  if (bounds.size() < 2) throw std::invalid_argument("ibp_probe needs at least two bounds");
  for (std::size_t i = 1; i < bounds.size(); ++i) {
    if (!(bounds[i] > bounds[i - 1])) throw std::invalid_argument("bounds must be increasing");
  }

  IbpResult result;
  result.ratios.reserve(bounds.size());
  for (double b : bounds) result.ratios.push_back(eval(kind, value, b) / value);

  // Compare the last ratio with the one at least a decade earlier: a positive
  // limit is stable there, a vanishing one keeps shrinking like 1/b.
  const double last_bound = bounds.back();
  std::size_t ref = 0;
  for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
    if (bounds[i] <= last_bound / 10.0) ref = i;
  }
  const double last = result.ratios.back();
  const double earlier = result.ratios[ref];
  result.limit_estimate = last;
  const bool settled = std::abs(last - earlier) <= 1e-3 * std::abs(last);
  result.ibp_holds = last > 0.0 && settled;
  result.c_estimate = result.ibp_holds ? last : 0.0;
  return result;
}

std::vector<double> geometric_bounds(double first, double last, std::size_t count) {
  if (count < 2 || !(first > 0.0) || !(last > first)) {
    throw std::invalid_argument("geometric_bounds needs 0 < first < last and count >= 2");
  }
  std::vector<double> out(count);
  const double step = std::log(last / first) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = first * std::exp(step * static_cast<double>(i));
  }
  out.front() = first;
  out.back() = last;
  return out;
}

}  // namespace fblf
