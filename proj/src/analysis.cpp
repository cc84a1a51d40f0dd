#include "fblf/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fblf {

namespace {

constexpr double kAlways = std::numeric_limits<double>::infinity();

constexpr std::array<DominanceClaim, 9> kClaims = {{
    {BarrierKind::LI, BarrierKind::LII, kAlways},
    {BarrierKind::LI, BarrierKind::FI, kAlways},
    {BarrierKind::FI, BarrierKind::FIII, kAlways},
    {BarrierKind::LII, BarrierKind::FIII, kAlways},
    {BarrierKind::FII, BarrierKind::FIII, 1.0},
    {BarrierKind::FII, BarrierKind::FIV, kAlways},
    {BarrierKind::FI, BarrierKind::FV, kAlways},
    {BarrierKind::FII, BarrierKind::FV, kAlways},
    {BarrierKind::FIII, BarrierKind::FV, kAlways},
}};

struct InequalityScan {
  bool holds = true;
  std::optional<std::size_t> first_violation;
};

// r_k <= r_{k-1} - s_k (+ d_k)
InequalityScan scan(const SequenceTriple& seq, const std::vector<double>* d) {
  const std::size_t n = seq.r.size();
  if (seq.s.size() != n || (d != nullptr && d->size() != n)) {
    throw std::invalid_argument("sequences must have equal lengths");
  }
  if (n > 0 && !std::isfinite(seq.r[0])) throw std::invalid_argument("r_0 must be finite");
  InequalityScan out;
  for (std::size_t k = 1; k < n; ++k) {
    double rhs = seq.r[k - 1] - seq.s[k];
    if (d != nullptr) rhs += (*d)[k];
    if (!(seq.r[k] <= rhs + kLemmaSlack * std::max(1.0, std::abs(rhs)))) {
      out.holds = false;
      out.first_violation = k;
      break;
    }
  }
  return out;
}

bool bounded_by_start(const SequenceTriple& seq, const std::vector<double>* d) {
  if (seq.r.empty()) return true;
  double ceiling = seq.r[0];
  if (d != nullptr) {
    for (std::size_t k = 1; k < d->size(); ++k) ceiling += std::max(0.0, (*d)[k]);
  }
  return std::all_of(seq.r.begin(), seq.r.end(), [&](double r) {
    return std::isfinite(r) && r <= ceiling + kLemmaSlack * std::max(1.0, std::abs(ceiling));
  });
}

}  // namespace

double tail_limsup(std::span<const double> values, double fraction) {
  if (values.empty()) return 0.0;
  const auto n = values.size();
  auto window = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
  window = std::clamp<std::size_t>(window, 1, n);
  return *std::max_element(values.end() - static_cast<std::ptrdiff_t>(window), values.end());
}

bool vanishes(std::span<const double> values) {
  if (values.empty()) return true;
  std::vector<double> mags(values.size());
  std::transform(values.begin(), values.end(), mags.begin(), [](double x) { return std::abs(x); });
  const double peak = *std::max_element(mags.begin(), mags.end());
  return tail_limsup(mags) <= kVanishTolerance * (1.0 + peak);
}

Lemma1Verdict lemma1_check(const SequenceTriple& seq) {
  const InequalityScan s = scan(seq, nullptr);
  Lemma1Verdict v;
  v.inequality_holds = s.holds;
  v.first_violation = s.first_violation;
  v.s_limit_estimate = tail_limsup(seq.s);
  v.s_vanishes = vanishes(seq.s);
  v.r_bounded = bounded_by_start(seq, nullptr);
  return v;
}

Lemma2Verdict lemma2_check(const SequenceTriple& seq) {
  const std::vector<double>* d = seq.d ? &*seq.d : nullptr;
  const InequalityScan s = scan(seq, d);
  Lemma2Verdict v;
  v.inequality_holds = s.holds;
  v.first_violation = s.first_violation;
  v.limsup_s = tail_limsup(seq.s);
  if (seq.d_bar) v.bound_respected = v.limsup_s <= *seq.d_bar * (1.0 + kLemmaSlack);
  if (d == nullptr || vanishes(*d)) v.s_vanishes = vanishes(seq.s);
  v.r_bounded = bounded_by_start(seq, d);
  return v;
}

ConvergenceMetrics convergence_metrics(const RunReport& report, const ErrorModel& model,
                                       double eps, double T) {
  if (report.iterations.size() < 8) {
    throw std::invalid_argument("convergence metrics need at least 8 iterations");
  }
  std::vector<double> sup_v;
  sup_v.reserve(report.iterations.size());
  for (const auto& it : report.iterations) sup_v.push_back(it.sup_V);

  ConvergenceMetrics m;
  m.limsup_supV = tail_limsup(sup_v);
  if (const auto* m2 = std::get_if<ErrorModelII>(&model)) {
    m.theoretical_bound = 2.0 * eps * T;
    m.e_radius = std::sqrt(m.theoretical_bound / min_eigenvalue(m2->P));
  } else {
    const auto& m1 = std::get<ErrorModelI>(model);
    m.theoretical_bound = eps * T;
    m.e_radius = m1.certificate.alpha1_inverse ? m1.certificate.alpha1_inverse(eps * T)
                                               : std::numeric_limits<double>::quiet_NaN();
  }
  m.bound_ratio = m.theoretical_bound > 0.0 ? m.limsup_supV / m.theoretical_bound : 0.0;
  return m;
}

std::span<const DominanceClaim> dominance_claims() { return kClaims; }

std::vector<double> ibp_probe_bounds() { return geometric_bounds(10.0, 1e8, 29); }

bool BlfReport::all_hold() const {
  const bool relations_ok = std::all_of(relations.begin(), relations.end(), [](const auto& r) {
    return !r.applicable || r.verdict.holds;
  });
  const bool ibp_ok = std::all_of(ibp.begin(), ibp.end(), [](const auto& r) { return r.matches; });
  return relations_ok && ibp_ok;
}

BlfReport blf_report(std::span<const double> bounds, std::size_t samples) {
  if (bounds.empty()) throw std::invalid_argument("blf_report needs at least one bound");
  BlfReport report;
  for (double b : bounds) {
    if (!(b > 0.0)) throw std::invalid_argument("barrier bounds must be positive");
    for (const auto& claim : kClaims) {
      RelationRow row{claim.lo, claim.hi, b, b <= claim.max_bound, {}};
      if (row.applicable) row.verdict = verify_order(claim.lo, claim.hi, b, samples);
      report.relations.push_back(row);
    }
  }

  const auto probe = ibp_probe_bounds();
  for (auto kind : kAllBarrierKinds) {
    IbpRow row{kind, ibp_probe(kind, 1.0, probe), false, 0.0, false};
    switch (kind) {
      case BarrierKind::LI:
      case BarrierKind::FI: row.expected_holds = false; break;
      case BarrierKind::FIV: row.expected_holds = true; row.expected_c = 2.0; break;
      default: row.expected_holds = true; row.expected_c = 1.0; break;
    }
    row.matches = row.expected_holds
                      ? row.result.ibp_holds &&
                            std::abs(row.result.c_estimate - row.expected_c) <= kIbpTolerance
                      : !row.result.ibp_holds && row.result.limit_estimate < kIbpTolerance;
    report.ibp.push_back(row);
  }
  return report;
}

}  // namespace fblf
