#ifndef FBLF_ANALYSIS_HPP
#define FBLF_ANALYSIS_HPP

#include "fblf/barrier.hpp"
#include "fblf/engine.hpp"
#include "fblf/plant.hpp"

#include <optional>
#include <span>
#include <vector>

namespace fblf {

/// r_k, s_k and an optional perturbation d_k with bound d_bar, k = 0..K-1.
struct SequenceTriple {
  std::vector<double> r;
  std::vector<double> s;
  std::optional<std::vector<double>> d;
  std::optional<double> d_bar;
};

inline constexpr double kLemmaSlack = 1e-12;
inline constexpr double kTailFraction = 0.25;
inline constexpr double kVanishTolerance = 1e-6;

/// Finite-run stand-in for limsup: the max over the last `fraction` of the
/// entries (at least one entry). Zero for an empty sequence.
double tail_limsup(std::span<const double> values, double fraction = kTailFraction);

/// tail_limsup(|x|) <= 1e-6 (1 + max |x|)
bool vanishes(std::span<const double> values);

struct Lemma1Verdict {
  bool inequality_holds = true;
  std::optional<std::size_t> first_violation;
  /// Tail limsup of s.
  double s_limit_estimate = 0.0;
  bool s_vanishes = false;
  bool r_bounded = true;
};

/// Checks r_k <= r_{k-1} - s_k for k >= 1.
Lemma1Verdict lemma1_check(const SequenceTriple& seq);

struct Lemma2Verdict {
  bool inequality_holds = true;
  std::optional<std::size_t> first_violation;
  double limsup_s = 0.0;
  /// limsup_s <= d_bar (1 + 1e-12); only with d_bar.
  std::optional<bool> bound_respected;
  /// Only reported when d vanishes over the tail.
  std::optional<bool> s_vanishes;
  bool r_bounded = true;
};

/// Checks r_k <= r_{k-1} - s_k + d_k for k >= 1. A missing d is read as zero,
/// and then the inequality verdict matches lemma1_check exactly. The
/// hypothesis tying the limits of r and s is not checkable on finite data
/// and is assumed.
Lemma2Verdict lemma2_check(const SequenceTriple& seq);

struct ConvergenceMetrics {
  /// Tail limsup of sup_t V_k (e^T P e for Model II).
  double limsup_supV = 0.0;
  /// eps T for Model I, 2 eps T for Model II.
  double theoretical_bound = 0.0;
  double bound_ratio = 0.0;
  /// alpha1^{-1}(eps T) for Model I, sqrt(2 eps T / lambda_min(P)) for Model II.
  double e_radius = 0.0;
};

/// Requires at least 8 iterations.
ConvergenceMetrics convergence_metrics(const RunReport& report, const ErrorModel& model,
                                       double eps, double T);

struct RelationRow {
  BarrierKind lo;
  BarrierKind hi;
  double bound = 0.0;
  /// False when the relation is only claimed for b_V <= 1 and bound > 1.
  bool applicable = true;
  OrderVerdict verdict;
};

struct IbpRow {
  BarrierKind kind;
  IbpResult result;
  bool expected_holds = false;
  double expected_c = 0.0;
  bool matches = false;
};

struct BlfReport {
  std::vector<RelationRow> relations;
  std::vector<IbpRow> ibp;
  bool all_hold() const;
};

struct DominanceClaim {
  BarrierKind lo;
  BarrierKind hi;
  /// Largest b_V for which the claim is made (infinity when unconditional).
  double max_bound;
};

/// Every lo <= hi dominance claim made for the seven barriers.
std::span<const DominanceClaim> dominance_claims();

inline constexpr double kIbpTolerance = 1e-4;

/// Probe bounds for the infinite-barrier check: 10 .. 1e8, geometric.
std::vector<double> ibp_probe_bounds();

BlfReport blf_report(std::span<const double> bounds, std::size_t samples = 10000);

}  // namespace fblf

#endif  // FBLF_ANALYSIS_HPP
