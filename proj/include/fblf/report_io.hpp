#ifndef FBLF_REPORT_IO_HPP
#define FBLF_REPORT_IO_HPP

#include "fblf/analysis.hpp"
#include "fblf/engine.hpp"

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fblf {

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Columns: k, t, e0.., u0.., V, L, theta_hat0.., breach. Numbers are
/// written with 17 significant digits so output is reproducible bit for bit.
void write_trace_csv(std::ostream& os, const std::vector<IterationTrace>& traces);

/// Columns: k, sup_e, sup_V, L_T, delta_L, violations.
void write_summary_csv(std::ostream& os, const RunReport& report);

/// Columns: check, lo, hi, b_V, applicable, holds, value. Ordering rows
/// carry the first violating V; ibp rows carry the limit estimate.
void write_blf_report_csv(std::ostream& os, const BlfReport& report);
void print_blf_table(std::ostream& os, const BlfReport& report);

/// Reads columns r, s and optionally d (any order, header required).
SequenceTriple read_lemma_csv(std::istream& is);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  std::vector<PlotSeries> series;
  /// Optional horizontal reference line (e.g. the barrier bound).
  std::optional<double> reference;
  std::string reference_label;
};

std::string render_svg(const PlotSpec& spec);

/// sup_t |e_k| against k on a log axis.
std::string convergence_svg(const RunReport& report);
/// sup_t V_k against k with the barrier bound drawn in.
std::string constraint_svg(const RunReport& report);

}  // namespace fblf

#endif  // FBLF_REPORT_IO_HPP
