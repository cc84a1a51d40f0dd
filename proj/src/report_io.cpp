#include "fblf/report_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

namespace fblf {

namespace {

std::string num(double x) { return fmt::format("{:.17g}", x); }

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_number(const std::string& cell, std::size_t line_no) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != cell.size()) {
    throw CsvError(fmt::format("line {}: '{}' is not a number", line_no, cell));
  }
  return value;
}

}  // namespace

void write_trace_csv(std::ostream& os, const std::vector<IterationTrace>& traces) {
  const auto find_dim = [&](auto member) -> long {
    for (const auto& tr : traces) {
      if (tr.size() > 0) return (tr.*member)[0].size();
    }
    return 0;
  };
  const long n = find_dim(&IterationTrace::e);
  const long m = find_dim(&IterationTrace::u);

  os << "k,t";
  for (long j = 0; j < n; ++j) os << ",e" << j;
  for (long j = 0; j < m; ++j) os << ",u" << j;
  os << ",V,L";
  for (long j = 0; j < m; ++j) os << ",theta_hat" << j;
  os << ",breach\n";

  for (const auto& tr : traces) {
    for (std::size_t i = 0; i < tr.size(); ++i) {
      std::string row = fmt::format("{},{}", tr.k, num(tr.t[i]));
      for (long j = 0; j < n; ++j) row += "," + num(tr.e[i](j));
      for (long j = 0; j < m; ++j) row += "," + num(tr.u[i](j));
      row += "," + num(tr.V[i]) + "," + (i < tr.L.size() ? num(tr.L[i]) : std::string());
      for (long j = 0; j < m; ++j) row += "," + num(tr.theta_hat[i](j));
      // The breach flag marks the last recorded node of a truncated iteration.
      const bool flagged = tr.breach && i + 1 == tr.size();
      row += flagged ? ",1\n" : ",0\n";
      os << row;
    }
  }
}

void write_summary_csv(std::ostream& os, const RunReport& report) {
  os << "k,sup_e,sup_V,L_T,delta_L,violations\n";
  for (const auto& it : report.iterations) {
    fmt::print(os, "{},{},{},{},{},{}\n", it.k, num(it.sup_e), num(it.sup_V), num(it.L_T),
               it.delta_L ? num(*it.delta_L) : std::string(), it.violations);
  }
}

void write_blf_report_csv(std::ostream& os, const BlfReport& report) {
  os << "check,lo,hi,b_V,applicable,holds,value\n";
  for (const auto& r : report.relations) {
    fmt::print(os, "order,{},{},{},{},{},{}\n", to_string(r.lo), to_string(r.hi), num(r.bound),
               r.applicable ? 1 : 0, r.applicable ? (r.verdict.holds ? 1 : 0) : 1,
               r.verdict.first_violation ? num(*r.verdict.first_violation) : std::string());
  }
  for (const auto& r : report.ibp) {
    fmt::print(os, "ibp,{},,{},1,{},{}\n", to_string(r.kind), num(ibp_probe_bounds().back()),
               r.matches ? 1 : 0, num(r.result.limit_estimate));
  }
}

void print_blf_table(std::ostream& os, const BlfReport& report) {
  fmt::print(os, "{:<18} {:>8}  {}\n", "relation", "b_V", "verdict");
  for (const auto& r : report.relations) {
    std::string verdict = "skipped (claimed for b_V <= 1 only)";
    if (r.applicable) {
      verdict = r.verdict.holds ? "holds"
                                : fmt::format("FAILS ({} at V = {})", r.verdict.failed_quantity,
                                              *r.verdict.first_violation);
    }
    fmt::print(os, "{:<18} {:>8}  {}\n",
               fmt::format("{} <= {}", to_string(r.lo), to_string(r.hi)), r.bound, verdict);
  }
  fmt::print(os, "\n{:<6} {:>14} {:>10}  {}\n", "kind", "f(1,b)/1", "expected", "verdict");
  for (const auto& r : report.ibp) {
    const std::string expected =
        r.expected_holds ? fmt::format("c = {}", r.expected_c) : std::string("-> 0");
    fmt::print(os, "{:<6} {:>14.8g} {:>10}  {}\n", to_string(r.kind), r.result.limit_estimate,
               expected, r.matches ? "ok" : "MISMATCH");
  }
}

SequenceTriple read_lemma_csv(std::istream& is) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(is, line)) {
    ++line_no;
    if (!trim(line).empty()) header = split_row(line);
  }
  if (header.empty()) throw CsvError("empty lemma CSV");

  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < header.size(); ++i) column[header[i]] = i;
  if (!column.contains("r") || !column.contains("s")) {
    throw CsvError("lemma CSV needs columns r and s");
  }
  const bool has_d = column.contains("d");

  SequenceTriple seq;
  if (has_d) seq.d.emplace();
  while (std::getline(is, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_row(line);
    if (cells.size() != header.size()) {
      throw CsvError(fmt::format("line {}: expected {} cells, got {}", line_no, header.size(),
                                 cells.size()));
    }
    seq.r.push_back(parse_number(cells[column["r"]], line_no));
    seq.s.push_back(parse_number(cells[column["s"]], line_no));
    if (has_d) seq.d->push_back(parse_number(cells[column["d"]], line_no));
  }
  if (seq.r.empty()) throw CsvError("lemma CSV has no data rows");
  return seq;
}

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;
constexpr std::array<const char*, 4> kColors = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const PlotSpec& spec) {
  const auto transform_y = [&](double y) { return spec.log_y ? std::log10(y) : y; };
  const auto usable = [&](double y) { return std::isfinite(y) && (!spec.log_y || y > 0.0); };

  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  for (const auto& s : spec.series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!usable(s.y[i])) continue;
      x_lo = std::min(x_lo, s.x[i]);
      x_hi = std::max(x_hi, s.x[i]);
      y_lo = std::min(y_lo, transform_y(s.y[i]));
      y_hi = std::max(y_hi, transform_y(s.y[i]));
    }
  }
  if (spec.reference && usable(*spec.reference)) {
    y_lo = std::min(y_lo, transform_y(*spec.reference));
    y_hi = std::max(y_hi, transform_y(*spec.reference));
  }
  if (!std::isfinite(x_lo)) x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
  if (x_hi == x_lo) x_hi = x_lo + 1.0;
  if (spec.log_y) {
    y_lo = std::floor(y_lo);
    y_hi = std::ceil(y_hi);
  }
  if (y_hi == y_lo) y_hi = y_lo + 1.0;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const auto px = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  const auto py = [&](double ty) { return kTop + (1.0 - (ty - y_lo) / (y_hi - y_lo)) * plot_h; };

  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"12\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"{2}\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">{3}</text>\n"
      "<rect x=\"{4}\" y=\"{5}\" width=\"{6}\" height=\"{7}\" fill=\"none\" stroke=\"black\"/>\n",
      kWidth, kHeight, kWidth / 2.0, escape(spec.title), kLeft, kTop, plot_w, plot_h);

  // y ticks: decades on a log axis, five even steps otherwise.
  std::vector<double> ticks;
  if (spec.log_y) {
    const double step = std::max(1.0, std::ceil((y_hi - y_lo) / 8.0));
    for (double d = y_lo; d <= y_hi + 1e-9; d += step) ticks.push_back(d);
  } else {
    for (int i = 0; i <= 5; ++i) ticks.push_back(y_lo + (y_hi - y_lo) * i / 5.0);
  }
  for (double ty : ticks) {
    const std::string label = spec.log_y ? fmt::format("1e{}", static_cast<int>(ty))
                                         : fmt::format("{:.3g}", ty);
    out += fmt::format(
        "<line x1=\"{0}\" y1=\"{1:.2f}\" x2=\"{2}\" y2=\"{1:.2f}\" stroke=\"#ddd\"/>\n"
        "<text x=\"{3}\" y=\"{4:.2f}\" text-anchor=\"end\">{5}</text>\n",
        kLeft, py(ty), kLeft + plot_w, kLeft - 6.0, py(ty) + 4.0, label);
  }
  for (int i = 0; i <= 5; ++i) {
    const double x = x_lo + (x_hi - x_lo) * i / 5.0;
    out += fmt::format("<text x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\">{:.3g}</text>\n", px(x),
                       kTop + plot_h + 16.0, x);
  }
  out += fmt::format(
      "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n"
      "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>\n",
      kLeft + plot_w / 2.0, kHeight - 12.0, escape(spec.x_label), kTop + plot_h / 2.0,
      kTop + plot_h / 2.0, escape(spec.y_label));

  if (spec.reference && usable(*spec.reference)) {
    const double y = py(transform_y(*spec.reference));
    out += fmt::format(
        "<line x1=\"{0}\" y1=\"{1:.2f}\" x2=\"{2}\" y2=\"{1:.2f}\" stroke=\"black\" "
        "stroke-dasharray=\"6 4\"/>\n"
        "<text x=\"{3}\" y=\"{4:.2f}\" text-anchor=\"end\">{5}</text>\n",
        kLeft, y, kLeft + plot_w, kLeft + plot_w - 4.0, y - 4.0, escape(spec.reference_label));
  }

  for (std::size_t s = 0; s < spec.series.size(); ++s) {
    const auto& series = spec.series[s];
    const char* color = kColors[s % kColors.size()];
    std::string points;
    for (std::size_t i = 0; i < series.x.size() && i < series.y.size(); ++i) {
      if (!usable(series.y[i])) continue;
      points += fmt::format("{:.2f},{:.2f} ", px(series.x[i]), py(transform_y(series.y[i])));
    }
    out += fmt::format(
        "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", color,
        points);
    out += fmt::format("<text x=\"{}\" y=\"{}\" fill=\"{}\">{}</text>\n", kLeft + 8.0,
                       kTop + 16.0 + 14.0 * static_cast<double>(s), color, escape(series.label));
  }
  out += "</svg>\n";
  return out;
}

std::string convergence_svg(const RunReport& report) {
  PlotSpec spec;
  spec.title = "Tracking error over iterations";
  spec.x_label = "iteration k";
  spec.y_label = "sup_t |e_k(t)|";
  spec.log_y = true;
  PlotSeries s{"sup_t |e_k|", {}, {}};
  for (const auto& it : report.iterations) {
    s.x.push_back(static_cast<double>(it.k));
    s.y.push_back(it.sup_e);
  }
  spec.series.push_back(std::move(s));
  return render_svg(spec);
}

std::string constraint_svg(const RunReport& report) {
  PlotSpec spec;
  spec.title = "Barrier argument against its bound";
  spec.x_label = "iteration k";
  spec.y_label = "sup_t V_k(t)";
  PlotSeries s{"sup_t V_k", {}, {}};
  for (const auto& it : report.iterations) {
    s.x.push_back(static_cast<double>(it.k));
    s.y.push_back(it.sup_V);
  }
  spec.series.push_back(std::move(s));
  spec.reference = report.level_bound;
  spec.reference_label = "bound";
  return render_svg(spec);
}

}  // namespace fblf
