// fblf: simulate barrier-constrained learning control, compare barrier
// functions and check iterative-sequence inequalities.
//
// Exit codes: 0 ok, 1 config/IO error, 2 constraint breach, 3 property violation.

#include "fblf/analysis.hpp"
#include "fblf/engine.hpp"
#include "fblf/report_io.hpp"
#include "fblf/run_config.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kIoError = 1;
constexpr int kBreach = 2;
constexpr int kViolation = 3;

void write_file(const fs::path& path, const auto& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  writer(out);
  if (!out) throw std::runtime_error(fmt::format("error writing '{}'", path.string()));
}

struct SimulateJob {
  std::string config_path;
  fblf::RunConfig config;
  int status = kOk;
  std::string message;
};

void run_job(SimulateJob& job) {
  const auto& cfg = job.config;
  try {
    const fblf::ErrorModel model = fblf::make_model(cfg);
    const auto result = fblf::run(model, cfg.controller, cfg.iterations, cfg.steps);
    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    write_file(dir / "trace.csv", [&](std::ostream& os) { fblf::write_trace_csv(os, result.traces); });
    write_file(dir / "summary.csv",
               [&](std::ostream& os) { fblf::write_summary_csv(os, result.report); });
    write_file(dir / "memory.csv", [&](std::ostream& os) { result.memory.write_csv(os); });
    if (cfg.emit_svg) {
      write_file(dir / "convergence.svg",
                 [&](std::ostream& os) { os << fblf::convergence_svg(result.report); });
      write_file(dir / "constraint.svg",
                 [&](std::ostream& os) { os << fblf::constraint_svg(result.report); });
    }
    const auto& last = result.report.iterations.back();
    const auto breaches = result.report.total_violations();
    job.message = fmt::format("{}: {} iterations, final sup|e| = {:.6g}, breaches = {} -> {}",
                              job.config_path, result.report.iterations.size(), last.sup_e,
                              breaches, dir.string());
    job.status = breaches > 0 ? kBreach : kOk;
  } catch (const fblf::IntegrationError& e) {
    job.status = kBreach;
    job.message = fmt::format("{}: {}", job.config_path, e.what());
  } catch (const std::exception& e) {
    job.status = kIoError;
    job.message = fmt::format("{}: {}", job.config_path, e.what());
  }
}

int cmd_simulate(const std::vector<std::string>& paths, const std::string& out_override,
                 bool svg, unsigned jobs) {
  std::vector<SimulateJob> work;
  for (const auto& path : paths) {
    SimulateJob job{path, {}, kOk, {}};
    try {
      job.config = fblf::load_run_config(path);
    } catch (const fblf::ConfigError& e) {
      std::cerr << fmt::format("{}: {}\n", path, e.what());
      return kIoError;
    }
    if (!out_override.empty()) job.config.output_dir = out_override;
    if (paths.size() > 1) {
      job.config.output_dir =
          (fs::path(job.config.output_dir) / fs::path(path).stem()).string();
    }
    job.config.emit_svg = job.config.emit_svg || svg;
    work.push_back(std::move(job));
  }

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < work.size(); i = next++) run_job(work[i]);
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(work.size())));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  int status = kOk;
  for (const auto& job : work) {
    (job.status == kOk ? std::cout : std::cerr) << job.message << '\n';
    if (job.status == kIoError) {
      status = kIoError;
    } else if (job.status == kBreach && status == kOk) {
      status = kBreach;
    }
  }
  return status;
}

int cmd_compare_blf(const std::vector<double>& bounds, const std::string& out_dir,
                    std::size_t samples) {
  for (double b : bounds) {
    if (!(b > 0.0)) {
      std::cerr << fmt::format("b_V: bound {} must be positive\n", b);
      return kIoError;
    }
  }
  const auto report = fblf::blf_report(bounds, samples);
  fblf::print_blf_table(std::cout, report);
  try {
    const fs::path dir(out_dir.empty() ? "." : out_dir);
    fs::create_directories(dir);
    write_file(dir / "blf_report.csv",
               [&](std::ostream& os) { fblf::write_blf_report_csv(os, report); });
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kIoError;
  }
  return report.all_hold() ? kOk : kViolation;
}

int cmd_check_lemmas(const std::string& path, std::optional<double> d_bar) {
  fblf::SequenceTriple seq;
  try {
    std::ifstream in(path);
    if (!in) throw fblf::CsvError(fmt::format("cannot open '{}'", path));
    seq = fblf::read_lemma_csv(in);
    seq.d_bar = d_bar;
  } catch (const fblf::CsvError& e) {
    std::cerr << e.what() << '\n';
    return kIoError;
  }

  bool ok = false;
  if (!seq.d) {
    const auto v = fblf::lemma1_check(seq);
    ok = v.inequality_holds;
    std::cout << fmt::format("r_k <= r_(k-1) - s_k over {} entries: {}\n", seq.r.size(),
                             ok ? "holds" : fmt::format("violated at k = {}", *v.first_violation));
    std::cout << fmt::format("limsup s (tail) = {:.6g}, s vanishes: {}, r bounded: {}\n",
                             v.s_limit_estimate, v.s_vanishes ? "yes" : "no",
                             v.r_bounded ? "yes" : "no");
  } else {
    const auto v = fblf::lemma2_check(seq);
    ok = v.inequality_holds;
    std::cout << fmt::format("r_k <= r_(k-1) - s_k + d_k over {} entries: {}\n", seq.r.size(),
                             ok ? "holds" : fmt::format("violated at k = {}", *v.first_violation));
    std::cout << fmt::format("limsup s (tail) = {:.6g}, r bounded: {}\n", v.limsup_s,
                             v.r_bounded ? "yes" : "no");
    if (v.bound_respected) {
      std::cout << fmt::format("limsup s <= d_bar = {}: {}\n", *seq.d_bar,
                               *v.bound_respected ? "yes" : "no");
      ok = ok && *v.bound_respected;
    }
    if (v.s_vanishes) std::cout << fmt::format("d vanishes; s vanishes: {}\n", *v.s_vanishes ? "yes" : "no");
  }
  return ok ? kOk : kViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Barrier-constrained iterative learning control simulator"};
  app.require_subcommand(1);

  std::string out_dir;
  bool svg = false;
  unsigned jobs = 1;

  std::vector<std::string> configs;
  auto* simulate = app.add_subcommand("simulate", "Run simulations from config files");
  simulate->add_option("config", configs, "Config file(s)")->required();
  simulate->add_option("--out", out_dir, "Output directory (overrides the config)");
  simulate->add_flag("--svg", svg, "Also write convergence.svg and constraint.svg");
  simulate->add_option("--jobs", jobs, "Run up to this many configs concurrently")
      ->check(CLI::PositiveNumber);

  std::vector<double> bounds;
  std::size_t samples = 10000;
  auto* compare = app.add_subcommand("compare-blf", "Check barrier orderings and the infinite barrier property");
  compare->add_option("b_V", bounds, "Barrier bound(s)")->required();
  compare->add_option("--out", out_dir, "Directory for blf_report.csv");
  compare->add_option("--samples", samples, "Grid points per relation")->check(CLI::Range(2, 10000000));

  std::string lemma_csv;
  std::optional<double> d_bar;
  auto* lemmas = app.add_subcommand("check-lemmas", "Check r_k <= r_(k-1) - s_k (+ d_k) on a CSV");
  lemmas->add_option("csv", lemma_csv, "CSV with columns r, s and optionally d")->required();
  lemmas->add_option("--d-bar", d_bar, "Bound on |d_k| to test limsup s against");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kIoError;
  }

  if (*simulate) return cmd_simulate(configs, out_dir, svg, jobs);
  if (*compare) return cmd_compare_blf(bounds, out_dir, samples);
  return cmd_check_lemmas(lemma_csv, d_bar);
}
