#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dmgt/errors.hpp"
#include "dmgt/experiment.hpp"
#include "dmgt/hruc.hpp"

using namespace dmgt;

namespace {

struct CommonFlags {
  std::string config;
  std::vector<std::uint64_t> seeds;
  std::string out;
  int threads = 1;
  int max_iter = 0;
};

void add_common(CLI::App* app, CommonFlags& f, bool needs_config) {
  if (needs_config) app->add_option("config", f.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  app->add_option("--seed", f.seeds, "override the config seeds")->expected(1, -1);
  app->add_option("--out", f.out, "output location");
  app->add_option("--threads", f.threads, "worker threads")->check(CLI::PositiveNumber);
  app->add_option("--max-iter", f.max_iter, "override the iteration budget")->check(CLI::PositiveNumber);
}

ExperimentConfig load(const CommonFlags& f) {
  ExperimentConfig cfg = parse_config(f.config);
  if (!f.seeds.empty()) cfg.seeds = f.seeds;
  if (f.max_iter > 0) cfg.max_iter = f.max_iter;
  validate_config(cfg);
  return cfg;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

void report_all_diverged(const TuneResult& tr) {
  for (const auto& b : tr.best)
    if (b.tuned && b.all_diverged)
      std::cerr << "warning: " << AllDiverged("every grid cell of " + b.label + " diverged").what() << "\n";
}

int cmd_run(const CommonFlags& f) {
  ExperimentConfig cfg = load(f);
  BatchOptions opt;
  opt.threads = f.threads;
  opt.out = f.out;
  BatchResult br = run_batch(cfg, opt);
  if (br.tuning) report_all_diverged(*br.tuning);
  std::cout << "run_id,eta,delta,final_stationarity,final_f_bar,diverged_at,stagnated,clips\n";
  for (const auto& r : br.runs) {
    const RunRecord* last = r.records.empty() ? nullptr : &r.records.back();
    std::cout << r.run_id << ',' << fmt(r.eta) << ',' << fmt(r.delta) << ','
              << (last ? fmt(last->stationarity) : "nan") << ',' << (last ? fmt(last->f_bar) : "nan") << ','
              << r.summary.diverged_at << ',' << (r.stagnated ? 1 : 0) << ',' << r.summary.clip_count << '\n';
  }
  std::cout << "wrote " << br.dir.string() << "\n";
  return 0;
}

int cmd_tune(const CommonFlags& f) {
  ExperimentConfig cfg = load(f);
  TuneResult tr = tune(cfg, f.threads);
  report_all_diverged(tr);
  std::string csv = tr.to_csv();
  std::cout << csv;
  for (const auto& b : tr.best)
    if (b.tuned) std::cout << "best " << b.label << ": eta=" << fmt(b.eta) << " delta=" << fmt(b.delta) << "\n";
  if (!f.out.empty()) {
    std::ofstream out(f.out, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + f.out);
    out << csv;
  }
  return 0;
}

struct CertifyFlags {
  std::string kernel = "all";
  int d = 5;
  int samples = 1000;
  std::uint64_t seed = 7;
  std::vector<double> deltas{0.01, 0.1, 1.0};
  int threads = 1;
  std::string out;
};

int cmd_certify(const CertifyFlags& f) {
  auto cat = kernel_catalogue(f.d);
  bool found = false, ok = true;
  std::ostringstream csv;
  csv << "kernel,delta,worst_gap,analytic_zeta,n_samples,violations\n";
  for (const auto& e : cat) {
    if (f.kernel != "all" && f.kernel != e.name) continue;
    found = true;
    CertifyOptions opt;
    opt.threads = f.threads;
    HrucReport rep = certify(e.kernel, f.deltas, f.samples, f.seed, opt);
    std::cout << "[" << e.name << "]\n" << rep.to_text();
    for (std::size_t j = 0; j < rep.delta_grid.size(); ++j) {
      long nv = 0;
      for (const auto& v : rep.violations) nv += v.delta == rep.delta_grid[j];
      csv << e.name << ',' << format_double(rep.delta_grid[j]) << ',' << format_double(rep.worst_gap[j]) << ','
          << format_double(rep.analytic_zeta[j]) << ',' << rep.n_samples << ',' << nv << '\n';
    }
    ok = ok && rep.consistent();
  }
  if (!found) {
    std::cerr << "unknown kernel '" << f.kernel << "'; choose from:";
    for (const auto& e : cat) std::cerr << ' ' << e.name;
    std::cerr << "\n";
    return 2;
  }
  if (!f.out.empty()) {
    std::ofstream out(f.out, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + f.out);
    out << csv.str();
  }
  return ok ? 0 : 1;
}

int cmd_check_invariants() {
  int rc = 0;
  for (const char* bin : {DMGT_PROPERTY_TESTS, DMGT_UNIT_TESTS}) {
    std::cout << "== " << bin << "\n" << std::flush;
    int r = std::system(bin);
    if (r != 0) rc = 1;
  }
  std::cout << (rc == 0 ? "all invariants hold\n" : "invariant failures reported above\n");
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decentralized mirror gradient tracking experiments"};
  app.require_subcommand(1);

  CommonFlags run_f, tune_f;
  auto* run_cmd = app.add_subcommand("run", "tune where needed, run the batch and write its artifacts");
  add_common(run_cmd, run_f, true);
  auto* tune_cmd = app.add_subcommand("tune", "grid-search step sizes and clipping radii");
  add_common(tune_cmd, tune_f, true);

  CertifyFlags cert_f;
  CommonFlags cert_common;
  auto* cert_cmd = app.add_subcommand("certify", "sample the Hessian distortion of catalogue kernels");
  cert_cmd->add_option("--kernel", cert_f.kernel, "catalogue name or 'all'");
  cert_cmd->add_option("--dim", cert_f.d, "dimension")->check(CLI::PositiveNumber);
  cert_cmd->add_option("--samples", cert_f.samples, "samples per radius")->check(CLI::PositiveNumber);
  cert_cmd->add_option("--deltas", cert_f.deltas, "radii")->expected(1, -1);
  cert_cmd->add_option("--seed", cert_f.seed, "sampling seed");
  cert_cmd->add_option("--threads", cert_f.threads, "worker threads")->check(CLI::PositiveNumber);
  cert_cmd->add_option("--out", cert_f.out, "CSV report path");
  cert_cmd->add_option("--max-iter", cert_common.max_iter, "unused by certification");

  auto* inv_cmd = app.add_subcommand("check-invariants", "run the property and unit suites");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run_cmd) return cmd_run(run_f);
    if (*tune_cmd) return cmd_tune(tune_f);
    if (*cert_cmd) return cmd_certify(cert_f);
    if (*inv_cmd) return cmd_check_invariants();
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
