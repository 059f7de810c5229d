#pragma once

#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dmgt/algorithm.hpp"
#include "dmgt/kernel.hpp"
#include "dmgt/problem.hpp"

namespace dmgt {

inline constexpr double kBndTol = 1e-12;

struct RunRecord {
  int t = 0;
  double f_bar = 0.0;
  double stationarity = 0.0;
  double rel_error = std::numeric_limits<double>::quiet_NaN();
  double consensus_primal = 0.0;
  double consensus_dual = 0.0;
  double E_t_proxy = 0.0;
  double M_t_proxy = 0.0;
  double G_proxy = 0.0;
  bool clipped = false;
  std::string status = "running";
};

// dist(g, -N_Z(x)) for an interval feasible set Z.
double stationarity_residual(const Domain& Z, const Vec& x, const Vec& g, double bnd_tol = kBndTol);
double stationarity(const Problem& prob, const Vec& x, double bnd_tol = kBndTol);

double consensus_primal(const AgentSystem& s);
double consensus_dual(const AgentSystem& s);

double xi_of(double L, double rho, double lambda);
double consensus_potential(const AgentSystem& s, const Kernel& k, double L, double rho, double lambda);

struct PotentialParams {
  double L = 1.0;
  double rho = 0.0;
  double lambda = 1.0;
  double eta = 1.0;
};

double optimality_measure(const AgentSystem& s, const AgentSystem& next, const Kernel& k,
                          const PotentialParams& p);
// Closed form of the optimality measure for h = ||x||^2/2 without clipping.
double case_one_measure(const AgentSystem& s, const PotentialParams& p);

struct BoundCheck {
  bool holds = false;
  double margin = 0.0;
  double min_G = 0.0;
  double bound = 0.0;
};

BoundCheck theorem_bound_check(const std::vector<RunRecord>& records, double f0, double f_lower,
                               double eta, int T, double slack = 1.0);

// Per-iteration diagnostics; records every `stride` iterations plus the last one.
class Recorder : public RunObserver {
 public:
  Recorder(const Problem& prob, double L, double rho, int stride = 1);

  void on_start(const Kernel& k, const AlgoConfig& cfg) override;
  void on_state(const AgentSystem& cur, const AgentSystem* next, const StepEvents& ev) override;
  void on_diverged(int t, const std::string& reason) override;

  const std::vector<RunRecord>& records() const { return records_; }
  std::vector<RunRecord>& records() { return records_; }
  const PotentialParams& params() const { return params_; }

 private:
  RunRecord make_record(const AgentSystem& cur, const AgentSystem* next, const StepEvents& ev) const;

  const Problem& prob_;
  std::optional<Kernel> k_;
  AlgoConfig cfg_;
  PotentialParams params_;
  int stride_;
  std::vector<RunRecord> records_;
};

// Checks the three iterate bounds of the clipped dual-mixing scheme at every step.
class ClipBoundMonitor : public RunObserver {
 public:
  ClipBoundMonitor(double rho, double slack = 1e-10) : rho_(rho), slack_(slack) {}
  void on_start(const Kernel& k, const AlgoConfig& cfg) override;
  void on_state(const AgentSystem& cur, const AgentSystem* next, const StepEvents& ev) override;

  int checks() const { return checks_; }
  int violations() const { return violations_; }
  double worst_ratio() const { return worst_; }

 private:
  double rho_, slack_, delta_ = 0.0;
  int checks_ = 0, violations_ = 0;
  double worst_ = 0.0;
};

// Forwards every callback to each observer in order.
class ObserverList : public RunObserver {
 public:
  explicit ObserverList(std::vector<RunObserver*> obs) : obs_(std::move(obs)) {}
  void on_start(const Kernel& k, const AlgoConfig& cfg) override {
    for (auto* o : obs_) o->on_start(k, cfg);
  }
  void on_state(const AgentSystem& cur, const AgentSystem* next, const StepEvents& ev) override {
    for (auto* o : obs_) o->on_state(cur, next, ev);
  }
  void on_diverged(int t, const std::string& reason) override {
    for (auto* o : obs_) o->on_diverged(t, reason);
  }

 private:
  std::vector<RunObserver*> obs_;
};

// Fills rel_error = f_bar - f_star with f_star the smallest finite f_bar across all runs.
double fill_relative_error(const std::vector<std::vector<RunRecord>*>& runs);

std::string csv_header();
void write_records_csv(std::ostream& os, const std::string& run_id, const std::string& algorithm,
                       const std::string& kernel, const std::vector<RunRecord>& records);
std::string format_double(double v);

}  // namespace dmgt
