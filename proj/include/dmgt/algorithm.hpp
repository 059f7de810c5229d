#pragma once

#include <limits>
#include <string>
#include <vector>

#include "dmgt/kernel.hpp"
#include "dmgt/network.hpp"
#include "dmgt/problem.hpp"
#include "dmgt/types.hpp"

namespace dmgt {

enum class AlgorithmKind { DMGT, DMD, DGT, DDA };
enum class Y0Init { Gradient, Zero };

std::string to_string(AlgorithmKind a);
AlgorithmKind algorithm_from_string(const std::string& s);

struct AlgoConfig {
  AlgorithmKind algorithm = AlgorithmKind::DMGT;
  double eta = 0.01;
  double delta = std::numeric_limits<double>::infinity();
  int max_iter = 1000;
  Y0Init y0 = Y0Init::Gradient;
  bool auto_step = false;
  // Offset of the shifted kernel h(x - x0 + shift); NaN selects the problem default.
  double dda_shift = std::numeric_limits<double>::quiet_NaN();
};

struct AgentSystem {
  RowMat X;
  RowMat Z;
  RowMat Y;
  RowMat G;  // local gradients at the rows of X
  int t = 0;

  int m() const { return static_cast<int>(X.rows()); }
  Vec x_bar() const { return X.colwise().mean().transpose(); }
  Vec z_bar() const { return Z.colwise().mean().transpose(); }
  Vec y_bar() const { return Y.colwise().mean().transpose(); }
};

struct StepEvents {
  bool clipped = false;
  std::vector<char> agent_clipped;
};

Vec clip(const Vec& v, double eta, double delta);

AgentSystem initialize(const Problem& prob, const Kernel& k, const Vec& x0, Y0Init y0);

AgentSystem dmgt_step(const AgentSystem& s, const Problem& prob, const Kernel& k,
                      const MixingMatrix& W, const AlgoConfig& cfg, StepEvents* ev = nullptr);
AgentSystem dmd_step(const AgentSystem& s, const Problem& prob, const Kernel& k,
                     const MixingMatrix& W, const AlgoConfig& cfg, StepEvents* ev = nullptr);
AgentSystem dgt_step(const AgentSystem& s, const Problem& prob, const Kernel& k,
                     const MixingMatrix& W, const AlgoConfig& cfg, StepEvents* ev = nullptr);
// Expects the shifted kernel built by dda_kernel.
AgentSystem dda_step(const AgentSystem& s, const Problem& prob, const Kernel& k,
                     const MixingMatrix& W, const AlgoConfig& cfg, StepEvents* ev = nullptr);
AgentSystem step(const AgentSystem& s, const Problem& prob, const Kernel& k, const MixingMatrix& W,
                 const AlgoConfig& cfg, StepEvents* ev = nullptr);

// h(x - x0 + shift * 1)
Kernel dda_kernel(const Kernel& k, const Vec& x0, double shift);

struct TheoremParameters {
  double eta;
  double delta;
  double lambda;
};

double auto_delta(const Kernel& k, double rho);
double lambda_of(const Kernel& k, int m, double rho, double delta);
TheoremParameters theorem_parameters(const Kernel& k, int m, double rho, double L);

class RunObserver {
 public:
  virtual ~RunObserver() = default;
  virtual void on_start(const Kernel& effective_kernel, const AlgoConfig& cfg) {
    (void)effective_kernel;
    (void)cfg;
  }
  // next is the state after one more step, or null when that step diverged.
  virtual void on_state(const AgentSystem& cur, const AgentSystem* next, const StepEvents& ev) = 0;
  virtual void on_diverged(int t, const std::string& reason) {
    (void)t;
    (void)reason;
  }
};

struct RunSummary {
  int iterations = 0;
  bool diverged = false;
  int diverged_at = -1;
  std::string reason;
  int clip_count = 0;
  int last_clip = -1;
  AgentSystem final_state;
};

// Runs cfg.max_iter rounds from consensus x0; a diverging round freezes the run.
RunSummary run(const Problem& prob, const Kernel& k, const MixingMatrix& W, const AlgoConfig& cfg,
               const Vec& x0, RunObserver* observer = nullptr);

}  // namespace dmgt
