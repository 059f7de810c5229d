#include "dmgt/algorithm.hpp"

#include <cmath>
#include <stdexcept>

#include "dmgt/errors.hpp"

namespace dmgt {

std::string to_string(AlgorithmKind a) {
  switch (a) {
    case AlgorithmKind::DMGT: return "dmgt";
    case AlgorithmKind::DMD: return "dmd";
    case AlgorithmKind::DGT: return "dgt";
    case AlgorithmKind::DDA: return "dda";
  }
  return "";
}

AlgorithmKind algorithm_from_string(const std::string& s) {
  if (s == "dmgt") return AlgorithmKind::DMGT;
  if (s == "dmd") return AlgorithmKind::DMD;
  if (s == "dgt") return AlgorithmKind::DGT;
  if (s == "dda") return AlgorithmKind::DDA;
  throw ValidationError("unknown algorithm kind '" + s + "'");
}

Vec clip(const Vec& v, double eta, double delta) {
  if (!(eta > 0) || !(delta > 0)) throw std::invalid_argument("clip: eta and delta must be positive");
  double n = v.norm();
  if (n == 0.0) return eta * v;
  return v * std::min(eta, delta / n);
}

namespace {

RowMat local_gradients(const Problem& prob, const RowMat& X) {
  RowMat G(X.rows(), X.cols());
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    G.row(i) = prob.local_grad(static_cast<int>(i), X.row(i).transpose()).transpose();
  return G;
}

RowMat inverse_rows(const Kernel& k, const RowMat& Z) {
  RowMat X(Z.rows(), Z.cols());
  for (Eigen::Index i = 0; i < Z.rows(); ++i) X.row(i) = k.grad_conj(Z.row(i).transpose()).transpose();
  return X;
}

RowMat mirror_rows(const Kernel& k, const RowMat& X) {
  RowMat Z(X.rows(), X.cols());
  for (Eigen::Index i = 0; i < X.rows(); ++i) Z.row(i) = k.grad(X.row(i).transpose()).transpose();
  return Z;
}

void check_shapes(const AgentSystem& s, const Problem& prob, const Kernel& k, const MixingMatrix& W) {
  if (s.m() != prob.m || W.m != prob.m || k.dim() != prob.d || s.X.cols() != prob.d)
    throw std::invalid_argument("step: inconsistent dimensions");
}

AgentSystem dual_mixing_step(const AgentSystem& s, const Problem& prob, const Kernel& k,
                             const MixingMatrix& W, double eta, double delta, StepEvents* ev) {
  check_shapes(s, prob, k, W);
  const int m = s.m();
  RowMat S(m, s.Y.cols());
  StepEvents e;
  e.agent_clipped.assign(m, 0);
  for (int i = 0; i < m; ++i) {
    Vec y = s.Y.row(i).transpose();
    S.row(i) = clip(y, eta, delta).transpose();
    if (eta * y.norm() > delta) {
      e.agent_clipped[i] = 1;
      e.clipped = true;
    }
  }
  AgentSystem n;
  n.Z = W.W * (s.Z - S);
  n.X = inverse_rows(k, n.Z);
  n.G = local_gradients(prob, n.X);
  n.Y = W.W * s.Y + n.G - s.G;
  n.t = s.t + 1;
  if (ev) *ev = std::move(e);
  return n;
}

AgentSystem primal_mixing_step(const AgentSystem& s, const Problem& prob, const Kernel& k,
                               const MixingMatrix& W, double eta, bool tracking, StepEvents* ev) {
  check_shapes(s, prob, k, W);
  const int m = s.m();
  RowMat Xmix = W.W * s.X;
  AgentSystem n;
  n.Z = mirror_rows(k, Xmix) - eta * (tracking ? s.Y : s.G);
  n.X = inverse_rows(k, n.Z);
  n.G = local_gradients(prob, n.X);
  n.Y = tracking ? RowMat(W.W * s.Y + n.G - s.G) : n.G;
  n.t = s.t + 1;
  if (ev) {
    ev->clipped = false;
    ev->agent_clipped.assign(m, 0);
  }
  return n;
}

}  // namespace

AgentSystem initialize(const Problem& prob, const Kernel& k, const Vec& x0, Y0Init y0) {
  if (x0.size() != prob.d || k.dim() != prob.d) throw std::invalid_argument("initialize: dimension mismatch");
  k.domain().require_interior(x0, "initial point");
  AgentSystem s;
  s.X = x0.transpose().replicate(prob.m, 1);
  s.Z = mirror_rows(k, s.X);
  s.G = local_gradients(prob, s.X);
  s.Y = y0 == Y0Init::Gradient ? s.G : RowMat::Zero(prob.m, prob.d);
  s.t = 0;
  return s;
}

AgentSystem dmgt_step(const AgentSystem& s, const Problem& prob, const Kernel& k,
                      const MixingMatrix& W, const AlgoConfig& cfg, StepEvents* ev) {
  return dual_mixing_step(s, prob, k, W, cfg.eta, cfg.delta, ev);
}

AgentSystem dda_step(const AgentSystem& s, const Problem& prob, const Kernel& k,
                     const MixingMatrix& W, const AlgoConfig& cfg, StepEvents* ev) {
  return dual_mixing_step(s, prob, k, W, cfg.eta, std::numeric_limits<double>::infinity(), ev);
}

AgentSystem dmd_step(const AgentSystem& s, const Problem& prob, const Kernel& k,
                     const MixingMatrix& W, const AlgoConfig& cfg, StepEvents* ev) {
  return primal_mixing_step(s, prob, k, W, cfg.eta, false, ev);
}

AgentSystem dgt_step(const AgentSystem& s, const Problem& prob, const Kernel& k,
                     const MixingMatrix& W, const AlgoConfig& cfg, StepEvents* ev) {
  return primal_mixing_step(s, prob, k, W, cfg.eta, true, ev);
}

AgentSystem step(const AgentSystem& s, const Problem& prob, const Kernel& k, const MixingMatrix& W,
                 const AlgoConfig& cfg, StepEvents* ev) {
  switch (cfg.algorithm) {
    case AlgorithmKind::DMGT: return dmgt_step(s, prob, k, W, cfg, ev);
    case AlgorithmKind::DMD: return dmd_step(s, prob, k, W, cfg, ev);
    case AlgorithmKind::DGT: return dgt_step(s, prob, k, W, cfg, ev);
    case AlgorithmKind::DDA: return dda_step(s, prob, k, W, cfg, ev);
  }
  throw std::invalid_argument("step: unknown algorithm");
}

Kernel dda_kernel(const Kernel& k, const Vec& x0, double shift) {
  return shifted(k, Vec::Constant(k.dim(), shift) - x0);
}

double auto_delta(const Kernel& k, double rho) {
  if (!(rho >= 0 && rho < 1)) throw std::invalid_argument("auto_delta: rho must lie in [0,1)");
  if (k.modulus().is_zero()) return std::numeric_limits<double>::infinity();
  const double target = 0.5 * (1.0 - rho);
  double lo = 0.0, hi = 1.0;
  while (k.zeta(2.0 * hi) <= target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) return std::numeric_limits<double>::infinity();
  }
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (k.zeta(2.0 * mid) <= target)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

double lambda_of(const Kernel& k, int m, double rho, double delta) {
  if (!(rho < 1)) throw std::invalid_argument("lambda_of: rho must be below 1");
  if (k.modulus().is_zero()) return 1.0;
  return 1.0 + k.zeta(std::sqrt(20.0 * m) / (1.0 - rho) * delta);
}

TheoremParameters theorem_parameters(const Kernel& k, int m, double rho, double L) {
  if (!(L > 0)) throw std::invalid_argument("theorem_parameters: L must be positive");
  TheoremParameters p;
  p.delta = auto_delta(k, rho);
  p.lambda = lambda_of(k, m, rho, p.delta);
  p.eta = (1.0 - rho) * (1.0 - rho) / (25.0 * L * p.lambda * p.lambda);
  return p;
}

namespace {

std::string infeasibility(const AgentSystem& s, const Problem& prob, const Kernel& k) {
  if (!s.X.allFinite() || !s.Z.allFinite()) return "non-finite iterate";
  if (!s.G.allFinite() || !s.Y.allFinite()) return "non-finite gradient";
  for (Eigen::Index i = 0; i < s.X.rows(); ++i)
    if (!prob.feasible.contains_closure(s.X.row(i).transpose()))
      return "iterate of agent " + std::to_string(i) + " left the feasible set";
  Vec xb = k.grad_conj(s.z_bar());
  if (!xb.allFinite() || !prob.feasible.contains_closure(xb)) return "averaged iterate left the feasible set";
  return {};
}

}  // namespace

RunSummary run(const Problem& prob, const Kernel& k, const MixingMatrix& W, const AlgoConfig& cfg,
               const Vec& x0, RunObserver* observer) {
  if (cfg.max_iter < 0) throw std::invalid_argument("run: max_iter must be nonnegative");
  AlgoConfig c = cfg;
  Kernel keff = k;
  if (c.algorithm == AlgorithmKind::DDA) {
    double shift = std::isnan(c.dda_shift) ? prob.dda_shift : c.dda_shift;
    keff = dda_kernel(k, x0, shift);
  }
  if (c.auto_step && c.algorithm == AlgorithmKind::DMGT) {
    if (!prob.L_analytic) throw PreconditionViolated("run: automatic step size needs the problem's smoothness constant");
    auto tp = theorem_parameters(keff, prob.m, W.rho, *prob.L_analytic);
    c.eta = tp.eta;
    c.delta = tp.delta;
  }
  if (observer) observer->on_start(keff, c);
  RunSummary sum;
  AgentSystem s = initialize(prob, keff, x0, c.y0);
  if (auto why = infeasibility(s, prob, keff); !why.empty()) throw StepError(why, 0);
  for (;;) {
    StepEvents ev;
    AgentSystem next;
    std::string why;
    try {
      next = step(s, prob, keff, W, c, &ev);
      why = infeasibility(next, prob, keff);
    } catch (const NotInImage& e) {
      why = e.what();
    } catch (const NoConvergence& e) {
      why = e.what();
    } catch (const DomainViolation& e) {
      why = e.what();
    } catch (const SingularHessian& e) {
      why = e.what();
    }
    const bool last = s.t >= c.max_iter;
    if (!why.empty()) {
      if (observer) observer->on_state(s, nullptr, ev);
      if (!last) {
        sum.diverged = true;
        sum.diverged_at = s.t + 1;
        sum.reason = why;
        if (observer) observer->on_diverged(s.t + 1, why);
      }
      break;
    }
    if (observer) observer->on_state(s, &next, ev);
    if (last) break;
    if (ev.clipped) {
      ++sum.clip_count;
      sum.last_clip = s.t;
    }
    s = std::move(next);
  }
  sum.iterations = s.t;
  sum.final_state = std::move(s);
  return sum;
}

}  // namespace dmgt
