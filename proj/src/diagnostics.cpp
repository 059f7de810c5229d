#include "dmgt/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "dmgt/errors.hpp"

namespace dmgt {

double stationarity_residual(const Domain& Z, const Vec& x, const Vec& g, double bnd_tol) {
  if (!Z.is_interval()) throw std::invalid_argument("stationarity: feasible set must be an interval set");
  if (!Z.contains_closure(x)) throw DomainViolation("stationarity: point outside the feasible set");
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const bool at_lo = x(i) - Z.lower()(i) <= bnd_tol;
    const bool at_hi = Z.upper()(i) - x(i) <= bnd_tol;
    double r = g(i);
    if (at_lo && at_hi)
      r = 0.0;
    else if (at_lo)
      r = std::min(g(i), 0.0);
    else if (at_hi)
      r = std::max(g(i), 0.0);
    s += r * r;
  }
  return std::sqrt(s);
}

double stationarity(const Problem& prob, const Vec& x, double bnd_tol) {
  if (!prob.feasible.contains_closure(x)) throw DomainViolation("stationarity: point outside the feasible set");
  return stationarity_residual(prob.feasible, x, prob.grad_f(x), bnd_tol);
}

double consensus_primal(const AgentSystem& s) {
  Eigen::RowVectorXd mean = s.X.colwise().mean();
  return (s.X.rowwise() - mean).squaredNorm() / s.m();
}

double consensus_dual(const AgentSystem& s) {
  Eigen::RowVectorXd mean = s.Z.colwise().mean();
  return (s.Z.rowwise() - mean).squaredNorm() / s.m();
}

double xi_of(double L, double rho, double lambda) {
  return 32.0 * L * L * lambda * lambda / ((1.0 - rho) * (1.0 - rho));
}

namespace {

double dual_sq(const Hessian& H, const Vec& u) { return u.dot(H.solve(u)); }

double potential_with(const AgentSystem& s, const Hessian& H, double xi) {
  const int m = s.m();
  Vec ybar = s.y_bar(), zbar = s.z_bar();
  double e = 0.0;
  for (int i = 0; i < m; ++i) {
    e += dual_sq(H, s.Y.row(i).transpose() - ybar);
    e += xi * dual_sq(H, zbar - s.Z.row(i).transpose());
  }
  return e / m;
}

}  // namespace

double consensus_potential(const AgentSystem& s, const Kernel& k, double L, double rho, double lambda) {
  Hessian H = k.hessian(k.grad_conj(s.z_bar()));
  return potential_with(s, H, xi_of(L, rho, lambda));
}

double optimality_measure(const AgentSystem& s, const AgentSystem& next, const Kernel& k,
                          const PotentialParams& p) {
  Vec zb = s.z_bar(), zn = next.z_bar();
  Vec xb = k.grad_conj(zb), xn = k.grad_conj(zn);
  Hessian H = k.hessian(xb);
  double E = potential_with(s, H, xi_of(p.L, p.rho, p.lambda));
  return dual_sq(H, zn - zb) / (12.0 * p.eta * p.eta) + (p.L / p.eta) * k.bregman(xb, xn) +
         (1.0 - p.rho) / (32.0 * p.L * p.eta) * E;
}

double case_one_measure(const AgentSystem& s, const PotentialParams& p) {
  const int m = s.m();
  Vec ybar = s.y_bar(), xbar = s.x_bar();
  double xi = xi_of(p.L, p.rho, p.lambda);
  double c = 0.0;
  for (int i = 0; i < m; ++i)
    c += (s.Y.row(i).transpose() - ybar).squaredNorm() + xi * (s.X.row(i).transpose() - xbar).squaredNorm();
  c /= m;
  return (1.0 / 12.0 + p.L * p.eta / 2.0) * ybar.squaredNorm() + (1.0 - p.rho) / (32.0 * p.L * p.eta) * c;
}

BoundCheck theorem_bound_check(const std::vector<RunRecord>& records, double f0, double f_lower,
                               double eta, int T, double slack) {
  BoundCheck b;
  b.bound = (f0 - f_lower) / (T * eta);
  b.min_G = std::numeric_limits<double>::infinity();
  for (const auto& r : records)
    if (r.t < T && std::isfinite(r.G_proxy)) b.min_G = std::min(b.min_G, r.G_proxy);
  b.margin = slack * b.bound - b.min_G;
  b.holds = std::isfinite(b.min_G) && b.min_G <= slack * b.bound;
  return b;
}

Recorder::Recorder(const Problem& prob, double L, double rho, int stride)
    : prob_(prob), stride_(std::max(1, stride)) {
  params_.L = L;
  params_.rho = rho;
}

void Recorder::on_start(const Kernel& k, const AlgoConfig& cfg) {
  k_ = k;
  cfg_ = cfg;
  params_.eta = cfg.eta;
  double delta = cfg.algorithm == AlgorithmKind::DMGT ? cfg.delta : std::numeric_limits<double>::infinity();
  params_.lambda = lambda_of(k, prob_.m, params_.rho, delta);
  records_.clear();
}

RunRecord Recorder::make_record(const AgentSystem& cur, const AgentSystem* next,
                                const StepEvents& ev) const {
  const Kernel& k = *k_;
  RunRecord r;
  r.t = cur.t;
  Vec zb = cur.z_bar();
  Vec xb = k.grad_conj(zb);
  r.f_bar = prob_.f(xb);
  r.stationarity = stationarity_residual(prob_.feasible, xb, prob_.grad_f(xb));
  r.consensus_primal = consensus_primal(cur);
  r.consensus_dual = consensus_dual(cur);
  Hessian H = k.hessian(xb);
  double xi = xi_of(params_.L, params_.rho, params_.lambda);
  r.E_t_proxy = potential_with(cur, H, xi);
  r.M_t_proxy = r.f_bar + r.E_t_proxy / (8.0 * params_.L);
  r.clipped = ev.clipped;
  if (next) {
    Vec zn = next->z_bar();
    Vec xn = k.grad_conj(zn);
    r.G_proxy = dual_sq(H, zn - zb) / (12.0 * params_.eta * params_.eta) +
                (params_.L / params_.eta) * k.bregman(xb, xn) +
                (1.0 - params_.rho) / (32.0 * params_.L * params_.eta) * r.E_t_proxy;
  } else {
    r.G_proxy = std::numeric_limits<double>::quiet_NaN();
    r.status = "diverged";
  }
  return r;
}

void Recorder::on_state(const AgentSystem& cur, const AgentSystem* next, const StepEvents& ev) {
  const bool final_iter = cur.t >= cfg_.max_iter;
  const bool last = final_iter || next == nullptr;
  if (!last && cur.t % stride_ != 0) return;
  RunRecord r = make_record(cur, next, ev);
  if (final_iter) r.status = "done";
  records_.push_back(r);
}

void Recorder::on_diverged(int, const std::string&) {
  if (!records_.empty()) records_.back().status = "diverged";
}

void ClipBoundMonitor::on_start(const Kernel&, const AlgoConfig& cfg) {
  delta_ = cfg.algorithm == AlgorithmKind::DMGT ? cfg.delta : std::numeric_limits<double>::infinity();
}

void ClipBoundMonitor::on_state(const AgentSystem& cur, const AgentSystem* next, const StepEvents&) {
  if (!next || !std::isfinite(delta_)) return;
  const double m = cur.m();
  Eigen::RowVectorXd zb = cur.Z.colwise().mean();
  double q1 = (cur.z_bar() - next->z_bar()).norm() / delta_;
  double q2 = (cur.Z.rowwise() - zb).norm() / (std::sqrt(3.0 * m) * delta_ / (1.0 - rho_));
  double q3 = (cur.Z - next->Z).norm() / (std::sqrt(20.0 * m) * delta_ / (1.0 - rho_));
  double q = std::max({q1, q2, q3});
  worst_ = std::max(worst_, q);
  ++checks_;
  if (q > 1.0 + slack_) ++violations_;
}

double fill_relative_error(const std::vector<std::vector<RunRecord>*>& runs) {
  double fstar = std::numeric_limits<double>::infinity();
  for (auto* v : runs)
    for (const auto& r : *v)
      if (std::isfinite(r.f_bar)) fstar = std::min(fstar, r.f_bar);
  for (auto* v : runs)
    for (auto& r : *v) r.rel_error = r.f_bar - fstar;
  return fstar;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_header() {
  return "run_id,algorithm,kernel,t,f_bar,stationarity,rel_error,consensus_primal,consensus_dual,"
         "E_t_proxy,M_t_proxy,G_proxy,clipped,status";
}

void write_records_csv(std::ostream& os, const std::string& run_id, const std::string& algorithm,
                       const std::string& kernel, const std::vector<RunRecord>& records) {
  for (const auto& r : records) {
    os << run_id << ',' << algorithm << ',' << '"' << kernel << '"' << ',' << r.t << ','
       << format_double(r.f_bar) << ',' << format_double(r.stationarity) << ','
       << format_double(r.rel_error) << ',' << format_double(r.consensus_primal) << ','
       << format_double(r.consensus_dual) << ',' << format_double(r.E_t_proxy) << ','
       << format_double(r.M_t_proxy) << ',' << format_double(r.G_proxy) << ','
       << (r.clipped ? 1 : 0) << ',' << r.status << '\n';
  }
}

}  // namespace dmgt
