#include "dmgt/hruc.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "dmgt/errors.hpp"
#include "dmgt/parallel.hpp"

namespace dmgt {

double relative_hessian_gap(const Kernel& k, const Vec& x, const Vec& y) {
  Hessian hx = k.hessian(x), hy = k.hessian(y);
  if (hx.form() == Hessian::Form::Diagonal && hy.form() == Hessian::Form::Diagonal) {
    const Vec& a = hx.diag();
    const Vec& b = hy.diag();
    double g = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      if (!(b(i) > 0)) throw SingularHessian("relative_hessian_gap: singular Hessian");
      g = std::max(g, std::abs(a(i) - b(i)) / b(i));
    }
    return g;
  }
  const int d = k.dim();
  Mat Dy = hy.to_dense();
  Mat Diff = hx.to_dense() - Dy;
  if (Diff.isZero(0.0)) return 0.0;
  // (Hx - Hy) Hy^{-1} = (Hy^{-1} (Hx - Hy)^T)^T by symmetry
  Mat P(d, d);
  for (int j = 0; j < d; ++j) P.row(j) = hy.solve(Diff.row(j).transpose()).transpose();
  Eigen::JacobiSVD<Mat> svd(P);
  return svd.singularValues()(0);
}

Vec sample_ball(int d, double radius, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  Vec g(d);
  for (int i = 0; i < d; ++i) g(i) = N(rng);
  double n = g.norm();
  if (n == 0.0) return Vec::Zero(d);
  return g * (radius * std::pow(U(rng), 1.0 / d) / n);
}

HrucReport certify(const Kernel& k, const std::vector<double>& delta_grid, int n_samples,
                   std::uint64_t seed, const CertifyOptions& opt) {
  if (delta_grid.empty()) throw std::invalid_argument("certify: empty delta grid");
  if (n_samples < 1) throw std::invalid_argument("certify: n_samples must be positive");
  const int d = k.dim();
  const int nd = static_cast<int>(delta_grid.size());
  HrucReport rep;
  rep.kernel_id = k.id();
  rep.delta_grid = delta_grid;
  rep.n_samples = n_samples;

  struct Sample {
    Vec x, y;
    double gap = 0.0;
    long rejected = 0;
  };
  std::vector<Sample> samples(static_cast<size_t>(nd) * n_samples);
  const long max_attempts = 100;

  parallel_for(nd * n_samples, opt.threads, [&](int idx) {
    const int j = idx / n_samples, i = idx % n_samples;
    const double delta = delta_grid[j];
    auto rng = make_rng({seed, static_cast<std::uint64_t>(j), static_cast<std::uint64_t>(i)});
    Sample& s = samples[idx];
    for (long a = 0; a < max_attempts; ++a) {
      Vec x = k.domain().sample(rng, opt.sampling);
      Vec gx = k.grad(x);
      Vec u = sample_ball(d, delta, rng);
      Vec y;
      try {
        y = k.grad_conj(gx + u);
      } catch (const NotInImage&) {
        ++s.rejected;
        continue;
      } catch (const NoConvergence&) {
        ++s.rejected;
        continue;
      }
      s.x = x;
      s.y = y;
      s.gap = relative_hessian_gap(k, x, y);
      return;
    }
    throw SamplingExhausted("certify: " + std::to_string(max_attempts) +
                            " consecutive rejected draws for " + k.id());
  });

  for (int j = 0; j < nd; ++j) {
    const double z = k.zeta(delta_grid[j]);
    double worst = 0.0;
    long rej = 0;
    for (int i = 0; i < n_samples; ++i) {
      const Sample& s = samples[static_cast<size_t>(j) * n_samples + i];
      worst = std::max(worst, s.gap);
      rej += s.rejected;
      if (s.gap > z * (1.0 + opt.cert_tol)) rep.violations.push_back({s.x, s.y, delta_grid[j], s.gap});
    }
    if (rej > 99L * n_samples) throw SamplingExhausted("certify: rejection rate above 99% for " + k.id());
    rep.worst_gap.push_back(worst);
    rep.analytic_zeta.push_back(z);
    rep.rejected.push_back(rej);
  }
  return rep;
}

std::string HrucReport::to_text() const {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "kernel: " << kernel_id << "\n";
  os << "samples_per_delta: " << n_samples << "\n";
  os << "sampling: interior points only\n";
  os << "verdict: " << (consistent() ? "consistent with the analytic modulus" : "violations found") << "\n";
  for (size_t j = 0; j < delta_grid.size(); ++j)
    os << "delta=" << delta_grid[j] << " worst_gap=" << worst_gap[j] << " zeta=" << analytic_zeta[j]
       << " rejected=" << rejected[j] << "\n";
  os << "violations: " << violations.size() << "\n";
  return os.str();
}

std::string HrucReport::to_csv() const {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "delta,worst_gap,analytic_zeta,n_samples\n";
  for (size_t j = 0; j < delta_grid.size(); ++j)
    os << delta_grid[j] << "," << worst_gap[j] << "," << analytic_zeta[j] << "," << n_samples << "\n";
  return os.str();
}

double dual_lipschitz_residual(const Kernel& k, const GradOracle& f_grad, double f_L, const Vec& z,
                               const Vec& x, const Vec& y, double delta) {
  Vec gx = k.grad(x), gy = k.grad(y);
  const double slack = 1.0 + 1e-12;
  if ((gx - z).norm() > delta * slack || (gy - z).norm() > delta * slack)
    throw PreconditionViolated("dual_lipschitz_residual: points outside the dual delta-ball");
  Hessian H = k.hessian(k.grad_conj(z));
  Vec a = f_grad(y) - f_grad(x);
  Vec b = gy - gx;
  double na = std::sqrt(std::max(0.0, a.dot(H.solve(a))));
  double nb = std::sqrt(std::max(0.0, b.dot(H.solve(b))));
  return na - f_L * (1.0 + k.zeta(delta)) * nb;
}

}  // namespace dmgt
