#include "dmgt/kernel.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "dmgt/errors.hpp"

namespace dmgt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

bool is_diagonal(const Mat& A) {
  for (Eigen::Index j = 0; j < A.cols(); ++j)
    for (Eigen::Index i = 0; i < A.rows(); ++i)
      if (i != j && A(i, j) != 0.0) return false;
  return true;
}

class SeparableImpl : public KernelImpl {
 public:
  SeparableImpl(std::vector<ScalarPtr> fns, double constant)
      : fns_(std::move(fns)), constant_(constant) {}

  double value(const Vec& x) const override {
    double v = constant_;
    for (size_t i = 0; i < fns_.size(); ++i) v += fns_[i]->value(x(i));
    return v;
  }
  Vec gradient(const Vec& x) const override {
    Vec g(x.size());
    for (size_t i = 0; i < fns_.size(); ++i) g(i) = fns_[i]->d1(x(i));
    return g;
  }
  Hessian hessian(const Vec& x) const override {
    Vec h(x.size());
    for (size_t i = 0; i < fns_.size(); ++i) h(i) = fns_[i]->d2(x(i));
    return Hessian::diagonal(h);
  }
  Vec gradient_conjugate(const Vec& z) const override {
    Vec x(z.size());
    for (size_t i = 0; i < fns_.size(); ++i) x(i) = fns_[i]->inv_d1(z(i));
    return x;
  }
  std::vector<ScalarPtr> scalars() const override { return fns_; }
  double scalar_constant() const override { return constant_; }

 private:
  std::vector<ScalarPtr> fns_;
  double constant_;
};

// h(x) = phi(||x||)
class RadialProfile {
 public:
  virtual ~RadialProfile() = default;
  virtual double phi(double t) const = 0;
  virtual double dphi_over_t(double t) const = 0;
  virtual double d2phi(double t) const = 0;
  virtual double log_dphi(double t) const = 0;
  virtual double dlog_dphi(double t) const = 0;
  virtual double guess(double r) const = 0;
};

class PowerProfile : public RadialProfile {
 public:
  PowerProfile(double mu, double r) : mu_(mu), r_(r) {}
  double phi(double t) const override {
    return 0.5 * mu_ * t * t + std::pow(t, r_ + 2.0) / (r_ + 2.0);
  }
  double dphi_over_t(double t) const override { return mu_ + std::pow(t, r_); }
  double d2phi(double t) const override { return mu_ + (r_ + 1.0) * std::pow(t, r_); }
  double log_dphi(double t) const override { return std::log(t) + std::log(mu_ + std::pow(t, r_)); }
  double dlog_dphi(double t) const override {
    return 1.0 / t + r_ * std::pow(t, r_ - 1.0) / (mu_ + std::pow(t, r_));
  }
  double guess(double r) const override {
    return std::min(r / mu_, std::pow(r, 1.0 / (r_ + 1.0)));
  }

 private:
  double mu_, r_;
};

class NormExpProfile : public RadialProfile {
 public:
  double phi(double t) const override { return std::exp(0.5 * t * t); }
  double dphi_over_t(double t) const override { return std::exp(0.5 * t * t); }
  double d2phi(double t) const override { return std::exp(0.5 * t * t) * (1.0 + t * t); }
  double log_dphi(double t) const override { return std::log(t) + 0.5 * t * t; }
  double dlog_dphi(double t) const override { return 1.0 / t + t; }
  double guess(double r) const override { return r < 1.0 ? r : std::sqrt(2.0 * std::log(r) + 1.0); }
};

class RadialImpl : public KernelImpl {
 public:
  explicit RadialImpl(std::shared_ptr<const RadialProfile> p) : p_(std::move(p)) {}

  double value(const Vec& x) const override { return p_->phi(x.norm()); }
  Vec gradient(const Vec& x) const override { return p_->dphi_over_t(x.norm()) * x; }
  Hessian hessian(const Vec& x) const override {
    const int d = static_cast<int>(x.size());
    double t = x.norm();
    double a = p_->dphi_over_t(t);
    if (t == 0.0) return Hessian::rank_one(d, a, 0.0, Vec::Unit(d, 0));
    return Hessian::rank_one(d, a, p_->d2phi(t) - a, x / t);
  }
  Vec gradient_conjugate(const Vec& z) const override {
    double r = z.norm();
    if (r == 0.0) return Vec::Zero(z.size());
    auto& p = *p_;
    double t = solve_increasing([&p](double s) { return p.log_dphi(s); },
                                [&p](double s) { return p.dlog_dphi(s); }, std::log(r), 0.0, kInf,
                                p.guess(r));
    return (t / r) * z;
  }

 private:
  std::shared_ptr<const RadialProfile> p_;
};

class EuclideanImpl : public KernelImpl {
 public:
  explicit EuclideanImpl(const Mat& A) : A_(A), llt_(A) {}
  double value(const Vec& x) const override { return 0.5 * x.dot(A_ * x); }
  Vec gradient(const Vec& x) const override { return A_ * x; }
  Hessian hessian(const Vec&) const override { return Hessian::dense(A_); }
  Vec gradient_conjugate(const Vec& z) const override { return llt_.solve(z); }

 private:
  Mat A_;
  Eigen::LLT<Mat> llt_;
};

class AffineImpl : public KernelImpl {
 public:
  AffineImpl(Kernel base, double c, const Mat& A, const Vec& b)
      : base_(std::move(base)), c_(c), A_(A), b_(b), lu_(A), lut_(Mat(A.transpose())), diag_(is_diagonal(A)) {}

  double value(const Vec& x) const override { return c_ * base_.impl().value(A_ * x + b_); }
  Vec gradient(const Vec& x) const override {
    return c_ * (A_.transpose() * base_.impl().gradient(A_ * x + b_));
  }
  Hessian hessian(const Vec& x) const override {
    Hessian H = base_.impl().hessian(A_ * x + b_);
    if (diag_ && H.form() == Hessian::Form::Diagonal)
      return Hessian::diagonal(c_ * H.diag().cwiseProduct(A_.diagonal().cwiseAbs2()));
    return Hessian::dense(c_ * (A_.transpose() * H.to_dense() * A_));
  }
  Vec gradient_conjugate(const Vec& z) const override {
    Vec u = lut_.solve(z) / c_;
    Vec w = base_.grad_conj(u);
    return lu_.solve(w - b_);
  }

 private:
  Kernel base_;
  double c_;
  Mat A_;
  Vec b_;
  Eigen::PartialPivLU<Mat> lu_;
  Eigen::PartialPivLU<Mat> lut_;
  bool diag_;
};

class ConcatImpl : public KernelImpl {
 public:
  explicit ConcatImpl(std::vector<Kernel> parts) : parts_(std::move(parts)) {
    int off = 0;
    for (const auto& k : parts_) {
      offsets_.push_back(off);
      off += k.dim();
    }
    d_ = off;
  }

  double value(const Vec& x) const override {
    double v = 0.0;
    for (size_t i = 0; i < parts_.size(); ++i)
      v += parts_[i].impl().value(x.segment(offsets_[i], parts_[i].dim()));
    return v;
  }
  Vec gradient(const Vec& x) const override {
    Vec g(d_);
    for (size_t i = 0; i < parts_.size(); ++i)
      g.segment(offsets_[i], parts_[i].dim()) =
          parts_[i].impl().gradient(x.segment(offsets_[i], parts_[i].dim()));
    return g;
  }
  Hessian hessian(const Vec& x) const override {
    std::vector<Hessian> hs;
    bool all_diag = true;
    for (size_t i = 0; i < parts_.size(); ++i) {
      hs.push_back(parts_[i].impl().hessian(x.segment(offsets_[i], parts_[i].dim())));
      all_diag = all_diag && hs.back().form() == Hessian::Form::Diagonal;
    }
    if (all_diag) {
      Vec d(d_);
      for (size_t i = 0; i < parts_.size(); ++i) d.segment(offsets_[i], parts_[i].dim()) = hs[i].diag();
      return Hessian::diagonal(d);
    }
    Mat H = Mat::Zero(d_, d_);
    for (size_t i = 0; i < parts_.size(); ++i)
      H.block(offsets_[i], offsets_[i], parts_[i].dim(), parts_[i].dim()) = hs[i].to_dense();
    return Hessian::dense(H);
  }
  Vec gradient_conjugate(const Vec& z) const override {
    Vec x(d_);
    for (size_t i = 0; i < parts_.size(); ++i)
      x.segment(offsets_[i], parts_[i].dim()) =
          parts_[i].impl().gradient_conjugate(z.segment(offsets_[i], parts_[i].dim()));
    return x;
  }
  std::vector<ScalarPtr> scalars() const override {
    std::vector<ScalarPtr> out;
    for (const auto& k : parts_) {
      auto s = k.impl().scalars();
      if (s.empty()) return {};
      out.insert(out.end(), s.begin(), s.end());
    }
    return out;
  }
  double scalar_constant() const override {
    double c = 0.0;
    for (const auto& k : parts_) c += k.impl().scalar_constant();
    return c;
  }

 private:
  std::vector<Kernel> parts_;
  std::vector<int> offsets_;
  int d_ = 0;
};

class SumImpl : public KernelImpl {
 public:
  SumImpl(Kernel h1, Kernel h2, Domain dom) : h1_(std::move(h1)), h2_(std::move(h2)), dom_(std::move(dom)) {}

  double value(const Vec& x) const override { return h1_.impl().value(x) + h2_.impl().value(x); }
  Vec gradient(const Vec& x) const override {
    return h1_.impl().gradient(x) + h2_.impl().gradient(x);
  }
  Hessian hessian(const Vec& x) const override {
    Hessian a = h1_.impl().hessian(x), b = h2_.impl().hessian(x);
    if (a.form() == Hessian::Form::Diagonal && b.form() == Hessian::Form::Diagonal)
      return Hessian::diagonal(a.diag() + b.diag());
    return Hessian::dense(a.to_dense() + b.to_dense());
  }
  Vec gradient_conjugate(const Vec& z) const override {
    const double tol = kInvTol * (1.0 + z.norm());
    Vec x = dom_.center();
    try {
      Vec x1 = h1_.grad_conj(z);
      if (dom_.contains(x1)) x = x1;
    } catch (const Error&) {
    }
    auto psi = [&](const Vec& v) { return value(v) - z.dot(v); };
    Vec g = gradient(x) - z;
    double gn = g.norm();
    for (int it = 0; it < kInvMaxIter; ++it) {
      if (gn <= tol) return x;
      Vec dx = -hessian(x).solve(g);
      double p0 = psi(x), slope = g.dot(dx);
      double alpha = 1.0;
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
        Vec xn = x + alpha * dx;
        if (!dom_.contains(xn)) continue;
        Vec gnew = gradient(xn) - z;
        double gnn = gnew.norm();
        if (psi(xn) <= p0 + 1e-4 * alpha * slope || gnn < gn) {
          x = xn;
          g = gnew;
          gn = gnn;
          accepted = true;
          break;
        }
      }
      if (!accepted) break;
    }
    if (gn <= tol) return x;
    throw NoConvergence("damped Newton inverse did not converge", gn);
  }

 private:
  Kernel h1_, h2_;
  Domain dom_;
};

Kernel separable_kernel(std::vector<ScalarPtr> fns, double constant, Domain dom,
                        DistortionModulus mod, std::string id, bool std_quad = false) {
  return Kernel(std::make_shared<SeparableImpl>(std::move(fns), constant), std::move(dom),
                std::move(mod), std::move(id), std_quad);
}

void require_positive(double v, const char* what) {
  if (!(v > 0) || !std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be positive");
}

void require_dim(int d) {
  if (d < 1) throw std::invalid_argument("kernel dimension must be positive");
}

}  // namespace

Kernel::Kernel(std::shared_ptr<const KernelImpl> impl, Domain domain, DistortionModulus modulus,
               std::string id, bool standard_quadratic)
    : impl_(std::move(impl)),
      domain_(std::move(domain)),
      modulus_(std::move(modulus)),
      id_(std::move(id)),
      standard_quadratic_(standard_quadratic) {}

double Kernel::eval(const Vec& x) const {
  domain_.require_interior(x, id_ + " eval");
  return impl_->value(x);
}

Vec Kernel::grad(const Vec& x) const {
  domain_.require_interior(x, id_ + " grad");
  return impl_->gradient(x);
}

Hessian Kernel::hessian(const Vec& x) const {
  domain_.require_interior(x, id_ + " hessian");
  return impl_->hessian(x);
}

Vec Kernel::hess_apply(const Vec& x, const Vec& v) const { return hessian(x).apply(v); }

Vec Kernel::hess_solve(const Vec& x, const Vec& v) const { return hessian(x).solve(v); }

Vec Kernel::grad_conj(const Vec& z) const {
  if (z.size() != dim()) throw std::invalid_argument("grad_conj: dimension mismatch");
  if (!z.allFinite()) throw NotInImage(id_ + " grad_conj: non-finite dual point");
  Vec x = impl_->gradient_conjugate(z);
  if (!domain_.contains(x)) throw NotInImage(id_ + " grad_conj: preimage not representable inside the domain");
  return x;
}

double Kernel::bregman(const Vec& u, const Vec& v) const {
  if (!domain_.contains_closure(u)) throw DomainViolation(id_ + " bregman: u outside the domain closure");
  domain_.require_interior(v, id_ + " bregman");
  return impl_->value(u) - impl_->value(v) - impl_->gradient(v).dot(u - v);
}

double Kernel::dual_dist(const Vec& x, const Vec& y) const { return (grad(x) - grad(y)).norm(); }

Kernel euclidean(int d) {
  require_dim(d);
  return separable_kernel(std::vector<ScalarPtr>(d, scalar_quadratic(1.0)), 0.0, Domain::all_space(d),
                          DistortionModulus::zero(), "euclidean", true);
}

Kernel euclidean(const Mat& A) {
  if (A.rows() != A.cols() || A.rows() < 1) throw std::invalid_argument("euclidean: A must be square");
  const int d = static_cast<int>(A.rows());
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + A.cwiseAbs().maxCoeff()))
    throw SingularMatrix("euclidean: A must be symmetric");
  Eigen::LLT<Mat> llt(A);
  if (llt.info() != Eigen::Success) throw SingularMatrix("euclidean: A must be positive definite");
  if (A.isIdentity(0.0)) return euclidean(d);
  if (is_diagonal(A)) {
    std::vector<ScalarPtr> fns;
    for (int i = 0; i < d; ++i) fns.push_back(scalar_quadratic(A(i, i)));
    return separable_kernel(fns, 0.0, Domain::all_space(d), DistortionModulus::zero(), "euclidean(A)");
  }
  return Kernel(std::make_shared<EuclideanImpl>(A), Domain::all_space(d), DistortionModulus::zero(),
                "euclidean(A)");
}

Kernel boltzmann_shannon(int d) {
  require_dim(d);
  return separable_kernel(std::vector<ScalarPtr>(d, scalar_boltzmann_shannon()), 0.0,
                          Domain::open_orthant(d), DistortionModulus::exp_linear(1.0),
                          "boltzmann_shannon");
}

Kernel lipschitz_hessian(int d, double mu, double rho) {
  require_dim(d);
  require_positive(mu, "mu");
  require_positive(rho, "rho");
  double c = 3.0 * std::sqrt(3.0) * rho / 4.0;
  return separable_kernel(std::vector<ScalarPtr>(d, scalar_log_cosh(mu, c)), 0.0, Domain::all_space(d),
                          DistortionModulus::exp_linear(rho / (mu * mu)),
                          "lipschitz_hessian(mu=" + fmt(mu) + ",rho=" + fmt(rho) + ")");
}

Kernel power(int d, double mu, double r) {
  require_dim(d);
  require_positive(mu, "mu");
  require_positive(r, "r");
  double K = std::max(10.0, r * r * std::pow(2.0, r + 1.0)) / mu;
  auto mod = DistortionModulus::power_pair(K * std::pow(mu, -1.0 / r), 1.0, K * std::pow(mu, -r), r);
  return Kernel(std::make_shared<RadialImpl>(std::make_shared<PowerProfile>(mu, r)), Domain::all_space(d),
                mod, "power(mu=" + fmt(mu) + ",r=" + fmt(r) + ")");
}

Kernel tsallis(int d, double mu, double q) {
  require_dim(d);
  require_positive(mu, "mu");
  if (!(q > 0 && q < 1)) throw std::invalid_argument("tsallis: q must lie in (0,1)");
  double c = std::pow(q, (q - 3.0) / (2.0 - q)) * std::pow(mu, (q - 1.0) / (2.0 - q));
  return separable_kernel(std::vector<ScalarPtr>(d, scalar_tsallis(mu, q)), 1.0 / (1.0 - q),
                          Domain::simplex(d), DistortionModulus::exp_linear(c),
                          "tsallis(mu=" + fmt(mu) + ",q=" + fmt(q) + ")");
}

Kernel burg(int d, double mu) {
  require_dim(d);
  require_positive(mu, "mu");
  return separable_kernel(std::vector<ScalarPtr>(d, scalar_burg(mu)), 0.0, Domain::open_orthant(d),
                          DistortionModulus::exp_linear(1.0 / std::sqrt(mu)), "burg(mu=" + fmt(mu) + ")");
}

Kernel exponential(int d, double mu) {
  require_dim(d);
  require_positive(mu, "mu");
  return separable_kernel(std::vector<ScalarPtr>(d, scalar_exponential(mu)), 0.0, Domain::all_space(d),
                          DistortionModulus::exp_linear(1.0 / mu), "exponential(mu=" + fmt(mu) + ")");
}

Kernel norm_exponential(int d) {
  require_dim(d);
  return Kernel(std::make_shared<RadialImpl>(std::make_shared<NormExpProfile>()), Domain::all_space(d),
                DistortionModulus::exp_linear(2.0), "norm_exponential");
}

Kernel harmonic(int d, double mu, double p) {
  require_dim(d);
  require_positive(mu, "mu");
  require_positive(p, "p");
  return separable_kernel(std::vector<ScalarPtr>(d, scalar_harmonic(mu, p)), 0.0, Domain::open_orthant(d),
                          DistortionModulus::exp_linear(std::pow(mu, -(p + 1.0) / (p + 2.0))),
                          "harmonic(mu=" + fmt(mu) + ",p=" + fmt(p) + ")");
}

Kernel hellinger(int d) {
  require_dim(d);
  return separable_kernel(std::vector<ScalarPtr>(d, scalar_hellinger()), 0.0, Domain::box(d, -1.0, 1.0),
                          DistortionModulus::exp_linear(1.0), "hellinger");
}

Kernel self_concordant(int d, double mu, double M) {
  require_dim(d);
  require_positive(mu, "mu");
  require_positive(M, "M");
  return separable_kernel(std::vector<ScalarPtr>(d, scalar_atan(mu, M)), 0.0, Domain::all_space(d),
                          self_concordant_modulus(M, mu),
                          "self_concordant(mu=" + fmt(mu) + ",M=" + fmt(M) + ")");
}

Kernel fermi_dirac(int d) {
  Kernel bs = boltzmann_shannon(d);
  Kernel mirrored = affine_compose(bs, 1.0, -Mat::Identity(d, d), Vec::Ones(d));
  Kernel k = combine(bs, mirrored, CombineMode::coordinate_separable());
  return Kernel(k.impl_ptr(), k.domain(), k.modulus(), "fermi_dirac");
}

Kernel concat(const std::vector<Kernel>& kernels) {
  if (kernels.empty()) throw std::invalid_argument("concat: empty list");
  std::vector<Domain> doms;
  std::vector<DistortionModulus> mods;
  std::string id = "concat[";
  bool sq = true;
  for (size_t i = 0; i < kernels.size(); ++i) {
    doms.push_back(kernels[i].domain());
    mods.push_back(kernels[i].modulus());
    id += (i ? "," : "") + kernels[i].id() + "^" + std::to_string(kernels[i].dim());
    sq = sq && kernels[i].standard_quadratic();
  }
  id += "]";
  return Kernel(std::make_shared<ConcatImpl>(kernels), Domain::product(doms),
                DistortionModulus::max_of(mods), sq ? "euclidean" : id, sq);
}

Kernel affine_compose(const Kernel& k, double c, const Mat& A, const Vec& b) {
  const int d = k.dim();
  if (!(c > 0)) throw std::invalid_argument("affine_compose: c must be positive");
  if (A.rows() != d || A.cols() != d || b.size() != d)
    throw std::invalid_argument("affine_compose: dimension mismatch");
  Eigen::JacobiSVD<Mat> svd(A);
  const Vec& sv = svd.singularValues();
  if (!(sv(d - 1) > 0) || sv(0) / sv(d - 1) > 1e14) throw SingularMatrix("affine_compose: A is singular");
  double kappa = sv(0) / sv(d - 1);
  Domain dom = k.domain().pullback(A, b);
  auto mod = DistortionModulus::scaled(kappa, k.modulus(), 1.0 / c);
  std::string id = "affine(c=" + fmt(c) + ")[" + k.id() + "]";
  auto fns = k.impl().scalars();
  if (!fns.empty() && is_diagonal(A)) {
    std::vector<ScalarPtr> out;
    for (int i = 0; i < d; ++i) out.push_back(scalar_affine(fns[i], c, A(i, i), b(i)));
    return separable_kernel(out, c * k.impl().scalar_constant(), dom, mod, id);
  }
  return Kernel(std::make_shared<AffineImpl>(k, c, A, b), dom, mod, id);
}

Kernel combine(const Kernel& h1, const Kernel& h2, CombineMode mode) {
  if (h1.dim() != h2.dim()) throw std::invalid_argument("combine: dimension mismatch");
  DistortionModulus mod;
  std::string tag;
  switch (mode.kind) {
    case CombineMode::Kind::QuadraticShift:
      if (!h2.standard_quadratic()) throw ModeMismatch("combine: quadratic-shift requires h2 = ||x||^2/2");
      mod = h1.modulus();
      tag = "quadratic_shift";
      break;
    case CombineMode::Kind::CoordinateSeparable:
      if (!h1.separable() || !h2.separable())
        throw ModeMismatch("combine: coordinate-separable requires separable kernels");
      mod = DistortionModulus::max_of({h1.modulus(), h2.modulus()});
      tag = "coordinate_separable";
      break;
    case CombineMode::Kind::CrossMonotone:
      if (!(mode.kappa_h >= 1.0) || !(mode.kappa_g >= 1.0))
        throw ModeMismatch("combine: cross-monotone requires condition-number bounds >= 1");
      mod = DistortionModulus::sum_of({DistortionModulus::scaled(std::sqrt(mode.kappa_h), h2.modulus(), 1.0),
                                       DistortionModulus::scaled(std::sqrt(mode.kappa_g), h1.modulus(), 1.0)});
      tag = "cross_monotone";
      break;
  }
  Domain dom = h1.domain().intersect(h2.domain());
  std::string id = "sum_" + tag + "[" + h1.id() + "," + h2.id() + "]";
  auto f1 = h1.impl().scalars(), f2 = h2.impl().scalars();
  if (!f1.empty() && !f2.empty()) {
    std::vector<ScalarPtr> out;
    for (int i = 0; i < h1.dim(); ++i) out.push_back(scalar_sum(f1[i], f2[i]));
    return separable_kernel(out, h1.impl().scalar_constant() + h2.impl().scalar_constant(), dom, mod, id);
  }
  return Kernel(std::make_shared<SumImpl>(h1, h2, dom), dom, mod, id);
}

Kernel shifted(const Kernel& k, const Vec& offset) {
  Kernel s = affine_compose(k, 1.0, Mat::Identity(k.dim(), k.dim()), offset);
  return Kernel(s.impl_ptr(), s.domain(), s.modulus(), "shifted[" + k.id() + "]");
}

std::vector<CatalogueEntry> kernel_catalogue(int d) {
  Mat A = Mat::Identity(d, d);
  for (int i = 0; i + 1 < d; ++i) A(i, i + 1) = A(i + 1, i) = 0.3;
  return {
      {"euclidean", euclidean(d)},
      {"euclidean_preconditioned", euclidean(A)},
      {"boltzmann_shannon", boltzmann_shannon(d)},
      {"lipschitz_hessian", lipschitz_hessian(d, 1.0, 1.0)},
      {"power_r0.5", power(d, 1.0, 0.5)},
      {"power_r1", power(d, 1.0, 1.0)},
      {"power_r2", power(d, 1.0, 2.0)},
      {"tsallis", tsallis(d, 1.0, 0.5)},
      {"burg", burg(d, 1.0)},
      {"exponential", exponential(d, 1.0)},
      {"norm_exponential", norm_exponential(d)},
      {"harmonic", harmonic(d, 1.0, 1.0)},
      {"hellinger", hellinger(d)},
      {"self_concordant", self_concordant(d, 1.0, 1.0)},
  };
}

}  // namespace dmgt
