#include "dmgt/scalar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dmgt/errors.hpp"

namespace dmgt {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double interior_guess(double lo, double hi, double g) {
  if (g > lo && g < hi) return g;
  bool fl = std::isfinite(lo), fh = std::isfinite(hi);
  if (fl && fh) return 0.5 * (lo + hi);
  if (fl) return lo + 1.0;
  if (fh) return hi - 1.0;
  return 0.0;
}

}  // namespace

double solve_increasing(const std::function<double(double)>& f,
                        const std::function<double(double)>& df, double s, double lo, double hi,
                        double guess) {
  if (!std::isfinite(s)) throw NotInImage("inverse map: non-finite target");
  const double tol = kInvTol * (1.0 + std::abs(s));
  double t = interior_guess(lo, hi, guess);
  double g = f(t) - s;
  if (std::abs(g) <= tol) return t;

  double a, b;
  if (g < 0) {
    a = t;
    b = t;
    double step = std::max(1.0, std::abs(t));
    for (int k = 0;; ++k) {
      double nb = std::isfinite(hi) ? b + 0.5 * (hi - b) : t + step;
      if (k > 2200 || !std::isfinite(nb) || nb <= b || nb >= hi)
        throw NotInImage("inverse map: target above the image of the gradient");
      step *= 2.0;
      b = nb;
      double gb = f(b) - s;
      if (std::abs(gb) <= tol) return b;
      if (gb > 0) break;
      a = b;
    }
  } else {
    a = t;
    b = t;
    double step = std::max(1.0, std::abs(t));
    for (int k = 0;; ++k) {
      double na = std::isfinite(lo) ? a - 0.5 * (a - lo) : t - step;
      if (k > 2200 || !std::isfinite(na) || na >= a || na <= lo)
        throw NotInImage("inverse map: target below the image of the gradient");
      step *= 2.0;
      a = na;
      double ga = f(a) - s;
      if (std::abs(ga) <= tol) return a;
      if (ga < 0) break;
      b = a;
    }
  }

  t = 0.5 * (a + b);
  double best_res = std::numeric_limits<double>::infinity();
  for (int it = 0; it < kInvMaxIter; ++it) {
    g = f(t) - s;
    best_res = std::min(best_res, std::abs(g));
    if (std::abs(g) <= tol) return t;
    if (g < 0)
      a = t;
    else
      b = t;
    if (b - a <= 4.0 * kEps * std::max(std::abs(a), std::abs(b)) ||
        b - a <= std::numeric_limits<double>::min())
      return t;
    double dt = df(t);
    double tn = t - g / dt;
    if (!std::isfinite(tn) || tn <= a || tn >= b) {
      if (a > 0 && b > 4.0 * a)
        tn = std::sqrt(a) * std::sqrt(b);
      else if (b < 0 && a < 4.0 * b)
        tn = -std::sqrt(-a) * std::sqrt(-b);
      else
        tn = 0.5 * (a + b);
    }
    t = tn;
  }
  throw NoConvergence("inverse map did not converge", best_res);
}

double ScalarFn::inv_d1(double s) const {
  return solve_increasing([this](double t) { return d1(t); }, [this](double t) { return d2(t); },
                          s, lo(), hi(), guess());
}

double ScalarFn::guess() const { return interior_guess(lo(), hi(), std::nan("")); }

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class Quadratic : public ScalarFn {
 public:
  explicit Quadratic(double a) : a_(a) {}
  double value(double t) const override { return 0.5 * a_ * t * t; }
  double d1(double t) const override { return a_ * t; }
  double d2(double) const override { return a_; }
  double inv_d1(double s) const override { return s / a_; }

 private:
  double a_;
};

class BoltzmannShannon : public ScalarFn {
 public:
  double lo() const override { return 0.0; }
  double value(double t) const override {
    if (t < 0) return kInf;
    return t == 0 ? 0.0 : t * std::log(t) - t;
  }
  double d1(double t) const override { return std::log(t); }
  double d2(double t) const override { return 1.0 / t; }
  double inv_d1(double s) const override { return std::exp(s); }
};

class Burg : public ScalarFn {
 public:
  explicit Burg(double mu) : mu_(mu) {}
  double lo() const override { return 0.0; }
  double value(double t) const override { return t <= 0 ? kInf : 0.5 * mu_ * t * t - std::log(t); }
  double d1(double t) const override { return mu_ * t - 1.0 / t; }
  double d2(double t) const override { return mu_ + 1.0 / (t * t); }
  double inv_d1(double s) const override {
    double r = std::sqrt(s * s + 4.0 * mu_);
    return s >= 0 ? (s + r) / (2.0 * mu_) : 2.0 / (r - s);
  }

 private:
  double mu_;
};

class Tsallis : public ScalarFn {
 public:
  Tsallis(double mu, double q) : mu_(mu), q_(q) {}
  double lo() const override { return 0.0; }
  double value(double t) const override {
    if (t < 0) return kInf;
    return 0.5 * mu_ * t * t - std::pow(t, q_) / (1.0 - q_);
  }
  double d1(double t) const override { return mu_ * t - q_ * std::pow(t, q_ - 1.0) / (1.0 - q_); }
  double d2(double t) const override { return mu_ + q_ * std::pow(t, q_ - 2.0); }

 private:
  double mu_, q_;
};

class Exponential : public ScalarFn {
 public:
  explicit Exponential(double mu) : mu_(mu) {}
  double value(double t) const override { return 0.5 * mu_ * t * t + std::exp(t); }
  double d1(double t) const override { return mu_ * t + std::exp(t); }
  double d2(double t) const override { return mu_ + std::exp(t); }

 private:
  double mu_;
};

class Harmonic : public ScalarFn {
 public:
  Harmonic(double mu, double p) : mu_(mu), p_(p) {}
  double lo() const override { return 0.0; }
  double value(double t) const override {
    return t <= 0 ? kInf : 0.5 * mu_ * t * t + std::pow(t, -p_);
  }
  double d1(double t) const override { return mu_ * t - p_ * std::pow(t, -p_ - 1.0); }
  double d2(double t) const override { return mu_ + p_ * (p_ + 1.0) * std::pow(t, -p_ - 2.0); }

 private:
  double mu_, p_;
};

class Hellinger : public ScalarFn {
 public:
  double lo() const override { return -1.0; }
  double hi() const override { return 1.0; }
  double value(double t) const override {
    if (t < -1.0 || t > 1.0) return kInf;
    return -std::sqrt((1.0 - t) * (1.0 + t));
  }
  double d1(double t) const override { return t / std::sqrt((1.0 - t) * (1.0 + t)); }
  double d2(double t) const override { return std::pow((1.0 - t) * (1.0 + t), -1.5); }
  double inv_d1(double s) const override { return s / std::sqrt(1.0 + s * s); }
};

class LogCosh : public ScalarFn {
 public:
  LogCosh(double mu, double c) : mu_(mu), c_(c) {}
  double value(double t) const override {
    double a = std::abs(t);
    return 0.5 * mu_ * t * t + c_ * (a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0));
  }
  double d1(double t) const override { return mu_ * t + c_ * std::tanh(t); }
  double d2(double t) const override {
    double ch = std::cosh(t);
    return mu_ + c_ / (ch * ch);
  }

 private:
  double mu_, c_;
};

class Atan : public ScalarFn {
 public:
  Atan(double mu, double M) : mu_(mu), M_(M) {}
  double value(double t) const override {
    double u = M_ * t;
    return 0.5 * mu_ * t * t + (u * std::atan(u) - 0.5 * std::log1p(u * u)) / (M_ * M_);
  }
  double d1(double t) const override { return mu_ * t + std::atan(M_ * t) / M_; }
  double d2(double t) const override { return mu_ + 1.0 / (1.0 + M_ * M_ * t * t); }

 private:
  double mu_, M_;
};

class Affine : public ScalarFn {
 public:
  Affine(ScalarPtr f, double c, double a, double b) : f_(std::move(f)), c_(c), a_(a), b_(b) {
    double l = (f_->lo() - b_) / a_, h = (f_->hi() - b_) / a_;
    lo_ = a_ > 0 ? l : h;
    hi_ = a_ > 0 ? h : l;
  }
  double lo() const override { return lo_; }
  double hi() const override { return hi_; }
  double value(double t) const override { return c_ * f_->value(a_ * t + b_); }
  double d1(double t) const override { return c_ * a_ * f_->d1(a_ * t + b_); }
  double d2(double t) const override { return c_ * a_ * a_ * f_->d2(a_ * t + b_); }
  double inv_d1(double s) const override { return (f_->inv_d1(s / (c_ * a_)) - b_) / a_; }
  double guess() const override { return (f_->guess() - b_) / a_; }

 private:
  ScalarPtr f_;
  double c_, a_, b_, lo_, hi_;
};

class Sum : public ScalarFn {
 public:
  Sum(ScalarPtr f, ScalarPtr g) : f_(std::move(f)), g_(std::move(g)) {}
  double lo() const override { return std::max(f_->lo(), g_->lo()); }
  double hi() const override { return std::min(f_->hi(), g_->hi()); }
  double value(double t) const override { return f_->value(t) + g_->value(t); }
  double d1(double t) const override { return f_->d1(t) + g_->d1(t); }
  double d2(double t) const override { return f_->d2(t) + g_->d2(t); }

 private:
  ScalarPtr f_, g_;
};

}  // namespace

ScalarPtr scalar_quadratic(double a) { return std::make_shared<Quadratic>(a); }
ScalarPtr scalar_boltzmann_shannon() { return std::make_shared<BoltzmannShannon>(); }
ScalarPtr scalar_burg(double mu) { return std::make_shared<Burg>(mu); }
ScalarPtr scalar_tsallis(double mu, double q) { return std::make_shared<Tsallis>(mu, q); }
ScalarPtr scalar_exponential(double mu) { return std::make_shared<Exponential>(mu); }
ScalarPtr scalar_harmonic(double mu, double p) { return std::make_shared<Harmonic>(mu, p); }
ScalarPtr scalar_hellinger() { return std::make_shared<Hellinger>(); }
ScalarPtr scalar_log_cosh(double mu, double c) { return std::make_shared<LogCosh>(mu, c); }
ScalarPtr scalar_atan(double mu, double M) { return std::make_shared<Atan>(mu, M); }
ScalarPtr scalar_affine(ScalarPtr f, double c, double a, double b) {
  return std::make_shared<Affine>(std::move(f), c, a, b);
}
ScalarPtr scalar_sum(ScalarPtr f, ScalarPtr g) {
  return std::make_shared<Sum>(std::move(f), std::move(g));
}

}  // namespace dmgt
