#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <string>

namespace dmgt {

inline constexpr double kInvTol = 1e-12;
inline constexpr int kInvMaxIter = 100;

// Solves f(t) = s for increasing f on the open interval (lo, hi).
double solve_increasing(const std::function<double(double)>& f,
                        const std::function<double(double)>& df, double s, double lo, double hi,
                        double guess);

// One-dimensional Legendre function on an open interval.
class ScalarFn {
 public:
  virtual ~ScalarFn() = default;
  virtual double lo() const { return -std::numeric_limits<double>::infinity(); }
  virtual double hi() const { return std::numeric_limits<double>::infinity(); }
  // Defined on the closed interval where finite; +inf otherwise.
  virtual double value(double t) const = 0;
  virtual double d1(double t) const = 0;
  virtual double d2(double t) const = 0;
  virtual double inv_d1(double s) const;
  virtual double guess() const;
};

using ScalarPtr = std::shared_ptr<const ScalarFn>;

ScalarPtr scalar_quadratic(double a);
ScalarPtr scalar_boltzmann_shannon();
ScalarPtr scalar_burg(double mu);
ScalarPtr scalar_tsallis(double mu, double q);
ScalarPtr scalar_exponential(double mu);
ScalarPtr scalar_harmonic(double mu, double p);
ScalarPtr scalar_hellinger();
ScalarPtr scalar_log_cosh(double mu, double c);
ScalarPtr scalar_atan(double mu, double M);
// c * f(a t + b)
ScalarPtr scalar_affine(ScalarPtr f, double c, double a, double b);
ScalarPtr scalar_sum(ScalarPtr f, ScalarPtr g);

}  // namespace dmgt
