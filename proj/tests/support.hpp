#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <random>

#include "dmgt/problem.hpp"
#include "dmgt/types.hpp"

namespace testing_support {

using dmgt::Mat;
using dmgt::Vec;

inline Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x, double h = 1e-6) {
  Vec g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double hi = h * std::max(1.0, std::abs(x(i)));
    Vec a = x, b = x;
    a(i) += hi;
    b(i) -= hi;
    g(i) = (f(a) - f(b)) / (2 * hi);
  }
  return g;
}

inline double rel_err(const Vec& a, const Vec& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

inline Vec randn(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Vec v(d);
  for (int i = 0; i < d; ++i) v(i) = nd(rng);
  return v;
}

inline Vec uniform_box(int d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vec v(d);
  for (int i = 0; i < d; ++i) v(i) = u(rng);
  return v;
}

inline Mat random_spd(int d, std::mt19937_64& rng, double floor = 0.1) {
  Mat B(d, d);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) B(i, j) = nd(rng);
  return B.transpose() * B / d + floor * Mat::Identity(d, d);
}

class FnLocal : public dmgt::LocalObjective {
 public:
  FnLocal(std::function<double(const Vec&)> f, std::function<Vec(const Vec&)> g)
      : f_(std::move(f)), g_(std::move(g)) {}
  double value(const Vec& x) const override { return f_(x); }
  Vec gradient(const Vec& x) const override { return g_(x); }

 private:
  std::function<double(const Vec&)> f_;
  std::function<Vec(const Vec&)> g_;
};

inline dmgt::Problem custom_problem(int d, std::vector<dmgt::LocalPtr> locals, dmgt::Domain feasible) {
  dmgt::Problem p;
  p.name = "custom";
  p.m = static_cast<int>(locals.size());
  p.d = d;
  p.locals = std::move(locals);
  p.feasible = std::move(feasible);
  return p;
}

}  // namespace testing_support
