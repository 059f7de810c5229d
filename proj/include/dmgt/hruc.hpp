#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dmgt/kernel.hpp"

namespace dmgt {

using GradOracle = std::function<Vec(const Vec&)>;

struct HrucViolation {
  Vec x;
  Vec y;
  double delta;
  double gap;
};

struct HrucReport {
  std::string kernel_id;
  std::vector<double> delta_grid;
  std::vector<double> worst_gap;
  std::vector<double> analytic_zeta;
  int n_samples = 0;
  std::vector<long> rejected;
  std::vector<HrucViolation> violations;

  bool consistent() const { return violations.empty(); }
  std::string to_text() const;
  std::string to_csv() const;
};

struct CertifyOptions {
  double cert_tol = 1e-9;
  SamplingOptions sampling;
  int threads = 1;
};

double relative_hessian_gap(const Kernel& k, const Vec& x, const Vec& y);

HrucReport certify(const Kernel& k, const std::vector<double>& delta_grid, int n_samples,
                   std::uint64_t seed, const CertifyOptions& opt = {});

double dual_lipschitz_residual(const Kernel& k, const GradOracle& f_grad, double f_L, const Vec& z,
                               const Vec& x, const Vec& y, double delta);

// Uniform draw from the closed Euclidean ball of the given radius.
Vec sample_ball(int d, double radius, std::mt19937_64& rng);

}  // namespace dmgt
