#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dmgt/domain.hpp"
#include "dmgt/kernel.hpp"
#include "dmgt/types.hpp"

namespace dmgt {

class LocalObjective {
 public:
  virtual ~LocalObjective() = default;
  virtual double value(const Vec& x) const = 0;
  virtual Vec gradient(const Vec& x) const = 0;
};

using LocalPtr = std::shared_ptr<const LocalObjective>;

struct Problem {
  std::string name;
  int m = 0;
  int d = 0;
  std::vector<LocalPtr> locals;
  // Closed feasible set Z; the interior is the open domain of the objectives.
  Domain feasible = Domain::all_space(1);
  double f_lower = 0.0;
  std::optional<double> L_analytic;
  Vec x_true;
  std::optional<Kernel> paired_kernel;
  double dda_shift = 0.0;

  double f(const Vec& x) const;
  Vec grad_f(const Vec& x) const;
  double local_value(int i, const Vec& x) const { return locals[i]->value(x); }
  Vec local_grad(int i, const Vec& x) const { return locals[i]->gradient(x); }
};

Problem quadratic_consensus(int d, int m, std::uint64_t seed);
Problem quadratic_from_data(const std::vector<Mat>& Q, const std::vector<Vec>& b);

Problem phase_retrieval(int d, int n, int m, double noise_sd, std::uint64_t seed);
Problem phase_retrieval_from_data(const std::vector<Mat>& A, const std::vector<Vec>& b);

Problem poisson_inverse(int d, int n, int m, std::uint64_t seed);
Problem poisson_from_data(const std::vector<Mat>& A, const std::vector<Vec>& b);

// f_i(x) = KL(A_i x, b_i), relatively smooth with respect to the Boltzmann-Shannon kernel.
Problem entropic_regression(int d, int n, int m, std::uint64_t seed);

struct TvOptions {
  int d_img = 16;
  int m = 8;
  int blur_len = 5;
  double alpha = 10.0;
  double lambda_tv = 1e-4;
  double eps_tv = 1e-10;
  std::uint64_t seed = 1;
};

Problem tv_deblur(const TvOptions& opt);
Problem tv_deblur_from_data(const std::vector<Mat>& A, const std::vector<Vec>& B, int d_img, double lambda_tv,
                            double eps_tv);
Mat phantom_image(int d_img);
double tv_value(const Mat& X, double eps);
Mat tv_gradient(const Mat& X, double eps);

struct SmoothnessEstimate {
  double raw = 0.0;
  double working = 0.0;
};

SmoothnessEstimate estimate_rel_smoothness(const Problem& prob, const Kernel& k, int n_samples,
                                           std::uint64_t seed);

double psnr(const Mat& X, const Mat& X_ref);

}  // namespace dmgt
