#include "dmgt/problem.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "dmgt/errors.hpp"
#include "dmgt/parallel.hpp"

namespace dmgt {

namespace {

constexpr double kLogGuard = 1e-300;

class QuadraticLocal : public LocalObjective {
 public:
  QuadraticLocal(Mat Q, Vec b) : Q_(std::move(Q)), b_(std::move(b)) {}
  double value(const Vec& x) const override { return 0.5 * x.dot(Q_ * x) + b_.dot(x); }
  Vec gradient(const Vec& x) const override { return Q_ * x + b_; }

 private:
  Mat Q_;
  Vec b_;
};

class PhaseLocal : public LocalObjective {
 public:
  PhaseLocal(Mat A, Vec b) : A_(std::move(A)), b_(std::move(b)) {}
  double value(const Vec& x) const override {
    Vec s = A_ * x;
    return (b_ - s.cwiseAbs2()).squaredNorm() / static_cast<double>(b_.size());
  }
  Vec gradient(const Vec& x) const override {
    Vec s = A_ * x;
    Vec r = (b_ - s.cwiseAbs2()).cwiseProduct(s);
    return (-4.0 / static_cast<double>(b_.size())) * (A_.transpose() * r);
  }

 private:
  Mat A_;
  Vec b_;
};

double kl_terms(const Vec& b, const Vec& Ax) {
  double v = 0.0;
  for (Eigen::Index l = 0; l < b.size(); ++l) {
    double a = std::max(Ax(l), kLogGuard);
    if (b(l) > 0) v += b(l) * std::log(b(l) / a);
    v += Ax(l) - b(l);
  }
  return v;
}

Vec kl_residual(const Vec& b, const Vec& Ax) {
  Vec r(b.size());
  for (Eigen::Index l = 0; l < b.size(); ++l) r(l) = 1.0 - b(l) / std::max(Ax(l), kLogGuard);
  return r;
}

class PoissonLocal : public LocalObjective {
 public:
  PoissonLocal(Mat A, Vec b) : A_(std::move(A)), b_(std::move(b)) {}
  double value(const Vec& x) const override { return kl_terms(b_, A_ * x); }
  Vec gradient(const Vec& x) const override { return A_.transpose() * kl_residual(b_, A_ * x); }

 private:
  Mat A_;
  Vec b_;
};

class EntropicLocal : public LocalObjective {
 public:
  EntropicLocal(Mat A, Vec b) : A_(std::move(A)), b_(std::move(b)) {}
  double value(const Vec& x) const override {
    Vec s = A_ * x;
    double v = 0.0;
    for (Eigen::Index l = 0; l < s.size(); ++l) {
      double a = std::max(s(l), 0.0);
      v += (a > 0 ? a * std::log(a / b_(l)) : 0.0) - a + b_(l);
    }
    return v;
  }
  Vec gradient(const Vec& x) const override {
    Vec s = A_ * x;
    Vec r(s.size());
    for (Eigen::Index l = 0; l < s.size(); ++l) r(l) = std::log(std::max(s(l), kLogGuard) / b_(l));
    return A_.transpose() * r;
  }

 private:
  Mat A_;
  Vec b_;
};

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

class TvDeblurLocal : public LocalObjective {
 public:
  TvDeblurLocal(SpMat A, Vec B, double lambda, double eps, int d_img)
      : A_(std::move(A)), B_(std::move(B)), lambda_(lambda), eps_(eps), n_(d_img) {}
  double value(const Vec& x) const override {
    Vec Ax = A_ * x;
    Eigen::Map<const RowMat> X(x.data(), n_, n_);
    return kl_terms(B_, Ax) + lambda_ * tv_value(X, eps_);
  }
  Vec gradient(const Vec& x) const override {
    Vec Ax = A_ * x;
    Vec g = A_.transpose() * kl_residual(B_, Ax);
    Eigen::Map<const RowMat> X(x.data(), n_, n_);
    RowMat G = tv_gradient(X, eps_);
    g += lambda_ * Eigen::Map<const Vec>(G.data(), n_ * n_);
    return g;
  }

 private:
  SpMat A_;
  Vec B_;
  double lambda_, eps_;
  int n_;
};

Mat normal_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  Mat A(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) A(i, j) = N(rng);
  return A;
}

Vec uniform_vector(int d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  Vec x(d);
  for (int j = 0; j < d; ++j) x(j) = U(rng);
  return x;
}

double poisson_draw(double mean, std::mt19937_64& rng) {
  if (mean <= 0) return 0.0;
  std::poisson_distribution<long> P(mean);
  return static_cast<double>(P(rng));
}

void check_sizes(int d, int m) {
  if (d < 1 || m < 1) throw std::invalid_argument("problem dimensions must be positive");
}

}  // namespace

double Problem::f(const Vec& x) const {
  double v = 0.0;
  for (const auto& l : locals) v += l->value(x);
  return v / m;
}

Vec Problem::grad_f(const Vec& x) const {
  Vec g = Vec::Zero(d);
  for (const auto& l : locals) g += l->gradient(x);
  return g / m;
}

Problem quadratic_from_data(const std::vector<Mat>& Q, const std::vector<Vec>& b) {
  if (Q.empty() || Q.size() != b.size()) throw std::invalid_argument("quadratic_from_data: size mismatch");
  Problem p;
  p.name = "quadratic";
  p.m = static_cast<int>(Q.size());
  p.d = static_cast<int>(Q[0].rows());
  p.feasible = Domain::all_space(p.d);
  Mat Qbar = Mat::Zero(p.d, p.d);
  Vec bbar = Vec::Zero(p.d);
  double L = 0.0;
  for (int i = 0; i < p.m; ++i) {
    p.locals.push_back(std::make_shared<QuadraticLocal>(Q[i], b[i]));
    Qbar += Q[i] / p.m;
    bbar += b[i] / p.m;
    Eigen::SelfAdjointEigenSolver<Mat> es(Q[i], Eigen::EigenvaluesOnly);
    L = std::max(L, es.eigenvalues().cwiseAbs().maxCoeff());
  }
  Eigen::LLT<Mat> llt(Qbar);
  if (llt.info() == Eigen::Success) {
    p.x_true = -llt.solve(bbar);
    p.f_lower = p.f(p.x_true);
  } else {
    p.f_lower = -std::numeric_limits<double>::infinity();
  }
  p.L_analytic = L;
  p.paired_kernel = euclidean(p.d);
  p.dda_shift = 0.0;
  return p;
}

Problem quadratic_consensus(int d, int m, std::uint64_t seed) {
  check_sizes(d, m);
  std::vector<Mat> Q;
  std::vector<Vec> b;
  for (int i = 0; i < m; ++i) {
    auto rng = make_rng({seed, 101, static_cast<std::uint64_t>(i)});
    Mat B = normal_matrix(d, d, rng);
    Q.push_back(B.transpose() * B / d + 0.5 * Mat::Identity(d, d));
    b.push_back(2.0 * normal_matrix(d, 1, rng).col(0));
  }
  return quadratic_from_data(Q, b);
}

Problem phase_retrieval_from_data(const std::vector<Mat>& A, const std::vector<Vec>& b) {
  if (A.empty() || A.size() != b.size()) throw std::invalid_argument("phase_retrieval: size mismatch");
  Problem p;
  p.name = "phase_retrieval";
  p.m = static_cast<int>(A.size());
  p.d = static_cast<int>(A[0].cols());
  p.feasible = Domain::all_space(p.d);
  double L = 0.0;
  for (int i = 0; i < p.m; ++i) {
    p.locals.push_back(std::make_shared<PhaseLocal>(A[i], b[i]));
    double s = 0.0;
    for (Eigen::Index l = 0; l < A[i].rows(); ++l) {
      double a2 = A[i].row(l).squaredNorm();
      s += 12.0 * a2 * a2 + 4.0 * std::abs(b[i](l)) * a2;
    }
    L = std::max(L, s / static_cast<double>(A[i].rows()));
  }
  p.L_analytic = L;
  p.f_lower = 0.0;
  p.paired_kernel = power(p.d, 1.0, 2.0);
  p.dda_shift = 0.0;
  return p;
}

Problem phase_retrieval(int d, int n, int m, double noise_sd, std::uint64_t seed) {
  check_sizes(d, m);
  if (n < 1) throw std::invalid_argument("phase_retrieval: n must be positive");
  auto rng0 = make_rng({seed, 201});
  Vec x_true = uniform_vector(d, rng0);
  std::vector<Mat> A;
  std::vector<Vec> b;
  for (int i = 0; i < m; ++i) {
    auto rng = make_rng({seed, 202, static_cast<std::uint64_t>(i)});
    std::normal_distribution<double> N(0.0, 1.0);
    Mat Ai = normal_matrix(n, d, rng);
    Vec s = Ai * x_true;
    Vec bi(n);
    for (int l = 0; l < n; ++l) bi(l) = s(l) * s(l) + noise_sd * N(rng);
    A.push_back(Ai);
    b.push_back(bi);
  }
  Problem p = phase_retrieval_from_data(A, b);
  p.x_true = x_true;
  return p;
}

Problem poisson_from_data(const std::vector<Mat>& A, const std::vector<Vec>& b) {
  if (A.empty() || A.size() != b.size()) throw std::invalid_argument("poisson: size mismatch");
  Problem p;
  p.name = "poisson";
  p.m = static_cast<int>(A.size());
  p.d = static_cast<int>(A[0].cols());
  p.feasible = Domain::open_orthant(p.d);
  double L = 0.0;
  for (int i = 0; i < p.m; ++i) {
    for (Eigen::Index l = 0; l < A[i].rows(); ++l)
      if (A[i].row(l).isZero(0.0)) throw DegenerateRow("poisson: measurement row is entirely zero");
    p.locals.push_back(std::make_shared<PoissonLocal>(A[i], b[i]));
    L = std::max(L, b[i].sum());
  }
  p.L_analytic = L;
  p.f_lower = 0.0;
  p.paired_kernel = burg(p.d, 1.0);
  p.dda_shift = 1.0;
  return p;
}

Problem poisson_inverse(int d, int n, int m, std::uint64_t seed) {
  check_sizes(d, m);
  if (n < 1) throw std::invalid_argument("poisson_inverse: n must be positive");
  auto rng0 = make_rng({seed, 301});
  Vec x_true = uniform_vector(d, rng0);
  std::vector<Mat> A;
  std::vector<Vec> b;
  for (int i = 0; i < m; ++i) {
    auto rng = make_rng({seed, 302, static_cast<std::uint64_t>(i)});
    std::student_t_distribution<double> T(5.0);
    Mat Ai(n, d);
    for (int l = 0; l < n; ++l) {
      do {
        for (int j = 0; j < d; ++j) Ai(l, j) = std::abs(T(rng));
      } while (Ai.row(l).isZero(0.0));
    }
    Vec mean = Ai * x_true;
    Vec bi(n);
    for (int l = 0; l < n; ++l) bi(l) = poisson_draw(mean(l), rng);
    A.push_back(Ai);
    b.push_back(bi);
  }
  Problem p = poisson_from_data(A, b);
  p.x_true = x_true;
  return p;
}

Problem entropic_regression(int d, int n, int m, std::uint64_t seed) {
  check_sizes(d, m);
  auto rng0 = make_rng({seed, 401});
  Vec x_true = uniform_vector(d, rng0).array() + 0.1;
  Problem p;
  p.name = "entropic_regression";
  p.m = m;
  p.d = d;
  p.feasible = Domain::open_orthant(d);
  double L = 0.0;
  for (int i = 0; i < m; ++i) {
    auto rng = make_rng({seed, 402, static_cast<std::uint64_t>(i)});
    std::normal_distribution<double> N(0.0, 1.0);
    Mat Ai = normal_matrix(n, d, rng).cwiseAbs();
    Vec bi = Ai * x_true;
    for (int l = 0; l < n; ++l) bi(l) *= std::exp(0.1 * N(rng));
    L = std::max(L, Ai.colwise().sum().maxCoeff());
    p.locals.push_back(std::make_shared<EntropicLocal>(Ai, bi));
  }
  p.x_true = x_true;
  p.L_analytic = L;
  p.f_lower = 0.0;
  p.paired_kernel = boltzmann_shannon(d);
  p.dda_shift = 1.0;
  return p;
}

Problem tv_deblur_from_data(const std::vector<Mat>& A, const std::vector<Vec>& B, int d_img, double lambda_tv,
                            double eps_tv) {
  if (A.empty() || A.size() != B.size()) throw std::invalid_argument("tv_deblur_from_data: need one B per operator");
  const int N = d_img * d_img;
  Problem p;
  p.name = "tv_deblur";
  p.m = static_cast<int>(A.size());
  p.d = N;
  p.feasible = Domain::open_orthant(N);
  for (std::size_t i = 0; i < A.size(); ++i) {
    if (A[i].rows() != N || A[i].cols() != N || B[i].size() != N)
      throw std::invalid_argument("tv_deblur_from_data: operator and data must be d_img^2 sized");
    p.locals.push_back(std::make_shared<TvDeblurLocal>(A[i].sparseView(), B[i], lambda_tv, eps_tv, d_img));
  }
  p.f_lower = 0.0;
  p.paired_kernel = burg(N, 1.0);
  p.dda_shift = 1.0;
  return p;
}

Mat phantom_image(int n) {
  Mat X = Mat::Constant(n, n, 30.0);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      if (p >= n / 4 && p < n / 2 && q >= n / 4 && q < 3 * n / 4) X(p, q) = 200.0;
      double dp = p - 0.65 * n, dq = q - 0.6 * n;
      if (dp * dp + dq * dq <= (0.2 * n) * (0.2 * n)) X(p, q) = 120.0;
      if (p >= 3 * n / 4 && q < n / 4) X(p, q) = 255.0;
    }
  return X;
}

double tv_value(const Mat& X, double eps) {
  const Eigen::Index n = X.rows();
  double v = 0.0;
  for (Eigen::Index p = 0; p < n; ++p)
    for (Eigen::Index q = 0; q < n; ++q) {
      double dx = p + 1 < n ? X(p + 1, q) - X(p, q) : 0.0;
      double dy = q + 1 < n ? X(p, q + 1) - X(p, q) : 0.0;
      v += std::sqrt(dx * dx + dy * dy + eps * eps);
    }
  return v;
}

Mat tv_gradient(const Mat& X, double eps) {
  const Eigen::Index n = X.rows();
  Mat G = Mat::Zero(n, n);
  for (Eigen::Index p = 0; p < n; ++p)
    for (Eigen::Index q = 0; q < n; ++q) {
      double dx = p + 1 < n ? X(p + 1, q) - X(p, q) : 0.0;
      double dy = q + 1 < n ? X(p, q + 1) - X(p, q) : 0.0;
      double s = std::sqrt(dx * dx + dy * dy + eps * eps);
      G(p, q) -= (dx + dy) / s;
      if (p + 1 < n) G(p + 1, q) += dx / s;
      if (q + 1 < n) G(p, q + 1) += dy / s;
    }
  return G;
}

Problem tv_deblur(const TvOptions& o) {
  if (o.d_img < 4) throw std::invalid_argument("tv_deblur: d_img must be at least 4");
  check_sizes(o.d_img, o.m);
  if (o.blur_len < 1) throw std::invalid_argument("tv_deblur: blur_len must be positive");
  const int n = o.d_img, N = n * n;
  Mat Xt = phantom_image(n);
  RowMat Xr = Xt;
  Vec xt = Eigen::Map<const Vec>(Xr.data(), N);
  Problem p;
  p.name = "tv_deblur";
  p.m = o.m;
  p.d = N;
  p.feasible = Domain::open_orthant(N);
  const double pi = std::acos(-1.0);
  for (int i = 0; i < o.m; ++i) {
    double theta = (i % 8) * pi / 8.0;
    std::vector<Eigen::Triplet<double>> trip;
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        for (int k = 0; k < o.blur_len; ++k) {
          double off = k - 0.5 * (o.blur_len - 1);
          int rr = std::clamp(static_cast<int>(std::lround(r + off * std::sin(theta))), 0, n - 1);
          int cc = std::clamp(static_cast<int>(std::lround(c + off * std::cos(theta))), 0, n - 1);
          trip.emplace_back(r * n + c, rr * n + cc, 1.0 / o.blur_len);
        }
    SpMat A(N, N);
    A.setFromTriplets(trip.begin(), trip.end());
    auto rng = make_rng({o.seed, 501, static_cast<std::uint64_t>(i)});
    Vec mean = o.alpha * (A * xt);
    Vec B(N);
    for (int l = 0; l < N; ++l) B(l) = poisson_draw(mean(l), rng) / o.alpha;
    p.locals.push_back(std::make_shared<TvDeblurLocal>(A, B, o.lambda_tv, o.eps_tv, n));
  }
  p.x_true = xt;
  p.f_lower = 0.0;
  p.paired_kernel = burg(N, 1.0);
  p.dda_shift = 1.0;
  return p;
}

SmoothnessEstimate estimate_rel_smoothness(const Problem& prob, const Kernel& k, int n_samples,
                                           std::uint64_t seed) {
  if (k.dim() != prob.d) throw std::invalid_argument("estimate_rel_smoothness: dimension mismatch");
  if (n_samples < 1) throw std::invalid_argument("estimate_rel_smoothness: n_samples must be positive");
  double best = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    auto rng = make_rng({seed, 601, static_cast<std::uint64_t>(s)});
    Vec x;
    int tries = 0;
    do {
      if (++tries > 1000) throw SamplingExhausted("estimate_rel_smoothness: no admissible sample");
      x = k.domain().sample(rng);
    } while (!prob.feasible.contains(x));
    std::normal_distribution<double> N(0.0, 1.0);
    Vec v(prob.d);
    for (int j = 0; j < prob.d; ++j) v(j) = N(rng);
    double eps = 1e-5 * (1.0 + x.norm()) / v.norm();
    for (int h = 0; h < 60; ++h) {
      if (k.domain().contains(x + eps * v) && k.domain().contains(x - eps * v) &&
          prob.feasible.contains(x + eps * v) && prob.feasible.contains(x - eps * v))
        break;
      eps *= 0.5;
    }
    double hv = v.dot(k.hess_apply(x, v));
    for (int i = 0; i < prob.m; ++i) {
      Vec fd = (prob.local_grad(i, x + eps * v) - prob.local_grad(i, x - eps * v)) / (2.0 * eps);
      double r = std::abs(v.dot(fd)) / hv;
      if (std::isfinite(r)) best = std::max(best, r);
    }
  }
  return {best, 1.2 * best};
}

double psnr(const Mat& X, const Mat& X_ref) {
  if (X.rows() != X_ref.rows() || X.cols() != X_ref.cols()) throw std::invalid_argument("psnr: shape mismatch");
  double mse = (X - X_ref).squaredNorm() / static_cast<double>(X.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

}  // namespace dmgt
