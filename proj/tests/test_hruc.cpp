#include <cmath>

#include "doctest.h"
#include "dmgt/errors.hpp"
#include "dmgt/hruc.hpp"
#include "dmgt/parallel.hpp"
#include "dmgt/problem.hpp"
#include "support.hpp"

using namespace dmgt;

namespace {

Vec v1(double a) { return (Vec(1) << a).finished(); }

}  // namespace

TEST_SUITE("hruc") {
  TEST_CASE("relative_hessian_gap examples") {
    auto rng = make_rng({11});
    for (const auto& c : kernel_catalogue(4)) {
      Vec x = c.kernel.domain().sample(rng);
      CHECK_MESSAGE(relative_hessian_gap(c.kernel, x, x) == doctest::Approx(0.0).epsilon(1e-12), c.name);
    }
    Vec x = testing_support::randn(3, rng), y = testing_support::randn(3, rng);
    CHECK(relative_hessian_gap(euclidean(3), x, y) == 0.0);
    const double e = std::exp(1.0);
    CHECK(relative_hessian_gap(boltzmann_shannon(1), v1(e), v1(1.0)) == doctest::Approx(1 - 1 / e).epsilon(1e-15));
  }

  TEST_CASE("relative_hessian_gap matches a dense oracle for a rank-one Hessian") {
    auto rng = make_rng({12});
    Kernel k = power(3, 1.0, 1.5);
    Vec x = testing_support::randn(3, rng), y = testing_support::randn(3, rng);
    Mat Hx = k.hessian(x).to_dense(), Hy = k.hessian(y).to_dense();
    Mat P = Hx * Hy.inverse() - Mat::Identity(3, 3);
    double oracle = Eigen::JacobiSVD<Mat>(P).singularValues()(0);
    CHECK(relative_hessian_gap(k, x, y) == doctest::Approx(oracle).epsilon(1e-10));
  }

  TEST_CASE("certify euclidean is exact") {
    HrucReport r = certify(euclidean(5), {0.01, 0.1, 1.0}, 200, 7);
    CHECK(r.consistent());
    for (double g : r.worst_gap) CHECK(g == 0.0);
  }

  TEST_CASE("certify Boltzmann-Shannon and power r=2") {
    for (const Kernel& k : {boltzmann_shannon(5), power(5, 1.0, 2.0)}) {
      HrucReport r = certify(k, {0.01, 0.1, 1.0}, 1000, 7);
      CHECK_MESSAGE(r.consistent(), k.id());
      for (std::size_t j = 0; j < r.delta_grid.size(); ++j) {
        CHECK(r.analytic_zeta[j] == doctest::Approx(k.zeta(r.delta_grid[j])));
        CHECK(r.worst_gap[j] <= r.analytic_zeta[j] * (1 + 1e-9));
      }
    }
  }

  TEST_CASE("certify report fields and formats") {
    HrucReport r = certify(burg(3, 1.0), {0.1, 0.5}, 100, 3);
    CHECK(r.n_samples == 100);
    CHECK(r.delta_grid.size() == 2);
    CHECK(r.to_csv().rfind("delta,worst_gap,analytic_zeta,n_samples\n", 0) == 0);
    CHECK(r.to_text().find("consistent with") != std::string::npos);
  }

  TEST_CASE("certify is reproducible across thread counts") {
    CertifyOptions one, four;
    four.threads = 4;
    HrucReport a = certify(boltzmann_shannon(4), {0.1, 1.0}, 300, 9, one);
    HrucReport b = certify(boltzmann_shannon(4), {0.1, 1.0}, 300, 9, four);
    CHECK(a.to_csv() == b.to_csv());
  }

  TEST_CASE("certify flags a modulus that is too small") {
    Kernel bs = boltzmann_shannon(3);
    Kernel weak(bs.impl_ptr(), bs.domain(), DistortionModulus::exp_linear(0.5), "bs_weak");
    HrucReport r = certify(weak, {1.0}, 200, 1);
    CHECK_FALSE(r.consistent());
    CHECK(r.worst_gap[0] > weak.zeta(1.0));
  }

  TEST_CASE("certify exhausts sampling when nearly every pair leaves the image") {
    CHECK_THROWS_AS(certify(tsallis(10, 1.0, 0.5), {1e6}, 20, 1), SamplingExhausted);
  }

  TEST_CASE("dual_lipschitz_residual trivial cases") {
    Kernel k = euclidean(2);
    Mat Q(2, 2);
    Q << 2, 0.5, 0.5, 1;
    GradOracle g = [&](const Vec& x) -> Vec { return Q * x; };
    double L = Eigen::SelfAdjointEigenSolver<Mat>(Q).eigenvalues().maxCoeff();
    Vec z = Vec::Zero(2), x = (Vec(2) << 0.1, 0.2).finished(), y = (Vec(2) << -0.3, 0.05).finished();
    CHECK(dual_lipschitz_residual(k, g, L, z, x, x, 1.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(dual_lipschitz_residual(k, g, L, z, x, y, 1.0) <= 0.0);
    CHECK_THROWS_AS(dual_lipschitz_residual(k, g, L, z, x, y, 0.01), PreconditionViolated);
  }

  TEST_CASE("dual_lipschitz_residual with Burg and a Poisson objective") {
    Problem p = poisson_inverse(4, 6, 1, 5);
    Kernel k = *p.paired_kernel;
    const double L = *p.L_analytic;
    GradOracle g = [&](const Vec& x) { return p.grad_f(x); };
    auto rng = make_rng({13});
    const double delta = 0.2;
    for (int s = 0; s < 50; ++s) {
      Vec xc = k.domain().sample(rng);
      Vec z = k.grad(xc);
      Vec x = k.grad_conj(z + sample_ball(4, delta, rng));
      Vec y = k.grad_conj(z + sample_ball(4, delta, rng));
      CHECK(dual_lipschitz_residual(k, g, L, z, x, y, delta) <= 1e-9);
    }
  }
}
