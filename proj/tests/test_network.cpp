#include <cmath>

#include "doctest.h"
#include "dmgt/errors.hpp"
#include "dmgt/network.hpp"
#include "dmgt/parallel.hpp"
#include "support.hpp"

using namespace dmgt;

namespace {

void check_mixing_invariants(const MixingMatrix& M) {
  const Mat& W = M.W;
  CHECK((W - W.transpose()).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((W.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
  CHECK((W.colwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
  CHECK(W.minCoeff() >= 0.0);
  CHECK(M.rho < 1.0);
  Mat J = Mat::Constant(M.m, M.m, 1.0 / M.m);
  Eigen::SelfAdjointEigenSolver<Mat> es(W - J);
  CHECK(M.rho == doctest::Approx(es.eigenvalues().cwiseAbs().maxCoeff()).epsilon(1e-12));
}

}  // namespace

TEST_SUITE("network") {
  TEST_CASE("erdos_renyi examples") {
    Graph k4 = erdos_renyi(4, 1.0, 3);
    CHECK(k4.edge_count() == 6);
    Graph k2 = erdos_renyi(2, 1.0, 3);
    CHECK(k2.edge_count() == 1);
    Graph a = erdos_renyi(32, 0.3, 7), b = erdos_renyi(32, 0.3, 7);
    CHECK(a.connected());
    CHECK(a.edge_count() == b.edge_count());
    CHECK(a.edges() == b.edges());
    CHECK(a.retries == b.retries);
  }

  TEST_CASE("erdos_renyi gives up on hopeless probabilities") {
    CHECK_THROWS_AS(erdos_renyi(30, 0.001, 1), DisconnectedAfterRetries);
  }

  TEST_CASE("metropolis on K4") {
    MixingMatrix M = metropolis_weights(complete_graph(4));
    CHECK((M.W.array() - 0.25).abs().maxCoeff() <= 1e-15);
    CHECK(M.rho == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(M.rho <= 1e-12);
    check_mixing_invariants(M);
  }

  TEST_CASE("metropolis on the 4-cycle") {
    MixingMatrix M = metropolis_weights(ring_graph(4));
    for (int i = 0; i < 4; ++i) {
      CHECK(M.W(i, i) == doctest::Approx(1.0 / 3));
      CHECK(M.W(i, (i + 1) % 4) == doctest::Approx(1.0 / 3));
      CHECK(M.W(i, (i + 2) % 4) == 0.0);
    }
    // circulant eigenvalues (1/3)(1 + 2 cos(2 pi k / 4)), k = 1..3
    double oracle = 0;
    for (int k = 1; k < 4; ++k) oracle = std::max(oracle, std::abs((1 + 2 * std::cos(2 * M_PI * k / 4)) / 3));
    CHECK(M.rho == doctest::Approx(oracle).epsilon(1e-14));
    CHECK(oracle == doctest::Approx(1.0 / 3));
    check_mixing_invariants(M);
  }

  TEST_CASE("metropolis on a single edge") {
    MixingMatrix M = metropolis_weights(path_graph(2));
    CHECK((M.W.array() - 0.5).abs().maxCoeff() <= 1e-15);
    CHECK(M.rho <= 1e-15);
  }

  TEST_CASE("metropolis rejects disconnected graphs") {
    CHECK_THROWS_AS(metropolis_weights(graph_from_edges(3, {{0, 1}})), Disconnected);
  }

  TEST_CASE("mixing invariants on random graphs") {
    for (std::uint64_t s = 0; s < 20; ++s) check_mixing_invariants(metropolis_weights(erdos_renyi(3 + s % 10, 0.4, s)));
  }

  TEST_CASE("contraction_check examples") {
    auto rng = make_rng({21});
    MixingMatrix M = metropolis_weights(ring_graph(5));
    Mat H = testing_support::random_spd(3, rng);
    Mat V = Mat::Zero(5, 3);
    V.rowwise() = testing_support::randn(3, rng).transpose();
    CHECK(contraction_check(M, H, H, V, Mat::Zero(5, 3)));

    MixingMatrix avg = mixing_from_matrix(Mat::Constant(4, 4, 0.25));
    Mat V2(4, 2);
    V2.setRandom();
    CHECK(contraction_check(avg, Mat::Identity(2, 2), Mat::Identity(2, 2), V2, Mat::Zero(4, 2)));

    const int m = 5, d = 3;
    const double rho = 1.0 / 3;
    Mat J = Mat::Constant(m, m, 1.0 / m);
    MixingMatrix W = mixing_from_matrix(J + rho * (Mat::Identity(m, m) - J));
    CHECK(W.rho == doctest::Approx(rho).epsilon(1e-12));
    const double alpha = (1 - rho) / 2;
    Mat Hr = testing_support::random_spd(d, rng);
    Mat Vr(m, d), Ur(m, d);
    for (int i = 0; i < m; ++i) {
      Vr.row(i) = testing_support::randn(d, rng).transpose();
      Ur.row(i) = testing_support::randn(d, rng).transpose();
    }
    CHECK(contraction_check(W, Hr, (1 + alpha) * Hr, Vr, Ur));
    CHECK(root_ratio_norm(Hr, (1 + alpha) * Hr) == doctest::Approx(std::sqrt(1 + alpha)).epsilon(1e-12));
  }

  TEST_CASE("contraction_check enforces its hypothesis") {
    auto rng = make_rng({22});
    MixingMatrix W = metropolis_weights(ring_graph(4));
    Mat H = testing_support::random_spd(2, rng);
    Mat V = Mat::Ones(4, 2), U = Mat::Zero(4, 2);
    CHECK_THROWS_AS(contraction_check(W, H, 2.0 * H, V, U), PreconditionViolated);
  }
}
