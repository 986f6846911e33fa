#include <doctest.h>

#include <cmath>
#include <random>

#include "mubcert/consys.hpp"
#include "mubcert/errors.hpp"
#include "mubcert/qmp.hpp"

using namespace mubcert;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXd M(r, c);
  for (Eigen::Index i = 0; i < M.size(); ++i) M.data()[i] = nd(rng);
  return M;
}

QmpFunction random_function(std::size_t n, std::size_t r, std::mt19937_64& rng) {
  Eigen::MatrixXd A = random_matrix(n, n, rng);
  A = (A + A.transpose()).eval() / 2;
  return {A.sparseView(), random_matrix(n, r, rng).sparseView(), std::normal_distribution<double>()(rng), "f"};
}

Eigen::MatrixXcd fourier_projector(unsigned k) {
  Ket v = fourier_basis(2)[k];
  return v * v.adjoint();
}

}  // namespace

TEST_SUITE("qmp") {
  TEST_CASE("homogenization examples") {
    Eigen::MatrixXd M = homogenize(Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(2, 3), 3.0, 3);
    Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(5, 5);
    expect.bottomRightCorner(3, 3).setIdentity();
    CHECK(M == expect);
    Eigen::MatrixXd M2 = homogenize(Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Zero(2, 1), 0.0, 1);
    Eigen::MatrixXd e2 = Eigen::MatrixXd::Zero(3, 3);
    e2(0, 0) = e2(1, 1) = 1;
    CHECK(M2 == e2);
    CHECK_THROWS_AS(homogenize(Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(3, 1), 0.0, 1), DimensionError);
  }

  TEST_CASE("homogenization identity") {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 100; ++t) {
      std::size_t n = 1 + rng() % 7, r = 1 + rng() % 4;
      auto f = random_function(n, r, rng);
      Eigen::MatrixXd X = random_matrix(n, r, rng);
      Eigen::MatrixXd Z(n + r, r);
      Z << X, Eigen::MatrixXd::Identity(r, r);
      CHECK(std::abs(f.evaluate(X) - (Z.transpose() * homogenize(f, r) * Z).trace()) < 1e-10);
    }
  }

  TEST_CASE("relaxation shape and lifted feasibility") {
    std::mt19937_64 rng(8);
    const std::size_t n = 4, r = 2;
    Eigen::MatrixXd X0 = random_matrix(n, r, rng);
    QmpProblem q;
    q.n = n;
    q.r = r;
    q.objective = random_function(n, r, rng);
    for (int k = 0; k < 3; ++k) {
      auto f = random_function(n, r, rng);
      f.c -= f.evaluate(X0);  // make X0 feasible
      q.constraints.push_back(f);
    }
    q.validate();
    CHECK(q.max_violation(X0) < 1e-10);
    auto rel = build_relaxation(q);
    CHECK(rel.size() == n + r);
    CHECK(rel.rank_bound() == r);
    CHECK(rel.sdp.constraints.size() == 3 + r * (r + 1) / 2);
    BlockMatrices U{lift(X0)};
    for (std::size_t i = 0; i < rel.sdp.constraints.size(); ++i)
      CHECK(std::abs(inner(rel.sdp.constraints[i], U) - rel.sdp.rhs[i]) < 1e-10);
  }

  TEST_CASE("r = 1 pins the corner entry") {
    QmpProblem q;
    q.n = 2;
    q.r = 1;
    q.objective = {SparseMatrix(2, 2), SparseMatrix(2, 1), 0.0, "zero"};
    auto rel = build_relaxation(q);
    REQUIRE(rel.sdp.constraints.size() == 1);
    const auto& e = rel.sdp.constraints[0].entries;
    REQUIRE(e.size() == 1);
    CHECK(e[0].row == 2);
    CHECK(e[0].col == 2);
    CHECK(e[0].value == 2.0);
    CHECK(rel.sdp.rhs[0] == 2.0);
  }

  TEST_CASE("constellation encodings") {
    auto big = encode_constellation_qmp(ConstellationSpec::parse("5,3,3,3@6"));
    CHECK(big.problem.n == 108);
    CHECK(big.problem.r == 6);
    CHECK(build_relaxation(big.problem).size() == 114);

    auto toy = encode_constellation_qmp(ConstellationSpec::parse("2,1@2"));
    CHECK(toy.problem.n == 4);
    CHECK(toy.problem.r == 2);
    Eigen::MatrixXd X = toy.pack({fourier_projector(0)});
    CHECK(toy.problem.max_violation(X) < 1e-12);
    CHECK(std::abs(toy.problem.objective.evaluate(X)) < 1e-12);
    auto back = toy.unpack(X);
    CHECK((back[0] - fourier_projector(0)).norm() < 1e-12);

    CHECK_THROWS_AS(encode_constellation_qmp(ConstellationSpec::parse("2@2")), UnsupportedError);
  }

  TEST_CASE("feasibility form of the {2,2}_2 encoding vanishes at the Fourier basis") {
    auto enc = encode_constellation_qmp(ConstellationSpec::parse("2,2@2"));
    REQUIRE(enc.objective_pair.has_value());
    auto feas = enc.problem.feasibility();
    CHECK(feas.constraints.size() == enc.problem.constraints.size() + 1);
    Eigen::MatrixXd X = enc.pack({fourier_projector(0), fourier_projector(1)});
    CHECK(feas.max_violation(X) < 1e-12);
    Eigen::MatrixXd wrong = enc.pack({fourier_projector(0), fourier_projector(0)});
    CHECK(feas.max_violation(wrong) > 0.1);
  }

  TEST_CASE("Fantope step") {
    Eigen::MatrixXd G = Eigen::Vector3d(3, 1, 2).asDiagonal();
    auto s = fantope_step(G, 1);
    CHECK(s.value == doctest::Approx(3.0));
    Eigen::MatrixXd W = Eigen::Vector3d(0, 1, 1).asDiagonal();
    CHECK((s.W - W).norm() < 1e-12);

    std::mt19937_64 rng(2);
    Eigen::MatrixXd F = random_matrix(6, 2, rng);
    CHECK(std::abs(fantope_step(F * F.transpose(), 2).value) < 1e-10);

    Eigen::MatrixXd D = Eigen::Vector4d(1, 1, 1, 5).asDiagonal();
    auto deg = fantope_step(D, 2);
    CHECK(deg.value == doctest::Approx(2.0));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(deg.W);
    CHECK(es.eigenvalues().minCoeff() > -1e-10);
    CHECK(es.eigenvalues().maxCoeff() < 1 + 1e-10);
    CHECK(deg.W.trace() == doctest::Approx(2.0));
  }

  TEST_CASE("Fantope step beats random Fantope members") {
    std::mt19937_64 rng(12);
    for (std::size_t N = 2; N <= 8; ++N) {
      Eigen::MatrixXd R = random_matrix(N, N, rng);
      Eigen::MatrixXd G = (R + R.transpose()) / 2;
      std::size_t rank = 1 + rng() % (N - 1);
      auto s = fantope_step(G, rank);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
      CHECK(std::abs(s.value - es.eigenvalues().head(N - rank).sum()) < 1e-10);
      for (int t = 0; t < 500; ++t) {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_matrix(N, N, rng));
        Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(N, N - rank);
        CHECK((G * Q * Q.transpose()).trace() >= s.value - 1e-10);
      }
    }
  }

  TEST_CASE("convex iteration on {2,1}_2") {
    auto enc = encode_constellation_qmp(ConstellationSpec::parse("2,1@2"));
    auto rel = build_relaxation(enc.problem.feasibility());
    ConvexIterOptions opts;
    opts.tol = 1e-6;
    auto st = convex_iteration(rel, opts);
    CHECK(st.status == ConvexIterStatus::Converged);
    CHECK(st.tau.back() <= 1e-6);
    for (std::size_t i = 1; i < st.tau.size(); ++i) CHECK(st.tau[i] <= st.tau[i - 1] + 1e-6);
    REQUIRE(st.X.has_value());
    REQUIRE(st.factor.has_value());
    CHECK(st.reconstruction_residual <= 10 * opts.tol);
    CHECK(enc.problem.feasibility().max_violation(*st.X) <= 1e3 * opts.tol);
    CHECK(check_mu(enc.kets(*st.X), 1e-5).pass);
  }

  TEST_CASE("convex iteration from a random start") {
    auto enc = encode_constellation_qmp(ConstellationSpec::parse("2,2@2"));
    auto rel = build_relaxation(enc.problem.feasibility());
    ConvexIterOptions opts;
    opts.seed = 5;
    auto st = convex_iteration(rel, opts);
    CHECK(st.status == ConvexIterStatus::Converged);
    REQUIRE(st.X.has_value());
    auto feas = enc.problem.feasibility();
    auto pol = polish(feas, *st.X);
    CHECK(pol.violation_after <= pol.violation_before);
    CHECK(pol.violation_after < 1e-12);
    CHECK(check_mu(enc.kets(pol.X), 1e-5).pass);
  }

  TEST_CASE("polishing converges from a perturbed witness") {
    auto enc = encode_constellation_qmp(ConstellationSpec::parse("2,2@2"));
    auto feas = enc.problem.feasibility();
    Eigen::MatrixXd X = enc.pack({fourier_projector(0), fourier_projector(1)});
    std::mt19937_64 rng(6);
    X += 1e-3 * random_matrix(X.rows(), X.cols(), rng);
    auto pol = polish(feas, X);
    CHECK(pol.violation_before > 1e-6);
    CHECK(pol.violation_after < 1e-12);
    CHECK(check_mu(enc.kets(pol.X), 1e-6).pass);  // amplitudes see the square root of the violation
    CHECK_THROWS_AS(polish(feas, Eigen::MatrixXd::Zero(2, 2)), DimensionError);
  }

  TEST_CASE("an impossible constellation does not converge") {
    auto enc = encode_constellation_qmp(ConstellationSpec::parse("1,1,1,1@2"));
    auto rel = build_relaxation(enc.problem.feasibility());
    ConvexIterOptions opts;
    opts.max_iter = 200;
    auto st = convex_iteration(rel, opts);
    CHECK(st.status != ConvexIterStatus::Converged);
    CHECK(st.tau.back() > 1e-3);
    CHECK_FALSE(st.X.has_value());
  }
}
