#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "haarlab/numerics.hpp"

using namespace haarlab;
using namespace haarlab::num;

TEST_CASE("sigma_real") {
  CHECK(sigma_real(Eigen::Matrix2d::Identity()) == doctest::Approx(1.0));
  Eigen::Matrix2d d = Eigen::Vector2d(2.0, 0.5).asDiagonal();
  CHECK(sigma_real(d) == doctest::Approx(0.5));
  // perturbation lemma: sigma(A') >= sigma0 - sqrt(n) eps
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n01(0, 1);
  for (int rep = 0; rep < 300; ++rep) {
    Eigen::Matrix2d A = Eigen::Matrix2d::Identity();  // sigma0 = 1
    Eigen::Matrix2d E;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) E(i, j) = n01(rng);
    for (int j = 0; j < 2; ++j) E.col(j) *= 0.1 / std::max(E.col(j).norm(), 1e-12);  // column norms 0.1
    CHECK(sigma_real(A + E) >= 1.0 - std::sqrt(2.0) * 0.1 - 1e-12);
  }
}

TEST_CASE("sigma_real matches the sup definition on sampled boundary points") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n01(0, 1);
  for (int rep = 0; rep < 100; ++rep) {
    Eigen::MatrixXd A(2, 3);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 3; ++j) A(i, j) = n01(rng);
    double s = sigma_real(A);
    // every point of 0_{s} has a preimage in the unit ball: least-norm solve
    for (int t = 0; t < 50; ++t) {
      Eigen::Vector2d dir(n01(rng), n01(rng));
      dir.normalize();
      Eigen::Vector2d y = 0.999 * s * dir;
      Eigen::VectorXd x = A.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(y);
      CHECK(x.norm() <= 1.0 + 1e-9);
      // and some point at radius s(1 + eps) needs a preimage outside the ball
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU);
    Eigen::Vector2d worst_dir = svd.matrixU().col(1);
    Eigen::VectorXd x = A.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(Eigen::Vector2d(1.001 * s * worst_dir));
    CHECK(x.norm() > 1.0);
  }
}

TEST_CASE("sigma_padic") {
  CHECK(sigma_padic(5, 8, 2, 2, {1, 0, 0, 1}).valuation == 0);
  CHECK(sigma_padic(5, 8, 2, 2, {5, 0, 0, 1}).valuation == 1);
  CHECK(sigma_padic(5, 8, 2, 2, {5, 0, 0, 5}).valuation == 1);  // p * identity -> p^-1
  CHECK(sigma_padic(5, 8, 2, 2, {0, 0, 0, 0}).rank_deficient);
}

TEST_CASE("real quantitative IFT") {
  std::mt19937_64 rng(7);
  // Phi(x, y) = (x + 0.1 x^2, y): sigma0 = 1 at 0, alpha = 0.2
  SmoothMapProbe probe;
  probe.n = 2;
  probe.m = 2;
  probe.x0 = Eigen::Vector2d(0, 0);
  probe.r0 = 1.0;
  probe.alpha = 0.2 * std::sqrt(2.0);
  probe.phi = [](const Eigen::VectorXd& v) {
    return Eigen::VectorXd(Eigen::Vector2d(v[0] + 0.1 * v[0] * v[0], v[1]));
  };
  probe.jacobian = [](const Eigen::VectorXd& v) {
    Eigen::Matrix2d J;
    J << 1 + 0.2 * v[0], 0, 0, 1;
    return Eigen::MatrixXd(J);
  };
  probe.validate();
  double sigma0 = sigma_real(probe.jacobian(probe.x0));
  double r = 0.9 * std::min(sigma0 / (2 * 2 * 2 * std::sqrt(probe.alpha)), probe.r0);
  std::uniform_real_distribution<double> u01(0, 1);
  std::normal_distribution<double> n01(0, 1);
  for (int t = 0; t < 100; ++t) {
    Eigen::Vector2d dir(n01(rng), n01(rng));
    dir.normalize();
    Eigen::VectorXd y = Eigen::Vector2d(0.99 * sigma0 * r / 4 * u01(rng) * dir);
    IFTResult res = solve_real_ift(probe, y, r);
    REQUIRE(res.ok);
    CHECK(res.residual <= 1e-10);
    CHECK((res.x - probe.x0).norm() <= r + 1e-12);
    // quadratic-formula oracle for the first coordinate
    double target = y[0];
    double root = (-1.0 + std::sqrt(1.0 + 0.4 * target)) / 0.2;
    CHECK(res.x[0] == doctest::Approx(root).epsilon(1e-6));
  }
  // identity map: x = y
  SmoothMapProbe id;
  id.n = 2;
  id.m = 2;
  id.x0 = Eigen::Vector2d(0.5, -0.25);
  id.r0 = 1.0;
  id.alpha = 1e-12;
  id.phi = [](const Eigen::VectorXd& v) { return v; };
  id.jacobian = [](const Eigen::VectorXd& v) { return Eigen::MatrixXd(Eigen::Matrix2d::Identity()); };
  IFTResult res = solve_real_ift(id, Eigen::Vector2d(0.51, -0.26), 0.9);
  REQUIRE(res.ok);
  CHECK((res.x - Eigen::Vector2d(0.51, -0.26)).norm() <= 1e-10);
  // target outside the guaranteed ball is rejected
  CHECK_THROWS_AS(solve_real_ift(id, Eigen::Vector2d(0.9, 0.2), 0.9), precondition_error);
}

TEST_CASE("p-adic quantitative IFT") {
  const std::uint64_t p = 5;
  const int K = 20;
  // Phi(x) = x + 5 x^2, x0 = 0, k0 = 0: every y = 0 mod 5^2 has a root in 5 Z_5
  PAdicPolyMap map;
  map.p = p;
  map.K = K;
  map.n = 1;
  map.m = 1;
  map.x0 = {0};
  map.terms.push_back({{1}, {1}});
  map.terms.push_back({{2}, {5}});
  std::mt19937_64 rng(11);
  for (int t = 0; t < 50; ++t) {
    padic::u128 yv = padic::ipow(5, 1) * (rng() % 100000);  // valuation >= k0 + l = 1
    auto res = solve_padic_ift(map, {yv % padic::ipow(5, K)}, 0, 1);
    REQUIRE(res.ok);
    auto img = map.eval(res.x);
    CHECK(img[0] == yv % padic::ipow(5, K));
    CHECK(padic::Scalar(p, K, res.x[0]).valuation() >= 1);
  }
  // identity: x = y
  PAdicPolyMap idm;
  idm.p = p;
  idm.K = K;
  idm.n = 1;
  idm.m = 1;
  idm.x0 = {7};
  idm.terms.push_back({{0}, {7}});  // Phi(x0) = x0
  idm.terms.push_back({{1}, {1}});
  auto r2 = solve_padic_ift(idm, {(7 + padic::ipow(5, 3) * 12) % padic::ipow(5, K)}, 0, 2);
  REQUIRE(r2.ok);
  // degenerate differential is rejected
  PAdicPolyMap bad;
  bad.p = p;
  bad.K = K;
  bad.n = 1;
  bad.m = 1;
  bad.x0 = {0};
  bad.terms.push_back({{2}, {1}});  // dPhi(0) = 0
  CHECK_THROWS_AS(solve_padic_ift(bad, {0}, 0, 1), precondition_error);
}

TEST_CASE("bch against the dense matrix log oracle") {
  lie::RealStructure su = lie::RealStructure::su2();
  std::mt19937_64 rng(13);
  std::normal_distribution<double> n01(0, 1);
  // commuting pair: bch = x + y at every order
  Eigen::Vector3d z(0, 0, 0.2), z2(0, 0, -0.11);
  for (int ord = 1; ord <= 5; ++ord)
    CHECK((bch(su, z, z2, ord).value - Eigen::Vector3d(0, 0, 0.09)).norm() <= 1e-14);
  // random pairs: truncation error within the certified tail bound, and
  // order k+1 at least as accurate as order k
  for (int rep = 0; rep < 200; ++rep) {
    Eigen::Vector3d x(n01(rng), n01(rng), n01(rng)), y(n01(rng), n01(rng), n01(rng));
    x = x.normalized() * 0.05;
    y = y.normalized() * 0.05;
    su2::Mat2 prod = su2::exp(x) * su2::exp(y);
    Eigen::Vector3d truth = su2::log(prod);
    double prev = 1e9;
    for (int ord = 2; ord <= 5; ++ord) {
      BchResult r = bch(su, x, y, ord);
      double err = (r.value - truth).norm();
      CHECK(err <= r.tail_bound * (1 + 1e-9) + 1e-15);
      CHECK(err <= prev * 1.01);
      prev = err;
    }
  }
  // cross-check the su2 closed-form log against Eigen's dense matrix log
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::Vector3d x(n01(rng), n01(rng), n01(rng));
    x = x.normalized() * 0.3;
    su2::Mat2 g = su2::exp(x);
    Eigen::Matrix2cd lg = g.log();
    su2::Quat q;
    q << 0, su2::log(g)[0], su2::log(g)[1], su2::log(g)[2];
    CHECK((lg - Eigen::Matrix2cd(su2::from_quat(q))).norm() <= 1e-10);
  }
}

TEST_CASE("bch commutator expansion: eta^2 [x,y] + O(eta^3)") {
  lie::RealStructure su = lie::RealStructure::su2();
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n01(0, 1);
  std::vector<double> cs;
  for (double eta : {0.1, 0.05, 0.025}) {
    double worst = 0;
    std::mt19937_64 local(99);  // same x, y family at every eta
    for (int rep = 0; rep < 60; ++rep) {
      Eigen::Vector3d x(n01(local), n01(local), n01(local)), y(n01(local), n01(local), n01(local));
      x.normalize();
      y.normalize();
      su2::Mat2 w = su2::exp(eta * x) * su2::exp(eta * y) * su2::exp(-eta * x) * su2::exp(-eta * y);
      Eigen::Vector3d got = su2::log(w);
      Eigen::Vector3d lead = eta * eta * su.bracket(x, y);
      worst = std::max(worst, (got - lead).norm() / (eta * eta * eta));
    }
    cs.push_back(worst);
  }
  // the eta^3 coefficient is stable across scales
  double cmax = *std::max_element(cs.begin(), cs.end());
  double cmin = *std::min_element(cs.begin(), cs.end());
  CHECK(cmax / cmin < 2.0);
  CHECK(cmax < 10.0);
}

TEST_CASE("zonotope inradius") {
  std::vector<Eigen::Vector3d> cube = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  ZonotopeResult r = zonotope_inradius(cube);
  CHECK(r.inradius == doctest::Approx(1.0).epsilon(1e-6));
  std::vector<Eigen::Vector3d> degen = {{1, 0, 0}, {1, 0, 0}};
  CHECK(zonotope_inradius(degen).inradius <= 1e-9);
  // Ad-images of a fixed unit x under sampled ball elements: positive inradius
  std::mt19937_64 rng(19);
  Eigen::Vector3d x(0, 0, 1);
  for (double rho : {0.2, 0.1}) {
    std::vector<Eigen::Vector3d> vs;
    std::mt19937_64 local(7);
    for (int i = 0; i < 9; ++i) vs.push_back(su2::adjoint(su2::ball_uniform(rho, local)).transpose() * x);
    ZonotopeResult z = zonotope_inradius(vs);
    CHECK(z.inradius > 0);
    // grid-minimization oracle at a coarser depth agrees within the gap
    ZonotopeResult z3 = zonotope_inradius(vs, 3);
    CHECK(std::fabs(z.inradius - z3.inradius) <= z3.gap + 1e-9);
  }
}

TEST_CASE("bounded generation probe") {
  std::mt19937_64 rng(23);
  // h = I is degenerate
  BoundedGenerationReport degen = bounded_generation_probe(su2::Mat2::Identity(), 0.2, Eigen::Vector3d(0, 0, 1), 0.5, 1, rng);
  CHECK(degen.degenerate);
  // h = exp(0.1 i sigma_z) with a probe direction off the rotation axis
  su2::Mat2 h = su2::exp(Eigen::Vector3d(0, 0, 0.1));
  BoundedGenerationReport rep = bounded_generation_probe(h, 0.2, Eigen::Vector3d(1, 0, 0), 0.5, 25, rng);
  REQUIRE(!rep.degenerate);
  CHECK(rep.solved == rep.attempted);
  CHECK(!rep.theorem_alarm);
  // cross-module consistency: sigma0 <= zonotope inradius <= 3 sigma0
  CHECK(rep.sigma0 <= rep.zonotope_scale + 1e-9);
  CHECK(rep.zonotope_scale <= 3 * rep.sigma0 + 1e-9);
  CHECK(rep.c_prime > 0);
}

TEST_CASE("commutator surjectivity") {
  // target = I
  CommutatorSolveResult triv = commutator_surjectivity(0.1, 0.1, su2::Mat2::Identity(), 0.3);
  CHECK(triv.ok);
  // bracket-direction target
  Eigen::Vector3d dir = lie::RealStructure::su2().bracket(Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 1, 0)).normalized();
  su2::Mat2 target = su2::exp(0.005 * dir / 2.0 * 2.0);
  CommutatorSolveResult res = commutator_surjectivity(0.1, 0.1, target, 0.6);
  REQUIRE(res.ok);
  CHECK(res.residual <= 1e-9);
  CHECK(su2::dist_to_id(res.g1) <= 0.1);
  CHECK(su2::dist_to_id(res.g2) <= 0.1);
  // out-of-range target rejected
  std::mt19937_64 rej(1);
  CHECK_THROWS_AS(commutator_surjectivity(0.1, 0.1, su2::at_distance(0.05, rej), 0.3), precondition_error);
  // calibration sweep certifies c_hat >= 0.1
  std::mt19937_64 rng(29);
  double chat = calibrate_commutator_chat(0.1, 0.1, 12, rng);
  CHECK(chat >= 0.1);
}
