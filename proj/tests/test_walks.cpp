#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "haarlab/su2.hpp"
#include "haarlab/walks.hpp"
#include "oracles.hpp"

using namespace haarlab;
using namespace haarlab::groups;
using namespace haarlab::walks;

namespace {

Measure pm_one(const Spec& z, int n) {
  return Measure::uniform(z, {Point::finite(1), Point::finite(n - 1)});
}

Measure elementary_walk(const Spec& s) {
  padic::Matrix A = padic::Matrix::identity(s.p, s.K, 2);
  A.at(0, 1) = 1;
  padic::Matrix B = padic::Matrix::identity(s.p, s.K, 2);
  B.at(1, 0) = 1;
  return Measure::uniform(s, {Point::padic(A), Point::padic(A.inverse()), Point::padic(B), Point::padic(B.inverse())});
}

}  // namespace

TEST_CASE("convolution basics") {
  Spec z5 = Spec::finite(finite_cyclic(5));
  Measure mu = pm_one(z5, 5);
  // delta * mu = mu
  Measure conv = convolve(Measure::dirac(z5), mu);
  REQUIRE(conv.atoms().size() == 2);
  for (const Atom& a : conv.atoms()) CHECK(a.w == doctest::Approx(0.5));
  // (uniform on +-1)^2: hand convolution gives 1/2 at 0 and 1/4 at +-2
  Measure sq = convolve(mu, mu);
  REQUIRE(sq.atoms().size() == 3);
  for (const Atom& a : sq.atoms()) {
    if (a.g.idx == 0) CHECK(a.w == doctest::Approx(0.5));
    if (a.g.idx == 2 || a.g.idx == 3) CHECK(a.w == doctest::Approx(0.25));
  }
  CHECK(mu.symmetric());
  CHECK(sq.symmetric());  // symmetric measures stay symmetric under squaring
}

TEST_CASE("convolution power with support cap accounts truncated mass") {
  std::mt19937_64 rng(3);
  Spec su = Spec::su(2);
  su2::Mat2 a = su2::ball_uniform(0.8, rng), b = su2::ball_uniform(0.8, rng);
  Measure mu = Measure::uniform(su, {Point::unitary(a), Point::unitary(a.adjoint()), Point::unitary(b),
                                     Point::unitary(b.adjoint())});
  ConvolvePower cp = convolve_power(mu, 6, 100);
  CHECK(cp.support <= 100);
  CHECK(cp.truncated_mass > 0);
  CHECK(cp.truncated_mass < 1);
  double sum = 0;
  for (const Atom& at : cp.mu.atoms()) sum += at.w;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("spectral gap: exact eigensolve") {
  // full averaging kills L^2_0
  Spec z7 = Spec::finite(finite_cyclic(7));
  std::vector<Point> all;
  for (int i = 0; i < 7; ++i) all.push_back(Point::finite(i));
  CHECK(spectral_gap_exact(Measure::uniform(z7, all)).lambda == doctest::Approx(0.0).epsilon(1e-12));
  // periodic walk on Z/4: the mod-2 character gives cos(pi) = -1
  Spec z4 = Spec::finite(finite_cyclic(4));
  CHECK(spectral_gap_exact(pm_one(z4, 4)).lambda == doctest::Approx(1.0));
  // regression baseline: elementary generators in SL_2(Z/3) (frozen from the
  // dense 24x24 eigensolve)
  SpectralReport r = spectral_gap_exact(elementary_walk(Spec::padic_sl(2, 3, 1)));
  CHECK(r.dim == 23);
  CHECK(std::fabs(r.lambda - 0.683012701892) < 1e-9);
  // non-symmetric measure rejected
  Spec z5 = Spec::finite(finite_cyclic(5));
  CHECK_THROWS_AS(spectral_gap_exact(Measure::uniform(z5, {Point::finite(1)})), precondition_error);
}

TEST_CASE("spectral gap: abelian characters") {
  Spec z5 = Spec::finite(finite_cyclic(5));
  SpectralReport r = spectral_gap_abelian(pm_one(z5, 5), cyclic_characters(5), true);
  // closed-form character sums: mu_hat(k) = cos(2 pi k/5); the max absolute
  // value is attained at k = 2 with |cos(4 pi/5)| = cos(pi/5)
  CHECK(r.lambda == doctest::Approx(std::cos(M_PI / 5)).epsilon(1e-12));
  // haar measure has gap 0
  std::vector<Point> all;
  for (int i = 0; i < 5; ++i) all.push_back(Point::finite(i));
  CHECK(spectral_gap_abelian(Measure::uniform(z5, all), cyclic_characters(5), true).lambda ==
        doctest::Approx(0.0).epsilon(1e-12));
  // point mass at 0 has no gap
  CHECK(spectral_gap_abelian(Measure::dirac(z5), cyclic_characters(5), true).lambda == doctest::Approx(1.0));
}

TEST_CASE("spectral gap invariants: exact = abelian, powers, Young") {
  std::mt19937_64 rng(5);
  for (int n : {5, 8}) {
    Spec z = Spec::finite(finite_cyclic(n));
    // random symmetric measure supported on {+-1, +-2}
    std::uniform_real_distribution<double> u(0.1, 1.0);
    double w1 = u(rng), w2 = u(rng);
    double tot = 2 * w1 + 2 * w2;
    Measure mu(z, {{Point::finite(1), w1 / tot},
                   {Point::finite(n - 1), w1 / tot},
                   {Point::finite(2), w2 / tot},
                   {Point::finite(n - 2), w2 / tot}});
    double le = spectral_gap_exact(mu).lambda;
    double la = spectral_gap_abelian(mu, cyclic_characters(n), true).lambda;
    CHECK(std::fabs(le - la) < 1e-10);
    // lambda(mu^(l)) = lambda(mu)^l
    Measure mu3 = convolve_power(mu, 3).mu;
    CHECK(std::fabs(spectral_gap_exact(mu3).lambda - std::pow(le, 3)) < 1e-8);
    // power iteration approximates the exact value from below-ish
    Enumerated en = enumerate_group(z);
    CHECK(std::fabs(spectral_gap_power(mu, en, 3000).lambda - le) < 1e-3);
    // Young: ||mu * f||_2 <= ||f||_2
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<double> f(n);
      std::normal_distribution<double> n01(0, 1);
      for (double& v : f) v = n01(rng);
      std::vector<double> g = convolve_dense(en, mu, f);
      double nf = 0, ng = 0;
      for (int i = 0; i < n; ++i) {
        nf += f[i] * f[i];
        ng += g[i] * g[i];
      }
      CHECK(ng <= nf + 1e-10);
    }
  }
}

TEST_CASE("lives_at_scale diagnostics on Z/3^5") {
  Spec z = Spec::finite(finite_cyclic_padic(3, 5));
  Enumerated en = enumerate_group(z, 300);
  const int N = 243;
  // character of level 3: gamma(x) = e(9x/243), nontrivial on the level-2
  // subgroup, so averaging over 1_{eta^{1/a}} = 9Z/243 vanishes exactly
  std::vector<std::complex<double>> f(N);
  for (int x = 0; x < N; ++x) f[x] = std::polar(1.0, 2 * M_PI * 9 * x / 243.0);
  ScaleDefects d = lives_at_scale(en, f, 1.0 / 3, 0.5);
  CHECK(d.averaging_ratio == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(d.averaging_pass);
  // constant function fails averaging maximally
  std::vector<std::complex<double>> c(N, 1.0);
  ScaleDefects dc = lives_at_scale(en, c, 1.0 / 3, 0.5);
  CHECK(dc.averaging_ratio == doctest::Approx(1.0));
  CHECK(!dc.averaging_pass);
  // character of level exactly m, eta = p^-m: both defects are exact coset
  // sums; here both smoothing radii see a subgroup where the character is
  // trivial/nontrivial so the ratios are exactly 1
  ScaleDefects dm = lives_at_scale(en, f, std::pow(3.0, -3), 0.5);
  CHECK(dm.averaging_ratio == doctest::Approx(1.0));
  CHECK(dm.invariance_ratio == doctest::Approx(1.0));
  CHECK(!dm.averaging_pass);
  CHECK(!dm.invariance_pass);
}

TEST_CASE("displacement") {
  // F = Z/2 with Omega = F and f = (1,-1)/sqrt(2): delta_F(f) = 2 >= sqrt(2/|F|)
  Spec z2 = Spec::finite(finite_cyclic(2));
  Enumerated en2 = enumerate_group(z2);
  GeneratorSet omega2 = GeneratorSet::make(z2, {Point::finite(0), Point::finite(1)});
  std::vector<std::complex<double>> f2 = {1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0)};
  DisplacementReport r2 = displacement(en2, omega2, f2);
  CHECK(r2.delta_f == doctest::Approx(2.0));
  CHECK(r2.delta_f >= std::sqrt(2.0 / 2.0));

  // f lifted from the quotient Z/6 -> Z/2 is invariant under the subgroup generators
  Spec z6 = Spec::finite(finite_cyclic(6));
  Enumerated en6 = enumerate_group(z6);
  GeneratorSet sub = GeneratorSet::make(z6, {Point::finite(2), Point::finite(4)});
  std::vector<std::complex<double>> lifted(6);
  for (int x = 0; x < 6; ++x) lifted[x] = (x % 2 == 0) ? 1.0 : -1.0;
  DisplacementReport rl = displacement(en6, sub, lifted);
  CHECK(rl.per_generator[0] == doctest::Approx(0.0));
  CHECK(rl.per_generator[1] == doctest::Approx(0.0));

  // Z/5, Omega = {+-1}, f = character k=1: delta = |e(2 pi i/5) - 1|
  Spec z5 = Spec::finite(finite_cyclic(5));
  Enumerated en5 = enumerate_group(z5);
  GeneratorSet om5 = GeneratorSet::make(z5, {Point::finite(1), Point::finite(4)});
  std::vector<std::complex<double>> ch(5);
  for (int x = 0; x < 5; ++x) ch[x] = std::polar(1.0, 2 * M_PI * x / 5.0);
  DisplacementReport r5 = displacement(en5, om5, ch);
  CHECK(r5.delta_f == doctest::Approx(std::abs(std::polar(1.0, 2 * M_PI / 5.0) - 1.0)));

  // sandwich multipliers against the exact spectral report
  Measure mu5 = pm_one(z5, 5);
  SpectralReport sr = spectral_gap_exact(mu5);
  DisplacementReport rs = displacement(en5, om5, ch, &sr);
  CHECK(rs.has_sandwich);
  CHECK(rs.c_low > 0);
  CHECK(rs.c_up > 0);

  // candidate-family minimum: on Z/n it is the character minimum, a certified
  // upper bound for delta(Omega), and stays above the finite-group lower
  // bound sqrt(2/|F|) when Omega = F
  std::mt19937_64 rng(7);
  for (int n : {6, 12, 24}) {
    Spec z = Spec::finite(finite_cyclic(n));
    Enumerated en = enumerate_group(z);
    std::vector<Point> all;
    for (int i = 0; i < n; ++i) all.push_back(Point::finite(i));
    GeneratorSet full = GeneratorSet::make(z, all);
    double dmin = displacement_candidate_min(en, full, 0, rng);
    CHECK(dmin >= std::sqrt(2.0 / n) - 1e-12);
  }
}

TEST_CASE("displacement rejects bad inputs") {
  Spec z5 = Spec::finite(finite_cyclic(5));
  Enumerated en5 = enumerate_group(z5);
  GeneratorSet om5 = GeneratorSet::make(z5, {Point::finite(1), Point::finite(4)});
  std::vector<std::complex<double>> cst(5, 2.0);
  CHECK_THROWS_AS(displacement(en5, om5, cst), precondition_error);
  std::vector<std::complex<double>> zero(5, 0.0);
  CHECK_THROWS_AS(displacement(en5, om5, zero), precondition_error);
}

TEST_CASE("schreier generators: S3 / A3 and Z/6 / 2Z/6") {
  // S3 as a finite group; A3 = even permutations (ids 0,1,2 by construction)
  Spec s3 = Spec::finite(finite_symmetric3());
  Enumerated en = enumerate_group(s3);
  std::vector<Point> all;
  for (int i = 0; i < 6; ++i) all.push_back(Point::finite(i));
  GeneratorSet omega = GeneratorSet::make(s3, all);
  auto inA3 = [](int x) { return x <= 2; };
  auto section = [](int rep) { return rep == 0 ? 0 : 3; };  // e for A3, (12) otherwise
  SchreierResult sr = schreier_generators(en, omega, inA3, section);
  CHECK(sr.n_cosets == 2);
  // Omega_H generates A3 and satisfies the word-length sandwich
  std::vector<int> sub_ids, omega_ids;
  for (const Point& g : sr.omega_H.elems) sub_ids.push_back(en.find(g));
  for (int i = 0; i < 6; ++i) omega_ids.push_back(i);
  std::vector<int> lH = word_lengths(en, sub_ids);
  std::vector<int> lG = word_lengths(en, omega_ids);
  for (int x = 0; x < 6; ++x) {
    if (!inA3(x)) continue;
    REQUIRE(lH[x] >= 0);  // generated
    CHECK(lH[x] <= lG[x]);
    CHECK(lG[x] <= 3 * lH[x]);
  }

  // Z/6 with H = {0,2,4}
  Spec z6 = Spec::finite(finite_cyclic(6));
  Enumerated en6 = enumerate_group(z6);
  std::vector<Point> gens;
  for (int i : {1, 2, 4, 5}) gens.push_back(Point::finite(i));
  GeneratorSet om6 = GeneratorSet::make(z6, gens);
  auto inH = [](int x) { return x % 2 == 0; };
  auto sec6 = [](int rep) { return rep == 0 ? 2 : 1; };
  SchreierResult sr6 = schreier_generators(en6, om6, inH, sec6);
  std::vector<int> ids6;
  for (const Point& g : sr6.omega_H.elems) ids6.push_back(en6.find(g));
  std::vector<int> lH6 = word_lengths(en6, ids6);
  std::vector<int> lG6 = word_lengths(en6, {1, 2, 4, 5});
  // independent DP oracle over the explicit Z/6 table
  std::vector<std::vector<int>> z6tab(6, std::vector<int>(6));
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) z6tab[i][j] = (i + j) % 6;
  std::vector<int> oracle = oracles::word_lengths(6, z6tab, {1, 2, 4, 5}, 0);
  for (int x = 0; x < 6; x += 2) {
    REQUIRE(lH6[x] >= 0);
    CHECK(lH6[x] <= lG6[x]);
    CHECK(lG6[x] <= 3 * lH6[x]);
    CHECK(oracle[x] == lG6[x]);
  }

  // degenerate index 1: H = G recovers normalized pair products
  auto inAll = [](int) { return true; };
  auto secAll = [](int) { return 0; };
  SchreierResult sr1 = schreier_generators(en6, GeneratorSet::make(z6, {Point::finite(0), Point::finite(1), Point::finite(5)}), inAll, secAll);
  CHECK(sr1.n_cosets == 1);
  std::vector<int> ids1;
  for (const Point& g : sr1.omega_H.elems) ids1.push_back(en6.find(g));
  std::vector<int> l1 = word_lengths(en6, ids1);
  for (int x = 0; x < 6; ++x) CHECK(l1[x] >= 0);

  // Omega missing a coset is an error
  GeneratorSet odd = GeneratorSet::make(z6, {Point::finite(1), Point::finite(5)});
  CHECK_THROWS_AS(schreier_generators(en6, odd, inH, sec6), precondition_error);
}

TEST_CASE("equidistribution at scale") {
  Spec z7 = Spec::finite(finite_cyclic(7));
  Enumerated en = enumerate_group(z7);
  Measure mu = pm_one(z7, 7);
  auto inX = [](int x) { return x == 1 || x == 3 || x == 5; };
  // ell = 0: sigma = delta_e, X = G gives both sides 0
  auto all = [](int) { return true; };
  EquidistributionReport r0 = equidistribution_check(en, mu, 0, 0.5, all);
  CHECK(r0.lhs == doctest::Approx(0.0));
  CHECK(r0.holds);
  EquidistributionReport r20 = equidistribution_check(en, mu, 20, 0.5, inX);
  CHECK(r20.holds);
  CHECK(r20.slack > 0);
  EquidistributionReport r1 = equidistribution_check(en, mu, 1, 0.5, inX);
  CHECK(r1.holds);
}
