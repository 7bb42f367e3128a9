#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "haarlab/padic.hpp"
#include "oracles.hpp"

using namespace haarlab;
using namespace haarlab::padic;

namespace {

Matrix e12(std::uint64_t p, int K, u128 c) {
  Matrix m(p, K, 2);
  m.at(0, 1) = c;
  return m;
}

Matrix random_matrix_with_valuation(std::uint64_t p, int K, int n, int v, std::mt19937_64& rng) {
  Matrix m(p, K, n);
  std::uniform_int_distribution<std::uint64_t> digit(0, p - 1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      u128 val = 0;
      for (int k = K - 1; k >= v; --k) val = val * p + digit(rng);
      m.at(i, j) = val * ipow(p, v) % m.modulus();
    }
  return m;
}

}  // namespace

TEST_CASE("valuation") {
  CHECK(Scalar(5, 10, 0).valuation() == 10);  // reported saturation at K
  CHECK(Scalar(5, 10, 25).valuation() == 2);
  CHECK(Scalar(3, 6, 54).valuation() == oracles::valuation_by_factorization(54, 3));
  CHECK(Scalar(3, 6, 54).valuation() == 3);
  CHECK(Scalar(7, 4, 1).valuation() == 0);
}

TEST_CASE("scalar arithmetic stays mod p^K and rejects mixed contexts") {
  Scalar a(5, 6, 15624), b(5, 6, 2);
  CHECK((a + b).value() == 1);  // 15625 = 5^6
  CHECK((a * a.inverse()).value() == 1);
  CHECK_THROWS_AS(a + Scalar(5, 7, 1), precondition_error);
  CHECK_THROWS_AS(a + Scalar(7, 6, 1), precondition_error);
  CHECK_THROWS_AS(Scalar(5, 6, 10).inverse(), precondition_error);
}

TEST_CASE("exact division requires sufficient valuation") {
  Scalar s(5, 8, 250);
  CHECK(s.divide_by_p_power(2).value() == 10);
  CHECK_THROWS_AS(s.divide_by_p_power(4), precondition_error);
}

TEST_CASE("padic_exp on nilpotent input terminates exactly") {
  Matrix x = e12(5, 10, 5);
  CongruenceElement g = padic_exp(x);
  Matrix expect = Matrix::identity(5, 10, 2);
  expect.at(0, 1) = 5;
  CHECK(g.m == expect);
  CHECK(padic_exp(Matrix(5, 10, 2)).m == Matrix::identity(5, 10, 2));
}

TEST_CASE("padic_exp rejects small valuation") {
  Matrix x(5, 10, 2);
  x.at(0, 1) = 1;
  CHECK_THROWS_AS(padic_exp(x), precondition_error);
  Matrix y(2, 10, 2);
  y.at(0, 1) = 2;  // valuation 1 < 2 for p = 2
  CHECK_THROWS_AS(padic_exp(y), precondition_error);
}

TEST_CASE("padic_log inverts padic_exp (round trips, norm identities)") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 40; ++rep) {
    Matrix x = random_matrix_with_valuation(7, 20, 2, 1, rng);
    CongruenceElement g = padic_exp(x);
    CHECK(padic_log(g) == x);
    CHECK(g.m.level() == x.min_valuation());  // |exp(x) - I| = |x|
  }
  for (int rep = 0; rep < 40; ++rep) {
    Matrix d = random_matrix_with_valuation(3, 18, 2, 2, rng);
    Matrix g = Matrix::identity(3, 18, 2) + d;
    CongruenceElement ge(g, 2);
    Matrix lg = padic_log(ge);
    CHECK(lg.min_valuation() == d.min_valuation());  // |log g| = |g - I|
    CHECK(padic_exp(lg).m == g);
  }
  CHECK(padic_log(CongruenceElement(Matrix::identity(5, 10, 2), 1)) == Matrix(5, 10, 2));
  Matrix g = Matrix::identity(5, 10, 2);
  g.at(0, 1) = 5;
  CHECK(padic_log(CongruenceElement(g, 1)) == e12(5, 10, 5));
}

TEST_CASE("finite_log direct formula and identity cases") {
  Matrix g = Matrix::identity(5, 12, 2);
  g.at(0, 1) = 5;
  Matrix psi = finite_log(CongruenceElement(g, 1), 1, 2);
  CHECK(psi.K() == 1);
  CHECK(psi.at(0, 1) == 1);
  CHECK(psi.at(0, 0) == 0);
  CHECK(finite_log(CongruenceElement(Matrix::identity(5, 12, 2), 2), 2, 4).min_valuation() == 2);
  CHECK_THROWS_AS(finite_log(CongruenceElement(g, 1), 1, 3), precondition_error);  // n > 2l
}

TEST_CASE("finite_log agrees with log g / p^l") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 25; ++rep) {
    Matrix x = random_matrix_with_valuation(5, 14, 2, 2, rng);
    CongruenceElement g = padic_exp(x);
    Matrix psi = finite_log(g, 2, 4);
    Matrix viaLog = padic_log(g).divide_by_p_power(2).reduced(2);
    CHECK(psi == viaLog);
  }
}

TEST_CASE("finite_log equivariance under conjugation") {
  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 20; ++rep) {
    Matrix x = random_matrix_with_valuation(5, 12, 2, 1, rng);
    CongruenceElement g = padic_exp(x);
    Matrix h = sl2_haar(5, 12, rng);
    Matrix conj = h * g.m * h.inverse();
    Matrix lhs = finite_log(CongruenceElement(conj, 1), 1, 2);
    Matrix ad = (h * finite_log(g, 1, 2).lifted_canonical(12) * h.inverse()).reduced(1);
    CHECK(lhs == ad);
  }
}

TEST_CASE("finite_log is a bijection G_1/G_2 -> sl_2(Z/p), exhaustively") {
  for (std::uint64_t p : {5ull, 7ull}) {
    std::set<std::string> images;
    std::uint64_t count = 0;
    for (std::uint64_t a = 0; a < p; ++a)
      for (std::uint64_t b = 0; b < p; ++b)
        for (std::uint64_t c = 0; c < p; ++c) {
          // A = [[a, b], [c, -a]] traceless; g = I + pA in SL_2(Z/p^2)
          Matrix g = Matrix::identity(p, 2, 2);
          g.at(0, 0) = (g.at(0, 0) + p * a) % g.modulus();
          g.at(0, 1) = p * b;
          g.at(1, 0) = p * c;
          g.at(1, 1) = (g.at(1, 1) + g.modulus() - p * a % g.modulus()) % g.modulus();
          Matrix psi = finite_log(CongruenceElement(g, 1), 1, 2);
          CHECK(psi.trace() % p == 0);  // lands in sl_2
          images.insert(psi.key());
          ++count;
        }
    CHECK(count == p * p * p);
    CHECK(images.size() == count);  // injective onto a set of the same size
  }
}

TEST_CASE("commutator finite log identity") {
  std::mt19937_64 rng(17);
  CHECK(commutator_finite_log_check(CongruenceElement(Matrix::identity(5, 12, 2), 2), 2, 3,
                                    CongruenceElement(Matrix::identity(5, 12, 2), 2), 2, 3));
  int trues = 0;
  for (int rep = 0; rep < 100; ++rep) {
    Matrix x = random_matrix_with_valuation(5, 12, 2, 2, rng);
    Matrix y = random_matrix_with_valuation(5, 12, 2, 2, rng);
    CongruenceElement g = padic_exp(x), gp = padic_exp(y);
    trues += commutator_finite_log_check(g, 2, 3, gp, 2, 3) ? 1 : 0;
  }
  CHECK(trues == 100);
}

TEST_CASE("commutator identity comparison is not vacuous (corrupted bracket differs)") {
  std::mt19937_64 rng(19);
  int differing = 0;
  for (int rep = 0; rep < 20; ++rep) {
    Matrix x = random_matrix_with_valuation(5, 12, 2, 2, rng);
    Matrix y = random_matrix_with_valuation(5, 12, 2, 2, rng);
    CongruenceElement g = padic_exp(x), gp = padic_exp(y);
    Matrix comm = g.m * gp.m * g.m.inverse() * gp.m.inverse();
    Matrix lhs = (comm - Matrix::identity(5, 12, 2)).divide_by_p_power(4).reduced(1);
    Matrix corrupt = lhs;
    corrupt.at(0, 1) = (corrupt.at(0, 1) + 1) % corrupt.modulus();
    if (!(lhs == corrupt)) ++differing;
  }
  CHECK(differing == 20);
}

TEST_CASE("sl2 enumeration and haar sampling") {
  auto r5 = enumerate_sl2_residues(5, 8);
  CHECK(r5.size() == sl2_order_mod_p(5));
  for (const auto& m : r5) CHECK(m.det().value() == 1);

  auto g9 = enumerate_sl2_mod_pl(3, 2, 6);
  CHECK(g9.size() == sl2_order_mod_p(3) * 27);
  std::set<std::string> keys;
  for (const auto& m : g9) {
    CHECK(m.det().value() == 1);
    keys.insert(m.reduced(2).key());
  }
  CHECK(keys.size() == g9.size());

  std::mt19937_64 rng(23);
  for (int i = 0; i < 50; ++i) {
    Matrix g = sl2_haar(5, 10, rng);
    CHECK(g.det().value() == 1);
  }
}

TEST_CASE("adjoint matrices compose contravariantly in row convention") {
  std::mt19937_64 rng(29);
  Matrix g1 = sl2_haar(5, 10, rng), g2 = sl2_haar(5, 10, rng);
  CHECK(sl2_adjoint(g1 * g2) == sl2_adjoint(g2) * sl2_adjoint(g1));
  CHECK(sl2_adjoint(Matrix::identity(5, 10, 2)) == Matrix::identity(5, 10, 3));
  CHECK(sl2_adjoint(g1).det().is_unit());
}

TEST_CASE("smith form valuations") {
  // identity
  auto sf = smith_form(5, 8, 2, 2, {1, 0, 0, 1}, false);
  CHECK(sf.divisor_valuations == std::vector<int>{0, 0});
  // diag(p, 1) -> valuations {0, 1}
  auto sf2 = smith_form(5, 8, 2, 2, {5, 0, 0, 1}, false);
  CHECK(sf2.divisor_valuations == std::vector<int>{0, 1});
  // p * identity
  auto sf3 = smith_form(5, 8, 2, 2, {5, 0, 0, 5}, false);
  CHECK(sf3.divisor_valuations == std::vector<int>{1, 1});
  // rank-deficient
  auto sf4 = smith_form(5, 8, 2, 2, {1, 1, 1, 1}, false);
  CHECK(sf4.rank == 1);
}

TEST_CASE("smith form recovers planted divisors after unimodular mixing") {
  std::mt19937_64 rng(31);
  const std::uint64_t p = 5;
  const int K = 10;
  const u128 pK = ipow(p, K);
  for (int rep = 0; rep < 30; ++rep) {
    std::vector<int> planted = {0, int(rng() % 3), int(rng() % 3) + 1};
    std::sort(planted.begin(), planted.end());
    std::vector<u128> A(9, 0);
    for (int i = 0; i < 3; ++i) A[size_t(i) * 3 + i] = ipow(p, planted[i]);
    // random elementary row/col operations keep divisors
    for (int t = 0; t < 12; ++t) {
      int i = int(rng() % 3), j = int(rng() % 3);
      if (i == j) continue;
      u128 c = rng() % 23;
      if (t % 2 == 0)
        for (int k = 0; k < 3; ++k) A[size_t(i) * 3 + k] = (A[size_t(i) * 3 + k] + c * A[size_t(j) * 3 + k]) % pK;
      else
        for (int k = 0; k < 3; ++k) A[size_t(k) * 3 + i] = (A[size_t(k) * 3 + i] + c * A[size_t(k) * 3 + j]) % pK;
    }
    auto sf = smith_form(p, K, 3, 3, A, true);
    CHECK(sf.divisor_valuations == planted);
    // U A V = D check
    std::vector<u128> UA(9, 0), UAV(9, 0);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        u128 s = 0;
        for (int k = 0; k < 3; ++k) s = (s + sf.U[size_t(i) * 3 + k] * A[size_t(k) * 3 + j]) % pK;
        UA[size_t(i) * 3 + j] = s;
      }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        u128 s = 0;
        for (int k = 0; k < 3; ++k) s = (s + UA[size_t(i) * 3 + k] * sf.V[size_t(k) * 3 + j]) % pK;
        UAV[size_t(i) * 3 + j] = s;
      }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        if (i == j)
          CHECK(UAV[size_t(i) * 3 + j] == ipow(p, planted[i]));
        else
          CHECK(UAV[size_t(i) * 3 + j] == 0);
      }
  }
}

TEST_CASE("smith solve") {
  std::mt19937_64 rng(37);
  const std::uint64_t p = 5;
  const int K = 10;
  const u128 pK = ipow(p, K);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<u128> A(9);
    for (auto& v : A) v = rng() % std::uint64_t(1e9);
    std::vector<u128> x0(3), b(3, 0);
    for (auto& v : x0) v = rng() % 1000;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) b[i] = (b[i] + A[size_t(i) * 3 + j] * x0[j]) % pK;
    auto sol = smith_solve(p, K, 3, 3, A, b, K);
    REQUIRE(sol.ok);
    for (int i = 0; i < 3; ++i) {
      u128 s = 0;
      for (int j = 0; j < 3; ++j) s = (s + A[size_t(i) * 3 + j] * sol.x[j]) % pK;
      CHECK(s == b[i]);
    }
  }
}
