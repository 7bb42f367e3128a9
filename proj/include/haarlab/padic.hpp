#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "haarlab/util.hpp"

namespace haarlab::padic {

using u128 = unsigned __int128;

u128 ipow(std::uint64_t base, int e);
std::string u128_to_string(u128 v);
bool is_prime(std::uint64_t p);

// Fixed absolute precision K: elements of Z_p are represented by their
// residue in [0, p^K).  Binary operations require identical (p, K); mixing
// precisions is an error, never a coercion.
class Scalar {
 public:
  Scalar() = default;
  Scalar(std::uint64_t p, int K, u128 value);
  static Scalar from_int(std::uint64_t p, int K, long long v);

  std::uint64_t p() const { return p_; }
  int K() const { return K_; }
  u128 value() const { return v_; }
  u128 modulus() const { return pK_; }

  // max k <= K with p^k | value; returns K for value == 0 (valuation >= K).
  int valuation() const;
  bool is_zero() const { return v_ == 0; }
  bool is_unit() const { return v_ % p_ != 0; }

  Scalar operator+(const Scalar& o) const;
  Scalar operator-(const Scalar& o) const;
  Scalar operator*(const Scalar& o) const;
  Scalar operator-() const;
  bool operator==(const Scalar& o) const;

  Scalar inverse() const;  // unit required
  // exact division by p^j: valuation must be >= j; result keeps precision K
  // (the quotient is well defined mod p^{K-j}; higher digits are zero-filled
  // and must not be relied on past K-j).
  Scalar divide_by_p_power(int j) const;
  Scalar reduced(int K2) const;         // lower precision to K2 <= K
  Scalar lifted_canonical(int K2) const;  // canonical (zero-digit) lift, K2 >= K

  std::string str() const { return u128_to_string(v_); }

 private:
  void check_compat(const Scalar& o) const;
  std::uint64_t p_ = 0;
  int K_ = 0;
  u128 v_ = 0;
  u128 pK_ = 0;
};

// Square matrix over Z/p^K with shared (p, K) across entries.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::uint64_t p, int K, int n);  // zero matrix
  static Matrix identity(std::uint64_t p, int K, int n);

  std::uint64_t p() const { return p_; }
  int K() const { return K_; }
  int n() const { return n_; }
  u128 modulus() const { return pK_; }

  u128& at(int i, int j) { return a_[i * n_ + j]; }
  u128 at(int i, int j) const { return a_[i * n_ + j]; }
  Scalar entry(int i, int j) const { return Scalar(p_, K_, at(i, j)); }
  void set(int i, int j, const Scalar& s);

  Matrix operator+(const Matrix& o) const;
  Matrix operator-(const Matrix& o) const;
  Matrix operator*(const Matrix& o) const;
  Matrix scaled(const Scalar& c) const;
  bool operator==(const Matrix& o) const;

  Scalar det() const;       // n <= 3
  Matrix inverse() const;   // det must be a unit
  Matrix bracket(const Matrix& o) const { return *this * o - o * *this; }

  // min over entries of the p-adic valuation (K if zero matrix).
  int min_valuation() const;
  // valuation of (M - I); this is the congruence level of a group element.
  int level() const;
  // p-adic operator norm = max entrywise absolute value = p^{-min_valuation}.
  double norm() const;

  Matrix reduced(int K2) const;
  Matrix lifted_canonical(int K2) const;
  Matrix divide_by_p_power(int j) const;
  Matrix transpose() const;
  u128 trace() const;

  std::string key() const;  // canonical serialization, usable as hash key

 private:
  void check_compat(const Matrix& o) const;
  std::uint64_t p_ = 0;
  int K_ = 0;
  int n_ = 0;
  u128 pK_ = 0;
  std::vector<u128> a_;
};

// Group element known to satisfy M = I (mod p^level).
struct CongruenceElement {
  Matrix m;
  int level = 0;
  CongruenceElement(Matrix mat, int declared_level);
};

// Convergence threshold for exp/log: 1 for p >= 5, 2 for p in {2,3}.
int safe_level(std::uint64_t p);
// exp/log preconditions differ slightly from the finite-log safe level:
// exp needs entrywise valuation >= 1 for odd p and >= 2 for p = 2.
int exp_min_valuation(std::uint64_t p);

// Power series exp, summed exactly mod p^K (internal widening makes every
// division by t! exact; no silent precision loss).
CongruenceElement padic_exp(const Matrix& x);
// Inverse of padic_exp on its domain; |log g| = |g - I| exactly.
Matrix padic_log(const CongruenceElement& g);

// Finite logarithm  Psi_{p^l}^{p^n}(g) = (g - I)/p^l  (mod p^{n-l});
// requires l >= safe_level(p) and n in [l, 2l - safe_level(p)].
// The returned matrix lives at precision n - l.
Matrix finite_log(const CongruenceElement& g, int l, int n);

// Checks  Psi([g,g']) = [Psi(g), Psi(g')]  (mod p^{n''-l-l'}),
// n'' = min(n+l', n'+l).  Exact arithmetic; returns the comparison verdict.
bool commutator_finite_log_check(const CongruenceElement& g, int l, int n,
                                 const CongruenceElement& gp, int lp, int np);

// ---- SL_n helpers ----

// |SL_2(Z/p)| = p(p^2-1).
std::uint64_t sl2_order_mod_p(std::uint64_t p);

// All of SL_2(Z/p) as matrices at precision K (canonical lifts, det == 1
// exactly mod p^K after row rescaling).
std::vector<Matrix> enumerate_sl2_residues(std::uint64_t p, int K);

// All of SL_2(Z/p^l) represented at precision K >= l (unique canonical
// representatives; size |SL_2(Z/p)| * p^{3(l-1)}).
std::vector<Matrix> enumerate_sl2_mod_pl(std::uint64_t p, int l, int K);

// Canonical lift of an SL_2 matrix mod p^l to det == 1 mod p^K (first row
// rescaled by det^{-1}; residue mod p^l unchanged).
Matrix sl2_canonical_lift(const Matrix& residue, int K);

// Uniform element of SL_2(Z/p^K): uniform residue mod p by determinant
// rejection, canonical lift, then a uniform congruence-kernel element built
// level by level through the finite-log parametrization of G_l/G_{l+1}.
Matrix sl2_haar(std::uint64_t p, int K, std::mt19937_64& rng);

// Basis of sl_2: e, f, h with [h,e]=2e, [h,f]=-2f, [e,f]=h.
std::vector<Matrix> sl2_basis(std::uint64_t p, int K);

// Adjoint matrix of g acting on the (e,f,h) basis: columns unused; the
// returned 3x3 matrix X has rows indexed by the source basis vector, i.e.
// Ad(g) e_j = sum_s X(j,s) e_s.
Matrix sl2_adjoint(const Matrix& g);

// Smith normal form over Z/p^K for an r x c matrix given row-major.
// Returns elementary divisor valuations (ascending; K means divisor 0 mod
// p^K) and, optionally, unimodular U (r x r), V (c x c) with U*A*V = D.
struct SmithForm {
  std::vector<int> divisor_valuations;  // length min(r, c)
  int rank = 0;                         // divisors with valuation < K
  std::vector<u128> U, V;               // row-major, present if requested
  int rows = 0, cols = 0;
};
SmithForm smith_form(std::uint64_t p, int K, int rows, int cols,
                     std::vector<u128> a, bool want_transforms);

// Solve A x = b over Z/p^K via a Smith form; the particular solution with
// zero coefficients on the kernel coordinates is returned.  Divisors with
// valuation above `pivot_cap` are treated as zero (ultrametric rank
// truncation).  Fails (ok=false) if a used pivot does not divide the
// transformed right-hand side, or an unused row's residue has valuation
// below `residue_floor`.
struct SmithSolve {
  bool ok = false;
  std::vector<u128> x;
  int max_pivot_valuation = 0;
  std::string why;
};
SmithSolve smith_solve(std::uint64_t p, int K, int rows, int cols,
                       const std::vector<u128>& a, const std::vector<u128>& b,
                       int residue_floor, int pivot_cap = 1 << 20);

}  // namespace haarlab::padic
