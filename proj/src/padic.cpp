#include "haarlab/padic.hpp"

#include <algorithm>
#include <array>

namespace haarlab::padic {

namespace {

constexpr u128 kModulusCap = u128(1) << 120;

// a*b mod m for a, b < m < 2^120; fast path while m fits 64 bits.
inline u128 mulmod(u128 a, u128 b, u128 m) {
  if (m <= u128(~std::uint64_t(0))) return a % m * (b % m) % m;
  a %= m;
  b %= m;
  u128 r = 0;
  while (b) {
    if (b & 1) {
      r += a;
      if (r >= m) r -= m;
    }
    a += a;
    if (a >= m) a -= m;
    b >>= 1;
  }
  return r;
}

}  // namespace

u128 ipow(std::uint64_t base, int e) {
  u128 r = 1;
  for (int i = 0; i < e; ++i) {
    require(r < kModulusCap / base, "padic: p^K exceeds the 120-bit modulus cap");
    r *= base;
  }
  return r;
}

std::string u128_to_string(u128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) {
    s.push_back(char('0' + int(v % 10)));
    v /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

bool is_prime(std::uint64_t p) {
  if (p < 2) return false;
  for (std::uint64_t d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

// ---------------- Scalar ----------------

Scalar::Scalar(std::uint64_t p, int K, u128 value) : p_(p), K_(K) {
  require(is_prime(p), "padic: p must be prime");
  require(K >= 1 && K <= 120, "padic: K out of range");
  pK_ = ipow(p, K);
  v_ = value % pK_;
}

Scalar Scalar::from_int(std::uint64_t p, int K, long long v) {
  u128 pK = ipow(p, K);
  u128 u = v >= 0 ? u128(v) % pK : (pK - (u128(-(v + 1)) + 1) % pK) % pK;
  return Scalar(p, K, u);
}

void Scalar::check_compat(const Scalar& o) const {
  require(p_ == o.p_ && K_ == o.K_, "padic: mixed (p, K) contexts");
}

int Scalar::valuation() const {
  if (v_ == 0) return K_;
  int k = 0;
  u128 v = v_;
  while (v % p_ == 0) {
    v /= p_;
    ++k;
  }
  return k;
}

Scalar Scalar::operator+(const Scalar& o) const {
  check_compat(o);
  return Scalar(p_, K_, (v_ + o.v_) % pK_);
}
Scalar Scalar::operator-(const Scalar& o) const {
  check_compat(o);
  return Scalar(p_, K_, (v_ + pK_ - o.v_) % pK_);
}
Scalar Scalar::operator*(const Scalar& o) const {
  check_compat(o);
  return Scalar(p_, K_, mulmod(v_, o.v_, pK_));
}
Scalar Scalar::operator-() const { return Scalar(p_, K_, (pK_ - v_) % pK_); }
bool Scalar::operator==(const Scalar& o) const {
  return p_ == o.p_ && K_ == o.K_ && v_ == o.v_;
}

Scalar Scalar::inverse() const {
  require(is_unit(), "padic: inverse of a non-unit");
  // invert mod p, then Hensel-double digits
  std::uint64_t a0 = std::uint64_t(v_ % p_);
  std::uint64_t inv = 1;
  {  // Fermat via fast pow mod p
    std::uint64_t b = a0 % p_, e = p_ - 2, r = 1;
    while (e) {
      if (e & 1) r = (u128(r) * b) % p_;
      b = std::uint64_t((u128(b) * b) % p_);
      e >>= 1;
    }
    inv = r;
  }
  u128 x = inv;
  u128 mod = p_;
  while (mod < pK_) {
    mod = mod * mod;
    if (mod > pK_) mod = pK_;
    // x <- x(2 - a x) mod `mod`
    u128 ax = mulmod(v_, x, mod);
    u128 t = (2 % mod + mod - ax) % mod;
    x = mulmod(x, t, mod);
  }
  return Scalar(p_, K_, x % pK_);
}

Scalar Scalar::divide_by_p_power(int j) const {
  require(j >= 0 && j <= K_, "padic: divide_by_p_power exponent out of range");
  require(valuation() >= j, "padic: exact division by p^j requires valuation >= j");
  return Scalar(p_, K_, v_ / ipow(p_, j));
}

Scalar Scalar::reduced(int K2) const {
  require(K2 >= 1 && K2 <= K_, "padic: reduced() needs K2 <= K");
  return Scalar(p_, K2, v_ % ipow(p_, K2));
}

Scalar Scalar::lifted_canonical(int K2) const {
  require(K2 >= K_, "padic: lifted_canonical needs K2 >= K");
  return Scalar(p_, K2, v_);
}

// ---------------- Matrix ----------------

Matrix::Matrix(std::uint64_t p, int K, int n) : p_(p), K_(K), n_(n) {
  require(is_prime(p), "padic: p must be prime");
  require(K >= 1 && K <= 120, "padic: K out of range");
  require(n >= 1 && n <= 16, "padic: matrix dimension out of range");
  pK_ = ipow(p, K);
  a_.assign(size_t(n) * n, 0);
}

Matrix Matrix::identity(std::uint64_t p, int K, int n) {
  Matrix m(p, K, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

void Matrix::check_compat(const Matrix& o) const {
  require(p_ == o.p_ && K_ == o.K_ && n_ == o.n_, "padic: mixed matrix contexts");
}

void Matrix::set(int i, int j, const Scalar& s) {
  require(s.p() == p_ && s.K() == K_, "padic: mixed (p, K) contexts");
  at(i, j) = s.value();
}

Matrix Matrix::operator+(const Matrix& o) const {
  check_compat(o);
  Matrix r(p_, K_, n_);
  for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = (a_[i] + o.a_[i]) % pK_;
  return r;
}
Matrix Matrix::operator-(const Matrix& o) const {
  check_compat(o);
  Matrix r(p_, K_, n_);
  for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = (a_[i] + pK_ - o.a_[i]) % pK_;
  return r;
}
Matrix Matrix::operator*(const Matrix& o) const {
  check_compat(o);
  Matrix r(p_, K_, n_);
  for (int i = 0; i < n_; ++i)
    for (int k = 0; k < n_; ++k) {
      u128 v = at(i, k);
      if (v == 0) continue;
      for (int j = 0; j < n_; ++j)
        r.at(i, j) = (r.at(i, j) + mulmod(v, o.at(k, j), pK_)) % pK_;
    }
  return r;
}
Matrix Matrix::scaled(const Scalar& c) const {
  require(c.p() == p_ && c.K() == K_, "padic: mixed (p, K) contexts");
  Matrix r(p_, K_, n_);
  for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = mulmod(a_[i], c.value(), pK_);
  return r;
}
bool Matrix::operator==(const Matrix& o) const {
  return p_ == o.p_ && K_ == o.K_ && n_ == o.n_ && a_ == o.a_;
}

Scalar Matrix::det() const {
  require(n_ <= 3, "padic: det implemented for n <= 3");
  u128 d = 0;
  if (n_ == 1)
    d = at(0, 0);
  else if (n_ == 2)
    d = (mulmod(at(0, 0), at(1, 1), pK_) + pK_ - mulmod(at(0, 1), at(1, 0), pK_)) % pK_;
  else {
    auto m = [&](int i, int j) { return at(i, j); };
    u128 pos = mulmod(mulmod(m(0, 0), m(1, 1), pK_), m(2, 2), pK_);
    pos = (pos + mulmod(mulmod(m(0, 1), m(1, 2), pK_), m(2, 0), pK_)) % pK_;
    pos = (pos + mulmod(mulmod(m(0, 2), m(1, 0), pK_), m(2, 1), pK_)) % pK_;
    u128 neg = mulmod(mulmod(m(0, 2), m(1, 1), pK_), m(2, 0), pK_);
    neg = (neg + mulmod(mulmod(m(0, 0), m(1, 2), pK_), m(2, 1), pK_)) % pK_;
    neg = (neg + mulmod(mulmod(m(0, 1), m(1, 0), pK_), m(2, 2), pK_)) % pK_;
    d = (pos + pK_ - neg) % pK_;
  }
  return Scalar(p_, K_, d);
}

Matrix Matrix::inverse() const {
  Scalar d = det();
  require(d.is_unit(), "padic: inverse needs unit determinant");
  Scalar di = d.inverse();
  Matrix r(p_, K_, n_);
  if (n_ == 1) {
    r.at(0, 0) = di.value();
  } else if (n_ == 2) {
    r.at(0, 0) = mulmod(at(1, 1), di.value(), pK_);
    r.at(1, 1) = mulmod(at(0, 0), di.value(), pK_);
    r.at(0, 1) = mulmod((pK_ - at(0, 1)) % pK_, di.value(), pK_);
    r.at(1, 0) = mulmod((pK_ - at(1, 0)) % pK_, di.value(), pK_);
  } else {
    // adjugate for n = 3
    auto m = [&](int i, int j) { return at(i, j); };
    auto cof = [&](int i, int j) -> u128 {
      int r0 = (i + 1) % 3, r1 = (i + 2) % 3, c0 = (j + 1) % 3, c1 = (j + 2) % 3;
      u128 v = (mulmod(m(r0, c0), m(r1, c1), pK_) + pK_ - mulmod(m(r0, c1), m(r1, c0), pK_)) % pK_;
      return v;
    };
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r.at(j, i) = mulmod(cof(i, j), di.value(), pK_);
  }
  return r;
}

int Matrix::min_valuation() const {
  int best = K_;
  for (u128 v : a_) {
    if (v == 0) continue;
    int k = 0;
    u128 w = v;
    while (w % p_ == 0) {
      w /= p_;
      ++k;
    }
    best = std::min(best, k);
    if (best == 0) return 0;
  }
  return best;
}

int Matrix::level() const { return (*this - identity(p_, K_, n_)).min_valuation(); }

double Matrix::norm() const {
  int v = min_valuation();
  double r = 1.0;
  for (int i = 0; i < v; ++i) r /= double(p_);
  return v >= K_ ? 0.0 : r;
}

Matrix Matrix::reduced(int K2) const {
  require(K2 >= 1 && K2 <= K_, "padic: reduced() needs K2 <= K");
  Matrix r(p_, K2, n_);
  for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] % r.pK_;
  return r;
}

Matrix Matrix::lifted_canonical(int K2) const {
  require(K2 >= K_, "padic: lifted_canonical needs K2 >= K");
  Matrix r(p_, K2, n_);
  r.a_ = a_;
  return r;
}

Matrix Matrix::divide_by_p_power(int j) const {
  require(min_valuation() >= j, "padic: exact matrix division by p^j requires valuation >= j");
  Matrix r(p_, K_, n_);
  u128 pj = ipow(p_, j);
  for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] / pj;
  return r;
}

Matrix Matrix::transpose() const {
  Matrix r(p_, K_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) r.at(j, i) = at(i, j);
  return r;
}

u128 Matrix::trace() const {
  u128 t = 0;
  for (int i = 0; i < n_; ++i) t = (t + at(i, i)) % pK_;
  return t;
}

std::string Matrix::key() const {
  std::string s = std::to_string(p_) + ":" + std::to_string(K_) + ":";
  for (u128 v : a_) {
    s += u128_to_string(v);
    s.push_back(',');
  }
  return s;
}

CongruenceElement::CongruenceElement(Matrix mat, int declared_level) : m(std::move(mat)), level(declared_level) {
  require(declared_level >= 1, "congruence element: level must be >= 1");
  require(m.level() >= declared_level, "congruence element: matrix !== I mod p^level");
}

int safe_level(std::uint64_t p) { return p >= 5 ? 1 : 2; }
int exp_min_valuation(std::uint64_t p) { return p == 2 ? 2 : 1; }

namespace {

int val_factorial(std::uint64_t p, long t) {
  // Legendre
  int v = 0;
  long q = t;
  while (q > 0) {
    q /= long(p);
    v += int(q);
  }
  return v;
}

int val_int(std::uint64_t p, long t) {
  int v = 0;
  while (t % long(p) == 0) {
    t /= long(p);
    ++v;
  }
  return v;
}

}  // namespace

CongruenceElement padic_exp(const Matrix& x) {
  const std::uint64_t p = x.p();
  const int K = x.K();
  const int vmin = x.min_valuation();
  require(vmin >= exp_min_valuation(p),
          "padic_exp: entrywise valuation must be >= 1 (>= 2 for p = 2)");

  // term t contributes only while t*vmin - v_p(t!) < K
  long T = 1;
  while (long(T + 1) * vmin - val_factorial(p, T + 1) < K) ++T;
  int slack = 0;
  for (long t = 1; t <= T; ++t) slack = std::max(slack, val_factorial(p, t));
  const int Kw = K + slack;
  require(Kw <= 120, "padic_exp: internal precision overflow");

  Matrix xw = x.lifted_canonical(Kw);
  Matrix acc = Matrix::identity(p, Kw, x.n());  // accumulated sum
  Matrix pw = Matrix::identity(p, Kw, x.n());   // x^t
  for (long t = 1; t <= T; ++t) {
    pw = pw * xw;
    int vf = val_factorial(p, t);
    // t! = p^vf * u ; divide the power exactly, multiply by u^{-1}
    Matrix term = pw.divide_by_p_power(vf);
    u128 fact_unit = 1;
    u128 mod = ipow(p, Kw);
    for (long s = 2; s <= t; ++s) {
      long w = s;
      while (w % long(p) == 0) w /= long(p);
      fact_unit = mulmod(fact_unit, u128(w), mod);
    }
    Scalar u_inv = Scalar(p, Kw, fact_unit).inverse();
    acc = acc + term.scaled(u_inv);
  }
  Matrix out = acc.reduced(K);
  return CongruenceElement(out, std::min(vmin, K));
}

Matrix padic_log(const CongruenceElement& g) {
  const std::uint64_t p = g.m.p();
  const int K = g.m.K();
  const int l = g.level;
  require(l >= exp_min_valuation(p), "padic_log: level must be >= 1 (>= 2 for p = 2)");

  long T = 1;
  while (long(T + 1) * l - val_int(p, T + 1) < K) ++T;
  int slack = 0;
  for (long t = 1; t <= T; ++t) slack = std::max(slack, val_int(p, t));
  const int Kw = K + slack;
  require(Kw <= 120, "padic_log: internal precision overflow");

  Matrix d = (g.m - Matrix::identity(p, K, g.m.n())).lifted_canonical(Kw);
  Matrix acc(p, Kw, g.m.n());
  Matrix pw = Matrix::identity(p, Kw, g.m.n());
  for (long t = 1; t <= T; ++t) {
    pw = pw * d;
    int vt = val_int(p, t);
    Matrix term = pw.divide_by_p_power(vt);
    long unit = t;
    while (unit % long(p) == 0) unit /= long(p);
    Scalar c = Scalar(p, Kw, u128(unit)).inverse();
    if (t % 2 == 0) c = -c;
    acc = acc + term.scaled(c);
  }
  return acc.reduced(K);
}

Matrix finite_log(const CongruenceElement& g, int l, int n) {
  const std::uint64_t p = g.m.p();
  const int k0 = safe_level(p);
  require(l >= k0, "finite_log: level l must be >= safe level k0");
  // The quotient map is well defined and bijective exactly for n <= 2l;
  // [l, 2l - k0] is a strict sub-range of this.
  require(n >= l && n <= 2 * l, "finite_log: n must lie in [l, 2l]");
  require(g.level >= l, "finite_log: element not at declared level");
  require(n - l >= 1, "finite_log: target quotient p^{n-l} must be nontrivial");
  require(g.m.K() >= n, "finite_log: working precision below n");
  Matrix diff = g.m - Matrix::identity(p, g.m.K(), g.m.n());
  return diff.divide_by_p_power(l).reduced(n - l);
}

bool commutator_finite_log_check(const CongruenceElement& g, int l, int n,
                                 const CongruenceElement& gp, int lp, int np) {
  const std::uint64_t p = g.m.p();
  const int k0 = safe_level(p);
  require(l >= k0 && n >= l && n <= 2 * l, "commutator_finite_log_check: (l, n) out of range");
  require(lp >= k0 && np >= lp && np <= 2 * lp, "commutator_finite_log_check: (l', n') out of range");
  const int npp = std::min(n + lp, np + l);
  require(g.m.K() >= npp, "commutator_finite_log_check: working precision below n''");

  Matrix comm = g.m * gp.m * g.m.inverse() * gp.m.inverse();
  CongruenceElement ce(comm, l + lp);  // validates [g,g'] = I (mod p^{l+l'})
  (void)ce;
  const int prec = npp - l - lp;
  Matrix lhs = (comm - Matrix::identity(p, g.m.K(), g.m.n())).divide_by_p_power(l + lp).reduced(prec);

  Matrix a = finite_log(g, l, n);
  Matrix b = finite_log(gp, lp, np);
  // bracket is well defined mod p^{min(n-l, n'-l')} = p^{n''-l-l'}
  Matrix rhs = (a.lifted_canonical(g.m.K()).bracket(b.lifted_canonical(g.m.K()))).reduced(prec);
  return lhs == rhs;
}

// ---------------- SL_2 helpers ----------------

std::uint64_t sl2_order_mod_p(std::uint64_t p) { return p * (p * p - 1); }

Matrix sl2_canonical_lift(const Matrix& residue, int K) {
  Matrix m = residue.lifted_canonical(K);
  Scalar d = m.det();
  require(d.is_unit(), "sl2_canonical_lift: determinant not a unit");
  Scalar di = d.inverse();
  // rescale first row; residue mod p^{original K} is unchanged because
  // det == 1 at that precision
  for (int j = 0; j < m.n(); ++j) m.at(0, j) = mulmod(m.at(0, j), di.value(), m.modulus());
  return m;
}

std::vector<Matrix> enumerate_sl2_residues(std::uint64_t p, int K) {
  std::vector<Matrix> out;
  out.reserve(sl2_order_mod_p(p));
  for (std::uint64_t a = 0; a < p; ++a)
    for (std::uint64_t b = 0; b < p; ++b)
      for (std::uint64_t c = 0; c < p; ++c)
        for (std::uint64_t d = 0; d < p; ++d) {
          if ((a * d + p * p - b * c % (p * p)) % p != 1 % p) continue;
          Matrix m(p, 1, 2);
          m.at(0, 0) = a;
          m.at(0, 1) = b;
          m.at(1, 0) = c;
          m.at(1, 1) = d;
          out.push_back(K == 1 ? m : sl2_canonical_lift(m, K));
        }
  return out;
}

std::vector<Matrix> sl2_basis(std::uint64_t p, int K) {
  Matrix e(p, K, 2), f(p, K, 2), h(p, K, 2);
  e.at(0, 1) = 1;
  f.at(1, 0) = 1;
  h.at(0, 0) = 1;
  h.at(1, 1) = ipow(p, K) - 1;
  return {e, f, h};
}

std::vector<Matrix> enumerate_sl2_mod_pl(std::uint64_t p, int l, int K) {
  require(K >= l, "enumerate_sl2_mod_pl: need K >= l");
  std::vector<Matrix> reps = enumerate_sl2_residues(p, K);
  std::vector<Matrix> basis = sl2_basis(p, K);
  for (int lev = 1; lev < l; ++lev) {
    std::vector<Matrix> next;
    next.reserve(reps.size() * p * p * p);
    u128 plev = ipow(p, lev);
    for (const Matrix& r : reps)
      for (std::uint64_t ce = 0; ce < p; ++ce)
        for (std::uint64_t cf = 0; cf < p; ++cf)
          for (std::uint64_t ch = 0; ch < p; ++ch) {
            // I + p^lev (ce*e + cf*f + ch*h) is in SL_2 mod p^{lev+1}
            Matrix k = Matrix::identity(p, K, 2);
            k.at(0, 1) = (k.at(0, 1) + plev * ce) % k.modulus();
            k.at(1, 0) = (k.at(1, 0) + plev * cf) % k.modulus();
            k.at(0, 0) = (k.at(0, 0) + plev * ch) % k.modulus();
            k.at(1, 1) = (k.at(1, 1) + k.modulus() - plev * ch % k.modulus()) % k.modulus();
            Matrix prod = r * k;
            // repair det to 1 mod p^K; residue mod p^{lev+1} is unchanged
            next.push_back(sl2_canonical_lift(prod.reduced(K), K));
          }
    reps = std::move(next);
  }
  return reps;
}

Matrix sl2_haar(std::uint64_t p, int K, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::uint64_t> digit(0, p - 1);
  // residue by determinant rejection
  Matrix res(p, K, 2);
  for (;;) {
    std::uint64_t a = digit(rng), b = digit(rng), c = digit(rng), d = digit(rng);
    if ((a * d % p + p - b * c % p) % p != 1 % p) continue;
    res.at(0, 0) = a;
    res.at(0, 1) = b;
    res.at(1, 0) = c;
    res.at(1, 1) = d;
    break;
  }
  Matrix g = sl2_canonical_lift(res, K);
  // uniform kernel element, one sl_2(Z/p) digit per level
  std::vector<Matrix> basis = sl2_basis(p, K);
  for (int lev = 1; lev < K; ++lev) {
    u128 plev = ipow(p, lev);
    Matrix k = Matrix::identity(p, K, 2);
    std::uint64_t ce = digit(rng), cf = digit(rng), ch = digit(rng);
    k.at(0, 1) = (k.at(0, 1) + plev * ce) % k.modulus();
    k.at(1, 0) = (k.at(1, 0) + plev * cf) % k.modulus();
    k.at(0, 0) = (k.at(0, 0) + plev * ch) % k.modulus();
    k.at(1, 1) = (k.at(1, 1) + k.modulus() - plev * ch % k.modulus()) % k.modulus();
    g = sl2_canonical_lift((g * k).reduced(K), K);
  }
  return g;
}

Matrix sl2_adjoint(const Matrix& g) {
  require(g.n() == 2, "sl2_adjoint: need a 2x2 matrix");
  std::vector<Matrix> basis = sl2_basis(g.p(), g.K());
  Matrix gi = g.inverse();
  Matrix ad(g.p(), g.K(), 3);
  for (int j = 0; j < 3; ++j) {
    Matrix img = g * basis[j] * gi;
    // decompose img = x*e + y*f + z*h : x = img(0,1), y = img(1,0), z = img(0,0)
    ad.at(j, 0) = img.at(0, 1);
    ad.at(j, 1) = img.at(1, 0);
    ad.at(j, 2) = img.at(0, 0);
  }
  return ad;
}

// ---------------- Smith normal form ----------------

SmithForm smith_form(std::uint64_t p, int K, int rows, int cols, std::vector<u128> a,
                     bool want_transforms) {
  const u128 pK = ipow(p, K);
  SmithForm sf;
  sf.rows = rows;
  sf.cols = cols;
  std::vector<u128> U, V;
  if (want_transforms) {
    U.assign(size_t(rows) * rows, 0);
    V.assign(size_t(cols) * cols, 0);
    for (int i = 0; i < rows; ++i) U[size_t(i) * rows + i] = 1;
    for (int i = 0; i < cols; ++i) V[size_t(i) * cols + i] = 1;
  }
  auto A = [&](int i, int j) -> u128& { return a[size_t(i) * cols + j]; };
  auto val = [&](u128 v) {
    if (v == 0) return K;
    int k = 0;
    while (v % p == 0) {
      v /= p;
      ++k;
    }
    return k;
  };
  auto inv_unit = [&](u128 u) { return Scalar(p, K, u).inverse().value(); };

  int t = 0;
  const int mv = std::min(rows, cols);
  for (; t < mv; ++t) {
    // locate global min-valuation pivot in the trailing block
    int bi = -1, bj = -1, bv = K;
    for (int i = t; i < rows; ++i)
      for (int j = t; j < cols; ++j) {
        int v = val(A(i, j));
        if (v < bv) {
          bv = v;
          bi = i;
          bj = j;
        }
      }
    if (bi < 0) break;  // all zero mod p^K
    // swap into place
    if (bi != t) {
      for (int j = 0; j < cols; ++j) std::swap(A(t, j), A(bi, j));
      if (want_transforms)
        for (int j = 0; j < rows; ++j) std::swap(U[size_t(t) * rows + j], U[size_t(bi) * rows + j]);
    }
    if (bj != t) {
      for (int i = 0; i < rows; ++i) std::swap(A(i, t), A(i, bj));
      if (want_transforms)
        for (int i = 0; i < cols; ++i) std::swap(V[size_t(i) * cols + t], V[size_t(i) * cols + bj]);
    }
    // normalize pivot to p^bv
    u128 unit = A(t, t) / ipow(p, bv);
    u128 ui = inv_unit(unit % pK);
    for (int j = 0; j < cols; ++j) A(t, j) = mulmod(A(t, j), ui, pK);
    if (want_transforms)
      for (int j = 0; j < rows; ++j) U[size_t(t) * rows + j] = mulmod(U[size_t(t) * rows + j], ui, pK);
    // eliminate column and row
    for (int i = t + 1; i < rows; ++i) {
      if (A(i, t) == 0) continue;
      u128 f = A(i, t) / ipow(p, bv);  // valuation >= bv by pivot choice
      for (int j = 0; j < cols; ++j) A(i, j) = (A(i, j) + pK - mulmod(f, A(t, j), pK)) % pK;
      if (want_transforms)
        for (int j = 0; j < rows; ++j)
          U[size_t(i) * rows + j] = (U[size_t(i) * rows + j] + pK - mulmod(f, U[size_t(t) * rows + j], pK)) % pK;
    }
    for (int j = t + 1; j < cols; ++j) {
      if (A(t, j) == 0) continue;
      u128 f = A(t, j) / ipow(p, bv);
      for (int i = 0; i < rows; ++i) A(i, j) = (A(i, j) + pK - mulmod(A(i, t), f, pK)) % pK;
      if (want_transforms)
        for (int i = 0; i < cols; ++i)
          V[size_t(i) * cols + j] = (V[size_t(i) * cols + j] + pK - mulmod(V[size_t(i) * cols + t], f, pK)) % pK;
    }
    sf.divisor_valuations.push_back(bv);
  }
  while (int(sf.divisor_valuations.size()) < mv) sf.divisor_valuations.push_back(K);
  sf.rank = 0;
  for (int v : sf.divisor_valuations)
    if (v < K) ++sf.rank;
  if (want_transforms) {
    sf.U = std::move(U);
    sf.V = std::move(V);
  }
  return sf;
}

SmithSolve smith_solve(std::uint64_t p, int K, int rows, int cols, const std::vector<u128>& a,
                       const std::vector<u128>& b, int residue_floor, int pivot_cap) {
  const u128 pK = ipow(p, K);
  SmithForm sf = smith_form(p, K, rows, cols, a, true);
  SmithSolve out;
  // c = U b
  std::vector<u128> c(rows, 0);
  for (int i = 0; i < rows; ++i) {
    u128 s = 0;
    for (int j = 0; j < rows; ++j) s = (s + mulmod(sf.U[size_t(i) * rows + j], b[j], pK)) % pK;
    c[i] = s;
  }
  auto val = [&](u128 v) {
    if (v == 0) return K;
    int k = 0;
    while (v % p == 0) {
      v /= p;
      ++k;
    }
    return k;
  };
  std::vector<u128> y(cols, 0);
  int maxpiv = 0;
  for (int i = 0; i < std::min(rows, cols); ++i) {
    int dv = sf.divisor_valuations[i];
    if (dv >= K || dv > pivot_cap) {
      if (val(c[i]) < residue_floor) {
        out.why = "rank-deficient row residue above floor";
        return out;
      }
      continue;
    }
    if (val(c[i]) < dv) {
      out.why = "pivot does not divide rhs";
      return out;
    }
    y[i] = c[i] / ipow(p, dv);
    maxpiv = std::max(maxpiv, dv);
  }
  for (int i = std::min(rows, cols); i < rows; ++i) {
    if (val(c[i]) < residue_floor) {
      out.why = "overdetermined residue above floor";
      return out;
    }
  }
  // x = V y
  out.x.assign(cols, 0);
  for (int i = 0; i < cols; ++i) {
    u128 s = 0;
    for (int j = 0; j < cols; ++j) s = (s + mulmod(sf.V[size_t(i) * cols + j], y[j], pK)) % pK;
    out.x[i] = s;
  }
  out.ok = true;
  out.max_pivot_valuation = maxpiv;
  return out;
}

}  // namespace haarlab::padic
