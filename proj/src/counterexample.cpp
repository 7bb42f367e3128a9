#include "haarlab/counterexample.hpp"

#include <cmath>

namespace haarlab::cx {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::complex<double> e_of(double t) { return std::polar(1.0, kTwoPi * t); }

bool power_of_two(int m) { return m >= 1 && (m & (m - 1)) == 0; }

}  // namespace

DigitVector random_digits(std::uint64_t p, int M, std::mt19937_64& rng) {
  DigitVector z;
  z.p = p;
  z.M = M;
  z.d.resize(M);
  std::uniform_int_distribution<int> digit(0, int(p) - 1);
  for (int i = 0; i < M; ++i) z.d[i] = std::uint8_t(digit(rng));
  return z;
}

std::uint64_t sigma_perm(std::uint64_t i) {
  if (i <= 1) return i;
  std::uint64_t j = 63 - __builtin_clzll(i);  // 2^j <= i < 2^{j+1}
  return 3 * (1ULL << j) - i - 1;
}

double CouplingSample::x() const {
  double t = 0;
  for (int i = M - 1; i >= 0; --i) t = (t + z[i]) / double(p);
  return t;
}

std::uint64_t CouplingSample::y_mod_pt(int t) const {
  require(t >= 0 && t <= M, "coupling sample: t out of range");
  std::uint64_t acc = 0, pw = 1;
  for (int i = 0; i < t; ++i) {
    acc += pw * w[i];
    pw *= p;
  }
  return acc;
}

double CouplingSample::x_scaled_frac(int j) const {
  // frac(p^{2^j} x) = sum_{i >= 2^j} z_i p^{2^j - i - 1}, summed exactly
  int base = 1 << j;
  require(base < M, "coupling sample: j too large for M");
  double t = 0;
  for (int i = M - 1; i >= base; --i) t = (t + z[i]) / double(p);
  return t;
}

double CouplingSample::y_scaled_frac(int j) const {
  // sum_{i < 2^{j+1}} w_i p^{i - 2^{j+1}}: Horner over increasing i
  int T = 1 << (j + 1);
  require(T <= M, "coupling sample: j too large for M");
  double t = 0;
  for (int i = 0; i < T; ++i) t = (t + w[i]) / double(p);
  return t;
}

CouplingSample sample_mu(std::mt19937_64& rng, std::uint64_t p, int M) {
  require(power_of_two(M) && M >= 4, "sample_mu: M must be a power of two >= 4");
  CouplingSample s;
  s.p = p;
  s.M = M;
  DigitVector z = random_digits(p, M, rng);
  s.z = z.d;
  s.w.resize(M);
  for (int i = 0; i < M; ++i) s.w[i] = s.z[sigma_perm(i)];
  return s;
}

CouplingSample sample_product(std::mt19937_64& rng, std::uint64_t p, int M) {
  require(power_of_two(M) && M >= 4, "sample_product: M must be a power of two >= 4");
  CouplingSample s;
  s.p = p;
  s.M = M;
  s.z = random_digits(p, M, rng).d;
  s.w = random_digits(p, M, rng).d;
  return s;
}

std::complex<double> alpha_of_digits(const DigitVector& z, int j) {
  int base = 1 << j;
  require(base < z.M, "alpha: j too large for M");
  double t = 0;
  for (int i = z.M - 1; i >= base; --i) t = (t + z.d[i]) / double(z.p);
  return e_of(t);
}

std::complex<double> beta_of_digits(const DigitVector& w, int j) {
  int T = 1 << (j + 1);
  require(T <= w.M, "beta: j too large for M");
  double t = 0;
  for (int i = 0; i < T; ++i) t = (t + w.d[i]) / double(w.p);
  return e_of(t);
}

std::complex<double> alpha_j(const CouplingSample& s, int j) { return e_of(s.x_scaled_frac(j)); }
std::complex<double> beta_j(const CouplingSample& s, int j) { return e_of(s.y_scaled_frac(j)); }
std::complex<double> gamma_j(const CouplingSample& s, int j) {
  return alpha_j(s, j) * std::conj(beta_j(s, j));
}

std::complex<double> control_char(const CouplingSample& s) {
  double y0 = double(s.w[0]) / double(s.p);
  return e_of(s.x()) * std::conj(e_of(y0));
}

double decay_constant_oracle(std::uint64_t p, int j, int M) {
  require((1 << (j + 1)) <= M, "decay oracle: j too large for M");
  // on the support, gamma_j - 1 = e(t_alpha) - e(t_beta) with independent
  // tails t_alpha in [0, A] (x digits at positions >= 2^{j+1}) and
  // t_beta in [0, B] (y digits below 2^j)
  double scale = std::pow(double(p), -double(1 << j));
  double A = scale * (1.0 - std::pow(double(p), -double(M - (1 << (j + 1)))));
  double B = scale - scale * std::pow(double(p), -double(1 << j));
  double worst = 0;
  double patterns = std::pow(double(p), double(1 << j));
  if (patterns <= 65536.0) {
    // enumerate every low-digit pattern of y within one block and take the
    // extreme x tails
    long P = long(patterns);
    int T = 1 << j;
    for (long code = 0; code < P; ++code) {
      long c = code;
      double tb = 0;
      // digits w_0..w_{T-1}; t_beta = sum w_i p^{i - 2^{j+1}}
      double pw = std::pow(double(p), -double(1 << (j + 1)));
      for (int i = 0; i < T; ++i) {
        tb += double(c % p) * pw;
        c /= p;
        pw *= double(p);
      }
      worst = std::max(worst, std::abs(e_of(A) - e_of(tb)));
      worst = std::max(worst, std::abs(e_of(0) - e_of(tb)));
    }
  } else {
    // closed form: both tails live in [0, scale] with scale < 1/2, so the
    // supremum is at the extreme pair
    worst = std::abs(e_of(std::max(A, B)) - e_of(0.0));
  }
  return worst / scale;
}

DecayReport decay_report(std::mt19937_64& rng, std::uint64_t p, int M, int j_max, long N, double C) {
  require(j_max >= 1 && (1 << (j_max + 1)) <= M, "decay_report: j_max too large for M");
  require(N >= 2, "decay_report: need samples");
  DecayReport rep;
  rep.p = p;
  rep.M = M;
  rep.N = N;
  rep.C = C;
  std::vector<DecayRow> rows(j_max);
  std::vector<std::complex<double>> sums(j_max, 0.0);
  std::vector<double> devs(j_max, 0.0);
  for (long t = 0; t < N; ++t) {
    CouplingSample s = sample_mu(rng, p, M);
    for (int j = 1; j <= j_max; ++j) {
      std::complex<double> g = gamma_j(s, j);
      sums[j - 1] += g;
      devs[j - 1] = std::max(devs[j - 1], std::abs(g - 1.0));
    }
  }
  for (int j = 1; j <= j_max; ++j) {
    DecayRow& r = rows[j - 1];
    r.j = j;
    r.max_dev = devs[j - 1];
    r.bound = C * std::pow(double(p), -double(1 << j));
    std::complex<double> mu = sums[j - 1] / double(N);
    r.mu_hat_abs = std::abs(mu);
    r.mu_hat_re = mu.real();
    r.mu_hat_im = mu.imag();
    if (r.max_dev > r.bound) rep.all_within_bound = false;
  }
  rep.rows = std::move(rows);
  return rep;
}

NoGapVerdict no_gap_witness(std::mt19937_64& rng, std::uint64_t p, int M, int j_max, long N,
                            double Cprime) {
  DecayReport rep = decay_report(rng, p, M, j_max, N, 1.0);
  NoGapVerdict v;
  double band = 4.0 / std::sqrt(double(N));
  v.conclusive = band < 0.5;
  v.passes = true;
  for (const DecayRow& r : rep.rows) {
    double thr = 1.0 - Cprime * std::pow(double(p), -double(1 << r.j)) - band;
    v.mu_hat_abs.push_back(r.mu_hat_abs);
    v.thresholds.push_back(thr);
    if (r.mu_hat_abs < thr) v.passes = false;
  }
  if (!v.conclusive) v.passes = false;
  return v;
}

}  // namespace haarlab::cx
