#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "haarlab/util.hpp"

namespace haarlab::cx {

// truncated digit string in {0..p-1}^M
struct DigitVector {
  std::uint64_t p = 2;
  int M = 0;
  std::vector<std::uint8_t> d;
};

DigitVector random_digits(std::uint64_t p, int M, std::mt19937_64& rng);

// block-reversal permutation: fixes 0 and 1, reverses each block
// [2^j, 2^{j+1}); an involution on every initial segment [0, 2^k)
std::uint64_t sigma_perm(std::uint64_t i);

// a point of the coupling: x = sum z_i p^{-i-1} on the circle paired with
// y = sum w_i p^i in Z/p^M, where w_i = z_{sigma(i)}
struct CouplingSample {
  std::uint64_t p = 2;
  int M = 0;
  std::vector<std::uint8_t> z, w;
  double x() const;
  std::uint64_t y_mod_pt(int t) const;   // y mod p^t (requires p^t < 2^63)
  double x_scaled_frac(int j) const;     // frac(p^{2^j} x), exact digit sum
  double y_scaled_frac(int j) const;     // frac(p^{-2^{j+1}} y)
};

CouplingSample sample_mu(std::mt19937_64& rng, std::uint64_t p, int M);
// independent product coupling (control): x and y from independent digits
CouplingSample sample_product(std::mt19937_64& rng, std::uint64_t p, int M);

// character evaluation from raw digit strings (usable off the support too)
std::complex<double> alpha_of_digits(const DigitVector& z, int j);  // e(p^{2^j} x)
std::complex<double> beta_of_digits(const DigitVector& w, int j);   // e_p(p^{-2^{j+1}} y)

std::complex<double> alpha_j(const CouplingSample& s, int j);
std::complex<double> beta_j(const CouplingSample& s, int j);
std::complex<double> gamma_j(const CouplingSample& s, int j);  // alpha / beta

// control character e_{infty,1} conj(e_{p,1/p})
std::complex<double> control_char(const CouplingSample& s);

// exact worst case of |gamma_j - 1| over the support, divided by p^{-2^j};
// enumerates one block of low digits when feasible and closes the tail in
// closed form
double decay_constant_oracle(std::uint64_t p, int j, int M);

struct DecayRow {
  int j = 0;
  double max_dev = 0;    // max pointwise |gamma_j - 1| over the samples
  double bound = 0;      // C p^{-2^j}
  double mu_hat_abs = 0;
  double mu_hat_re = 0, mu_hat_im = 0;
};
struct DecayReport {
  std::uint64_t p = 2;
  int M = 0;
  long N = 0;
  double C = 0;
  std::vector<DecayRow> rows;
  bool all_within_bound = true;
};
DecayReport decay_report(std::mt19937_64& rng, std::uint64_t p, int M, int j_max, long N, double C);

struct NoGapVerdict {
  bool passes = false;
  bool conclusive = true;  // false when the confidence band 4/sqrt(N) is too wide
  std::vector<double> mu_hat_abs;
  std::vector<double> thresholds;  // 1 - C' p^{-2^j} - 4/sqrt(N)
};
// witnesses the no-gap character sequence: |mu_hat(gamma_j)| must sit above
// 1 - C' p^{-2^j} - 4/sqrt(N) for every j <= j_max
NoGapVerdict no_gap_witness(std::mt19937_64& rng, std::uint64_t p, int M, int j_max, long N, double Cprime);

}  // namespace haarlab::cx
