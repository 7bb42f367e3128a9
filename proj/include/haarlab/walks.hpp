#pragma once

#include <complex>
#include <functional>
#include <optional>

#include "haarlab/groups.hpp"

namespace haarlab::walks {

struct Atom {
  groups::Point g;
  double w = 0;
};

// Finite-support probability measure; weights nonnegative and summing to 1
// within 1e-12.  symmetric() certifies that every atom has its inverse
// present with equal weight.
class Measure {
 public:
  Measure(groups::Spec spec, std::vector<Atom> atoms);
  static Measure dirac(const groups::Spec& s);
  static Measure uniform(const groups::Spec& s, const std::vector<groups::Point>& pts);

  const groups::Spec& spec() const { return spec_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  bool symmetric(double tol = 1e-12) const;

 private:
  groups::Spec spec_;
  std::vector<Atom> atoms_;
};

// Symmetric generating set: closed under inverse, duplicate-free.
struct GeneratorSet {
  std::vector<groups::Point> elems;
  static GeneratorSet make(const groups::Spec& s, std::vector<groups::Point> pts);
};

// Convolution; atoms at merge distance coalesce (exact key equality on exact
// specs, 1e-10 operator distance on SU(n)/circle).
Measure convolve(const Measure& a, const Measure& b);

struct ConvolvePower {
  Measure mu;
  double truncated_mass = 0;  // mass dropped by the support cap
  int support = 0;
};
ConvolvePower convolve_power(const Measure& mu, int ell, int support_cap = 200000);

struct SpectralReport {
  double lambda = 0;    // contraction factor in [0,1]
  double lyapunov = 0;  // -log lambda
  std::string method;
  int dim = 0;          // dimension of the space acted on
};

// Exact: dense symmetric eigensolve of T_mu on L^2_0 of an enumerable group
// of order <= 10^4.  Requires symmetric mu.
SpectralReport spectral_gap_exact(const Measure& mu);

// Abelian: sup over the supplied nontrivial characters of |mu_hat(gamma)|;
// exact when the list is complete.
SpectralReport spectral_gap_abelian(const Measure& mu,
                                    const std::vector<std::function<std::complex<double>(const groups::Point&)>>& chars,
                                    bool complete_list);

// Deflated power iteration on L^2_0; estimate only (used for large groups).
SpectralReport spectral_gap_power(const Measure& mu, const groups::Enumerated& en, int iters = 400);

// characters of Z/n as point functions, k = 1..n-1
std::vector<std::function<std::complex<double>(const groups::Point&)>> cyclic_characters(int n);

// ---- dense distributions on enumerated groups ----

std::vector<double> dense_distribution(const groups::Enumerated& en, const Measure& mu);
std::vector<double> convolve_dense(const groups::Enumerated& en, const Measure& mu,
                                   const std::vector<double>& dist);
std::vector<double> dense_power(const groups::Enumerated& en, const Measure& mu, int ell);

// ---- scale diagnostics ----

struct ScaleDefects {
  double averaging_ratio = 0, averaging_threshold = 0;
  bool averaging_pass = false;
  double invariance_ratio = 0, invariance_threshold = 0;
  bool invariance_pass = false;
};
// "lives at scale eta" with parameter a: averaging-to-zero and
// almost-invariance defects; convolution with P_r realized exactly as
// ball averaging on the enumerated group
ScaleDefects lives_at_scale(const groups::Enumerated& en, const std::vector<std::complex<double>>& f,
                            double eta, double a);

// ---- displacement (almost invariant vectors) ----

struct DisplacementReport {
  std::vector<double> per_generator;
  double delta_f = 0;               // max over generators
  double delta_min_candidates = 0;  // certified upper bound for delta(Omega)
  // sandwich multipliers when a spectral report is supplied:
  // c_low * delta^2/|Omega| <= L_bullet <= c_up * delta
  double c_low = 0, c_up = 0;
  bool has_sandwich = false;
};
DisplacementReport displacement(const groups::Enumerated& en, const GeneratorSet& omega,
                                const std::vector<std::complex<double>>& f,
                                const SpectralReport* spectral = nullptr);

// delta(Omega) upper bound over a candidate family: all nontrivial cyclic
// characters when the group is Z/n, else `n_random` Gaussian mean-zero
// functions
double displacement_candidate_min(const groups::Enumerated& en, const GeneratorSet& omega,
                                  int n_random, std::mt19937_64& rng);

// ---- Schreier generators of a finite-index subgroup ----

struct SchreierResult {
  GeneratorSet omega_H;
  int n_cosets = 0;
};
// section: coset canonical representative element-id -> element-id of the
// chosen generator in that coset (must lie in Omega and in the coset)
SchreierResult schreier_generators(const groups::Enumerated& en, const GeneratorSet& omega,
                                   const std::function<bool(int)>& in_H,
                                   const std::function<int(int)>& section);

// least k with x expressible as a product of exactly k generators (0 for the
// identity); -1 if unreachable.  Exact dynamic programming.
std::vector<int> word_lengths(const groups::Enumerated& en, const std::vector<int>& gen_ids);

// ---- equidistribution at scale ----

struct EquidistributionReport {
  double lhs = 0;    // |sigma_eta(X) - |X||
  double rhs = 0;    // lambda(sigma) sqrt(|X| / |1_eta|)
  double slack = 0;  // rhs - lhs
  bool holds = false;
  double lambda_sigma = 0;
};
EquidistributionReport equidistribution_check(const groups::Enumerated& en, const Measure& mu, int ell,
                                              double eta, const std::function<bool(int)>& in_X);

}  // namespace haarlab::walks
