#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>

#include "haarlab/lie.hpp"
#include "haarlab/padic.hpp"
#include "haarlab/su2.hpp"
#include "haarlab/util.hpp"

namespace haarlab::num {

// sigma(A) = sup { r : 0_r subset A 0_1 } = s_m, the m-th singular value of
// an m x n matrix with m <= n
double sigma_real(const Eigen::MatrixXd& A);

struct SigmaPadic {
  int valuation = 0;  // sigma = p^{-valuation}
  bool rank_deficient = false;
};
SigmaPadic sigma_padic(std::uint64_t p, int K, int rows, int cols, const std::vector<padic::u128>& a);

// Smooth map R^n -> R^m with oracles; alpha bounds every second partial's
// norm on the domain ball.
struct SmoothMapProbe {
  int n = 0, m = 0;
  Eigen::VectorXd x0;
  double r0 = 0;
  double alpha = 0;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> phi;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian;
  // finite-difference audit of the Jacobian oracle at x0 (1e-6 relative)
  void validate() const;
};

struct IFTResult {
  bool ok = false;
  Eigen::VectorXd x;
  double residual = 0;
  int iterations = 0;
  std::string why;
  double sigma0 = 0;  // measured sigma(dPhi(x0))
  bool theorem_alarm = false;  // preconditions held but the solve stalled
};
// Quantitative IFT solve: finds x in the SVD slice x0 + L(0_r) with
// Phi(x) = y, for r < min(sigma0/(2 m n sqrt(alpha)), r0) and
// |y - Phi(x0)| <= sigma0 r / 4.  Gradient descent with Armijo backtracking,
// switching to Gauss-Newton below residual 1e-3.
IFTResult solve_real_ift(const SmoothMapProbe& probe, const Eigen::VectorXd& y, double r);

// polynomial map Z_p^n -> Z_p^m with integer coefficients
struct PAdicPolyMap {
  std::uint64_t p = 0;
  int K = 0;
  int n = 0, m = 0;
  std::vector<padic::u128> x0;
  struct Term {
    std::vector<int> exponents;       // length n
    std::vector<padic::u128> coeff;   // length m
  };
  std::vector<Term> terms;  // Phi(x) = sum_t coeff_t * (x - x0)^exponents_t
  std::vector<padic::u128> eval(const std::vector<padic::u128>& x) const;
  std::vector<padic::u128> jacobian(const std::vector<padic::u128>& x) const;  // row-major m x n
};

struct PAdicIFTResult {
  bool ok = false;
  std::vector<padic::u128> x;
  int residual_valuation = 0;
  std::string why;
};
// Hensel-Newton preimage: requires sigma(dPhi(x0)) >= p^{-k0}, l >= k0 + 1,
// |y - Phi(x0)| <= p^{-k0-l}; the output satisfies Phi(x) = y mod p^K and
// |x - x0| <= p^{-l}.
PAdicIFTResult solve_padic_ift(const PAdicPolyMap& map, const std::vector<padic::u128>& y, int k0, int l);

// ---- truncated BCH ----

struct BchResult {
  Eigen::VectorXd value;
  double tail_bound = 0;  // certified majorant of the dropped terms
};
// partial sum of the BCH series of the structure `st` through commutator
// order 1..5, with a numerically summed majorant tail bound
BchResult bch(const lie::RealStructure& st, const Eigen::VectorXd& x, const Eigen::VectorXd& y, int order);

// largest r with 0_r inside { sum c_i v_i : c_i in [-1,1] }: the minimum of
// the support function h(u) = sum |<u, v_i>| over unit directions, via an
// icosahedral grid with local refinement; gap reports the grid resolution
// times the Lipschitz constant
struct ZonotopeResult {
  double inradius = 0;
  double gap = 0;
  Eigen::Vector3d argmin;
};
ZonotopeResult zonotope_inradius(const std::vector<Eigen::Vector3d>& vs, int depth = 5);

// ---- bounded generation and commutator openness on SU(2) ----

struct BoundedGenerationReport {
  bool degenerate = false;   // sigma0 = 0 (e.g. h = I)
  double sigma0 = 0;
  double alpha = 0;
  double r = 0;
  int solved = 0, attempted = 0;
  bool theorem_alarm = false;  // an admissible target failed to solve
  double zonotope_scale = 0;   // inradius of the Ad-image zonotope
  double c_prime = 0;          // measured sigma0 * d / (|h-I| * zonotope_scale)
};
// Phi(t_1..t_9) = prod_i g_i [h, exp(t_i x)] g_i^{-1}, g_i sampled in 1_rho;
// verifies that sampled targets in the guaranteed image ball have preimages
BoundedGenerationReport bounded_generation_probe(const su2::Mat2& h, double rho, const su2::Vec3& x_unit,
                                                 double r_frac, int n_targets, std::mt19937_64& rng);

struct CommutatorSolveResult {
  bool ok = false;
  su2::Mat2 g1, g2;
  double residual = 0;
  std::string why;
};
// solve [g1, g2] = target with |g_i - I| <= rho_i; target must lie in
// 1_{c_hat rho1 rho2}
CommutatorSolveResult commutator_surjectivity(double rho1, double rho2, const su2::Mat2& target,
                                              double c_hat);
// empirical maximal feasible c_hat by bisection over the target radius
double calibrate_commutator_chat(double rho1, double rho2, int samples_per_level, std::mt19937_64& rng);

}  // namespace haarlab::num
