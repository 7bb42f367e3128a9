#pragma once

#include <functional>

#include "haarlab/groups.hpp"
#include "haarlab/lie.hpp"
#include "haarlab/su2.hpp"

namespace haarlab::approx {

// Map defined on the ball 1_rho of the domain group; f(1) = 1 is enforced at
// construction.
struct PartialMap {
  groups::Spec dom, tgt;
  double rho = 0;
  std::function<groups::Point(const groups::Point&)> f;
  PartialMap(groups::Spec dom, groups::Spec tgt, double rho,
             std::function<groups::Point(const groups::Point&)> f);
  groups::Point operator()(const groups::Point& g) const { return f(g); }
};

// max over probes (g1, g2) of d(f(g1 g2), f(g1) f(g2)) and the inverse
// defects; probes must lie in the domain ball together with their product
double approx_hom_defect(const PartialMap& pm, const std::vector<std::pair<groups::Point, groups::Point>>& probes);

// theta_k(x) = log f(exp(rho^k x)) / rho^k  on su(2) coordinates
su2::Vec3 theta_map(const PartialMap& pm, int k, const su2::Vec3& x);

enum class FitMode { BasisScaled, LeastSquares };
// row-indexed coefficient matrix of the fitted linear map; primary mode uses
// theta_tilde(e_i) = (rho/2)^{-1} theta_k((rho/2) e_i)
Eigen::Matrix3d fit_linear_theta(const PartialMap& pm, int k, FitMode mode, int n_probes,
                                 std::mt19937_64* rng, double* residual_out);

struct CompareReport {
  double sup_dist = 0;
  int probes = 0;
};
CompareReport compare_to_reference(const PartialMap& pm,
                                   const std::function<groups::Point(const groups::Point&)>& reference,
                                   const std::vector<groups::Point>& probes);

// canned partial maps on SU(2)
PartialMap conjugation_map(const su2::Mat2& g, double rho);
// conjugation followed by a deterministic output perturbation of operator
// size eps, keyed by a hash of the input (a genuine function)
PartialMap conjugation_with_noise(const su2::Mat2& g, double rho, double eps);
// exact-homomorphism-plus-smooth-noise: f = exp((Ad g) x + q(x)) with a fixed
// quadratic q; the defect at scale r decays like r^2
PartialMap smooth_distortion_map(const su2::Mat2& g, double rho, double qscale);

// reduction mod p^t followed by the canonical lift (a p-adic partial map
// with defect <= p^{-t})
PartialMap reduce_then_lift_map(const groups::Spec& sl, int t);

// ---- the p-adic quotient ladder ----

struct LadderResult {
  padic::Matrix theta_m;  // over Z/p^{n_m - l_m}, row-indexed in (e, f, h)
  int l_m = 0, n_m = 0;
  int shift = 0;       // measured image-level shift (k0 - 1 is the guaranteed worst case)
  bool hom_ok = false; // Lie-ring residuals vanish at the quotient precision
  bool degenerate = false;  // theta_m has rank < d mod p
};
// phi: oracle for a homomorphism G_{1,k0} -> G_2 / G_{2,k0 m}, evaluated on
// matrices at precision K and read mod p^{k0 m}
LadderResult quotient_hom_ladder(const std::function<padic::Matrix(const padic::Matrix&)>& phi,
                                 std::uint64_t p, int k0, int m, int K);

// the critical quotient levels of the ladder
std::pair<int, int> ladder_levels(int k0, int m);

}  // namespace haarlab::approx
