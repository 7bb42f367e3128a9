#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "haarlab/padic.hpp"

namespace haarlab::lie {

// Structure constants c_{jks}: [e_j, e_k] = sum_s c_{jks} e_s.
// Maps are stored row-indexed: X(j, s) is the coefficient of e_s^{(2)} in
// T(e_j^{(1)}), so the operator matrix acting on coordinate vectors is X^T.
struct RealStructure {
  int d = 0;
  std::vector<double> c;  // d^3, index (j*d + k)*d + s
  double at(int j, int k, int s) const { return c[(size_t(j) * d + k) * d + s]; }
  Eigen::VectorXd bracket(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
  void validate() const;  // antisymmetry and Jacobi residual <= 1e-12
  static RealStructure su2();
};

struct PAdicStructure {
  int d = 0;
  std::uint64_t p = 0;
  int K = 0;
  std::vector<padic::u128> c;
  padic::u128 at(int j, int k, int s) const { return c[(size_t(j) * d + k) * d + s]; }
  void validate() const;  // exact antisymmetry and Jacobi
  static PAdicStructure sl2(std::uint64_t p, int K);
};

// f_{jkr}(X) = sum_{i1,i2} c2_{i1 i2 r} X(j,i1) X(k,i2) - sum_i c1_{jki} X(i,r);
// zero exactly iff X is a Lie ring homomorphism in the row-indexed layout.
struct ResidualReport {
  Eigen::VectorXd values;  // flattened over (j, k, r)
  double max_abs = 0;
};
ResidualReport hom_residuals(const Eigen::MatrixXd& X, const RealStructure& c1, const RealStructure& c2);

struct PAdicResidualReport {
  std::vector<padic::u128> values;
  int min_valuation = 0;  // K when all residuals vanish mod p^K
};
PAdicResidualReport hom_residuals_padic(const padic::Matrix& X, const PAdicStructure& c1,
                                        const PAdicStructure& c2);

// Gauss-Newton projection onto the homomorphism variety.
struct ProjectionResult {
  Eigen::MatrixXd theta_hat;
  double max_residual = 0;
  int iterations = 0;
  bool converged = false;
  double distance_op = 0;  // ||theta_hat - theta_tilde||_op
  double sigma_min = 0, sigma_max = 0;
  bool isomorphism = false;  // sigma_min > 1e-6
};
ProjectionResult project_to_variety_real(const Eigen::MatrixXd& theta_tilde, const RealStructure& c1,
                                         const RealStructure& c2, int max_iter = 200, double tol = 1e-10);

// Hensel-Newton lifting of an approximate Lie-ring homomorphism.
// theta_bar lives at precision K (canonical lift of data known mod p^m);
// the criterion m > 2s uses s = largest pivot valuation of the Jacobian's
// Smith form at theta_bar.
struct HenselResult {
  padic::Matrix lift;
  bool ok = false;
  std::string why;
  int s_measured = 0;
  int input_valuation = 0;                 // measured valuation of the initial residual
  std::vector<int> residual_valuations;    // after each Newton step
  bool doubling_ok = false;                // v_{t+1} >= min(K, 2(v_t - s)) and strictly increasing
  int agreement_valuation = 0;             // valuation of (lift - theta_bar)
};
HenselResult hensel_lift_hom(const padic::Matrix& theta_bar, int m, const PAdicStructure& c1,
                             const PAdicStructure& c2);

// Solve Ad(g) = theta for g in SL_2(Z/p^K) (theta a 3x3 adjoint matrix in the
// e,f,h row convention); fails when theta is not an inner automorphism.
struct AdjointInversion {
  bool ok = false;
  padic::Matrix g;
  std::string why;
};
AdjointInversion sl2_from_adjoint(const padic::Matrix& theta);

}  // namespace haarlab::lie
