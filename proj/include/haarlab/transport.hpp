#pragma once

#include <gmpxx.h>

#include <functional>
#include <vector>

#include "haarlab/groups.hpp"

namespace haarlab::transport {

using Rat = mpq_class;

// probability vectors sigma1 on Y1, sigma2 on Y2
struct MarginPair {
  std::vector<Rat> sigma1, sigma2;
  MarginPair(std::vector<Rat> s1, std::vector<Rat> s2);
  static MarginPair uniform(int n1, int n2);
  int n1() const { return int(sigma1.size()); }
  int n2() const { return int(sigma2.size()); }
};

// spanning tree of the complete bipartite graph K_{Y1,Y2}
struct BipartiteSpanningTree {
  int n1 = 0, n2 = 0;
  std::vector<std::pair<int, int>> edges;  // (row, col)
  BipartiteSpanningTree(int n1, int n2, std::vector<std::pair<int, int>> edges);
};

// dense N1 x N2 rational matrix; couplings additionally satisfy the margin
// equations exactly
struct CouplingMatrix {
  int n1 = 0, n2 = 0;
  std::vector<Rat> a;
  CouplingMatrix() = default;
  CouplingMatrix(int n1, int n2) : n1(n1), n2(n2), a(size_t(n1) * n2, Rat(0)) {}
  Rat& at(int i, int j) { return a[size_t(i) * n2 + j]; }
  const Rat& at(int i, int j) const { return a[size_t(i) * n2 + j]; }
  MarginPair margins() const;
  bool is_coupling_of(const MarginPair& m) const;  // exact
  bool nonnegative() const;
};

// M^tau: the unique margin-respecting assignment supported on the tree;
// entries may be negative; non-edges are exactly 0
CouplingMatrix tree_measure(const BipartiteSpanningTree& tau, const MarginPair& m);

// all entries of M^tau >= -eps (eps = 0 gives the exact polytope membership)
bool is_admissible(const BipartiteSpanningTree& tau, const MarginPair& m, const Rat& eps = Rat(1, 1000000000000L));

struct Decomposition {
  std::vector<Rat> weights;
  std::vector<BipartiteSpanningTree> trees;
  int terms() const { return int(weights.size()); }
};

// Vertex peeling: writes sigma as a convex combination of admissible tree
// measures of its own margins.  Exact; at most (N1-1)(N2-1)+1 terms.
Decomposition decompose(const CouplingMatrix& sigma);

CouplingMatrix reconstruct(const Decomposition& d, const MarginPair& m);

struct CorrectionResult {
  CouplingMatrix nu;    // exact coupling of the uniform margins
  Rat max_abs_diff;     // entrywise |mu_tilde - nu| maximum
  Rat bound;            // (N1 N2)^{-(A-1)}
  int terms = 0;
  bool within_bound = false;
};
// Margin repair: decompose mu_tilde over its own margins and swap every tree
// measure for the uniform-margin one.  Requires A > 2 and the margin
// deviation precondition |pi_i mu(y) - 1/N_i| <= (N1 N2)^{-A}.
CorrectionResult correct_coupling(const CouplingMatrix& mu_tilde, int A);

// ---- discretization ----

struct Discretization {
  groups::Spec spec;
  double delta = 0;
  int cells = 0;
  bool exact = false;         // exact coset partition
  bool ball_relaxed = false;  // SU(2): ball-containment condition relaxed
  std::function<int(const groups::Point&)> cell_of;
  std::vector<groups::Point> reps;  // one representative per cell
};

// p-adic / finite: exact coset partition of the ball subgroup 1_delta;
// circle: ceil(1/delta) equal arcs; SU(2): equal-measure zonal partition
// with the ball-containment condition relaxed and flagged
Discretization discretize(const groups::Spec& s, double delta);

// ---- the symmetric coupling pipeline ----

struct ExactAtom {
  groups::Point g;
  Rat w;
};

struct PipelineOptions {
  int ell = 1;
  int A = 3;
  double delta1 = 0, delta2 = 0;  // per-factor discretization scales
  long joint_dense_cap = 20000;   // dense joint convolution above this is refused
};

struct PipelineResult {
  bool ok = false;            // margin precondition met and coupling built
  std::string failure;        // names the violated precondition when !ok
  int N1 = 0, N2 = 0;
  int ell_used = 0;
  Rat margin_dev1, margin_dev2, margin_threshold;
  long required_ell_estimate = 0;  // from the equidistribution bound, when !ok
  double lambda1_est = 0, lambda2_est = 0;
  std::vector<Rat> nu;        // symmetrized cell masses c_{jk}, row-major
  Rat max_cell_diff, cell_bound;
  bool exact_coupling = false;
  bool symmetric = false;
  int decomposition_terms = 0;
};

// mu is a symmetric measure on Product(G1, G2) with exact rational weights;
// the walk mu^(ell) is convolved exactly (dense joint distribution, or
// factor-wise when mu is exactly a product measure), its cell masses are
// repaired to an exact coupling of uniforms, and the result is symmetrized.
PipelineResult symmetric_coupling_pipeline(const groups::Spec& prod, const std::vector<ExactAtom>& mu,
                                           const PipelineOptions& opt);

}  // namespace haarlab::transport
