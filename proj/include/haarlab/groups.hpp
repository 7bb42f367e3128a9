#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "haarlab/padic.hpp"
#include "haarlab/util.hpp"

namespace haarlab::groups {

enum class Kind { SpecialUnitary, PAdicSpecialLinear, Finite, Circle, Product };

// Multiplication-table group; metric defaults to the discrete one (diameter 1).
struct FiniteGroupData {
  int order = 0;
  std::vector<int> mul;        // order x order, row-major
  std::vector<int> inv;
  std::vector<double> dist0;   // optional: distance from the identity, bi-invariant
  std::vector<std::string> names;
  int times(int a, int b) const { return mul[size_t(a) * order + b]; }
};

FiniteGroupData finite_cyclic(int n);
FiniteGroupData finite_cyclic_padic(std::uint64_t p, int k);  // Z/p^k with |x|_p metric
FiniteGroupData finite_symmetric3();                          // S_3 via permutation composition
FiniteGroupData finite_direct_product(const FiniteGroupData& a, const FiniteGroupData& b);

struct Spec {
  Kind kind = Kind::Finite;
  int n = 0;                 // SU(n) / SL_n dimension
  std::uint64_t p = 0;
  int K = 0;
  std::shared_ptr<const FiniteGroupData> fin;
  std::shared_ptr<const Spec> left, right;

  static Spec su(int n);
  static Spec padic_sl(int n, std::uint64_t p, int K);
  static Spec finite(FiniteGroupData data);
  static Spec circle();
  static Spec product(const Spec& a, const Spec& b);
  bool same(const Spec& o) const;
  std::string describe() const;
};

struct Point {
  Eigen::MatrixXcd u;                  // SpecialUnitary
  padic::Matrix pm;                    // PAdicSpecialLinear
  int idx = -1;                        // Finite
  double x = 0.0;                      // Circle: coordinate in [0,1)
  std::shared_ptr<const Point> a, b;   // Product

  static Point unitary(Eigen::MatrixXcd m);
  static Point padic(padic::Matrix m);
  static Point finite(int i);
  static Point circle(double v);
  static Point pair(Point l, Point r);
};

Point identity(const Spec& s);
Point mul(const Spec& s, const Point& g, const Point& h);
Point inv(const Spec& s, const Point& g);
Point commutator(const Spec& s, const Point& g, const Point& h);
bool equal(const Spec& s, const Point& g, const Point& h);

// bi-invariant metric: operator norm (SU(n), SL_n(Z_p)), arc length (circle),
// table/discrete (finite), max over factors (product)
double distance(const Spec& s, const Point& g, const Point& h);
double dist_to_id(const Spec& s, const Point& g);

// payload membership check: unitarity/determinant to 1e-12, exact det in the
// p-adic case, index range for finite groups
void validate_point(const Spec& s, const Point& g);

Point haar_sample(const Spec& s, std::mt19937_64& rng);

// canonical serialization; equal points give equal keys in exact specs
std::string point_key(const Spec& s, const Point& g);

struct BallVolume {
  double value = 0;
  double std_error = 0;  // 0 when exact
  bool exact = false;
  long samples = 0;
};
BallVolume ball_volume(const Spec& s, double eta, std::mt19937_64* rng = nullptr, long samples = 200000);

// n-th root for SU(n) points with |g - I| < 1/3
Point nth_root(const Spec& s, const Point& g, int k);

// ---- enumeration (finite realizations) ----

struct Enumerated {
  Spec spec;
  std::vector<Point> elements;
  std::unordered_map<std::string, int> index;
  std::vector<int> invtab;
  std::vector<std::vector<int>> multab;  // filled when order <= mul_table_cap
  int order() const { return int(elements.size()); }
  int find(const Point& g) const;
  int times(int i, int j) const;
};
// Enumerates finite-realizable specs: Finite, SL_n(Z/p^K) with small order,
// products of enumerable factors. Throws above `cap` elements.
Enumerated enumerate_group(const Spec& s, long cap = 2000000, long mul_table_cap = 512);

// ---- entropy ----

// log of the size of a greedy maximal eta-separated subset of the cloud;
// the cloud is first sorted by canonical key so the value is deterministic
double metric_entropy(const Spec& s, std::vector<Point> cloud, double eta, int* count_out = nullptr);

// exact collision entropy of the eta-coset label distribution (specs where
// 1_eta is a subgroup: p-adic, finite, products of those)
double renyi_exact(const Spec& s, const std::vector<std::pair<Point, double>>& measure, double eta);

struct RenyiEstimate {
  double H2 = 0;
  double collision_prob = 0;
  long pairs = 0;
  double ball_volume_used = 0;   // real-spec estimator only
  double bias_factor_bound = 1;  // collision overcounts ||mu_eta||_2^2 by at most this
};
// subgroup-label pair-counting estimator (exact specs), or indicator-ball
// collision counting with |1_eta| from ball_volume (real specs)
RenyiEstimate renyi_estimate(const Spec& s, const std::vector<Point>& samples, double eta,
                             std::mt19937_64* rng = nullptr);

// eta-coset label (exact specs); used by renyi and the scale diagnostics
std::string coset_label(const Spec& s, const Point& g, double eta);

// elements of the ball 1_eta in an enumerated group
std::vector<int> ball_elements(const Enumerated& en, double eta);

}  // namespace haarlab::groups
