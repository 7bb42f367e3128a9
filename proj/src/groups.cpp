#include "haarlab/groups.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "haarlab/su2.hpp"

namespace haarlab::groups {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double circle_dist(double x, double y) {
  double d = std::fabs(x - y);
  d -= std::floor(d);
  return std::min(d, 1.0 - d);
}

}  // namespace

// ---------------- finite group constructors ----------------

FiniteGroupData finite_cyclic(int n) {
  FiniteGroupData d;
  d.order = n;
  d.mul.resize(size_t(n) * n);
  d.inv.resize(n);
  for (int i = 0; i < n; ++i) {
    d.inv[i] = (n - i) % n;
    for (int j = 0; j < n; ++j) d.mul[size_t(i) * n + j] = (i + j) % n;
  }
  return d;
}

FiniteGroupData finite_cyclic_padic(std::uint64_t p, int k) {
  std::uint64_t n = 1;
  for (int i = 0; i < k; ++i) n *= p;
  require(n <= 200000, "finite_cyclic_padic: group too large");
  FiniteGroupData d = finite_cyclic(int(n));
  d.dist0.resize(n);
  for (std::uint64_t x = 0; x < n; ++x) {
    if (x == 0) {
      d.dist0[x] = 0.0;
      continue;
    }
    std::uint64_t v = x;
    double r = 1.0;
    while (v % p == 0) {
      v /= p;
      r /= double(p);
    }
    d.dist0[x] = r;
  }
  return d;
}

FiniteGroupData finite_symmetric3() {
  // permutations of {0,1,2} listed in a fixed order
  const int perms[6][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {0, 2, 1}, {2, 1, 0}, {1, 0, 2}};
  auto compose = [&](int a, int b) {  // (a after b)(x) = perms[a][perms[b][x]]
    int out[3];
    for (int x = 0; x < 3; ++x) out[x] = perms[a][perms[b][x]];
    for (int i = 0; i < 6; ++i)
      if (out[0] == perms[i][0] && out[1] == perms[i][1] && out[2] == perms[i][2]) return i;
    return -1;
  };
  FiniteGroupData d;
  d.order = 6;
  d.mul.resize(36);
  d.inv.assign(6, -1);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      d.mul[size_t(i) * 6 + j] = compose(i, j);
      if (d.mul[size_t(i) * 6 + j] == 0) d.inv[i] = j;
    }
  d.names = {"e", "(012)", "(021)", "(12)", "(02)", "(01)"};
  return d;
}

FiniteGroupData finite_direct_product(const FiniteGroupData& a, const FiniteGroupData& b) {
  FiniteGroupData d;
  d.order = a.order * b.order;
  require(d.order <= 200000, "finite_direct_product: group too large");
  d.mul.resize(size_t(d.order) * d.order);
  d.inv.resize(d.order);
  auto id = [&](int i, int j) { return i * b.order + j; };
  for (int i = 0; i < a.order; ++i)
    for (int j = 0; j < b.order; ++j) {
      d.inv[id(i, j)] = id(a.inv[i], b.inv[j]);
      for (int k = 0; k < a.order; ++k)
        for (int l = 0; l < b.order; ++l)
          d.mul[size_t(id(i, j)) * d.order + id(k, l)] = id(a.times(i, k), b.times(j, l));
    }
  if (!a.dist0.empty() || !b.dist0.empty()) {
    d.dist0.resize(d.order);
    for (int i = 0; i < a.order; ++i)
      for (int j = 0; j < b.order; ++j) {
        double da = a.dist0.empty() ? (i != 0 ? 1.0 : 0.0) : a.dist0[i];
        double db = b.dist0.empty() ? (j != 0 ? 1.0 : 0.0) : b.dist0[j];
        d.dist0[id(i, j)] = std::max(da, db);
      }
  }
  return d;
}

// ---------------- Spec ----------------

Spec Spec::su(int n) {
  require(n >= 2, "Spec::su: n >= 2");
  Spec s;
  s.kind = Kind::SpecialUnitary;
  s.n = n;
  return s;
}

Spec Spec::padic_sl(int n, std::uint64_t p, int K) {
  require(padic::is_prime(p), "Spec::padic_sl: p must be prime");
  Spec s;
  s.kind = Kind::PAdicSpecialLinear;
  s.n = n;
  s.p = p;
  s.K = K;
  return s;
}

Spec Spec::finite(FiniteGroupData data) {
  require(data.order >= 1, "Spec::finite: empty group");
  Spec s;
  s.kind = Kind::Finite;
  s.fin = std::make_shared<FiniteGroupData>(std::move(data));
  return s;
}

Spec Spec::circle() {
  Spec s;
  s.kind = Kind::Circle;
  return s;
}

Spec Spec::product(const Spec& a, const Spec& b) {
  Spec s;
  s.kind = Kind::Product;
  s.left = std::make_shared<Spec>(a);
  s.right = std::make_shared<Spec>(b);
  return s;
}

bool Spec::same(const Spec& o) const {
  if (kind != o.kind) return false;
  switch (kind) {
    case Kind::SpecialUnitary:
      return n == o.n;
    case Kind::PAdicSpecialLinear:
      return n == o.n && p == o.p && K == o.K;
    case Kind::Finite:
      return fin == o.fin || (fin && o.fin && fin->order == o.fin->order && fin->mul == o.fin->mul);
    case Kind::Circle:
      return true;
    case Kind::Product:
      return left->same(*o.left) && right->same(*o.right);
  }
  return false;
}

std::string Spec::describe() const {
  switch (kind) {
    case Kind::SpecialUnitary:
      return "SU(" + std::to_string(n) + ")";
    case Kind::PAdicSpecialLinear:
      return "SL_" + std::to_string(n) + "(Z/" + std::to_string(p) + "^" + std::to_string(K) + ")";
    case Kind::Finite:
      return "finite(order " + std::to_string(fin->order) + ")";
    case Kind::Circle:
      return "R/Z";
    case Kind::Product:
      return left->describe() + " x " + right->describe();
  }
  return "?";
}

// ---------------- Point ----------------

Point Point::unitary(Eigen::MatrixXcd m) {
  Point p;
  p.u = std::move(m);
  return p;
}
Point Point::padic(padic::Matrix m) {
  Point p;
  p.pm = std::move(m);
  return p;
}
Point Point::finite(int i) {
  Point p;
  p.idx = i;
  return p;
}
Point Point::circle(double v) {
  Point p;
  p.x = v - std::floor(v);
  return p;
}
Point Point::pair(Point l, Point r) {
  Point p;
  p.a = std::make_shared<Point>(std::move(l));
  p.b = std::make_shared<Point>(std::move(r));
  return p;
}

Point identity(const Spec& s) {
  switch (s.kind) {
    case Kind::SpecialUnitary:
      return Point::unitary(Eigen::MatrixXcd::Identity(s.n, s.n));
    case Kind::PAdicSpecialLinear:
      return Point::padic(padic::Matrix::identity(s.p, s.K, s.n));
    case Kind::Finite:
      return Point::finite(0);
    case Kind::Circle:
      return Point::circle(0.0);
    case Kind::Product:
      return Point::pair(identity(*s.left), identity(*s.right));
  }
  throw precondition_error("identity: bad spec");
}

Point mul(const Spec& s, const Point& g, const Point& h) {
  switch (s.kind) {
    case Kind::SpecialUnitary:
      return Point::unitary(g.u * h.u);
    case Kind::PAdicSpecialLinear:
      return Point::padic(g.pm * h.pm);
    case Kind::Finite:
      return Point::finite(s.fin->times(g.idx, h.idx));
    case Kind::Circle:
      return Point::circle(g.x + h.x);
    case Kind::Product:
      return Point::pair(mul(*s.left, *g.a, *h.a), mul(*s.right, *g.b, *h.b));
  }
  throw precondition_error("mul: bad spec");
}

Point inv(const Spec& s, const Point& g) {
  switch (s.kind) {
    case Kind::SpecialUnitary:
      return Point::unitary(g.u.adjoint());
    case Kind::PAdicSpecialLinear:
      return Point::padic(g.pm.inverse());
    case Kind::Finite:
      return Point::finite(s.fin->inv[g.idx]);
    case Kind::Circle:
      return Point::circle(-g.x);
    case Kind::Product:
      return Point::pair(inv(*s.left, *g.a), inv(*s.right, *g.b));
  }
  throw precondition_error("inv: bad spec");
}

Point commutator(const Spec& s, const Point& g, const Point& h) {
  return mul(s, mul(s, g, h), mul(s, inv(s, g), inv(s, h)));
}

bool equal(const Spec& s, const Point& g, const Point& h) {
  switch (s.kind) {
    case Kind::SpecialUnitary:
      return (g.u - h.u).norm() == 0.0;
    case Kind::PAdicSpecialLinear:
      return g.pm == h.pm;
    case Kind::Finite:
      return g.idx == h.idx;
    case Kind::Circle:
      return g.x == h.x;
    case Kind::Product:
      return equal(*s.left, *g.a, *h.a) && equal(*s.right, *g.b, *h.b);
  }
  return false;
}

double distance(const Spec& s, const Point& g, const Point& h) {
  switch (s.kind) {
    case Kind::SpecialUnitary: {
      if (s.n == 2) return su2::dist(g.u, h.u);
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(g.u - h.u);
      return svd.singularValues()(0);
    }
    case Kind::PAdicSpecialLinear: {
      require(g.pm.p() == s.p && g.pm.K() == s.K && h.pm.p() == s.p && h.pm.K() == s.K,
              "distance: point/spec context mismatch");
      return (g.pm - h.pm).norm();
    }
    case Kind::Finite: {
      if (g.idx == h.idx) return 0.0;
      if (s.fin->dist0.empty()) return 1.0;
      // bi-invariant: d(g, h) = dist0(g h^{-1})
      return s.fin->dist0[s.fin->times(g.idx, s.fin->inv[h.idx])];
    }
    case Kind::Circle:
      return circle_dist(g.x, h.x);
    case Kind::Product:
      return std::max(distance(*s.left, *g.a, *h.a), distance(*s.right, *g.b, *h.b));
  }
  throw precondition_error("distance: bad spec");
}

double dist_to_id(const Spec& s, const Point& g) {
  if (s.kind == Kind::SpecialUnitary && s.n == 2) return su2::dist_to_id(g.u);
  return distance(s, g, identity(s));
}

void validate_point(const Spec& s, const Point& g) {
  switch (s.kind) {
    case Kind::SpecialUnitary: {
      require(g.u.rows() == s.n && g.u.cols() == s.n, "point: wrong unitary dimension");
      double uerr = (g.u * g.u.adjoint() - Eigen::MatrixXcd::Identity(s.n, s.n)).cwiseAbs().maxCoeff();
      require(uerr <= 1e-12, "point: unitarity violated beyond 1e-12");
      std::complex<double> det = g.u.determinant();
      require(std::abs(det - std::complex<double>(1, 0)) <= 1e-12, "point: determinant != 1");
      return;
    }
    case Kind::PAdicSpecialLinear: {
      require(g.pm.n() == s.n && g.pm.p() == s.p && g.pm.K() == s.K, "point: wrong p-adic context");
      require(g.pm.det().value() == 1, "point: determinant != 1 mod p^K");
      return;
    }
    case Kind::Finite:
      require(g.idx >= 0 && g.idx < s.fin->order, "point: finite index out of range");
      return;
    case Kind::Circle:
      require(g.x >= 0.0 && g.x < 1.0, "point: circle coordinate out of range");
      return;
    case Kind::Product:
      validate_point(*s.left, *g.a);
      validate_point(*s.right, *g.b);
      return;
  }
}

Point haar_sample(const Spec& s, std::mt19937_64& rng) {
  switch (s.kind) {
    case Kind::SpecialUnitary: {
      if (s.n == 2) return Point::unitary(su2::haar(rng));
      // Ginibre + QR with phase correction, then det pushed into column 0
      std::normal_distribution<double> n01(0.0, 1.0);
      Eigen::MatrixXcd z(s.n, s.n);
      for (int i = 0; i < s.n; ++i)
        for (int j = 0; j < s.n; ++j) z(i, j) = std::complex<double>(n01(rng), n01(rng));
      Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
      Eigen::MatrixXcd q = qr.householderQ();
      Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
      for (int j = 0; j < s.n; ++j) {
        std::complex<double> d = r(j, j);
        q.col(j) *= d / std::abs(d);
      }
      std::complex<double> det = q.determinant();
      q.col(0) *= std::conj(det);  // |det| = 1, so this lands in SU(n)
      return Point::unitary(q);
    }
    case Kind::PAdicSpecialLinear: {
      require(s.n == 2, "haar_sample: p-adic sampling implemented for SL_2");
      return Point::padic(padic::sl2_haar(s.p, s.K, rng));
    }
    case Kind::Finite: {
      std::uniform_int_distribution<int> d(0, s.fin->order - 1);
      return Point::finite(d(rng));
    }
    case Kind::Circle: {
      std::uniform_real_distribution<double> d(0.0, 1.0);
      return Point::circle(d(rng));
    }
    case Kind::Product:
      return Point::pair(haar_sample(*s.left, rng), haar_sample(*s.right, rng));
  }
  throw precondition_error("haar_sample: bad spec");
}

std::string point_key(const Spec& s, const Point& g) {
  switch (s.kind) {
    case Kind::SpecialUnitary: {
      std::string out = "U:";
      for (int i = 0; i < g.u.rows(); ++i)
        for (int j = 0; j < g.u.cols(); ++j) {
          out += fmt_double(g.u(i, j).real());
          out.push_back(' ');
          out += fmt_double(g.u(i, j).imag());
          out.push_back(' ');
        }
      return out;
    }
    case Kind::PAdicSpecialLinear:
      return "P:" + g.pm.key();
    case Kind::Finite:
      return "F:" + std::to_string(g.idx);
    case Kind::Circle:
      return "C:" + fmt_double(g.x);
    case Kind::Product:
      return "(" + point_key(*s.left, *g.a) + ")x(" + point_key(*s.right, *g.b) + ")";
  }
  return "?";
}

// ---------------- ball volumes ----------------

namespace {

double sl_order_mod_p(int n, double p) {
  // |SL_n(F_p)| = p^{n(n-1)/2} prod_{k=2..n} (p^k - 1)
  double v = std::pow(p, n * (n - 1) / 2.0);
  for (int k = 2; k <= n; ++k) v *= std::pow(p, k) - 1.0;
  return v;
}

}  // namespace

BallVolume ball_volume(const Spec& s, double eta, std::mt19937_64* rng, long samples) {
  require(eta > 0.0, "ball_volume: eta must be positive");
  BallVolume out;
  switch (s.kind) {
    case Kind::PAdicSpecialLinear: {
      if (eta >= 1.0) {
        out.value = 1.0;
        out.exact = true;
        return out;
      }
      int l = int(std::ceil(std::log(1.0 / eta) / std::log(double(s.p)) - 1e-12));
      l = std::max(l, 1);
      // |1_{p^{-l}}| = ( |SL_n(F_p)| p^{(n^2-1)(l-1)} )^{-1}
      double denom = sl_order_mod_p(s.n, double(s.p)) * std::pow(double(s.p), double(s.n * s.n - 1) * (l - 1));
      out.value = 1.0 / denom;
      out.exact = true;
      return out;
    }
    case Kind::Finite: {
      const auto& f = *s.fin;
      long cnt = 0;
      for (int i = 0; i < f.order; ++i) {
        double d = (i == 0) ? 0.0 : (f.dist0.empty() ? 1.0 : f.dist0[i]);
        if (d <= eta) ++cnt;
      }
      out.value = double(cnt) / f.order;
      out.exact = true;
      return out;
    }
    case Kind::Circle: {
      out.value = std::min(1.0, 2.0 * eta);
      out.exact = true;
      return out;
    }
    case Kind::SpecialUnitary: {
      if (eta >= 2.0) {
        out.value = 1.0;
        out.exact = true;
        return out;
      }
      if (s.n == 2) {
        // quaternion cap: the polar angle phi has density (2/pi) sin^2(phi)
        // and |g - I| = 2 sin(phi/2), so the cap is phi <= acos(1 - eta^2/2)
        double phimax = std::acos(std::max(-1.0, 1.0 - eta * eta / 2.0));
        out.value = (2.0 / M_PI) * (phimax / 2.0 - std::sin(2.0 * phimax) / 4.0);
        out.exact = true;
        return out;
      }
      require(rng != nullptr, "ball_volume: Monte Carlo needs an rng for SU(n), n > 2");
      long hit = 0;
      Point id = identity(s);
      for (long i = 0; i < samples; ++i) {
        Point g = haar_sample(s, *rng);
        if (distance(s, g, id) <= eta) ++hit;
      }
      out.value = double(hit) / double(samples);
      out.std_error = std::sqrt(out.value * (1.0 - out.value) / double(samples));
      out.samples = samples;
      return out;
    }
    case Kind::Product: {
      BallVolume a = ball_volume(*s.left, eta, rng, samples);
      BallVolume b = ball_volume(*s.right, eta, rng, samples);
      out.value = a.value * b.value;
      out.exact = a.exact && b.exact;
      out.std_error = std::sqrt(std::pow(a.std_error * b.value, 2) + std::pow(b.std_error * a.value, 2));
      out.samples = std::max(a.samples, b.samples);
      return out;
    }
  }
  throw precondition_error("ball_volume: bad spec");
}

Point nth_root(const Spec& s, const Point& g, int k) {
  require(k >= 1, "nth_root: k >= 1");
  require(s.kind == Kind::SpecialUnitary, "nth_root: SU(n) points only");
  require(dist_to_id(s, g) < 1.0 / 3.0, "nth_root: requires |g - I| < 1/3");
  if (s.n == 2) return Point::unitary(su2::nth_root(g.u, k));
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(g.u);
  Eigen::VectorXcd lam = es.eigenvalues();
  Eigen::MatrixXcd v = es.eigenvectors();
  Eigen::VectorXcd root(lam.size());
  for (int i = 0; i < lam.size(); ++i) {
    double th = std::arg(lam(i));
    root(i) = std::polar(1.0, th / double(k));
  }
  return Point::unitary(v * root.asDiagonal() * v.inverse());
}

// ---------------- enumeration ----------------

int Enumerated::find(const Point& g) const {
  auto it = index.find(point_key(spec, g));
  require(it != index.end(), "Enumerated::find: point not in group");
  return it->second;
}

int Enumerated::times(int i, int j) const {
  if (!multab.empty()) return multab[i][j];
  return find(mul(spec, elements[i], elements[j]));
}

Enumerated enumerate_group(const Spec& s, long cap, long mul_table_cap) {
  Enumerated en;
  en.spec = s;
  switch (s.kind) {
    case Kind::Finite: {
      require(s.fin->order <= cap, "enumerate_group: group above cap");
      for (int i = 0; i < s.fin->order; ++i) en.elements.push_back(Point::finite(i));
      break;
    }
    case Kind::PAdicSpecialLinear: {
      require(s.n == 2, "enumerate_group: p-adic enumeration implemented for SL_2");
      double order = sl_order_mod_p(2, double(s.p)) * std::pow(double(s.p), 3.0 * (s.K - 1));
      require(order <= double(cap), "enumerate_group: group above cap");
      for (auto& m : padic::enumerate_sl2_mod_pl(s.p, s.K, s.K)) en.elements.push_back(Point::padic(std::move(m)));
      break;
    }
    case Kind::Product: {
      Enumerated a = enumerate_group(*s.left, cap, 1);
      Enumerated b = enumerate_group(*s.right, cap, 1);
      require(double(a.order()) * double(b.order()) <= double(cap), "enumerate_group: product above cap");
      for (const auto& x : a.elements)
        for (const auto& y : b.elements) en.elements.push_back(Point::pair(x, y));
      break;
    }
    default:
      throw precondition_error("enumerate_group: spec is not finitely enumerable");
  }
  for (int i = 0; i < en.order(); ++i) en.index[point_key(s, en.elements[i])] = i;
  en.invtab.resize(en.order());
  for (int i = 0; i < en.order(); ++i) en.invtab[i] = en.find(inv(s, en.elements[i]));
  if (en.order() <= mul_table_cap) {
    en.multab.assign(en.order(), std::vector<int>(en.order()));
    for (int i = 0; i < en.order(); ++i)
      for (int j = 0; j < en.order(); ++j)
        en.multab[i][j] = en.find(mul(s, en.elements[i], en.elements[j]));
  }
  return en;
}

// ---------------- entropy ----------------

double metric_entropy(const Spec& s, std::vector<Point> cloud, double eta, int* count_out) {
  require(!cloud.empty(), "metric_entropy: empty cloud");
  std::sort(cloud.begin(), cloud.end(),
            [&](const Point& a, const Point& b) { return point_key(s, a) < point_key(s, b); });
  std::vector<const Point*> kept;
  for (const Point& g : cloud) {
    bool ok = true;
    for (const Point* h : kept)
      if (distance(s, g, *h) < eta) {
        ok = false;
        break;
      }
    if (ok) kept.push_back(&g);
  }
  if (count_out) *count_out = int(kept.size());
  return std::log(double(kept.size()));
}

std::string coset_label(const Spec& s, const Point& g, double eta) {
  switch (s.kind) {
    case Kind::PAdicSpecialLinear: {
      if (eta >= 1.0) return "*";
      int l = std::max(1, int(std::ceil(std::log(1.0 / eta) / std::log(double(s.p)) - 1e-12)));
      l = std::min(l, s.K);
      return g.pm.reduced(l).key();
    }
    case Kind::Finite: {
      const auto& f = *s.fin;
      if (f.dist0.empty()) return eta >= 1.0 ? "*" : std::to_string(g.idx);
      // coset of the ball subgroup: canonical representative = min index in g*B
      int best = f.order;
      for (int u = 0; u < f.order; ++u)
        if (f.dist0[u] <= eta) best = std::min(best, f.times(g.idx, u));
      return std::to_string(best);
    }
    case Kind::Product:
      return coset_label(*s.left, *g.a, eta) + "|" + coset_label(*s.right, *g.b, eta);
    default:
      throw precondition_error("coset_label: 1_eta is not a subgroup for this spec");
  }
}

double renyi_exact(const Spec& s, const std::vector<std::pair<Point, double>>& measure, double eta) {
  require(!measure.empty(), "renyi_exact: empty measure");
  std::unordered_map<std::string, double> mass;
  double tot = 0;
  for (const auto& [g, w] : measure) {
    mass[coset_label(s, g, eta)] += w;
    tot += w;
  }
  require(std::fabs(tot - 1.0) <= 1e-9, "renyi_exact: weights must sum to 1");
  double cp = 0;
  for (auto& [k, m] : mass) cp += m * m;
  return -std::log(cp);
}

RenyiEstimate renyi_estimate(const Spec& s, const std::vector<Point>& samples, double eta,
                             std::mt19937_64* rng) {
  require(samples.size() >= 2, "renyi_estimate: need at least 2 samples");
  RenyiEstimate out;
  const long n = long(samples.size());
  bool exact_labels = s.kind == Kind::PAdicSpecialLinear || s.kind == Kind::Finite ||
                      (s.kind == Kind::Product && s.left->kind != Kind::SpecialUnitary &&
                       s.left->kind != Kind::Circle && s.right->kind != Kind::SpecialUnitary &&
                       s.right->kind != Kind::Circle);
  if (exact_labels) {
    std::unordered_map<std::string, long> mult;
    for (const auto& g : samples) ++mult[coset_label(s, g, eta)];
    double coll = 0;
    for (auto& [k, m] : mult) coll += double(m) * (m - 1);
    out.pairs = n * (n - 1) / 2;
    out.collision_prob = coll / (double(n) * (n - 1));
    require(out.collision_prob > 0, "renyi_estimate: no collisions observed; increase samples");
    out.H2 = -std::log(out.collision_prob);
    return out;
  }
  // real spec: P(d(X, X') <= eta) / |1_eta| estimates ||mu_eta||_2^2 from
  // above, by at most the ratio |1_{2eta}| / |1_eta|
  BallVolume bv = ball_volume(s, eta, rng);
  BallVolume bv2 = ball_volume(s, 2 * eta, rng);
  long hits = 0, pairs = 0;
  const long pair_cap = 4000000;
  if (n * (n - 1) / 2 <= pair_cap) {
    for (long i = 0; i < n; ++i)
      for (long j = i + 1; j < n; ++j) {
        ++pairs;
        if (distance(s, samples[i], samples[j]) <= eta) ++hits;
      }
  } else {
    require(rng != nullptr, "renyi_estimate: subsampled pairs need an rng");
    std::uniform_int_distribution<long> pick(0, n - 1);
    for (long t = 0; t < pair_cap; ++t) {
      long i = pick(*rng), j = pick(*rng);
      if (i == j) continue;
      ++pairs;
      if (distance(s, samples[i], samples[j]) <= eta) ++hits;
    }
  }
  out.pairs = pairs;
  out.collision_prob = double(hits) / double(pairs);
  out.ball_volume_used = bv.value;
  out.bias_factor_bound = bv2.value / bv.value;
  require(out.collision_prob > 0, "renyi_estimate: no collisions observed; increase samples");
  out.H2 = std::log(1.0 / bv.value) - std::log(out.collision_prob / bv.value);
  return out;
}

std::vector<int> ball_elements(const Enumerated& en, double eta) {
  std::vector<int> out;
  Point id = identity(en.spec);
  for (int i = 0; i < en.order(); ++i)
    if (distance(en.spec, en.elements[i], id) <= eta) out.push_back(i);
  return out;
}

}  // namespace haarlab::groups
