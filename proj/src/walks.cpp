#include "haarlab/walks.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace haarlab::walks {

using groups::Enumerated;
using groups::Kind;
using groups::Point;
using groups::Spec;

namespace {

bool exact_spec(const Spec& s) {
  switch (s.kind) {
    case Kind::PAdicSpecialLinear:
    case Kind::Finite:
      return true;
    case Kind::Product:
      return exact_spec(*s.left) && exact_spec(*s.right);
    default:
      return false;
  }
}

constexpr double kMergeTol = 1e-10;

}  // namespace

Measure::Measure(Spec spec, std::vector<Atom> atoms) : spec_(std::move(spec)), atoms_(std::move(atoms)) {
  require(!atoms_.empty(), "measure: no atoms");
  double sum = 0;
  for (const Atom& a : atoms_) {
    require(a.w >= 0, "measure: negative weight");
    sum += a.w;
  }
  require(std::fabs(sum - 1.0) <= 1e-12, "measure: weights must sum to 1 within 1e-12");
}

Measure Measure::dirac(const Spec& s) { return Measure(s, {{groups::identity(s), 1.0}}); }

Measure Measure::uniform(const Spec& s, const std::vector<Point>& pts) {
  require(!pts.empty(), "measure: no support points");
  std::vector<Atom> atoms;
  for (const Point& g : pts) atoms.push_back({g, 1.0 / double(pts.size())});
  return Measure(s, std::move(atoms));
}

bool Measure::symmetric(double tol) const {
  for (const Atom& a : atoms_) {
    Point gi = groups::inv(spec_, a.g);
    double got = 0;
    for (const Atom& b : atoms_) {
      if (groups::distance(spec_, b.g, gi) <= kMergeTol) got += b.w;
    }
    if (std::fabs(got - a.w) > tol) return false;
  }
  return true;
}

GeneratorSet GeneratorSet::make(const Spec& s, std::vector<Point> pts) {
  GeneratorSet gs;
  for (const Point& g : pts) {
    bool dup = false;
    for (const Point& h : gs.elems)
      if (groups::distance(s, g, h) <= kMergeTol) dup = true;
    require(!dup, "generator set: duplicate generator");
    gs.elems.push_back(g);
  }
  for (const Point& g : gs.elems) {
    Point gi = groups::inv(s, g);
    bool found = false;
    for (const Point& h : gs.elems)
      if (groups::distance(s, gi, h) <= kMergeTol) found = true;
    require(found, "generator set: not closed under inverse");
  }
  return gs;
}

Measure convolve(const Measure& a, const Measure& b) {
  require(a.spec().same(b.spec()), "convolve: spec mismatch");
  const Spec& s = a.spec();
  std::vector<Atom> out;
  if (exact_spec(s)) {
    std::unordered_map<std::string, size_t> where;
    for (const Atom& x : a.atoms())
      for (const Atom& y : b.atoms()) {
        Point g = groups::mul(s, x.g, y.g);
        std::string k = groups::point_key(s, g);
        auto it = where.find(k);
        if (it == where.end()) {
          where[k] = out.size();
          out.push_back({std::move(g), x.w * y.w});
        } else {
          out[it->second].w += x.w * y.w;
        }
      }
  } else {
    for (const Atom& x : a.atoms())
      for (const Atom& y : b.atoms()) {
        Point g = groups::mul(s, x.g, y.g);
        bool merged = false;
        for (Atom& o : out)
          if (groups::distance(s, o.g, g) <= kMergeTol) {
            o.w += x.w * y.w;
            merged = true;
            break;
          }
        if (!merged) out.push_back({std::move(g), x.w * y.w});
      }
  }
  return Measure(s, std::move(out));
}

ConvolvePower convolve_power(const Measure& mu, int ell, int support_cap) {
  require(ell >= 0, "convolve_power: ell >= 0");
  ConvolvePower res{Measure::dirac(mu.spec()), 0.0, 1};
  double dropped = 0;
  for (int step = 0; step < ell; ++step) {
    Measure next = convolve(res.mu, mu);
    std::vector<Atom> atoms = next.atoms();
    if (int(atoms.size()) > support_cap) {
      std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.w > b.w; });
      double cut = 0;
      for (size_t i = support_cap; i < atoms.size(); ++i) cut += atoms[i].w;
      atoms.resize(support_cap);
      dropped += cut;
      double keep = 1.0 - cut;
      for (Atom& a : atoms) a.w /= keep;  // renormalize; dropped mass is accounted separately
    }
    res.mu = Measure(mu.spec(), std::move(atoms));
  }
  res.truncated_mass = dropped;
  res.support = int(res.mu.atoms().size());
  return res;
}

// ---- spectral gaps ----

namespace {

// indices of atoms in the enumerated group, with weights
std::vector<std::pair<int, double>> atom_ids(const Enumerated& en, const Measure& mu) {
  std::vector<std::pair<int, double>> out;
  for (const Atom& a : mu.atoms()) out.push_back({en.find(a.g), a.w});
  return out;
}

}  // namespace

std::vector<double> dense_distribution(const Enumerated& en, const Measure& mu) {
  std::vector<double> d(en.order(), 0.0);
  for (const Atom& a : mu.atoms()) d[en.find(a.g)] += a.w;
  return d;
}

namespace {

// left-multiplication permutations of the atoms, resolved once
struct AtomPerms {
  std::vector<std::vector<int>> perm;
  std::vector<double> w;
};

AtomPerms atom_perms(const Enumerated& en, const Measure& mu) {
  AtomPerms ap;
  for (const Atom& a : mu.atoms()) {
    int g = en.find(a.g);
    std::vector<int> p(en.order());
    for (int x = 0; x < en.order(); ++x) p[x] = en.times(g, x);
    ap.perm.push_back(std::move(p));
    ap.w.push_back(a.w);
  }
  return ap;
}

std::vector<double> apply_perms(const AtomPerms& ap, const std::vector<double>& dist) {
  std::vector<double> out(dist.size(), 0.0);
  for (size_t a = 0; a < ap.perm.size(); ++a) {
    const std::vector<int>& p = ap.perm[a];
    double w = ap.w[a];
    for (size_t x = 0; x < dist.size(); ++x)
      if (dist[x] != 0) out[p[x]] += w * dist[x];
  }
  return out;
}

}  // namespace

std::vector<double> convolve_dense(const Enumerated& en, const Measure& mu, const std::vector<double>& dist) {
  return apply_perms(atom_perms(en, mu), dist);
}

std::vector<double> dense_power(const Enumerated& en, const Measure& mu, int ell) {
  AtomPerms ap = atom_perms(en, mu);
  std::vector<double> d(en.order(), 0.0);
  d[en.find(groups::identity(en.spec))] = 1.0;
  for (int i = 0; i < ell; ++i) d = apply_perms(ap, d);
  return d;
}

SpectralReport spectral_gap_exact(const Measure& mu) {
  require(mu.symmetric(1e-12), "spectral_gap_exact: measure must be symmetric");
  Enumerated en = groups::enumerate_group(mu.spec(), 10000, 1);
  const int n = en.order();
  auto ids = atom_ids(en, mu);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int y = 0; y < n; ++y)
    for (auto& [g, w] : ids) A(en.times(g, y), y) += w;
  // deflate the constant eigenvector: B = A - (1/n) J agrees with A on L^2_0
  A.array() -= 1.0 / double(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
  double lam = 0;
  for (int i = 0; i < n; ++i) lam = std::max(lam, std::fabs(es.eigenvalues()(i)));
  SpectralReport r;
  r.lambda = std::min(lam, 1.0);
  r.lyapunov = -std::log(std::max(r.lambda, 1e-300));
  r.method = "dense-eigensolve";
  r.dim = n - 1;
  return r;
}

SpectralReport spectral_gap_abelian(
    const Measure& mu, const std::vector<std::function<std::complex<double>(const Point&)>>& chars,
    bool complete_list) {
  require(!chars.empty(), "spectral_gap_abelian: empty character list");
  double lam = 0;
  for (const auto& ch : chars) {
    std::complex<double> s = 0;
    for (const Atom& a : mu.atoms()) s += a.w * ch(a.g);
    lam = std::max(lam, std::abs(s));
  }
  SpectralReport r;
  r.lambda = std::min(lam, 1.0);
  r.lyapunov = -std::log(std::max(r.lambda, 1e-300));
  r.method = complete_list ? "characters-complete" : "characters-sampled";
  r.dim = int(chars.size());
  return r;
}

SpectralReport spectral_gap_power(const Measure& mu, const Enumerated& en, int iters) {
  require(mu.symmetric(1e-12), "spectral_gap_power: measure must be symmetric");
  const int n = en.order();
  std::mt19937_64 rng(0x9e3779b9);
  std::normal_distribution<double> n01(0, 1);
  std::vector<double> v(n);
  for (double& x : v) x = n01(rng);
  auto deflate = [&](std::vector<double>& w) {
    double m = 0;
    for (double x : w) m += x;
    m /= n;
    for (double& x : w) x -= m;
  };
  auto norm = [&](const std::vector<double>& w) {
    double s = 0;
    for (double x : w) s += x * x;
    return std::sqrt(s);
  };
  deflate(v);
  AtomPerms ap = atom_perms(en, mu);
  double lam = 0;
  for (int it = 0; it < iters; ++it) {
    std::vector<double> w = apply_perms(ap, v);
    deflate(w);
    double nw = norm(w), nv = norm(v);
    if (nv < 1e-280 || nw < 1e-280) break;
    lam = nw / nv;
    double scale = 1.0 / nw;
    for (double& x : w) x *= scale;
    v = std::move(w);
  }
  SpectralReport r;
  r.lambda = std::min(lam, 1.0);
  r.lyapunov = -std::log(std::max(r.lambda, 1e-300));
  r.method = "power-iteration";
  r.dim = n - 1;
  return r;
}

std::vector<std::function<std::complex<double>(const Point&)>> cyclic_characters(int n) {
  std::vector<std::function<std::complex<double>(const Point&)>> chars;
  for (int k = 1; k < n; ++k)
    chars.push_back([k, n](const Point& g) { return std::polar(1.0, 2 * M_PI * k * g.idx / double(n)); });
  return chars;
}

// ---- scale diagnostics ----

namespace {

std::vector<std::complex<double>> ball_average(const Enumerated& en,
                                               const std::vector<std::complex<double>>& f, double r) {
  std::vector<int> ball = groups::ball_elements(en, r);
  std::vector<std::complex<double>> out(en.order(), 0.0);
  for (int x = 0; x < en.order(); ++x) {
    std::complex<double> s = 0;
    for (int u : ball) s += f[en.times(x, u)];
    out[x] = s / double(ball.size());
  }
  return out;
}

double l2norm(const std::vector<std::complex<double>>& f) {
  double s = 0;
  for (auto& v : f) s += std::norm(v);
  return std::sqrt(s / double(f.size()));  // normalized Haar
}

}  // namespace

ScaleDefects lives_at_scale(const Enumerated& en, const std::vector<std::complex<double>>& f, double eta,
                            double a) {
  require(eta > 0 && eta < 1, "lives_at_scale: eta in (0,1)");
  require(a > 0 && a < 1, "lives_at_scale: a in (0,1)");
  require(int(f.size()) == en.order(), "lives_at_scale: function size mismatch");
  double nf = l2norm(f);
  require(nf > 0, "lives_at_scale: zero function");
  ScaleDefects d;
  auto favg = ball_average(en, f, std::pow(eta, 1.0 / a));
  d.averaging_ratio = l2norm(favg) / nf;
  d.averaging_threshold = std::pow(eta, 1.0 / (2 * a));
  d.averaging_pass = d.averaging_ratio <= d.averaging_threshold + 1e-12;
  auto fsm = ball_average(en, f, std::pow(eta, a * a));
  std::vector<std::complex<double>> diff(f.size());
  for (size_t i = 0; i < f.size(); ++i) diff[i] = fsm[i] - f[i];
  d.invariance_ratio = l2norm(diff) / nf;
  d.invariance_threshold = std::pow(eta, a / 2.0);
  d.invariance_pass = d.invariance_ratio <= d.invariance_threshold + 1e-12;
  return d;
}

// ---- displacement ----

DisplacementReport displacement(const Enumerated& en, const GeneratorSet& omega,
                                const std::vector<std::complex<double>>& f, const SpectralReport* spectral) {
  require(int(f.size()) == en.order(), "displacement: function size mismatch");
  std::complex<double> mean = 0;
  for (auto& v : f) mean += v;
  mean /= double(f.size());
  require(std::abs(mean) <= 1e-9, "displacement: f must be orthogonal to constants");
  double nf = l2norm(f);
  require(nf > 0, "displacement: zero function");
  DisplacementReport rep;
  for (const Point& w : omega.elems) {
    int wi = en.find(w);
    int winv = en.invtab[wi];
    std::vector<std::complex<double>> diff(f.size());
    for (int x = 0; x < en.order(); ++x) diff[x] = f[en.times(winv, x)] - f[x];
    rep.per_generator.push_back(l2norm(diff) / nf);
  }
  rep.delta_f = *std::max_element(rep.per_generator.begin(), rep.per_generator.end());
  rep.delta_min_candidates = rep.delta_f;
  if (spectral) {
    double Lb = std::min(spectral->lyapunov, 1.0);
    double d = rep.delta_f;
    rep.c_low = Lb > 0 ? Lb * double(omega.elems.size()) / (d * d) : 0;
    rep.c_up = d > 0 ? Lb / d : 0;
    rep.has_sandwich = true;
  }
  return rep;
}

double displacement_candidate_min(const Enumerated& en, const GeneratorSet& omega, int n_random,
                                  std::mt19937_64& rng) {
  double best = std::numeric_limits<double>::infinity();
  const int n = en.order();
  bool cyclic = en.spec.kind == Kind::Finite;
  if (cyclic) {
    // verify the multiplication is x+y mod n before using character formulas
    for (int i = 0; i < n && cyclic; ++i)
      for (int j = 0; j < n && cyclic; ++j)
        if (en.spec.fin->times(i, j) != (i + j) % n) cyclic = false;
  }
  if (cyclic) {
    for (int k = 1; k < n; ++k) {
      std::vector<std::complex<double>> f(n);
      for (int x = 0; x < n; ++x) f[x] = std::polar(1.0, 2 * M_PI * k * x / double(n));
      best = std::min(best, displacement(en, omega, f).delta_f);
    }
    return best;
  }
  std::normal_distribution<double> n01(0, 1);
  for (int t = 0; t < n_random; ++t) {
    std::vector<std::complex<double>> f(n);
    std::complex<double> mean = 0;
    for (auto& v : f) {
      v = {n01(rng), n01(rng)};
      mean += v;
    }
    mean /= double(n);
    for (auto& v : f) v -= mean;
    best = std::min(best, displacement(en, omega, f).delta_f);
  }
  return best;
}

// ---- Schreier generators ----

SchreierResult schreier_generators(const Enumerated& en, const GeneratorSet& omega,
                                   const std::function<bool(int)>& in_H,
                                   const std::function<int(int)>& section) {
  const int n = en.order();
  std::vector<int> omega_ids;
  for (const Point& w : omega.elems) omega_ids.push_back(en.find(w));
  std::vector<char> in_omega(n, 0);
  for (int w : omega_ids) in_omega[w] = 1;
  std::vector<char> H(n, 0);
  for (int i = 0; i < n; ++i) H[i] = in_H(i) ? 1 : 0;
  require(H[en.find(groups::identity(en.spec))], "schreier: H must contain the identity");

  // left cosets xH; canonical representative = least element id
  std::vector<int> coset(n, -1);
  std::vector<int> reps;
  for (int x = 0; x < n; ++x) {
    if (coset[x] >= 0) continue;
    int rep = x;
    std::vector<int> members;
    for (int h = 0; h < n; ++h)
      if (H[h]) members.push_back(en.times(x, h));
    for (int m : members) rep = std::min(rep, m);
    for (int m : members) coset[m] = int(reps.size());
    reps.push_back(rep);
  }
  // validate the section: s(xH) in xH cap Omega
  for (size_t c = 0; c < reps.size(); ++c) {
    int s = section(reps[c]);
    require(s >= 0 && s < n && in_omega[s], "schreier: section value not in Omega");
    require(coset[s] == int(c), "schreier: section value not in its coset");
  }
  // validate Omega meets every coset
  {
    std::vector<char> met(reps.size(), 0);
    for (int w : omega_ids) met[coset[w]] = 1;
    for (char m : met) require(m, "schreier: Omega misses a coset of H");
  }

  std::vector<int> out_ids;
  std::vector<char> seen(n, 0);
  auto push = [&](int e) {
    if (!seen[e]) {
      seen[e] = 1;
      out_ids.push_back(e);
    }
  };
  for (int w1 : omega_ids)
    for (int w2 : omega_ids) {
      int prod = en.times(w1, w2);
      int s = section(reps[coset[prod]]);
      int e = en.times(en.invtab[s], prod);
      require(H[e], "schreier: s(w1 w2 H)^{-1} w1 w2 must lie in H");
      push(e);
      push(en.invtab[e]);
    }
  SchreierResult res;
  std::vector<Point> pts;
  for (int e : out_ids) pts.push_back(en.elements[e]);
  res.omega_H = GeneratorSet::make(en.spec, pts);
  res.n_cosets = int(reps.size());
  return res;
}

std::vector<int> word_lengths(const Enumerated& en, const std::vector<int>& gen_ids) {
  const int n = en.order();
  std::vector<int> len(n, -1);
  int id = en.find(groups::identity(en.spec));
  len[id] = 0;
  std::vector<char> cur(n, 0);
  cur[id] = 1;
  for (int k = 1; k <= 2 * n + 2; ++k) {
    std::vector<char> next(n, 0);
    bool fresh = false;
    for (int x = 0; x < n; ++x) {
      if (!cur[x]) continue;
      for (int g : gen_ids) {
        int y = en.times(x, g);
        next[y] = 1;
        if (len[y] < 0) {
          len[y] = k;
          fresh = true;
        }
      }
    }
    cur = std::move(next);
    if (!fresh && k > n) break;
  }
  return len;
}

// ---- equidistribution ----

EquidistributionReport equidistribution_check(const Enumerated& en, const Measure& mu, int ell,
                                              double eta, const std::function<bool(int)>& in_X) {
  require(mu.symmetric(1e-12), "equidistribution_check: measure must be symmetric");
  const int n = en.order();
  std::vector<double> sigma = dense_power(en, mu, ell);

  std::vector<int> ball = groups::ball_elements(en, eta);
  double mass = 0;
  long cntX = 0;
  for (int x = 0; x < n; ++x) {
    if (!in_X(x)) continue;
    ++cntX;
    double s = 0;
    for (int u : ball) s += sigma[en.times(x, en.invtab[u])];
    mass += s / double(ball.size());
  }
  double volX = double(cntX) / n;

  SpectralReport base = spectral_gap_exact(mu);
  double lam_sigma = std::pow(base.lambda, ell);

  EquidistributionReport rep;
  rep.lhs = std::fabs(mass - volX);
  rep.rhs = lam_sigma * std::sqrt(volX * double(n) / double(ball.size()));
  rep.slack = rep.rhs - rep.lhs;
  rep.holds = rep.lhs <= rep.rhs + 1e-12;
  rep.lambda_sigma = lam_sigma;
  return rep;
}

}  // namespace haarlab::walks
