#include "haarlab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "haarlab/su2.hpp"
#include "haarlab/walks.hpp"

namespace haarlab::transport {

using groups::Kind;
using groups::Point;
using groups::Spec;

namespace {

Rat rabs(const Rat& x) { return x < 0 ? Rat(-x) : x; }

Rat pow_rat(const Rat& x, int e) {
  Rat r(1);
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

}  // namespace

MarginPair::MarginPair(std::vector<Rat> s1, std::vector<Rat> s2) : sigma1(std::move(s1)), sigma2(std::move(s2)) {
  require(!sigma1.empty() && !sigma2.empty(), "margins: empty side");
  for (Rat& v : sigma1) v.canonicalize();
  for (Rat& v : sigma2) v.canonicalize();
  Rat t1(0), t2(0);
  for (const Rat& v : sigma1) {
    require(v >= 0, "margins: negative entry");
    t1 += v;
  }
  for (const Rat& v : sigma2) {
    require(v >= 0, "margins: negative entry");
    t2 += v;
  }
  require(t1 == 1 && t2 == 1, "margins: each side must sum to 1 exactly");
}

MarginPair MarginPair::uniform(int n1, int n2) {
  return MarginPair(std::vector<Rat>(n1, Rat(1, n1)), std::vector<Rat>(n2, Rat(1, n2)));
}

BipartiteSpanningTree::BipartiteSpanningTree(int n1_, int n2_, std::vector<std::pair<int, int>> e)
    : n1(n1_), n2(n2_), edges(std::move(e)) {
  require(n1 >= 1 && n2 >= 1, "tree: empty sides");
  require(int(edges.size()) == n1 + n2 - 1, "tree: must have N1+N2-1 edges");
  std::vector<std::vector<int>> adj(n1 + n2);
  std::vector<char> seen_edge(size_t(n1) * n2, 0);
  for (auto& [i, j] : edges) {
    require(i >= 0 && i < n1 && j >= 0 && j < n2, "tree: edge out of range");
    require(!seen_edge[size_t(i) * n2 + j], "tree: duplicate edge");
    seen_edge[size_t(i) * n2 + j] = 1;
    adj[i].push_back(n1 + j);
    adj[n1 + j].push_back(i);
  }
  // connectivity (an acyclic count check is implied by edge count + connectivity)
  std::vector<char> vis(n1 + n2, 0);
  std::vector<int> stack = {0};
  vis[0] = 1;
  int cnt = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int w : adj[v])
      if (!vis[w]) {
        vis[w] = 1;
        ++cnt;
        stack.push_back(w);
      }
  }
  require(cnt == n1 + n2, "tree: not connected");
}

MarginPair CouplingMatrix::margins() const {
  std::vector<Rat> s1(n1, Rat(0)), s2(n2, Rat(0));
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) {
      s1[i] += at(i, j);
      s2[j] += at(i, j);
    }
  return MarginPair(std::move(s1), std::move(s2));
}

bool CouplingMatrix::is_coupling_of(const MarginPair& m) const {
  if (m.n1() != n1 || m.n2() != n2) return false;
  if (!nonnegative()) return false;
  for (int i = 0; i < n1; ++i) {
    Rat s(0);
    for (int j = 0; j < n2; ++j) s += at(i, j);
    if (s != m.sigma1[i]) return false;
  }
  for (int j = 0; j < n2; ++j) {
    Rat s(0);
    for (int i = 0; i < n1; ++i) s += at(i, j);
    if (s != m.sigma2[j]) return false;
  }
  return true;
}

bool CouplingMatrix::nonnegative() const {
  for (const Rat& v : a)
    if (v < 0) return false;
  return true;
}

CouplingMatrix tree_measure(const BipartiteSpanningTree& tau, const MarginPair& m) {
  require(tau.n1 == m.n1() && tau.n2 == m.n2(), "tree_measure: dimension mismatch");
  const int n1 = tau.n1, n2 = tau.n2, N = n1 + n2;
  std::vector<std::vector<int>> adj(N);
  for (size_t e = 0; e < tau.edges.size(); ++e) {
    auto [i, j] = tau.edges[e];
    adj[i].push_back(n1 + j);
    adj[n1 + j].push_back(i);
  }
  CouplingMatrix M(n1, n2);
  for (auto& [i, j] : tau.edges) {
    // component of the row node i in tau minus this edge
    std::vector<char> vis(N, 0);
    std::vector<int> stack = {i};
    vis[i] = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int w : adj[v]) {
        if ((v == i && w == n1 + j) || (v == n1 + j && w == i)) continue;  // removed edge
        if (!vis[w]) {
          vis[w] = 1;
          stack.push_back(w);
        }
      }
    }
    Rat val(0);
    for (int r = 0; r < n1; ++r)
      if (vis[r]) val += m.sigma1[r];
    for (int c = 0; c < n2; ++c)
      if (vis[n1 + c]) val -= m.sigma2[c];
    M.at(i, j) = val;
  }
  return M;  // non-edges stay exactly 0: removing them leaves tau connected
}

bool is_admissible(const BipartiteSpanningTree& tau, const MarginPair& m, const Rat& eps) {
  CouplingMatrix M = tree_measure(tau, m);
  for (const Rat& v : M.a)
    if (v < -eps) return false;
  return true;
}

// ---- decomposition ----

namespace {

// cancel cycles in the support of C (margins preserved) until the support is
// a forest; returns the resulting vertex and a spanning-tree extension
CouplingMatrix cancel_to_vertex(CouplingMatrix C, BipartiteSpanningTree* tree_out) {
  const int n1 = C.n1, n2 = C.n2, N = n1 + n2;
  for (;;) {
    // support adjacency
    std::vector<std::vector<std::pair<int, int>>> adj(N);  // (neighbor, edge flat id)
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n2; ++j)
        if (C.at(i, j) != 0) {
          adj[i].push_back({n1 + j, i * n2 + j});
          adj[n1 + j].push_back({i, i * n2 + j});
        }
    // find a cycle by DFS
    std::vector<int> parent(N, -2), parent_edge(N, -1);
    std::vector<int> cyc_edges;
    for (int root = 0; root < N && cyc_edges.empty(); ++root) {
      if (parent[root] != -2) continue;
      std::vector<int> stack = {root};
      parent[root] = -1;
      while (!stack.empty() && cyc_edges.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (auto [w, eid] : adj[v]) {
          if (eid == parent_edge[v]) continue;
          if (parent[w] == -2) {
            parent[w] = v;
            parent_edge[w] = eid;
            stack.push_back(w);
          } else if (eid == parent_edge[w]) {
            continue;  // tree edge to an already-pushed child
          } else {
            // found a cycle; emit its edges in cyclic order so that the
            // +/- alternation below respects shared endpoints:
            //   v -(eid)-> w -> ... -> meet -> ... -> v
            std::vector<char> onv(N, 0);
            for (int x = v; x != -1; x = parent[x]) onv[x] = 1;
            int meet = w;
            while (!onv[meet]) meet = parent[meet];
            std::vector<int> edges = {eid};
            for (int x = w; x != meet; x = parent[x]) edges.push_back(parent_edge[x]);
            std::vector<int> back;
            for (int x = v; x != meet; x = parent[x]) back.push_back(parent_edge[x]);
            std::reverse(back.begin(), back.end());
            for (int e : back) edges.push_back(e);
            cyc_edges = edges;
            break;
          }
        }
      }
    }
    if (cyc_edges.empty()) break;
    // alternate +/- around the cycle; orient so the lexicographically
    // smallest edge carries '-'
    int arg = 0;
    for (size_t t = 1; t < cyc_edges.size(); ++t)
      if (cyc_edges[t] < cyc_edges[arg]) arg = int(t);
    int offset = (arg % 2 == 0) ? 1 : 0;  // '-' on positions with parity of arg
    Rat t = -1;
    for (size_t q = 0; q < cyc_edges.size(); ++q) {
      if (int(q % 2) != (arg % 2)) continue;
      const Rat& val = C.a[cyc_edges[q]];
      if (t < 0 || val < t) t = val;
    }
    (void)offset;
    for (size_t q = 0; q < cyc_edges.size(); ++q) {
      if (int(q % 2) == (arg % 2))
        C.a[cyc_edges[q]] -= t;
      else
        C.a[cyc_edges[q]] += t;
    }
  }
  if (tree_out) {
    // extend the support forest to a spanning tree, lexicographic fill
    std::vector<int> uf(N);
    std::iota(uf.begin(), uf.end(), 0);
    std::function<int(int)> find = [&](int x) { return uf[x] == x ? x : uf[x] = find(uf[x]); };
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n2; ++j)
        if (C.at(i, j) != 0) {
          int a = find(i), b = find(n1 + j);
          if (a != b) {
            uf[a] = b;
            edges.push_back({i, j});
          }
        }
    for (int i = 0; i < n1 && int(edges.size()) < n1 + n2 - 1; ++i)
      for (int j = 0; j < n2 && int(edges.size()) < n1 + n2 - 1; ++j) {
        int a = find(i), b = find(n1 + j);
        if (a != b) {
          uf[a] = b;
          edges.push_back({i, j});
        }
      }
    *tree_out = BipartiteSpanningTree(n1, n2, std::move(edges));
  }
  return C;
}

}  // namespace

Decomposition decompose(const CouplingMatrix& sigma_in) {
  CouplingMatrix sigma = sigma_in;
  for (Rat& v : sigma.a) v.canonicalize();
  require(sigma.nonnegative(), "decompose: input must be nonnegative");
  Rat total(0);
  for (const Rat& v : sigma.a) total += v;
  require(total == 1, "decompose: input must have total mass 1");
  MarginPair m = sigma.margins();

  Decomposition out;
  CouplingMatrix R = sigma;
  Rat w(1);
  for (int guard = 0; guard <= sigma.n1 * sigma.n2 + 2; ++guard) {
    CouplingMatrix C(R.n1, R.n2);
    for (size_t t = 0; t < R.a.size(); ++t) C.a[t] = R.a[t] / w;
    BipartiteSpanningTree tree(1, 1, {{0, 0}});
    CouplingMatrix V = cancel_to_vertex(C, &tree);
    require(V.is_coupling_of(m), "decompose: internal vertex lost the margins");
    bool same = true;
    for (size_t t = 0; t < C.a.size(); ++t)
      if (C.a[t] != V.a[t]) {
        same = false;
        break;
      }
    if (same) {
      out.weights.push_back(w);
      out.trees.push_back(tree);
      break;
    }
    Rat c(-1);
    for (size_t t = 0; t < V.a.size(); ++t) {
      if (V.a[t] == 0) continue;
      Rat ratio = C.a[t] / V.a[t];
      if (c < 0 || ratio < c) c = ratio;
    }
    require(c > 0 && c < 1, "decompose: internal peel weight out of range");
    out.weights.push_back(w * c);
    out.trees.push_back(tree);
    for (size_t t = 0; t < R.a.size(); ++t) R.a[t] = R.a[t] - w * c * V.a[t];
    w = w * (1 - c);
  }
  Rat s(0);
  for (const Rat& v : out.weights) s += v;
  require(s == 1, "decompose: weights failed to sum to 1");
  return out;
}

CouplingMatrix reconstruct(const Decomposition& d, const MarginPair& m) {
  require(d.terms() > 0, "reconstruct: empty decomposition");
  CouplingMatrix out(m.n1(), m.n2());
  for (int t = 0; t < d.terms(); ++t) {
    CouplingMatrix M = tree_measure(d.trees[t], m);
    for (size_t q = 0; q < out.a.size(); ++q) out.a[q] += d.weights[t] * M.a[q];
  }
  return out;
}

CorrectionResult correct_coupling(const CouplingMatrix& mu_in, int A) {
  require(A > 2, "correct_coupling: requires A > 2");
  CouplingMatrix mu_tilde = mu_in;
  for (Rat& v : mu_tilde.a) v.canonicalize();
  const int n1 = mu_tilde.n1, n2 = mu_tilde.n2;
  MarginPair m = mu_tilde.margins();
  Rat thresh = pow_rat(Rat(1, long(n1) * n2), A);
  for (int i = 0; i < n1; ++i)
    require(rabs(m.sigma1[i] - Rat(1, n1)) <= thresh,
            "correct_coupling: first margin deviates beyond (N1 N2)^-A");
  for (int j = 0; j < n2; ++j)
    require(rabs(m.sigma2[j] - Rat(1, n2)) <= thresh,
            "correct_coupling: second margin deviates beyond (N1 N2)^-A");

  Decomposition d = decompose(mu_tilde);
  MarginPair uni = MarginPair::uniform(n1, n2);
  CorrectionResult res;
  res.nu = CouplingMatrix(n1, n2);
  for (int t = 0; t < d.terms(); ++t) {
    CouplingMatrix M = tree_measure(d.trees[t], uni);
    // the polytope inclusion T(mu1, mu2) subset T(m, m), tree by tree
    require(M.nonnegative(), "correct_coupling: swapped tree measure went negative");
    for (size_t q = 0; q < res.nu.a.size(); ++q) res.nu.a[q] += d.weights[t] * M.a[q];
  }
  require(res.nu.is_coupling_of(uni), "correct_coupling: output is not an exact coupling of uniforms");
  res.terms = d.terms();
  res.max_abs_diff = 0;
  for (size_t q = 0; q < res.nu.a.size(); ++q)
    res.max_abs_diff = std::max(res.max_abs_diff, rabs(mu_tilde.a[q] - res.nu.a[q]));
  res.bound = pow_rat(Rat(1, long(n1) * n2), A - 1);
  res.within_bound = res.max_abs_diff <= res.bound;
  return res;
}

// ---- discretization ----

namespace {

struct Su2Band {
  double phi_lo = 0, phi_hi = 0;
  int base = 0;                       // first cell index of the band
  int n_cells = 1;
  std::vector<double> costh_bounds;   // strip boundaries in cos(theta), descending
  std::vector<int> strip_base;        // cell offset per strip
  std::vector<int> sectors;           // sectors per strip
};

double su2_cdf(double phi) { return (2.0 / M_PI) * (phi / 2.0 - std::sin(2 * phi) / 4.0); }

double su2_cdf_inv(double t) {
  double lo = 0, hi = M_PI;
  for (int i = 0; i < 80; ++i) {
    double mid = 0.5 * (lo + hi);
    (su2_cdf(mid) < t ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

Discretization discretize(const Spec& s, double delta) {
  require(delta > 0 && delta < 1.0001, "discretize: delta in (0, 1]");
  Discretization d;
  d.spec = s;
  d.delta = delta;
  switch (s.kind) {
    case Kind::PAdicSpecialLinear: {
      require(s.n == 2, "discretize: p-adic cells implemented for SL_2");
      int l = int(std::lround(-std::log(delta) / std::log(double(s.p))));
      require(l >= 1 && l <= s.K, "discretize: delta must be p^-l with 1 <= l <= K");
      require(std::fabs(std::pow(double(s.p), -l) - delta) < 1e-9, "discretize: delta must be a power of 1/p");
      auto reps = padic::enumerate_sl2_mod_pl(s.p, l, s.K);
      auto index = std::make_shared<std::unordered_map<std::string, int>>();
      for (size_t i = 0; i < reps.size(); ++i) (*index)[reps[i].reduced(l).key()] = int(i);
      d.cells = int(reps.size());
      for (auto& m : reps) d.reps.push_back(Point::padic(m));
      d.exact = true;
      int ll = l;
      d.cell_of = [index, ll](const Point& g) {
        auto it = index->find(g.pm.reduced(ll).key());
        require(it != index->end(), "discretize: point outside the enumerated group");
        return it->second;
      };
      return d;
    }
    case Kind::Finite: {
      auto fin = s.fin;
      const int n = fin->order;
      std::vector<int> ball;
      for (int u = 0; u < n; ++u) {
        double du = (u == 0) ? 0.0 : (fin->dist0.empty() ? 1.0 : fin->dist0[u]);
        if (du <= delta) ball.push_back(u);
      }
      for (int u : ball)
        for (int v : ball) {
          int w = fin->times(u, v);
          double dw = (w == 0) ? 0.0 : (fin->dist0.empty() ? 1.0 : fin->dist0[w]);
          require(dw <= delta, "discretize: the delta-ball is not a subgroup");
        }
      // left cosets xB, canonical representative = least index
      auto canon = std::make_shared<std::vector<int>>(n, -1);
      std::vector<int> repidx;
      std::unordered_map<int, int> cell_id;
      for (int x = 0; x < n; ++x) {
        int rep = x;
        for (int u : ball) rep = std::min(rep, fin->times(x, u));
        (*canon)[x] = rep;
      }
      for (int x = 0; x < n; ++x)
        if ((*canon)[x] == x) {
          cell_id[x] = int(repidx.size());
          repidx.push_back(x);
        }
      auto idmap = std::make_shared<std::unordered_map<int, int>>(std::move(cell_id));
      d.cells = int(repidx.size());
      for (int r : repidx) d.reps.push_back(Point::finite(r));
      d.exact = true;
      d.cell_of = [canon, idmap](const Point& g) { return idmap->at((*canon)[g.idx]); };
      return d;
    }
    case Kind::Circle: {
      int N = int(std::ceil(1.0 / delta - 1e-12));
      d.cells = N;
      d.exact = true;
      // each arc has length 1/N <= delta and contains the ball of radius
      // delta^2 around its midpoint as long as 1/(2N) >= delta^2
      require(1.0 / (2 * N) >= delta * delta - 1e-15, "discretize: circle arcs too thin for the delta^2 ball");
      d.cell_of = [N](const Point& g) { return std::min(N - 1, int(std::floor(g.x * N))); };
      for (int k = 0; k < N; ++k) d.reps.push_back(Point::circle((k + 0.5) / N));
      return d;
    }
    case Kind::SpecialUnitary: {
      require(s.n == 2, "discretize: real cells implemented for SU(2)");
      require(delta <= 0.6 && delta >= 0.02, "discretize: SU(2) construction needs delta in [0.02, 0.6]");
      // cell measure sized well below the polar-cap measure so that the
      // band/strip/sector chords each stay near delta/3
      double capm = su2_cdf(std::asin(std::min(1.0, delta / 2.0)));
      int N = int(std::ceil(22.0 / capm));
      double v = 1.0 / N;
      auto bands = std::make_shared<std::vector<Su2Band>>();
      int used = 0;
      double philo = 0;
      while (used < N) {
        Su2Band b;
        b.phi_lo = philo;
        b.base = used;
        if (used == 0 || used == N - 1) {
          b.n_cells = 1;
        } else {
          double phiprop = std::min(philo + delta / 3.5, M_PI);
          int n_b = std::max(1, int(std::floor((su2_cdf(phiprop) - su2_cdf(philo)) / v)));
          n_b = std::min(n_b, N - 1 - used);  // reserve the final cap
          b.n_cells = n_b;
        }
        b.phi_hi = (used + b.n_cells >= N) ? M_PI : su2_cdf_inv((used + b.n_cells) * v);
        if (b.n_cells > 1) {
          // split the band's axis sphere: strips in cos(theta), then sectors
          double sphi = (b.phi_lo <= M_PI / 2 && b.phi_hi >= M_PI / 2)
                            ? 1.0
                            : std::max(std::sin(b.phi_lo), std::sin(b.phi_hi));
          sphi = std::max(sphi, 1e-6);
          int m = std::max(1, int(std::ceil(3.5 * M_PI * sphi / delta)));
          m = std::min(m, b.n_cells);
          // distribute cells to strips proportionally to equal measure; the
          // polar strips of the axis sphere stay single caps (azimuthal
          // splitting cannot shrink a polar cap's diameter)
          std::vector<int> per(m, 0);
          int assigned = 0;
          for (int q = 0; q < m; ++q) {
            per[q] = std::max(1, int(std::lround(double(b.n_cells) * (q + 1) / m)) - assigned);
            assigned += per[q];
          }
          while (assigned > b.n_cells) {
            for (int q = m - 1; q >= 0 && assigned > b.n_cells; --q)
              if (per[q] > 1) {
                --per[q];
                --assigned;
              }
          }
          while (assigned < b.n_cells) {
            ++per[m / 2];
            ++assigned;
          }
          if (m >= 3) {
            int moved = per[0] - 1 + per[m - 1] - 1;
            per[0] = per[m - 1] = 1;
            for (int q = 0; q < moved; ++q) ++per[1 + q % (m - 2)];
          }
          b.costh_bounds.push_back(1.0);
          int cum = 0, off = 0;
          for (int q = 0; q < m; ++q) {
            b.strip_base.push_back(off);
            b.sectors.push_back(per[q]);
            off += per[q];
            cum += per[q];
            b.costh_bounds.push_back(1.0 - 2.0 * double(cum) / b.n_cells);
          }
        }
        used += b.n_cells;
        philo = b.phi_hi;
        bands->push_back(std::move(b));
      }
      d.cells = N;
      d.exact = false;
      d.ball_relaxed = true;
      d.cell_of = [bands](const Point& g) {
        su2::Quat q = su2::to_quat(g.u);
        double w = std::clamp(q[0], -1.0, 1.0);
        double phi = std::acos(w);
        int lo = 0, hi = int(bands->size()) - 1;
        while (lo < hi) {
          int mid = (lo + hi) / 2;
          if (phi < (*bands)[mid].phi_hi)
            hi = mid;
          else
            lo = mid + 1;
        }
        const Su2Band& b = (*bands)[lo];
        if (b.n_cells == 1) return b.base;
        double vn = std::sqrt(q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
        double ax = vn < 1e-14 ? 0.0 : q[1] / vn, ay = vn < 1e-14 ? 0.0 : q[2] / vn,
               az = vn < 1e-14 ? 1.0 : q[3] / vn;
        double ct = std::clamp(az, -1.0, 1.0);
        int strip = 0;
        while (strip + 1 < int(b.sectors.size()) && ct < b.costh_bounds[strip + 1]) ++strip;
        double azim = std::atan2(ay, ax);
        if (azim < 0) azim += 2 * M_PI;
        int k = b.sectors[strip];
        int sec = std::min(k - 1, int(std::floor(azim / (2 * M_PI / k))));
        return b.base + b.strip_base[strip] + sec;
      };
      // representatives: band/strip/sector midpoints
      for (const Su2Band& b : *bands) {
        double phim = 0.5 * (b.phi_lo + b.phi_hi);
        if (b.n_cells == 1) {
          double phi = b.phi_lo == 0 ? 0.5 * b.phi_hi : 0.5 * (b.phi_lo + M_PI);
          su2::Quat q(std::cos(phi), 0, 0, std::sin(phi));
          d.reps.push_back(Point::unitary(su2::from_quat(q)));
          continue;
        }
        for (size_t st = 0; st < b.sectors.size(); ++st) {
          double cthi = b.costh_bounds[st], ctlo = b.costh_bounds[st + 1];
          double ct = 0.5 * (cthi + ctlo);
          double sth = std::sqrt(std::max(0.0, 1 - ct * ct));
          for (int sec = 0; sec < b.sectors[st]; ++sec) {
            double azim = (sec + 0.5) * 2 * M_PI / b.sectors[st];
            double sp = std::sin(phim);
            su2::Quat q(std::cos(phim), sp * sth * std::cos(azim), sp * sth * std::sin(azim), sp * ct);
            d.reps.push_back(Point::unitary(su2::from_quat(q)));
          }
        }
      }
      return d;
    }
    default:
      throw precondition_error("discretize: unsupported spec");
  }
}

// ---- pipeline ----

namespace {

struct ExactDist {
  std::vector<mpz_class> num;
  mpz_class den = 1;
  Rat mass(const std::vector<int>& ids) const {
    mpz_class s = 0;
    for (int i : ids) s += num[i];
    Rat r(s, den);
    r.canonicalize();
    return r;
  }
};

ExactDist exact_power(const groups::Enumerated& en, const std::vector<std::pair<int, mpz_class>>& atoms,
                      const mpz_class& atom_den, int ell) {
  // resolve the atom left-multiplication permutations once
  std::vector<std::vector<int>> perms;
  std::vector<mpz_class> coef;
  for (auto& [g, n] : atoms) {
    std::vector<int> p(en.order());
    for (int x = 0; x < en.order(); ++x) p[x] = en.times(g, x);
    perms.push_back(std::move(p));
    coef.push_back(n);
  }
  ExactDist d;
  d.num.assign(en.order(), 0);
  d.num[en.find(groups::identity(en.spec))] = 1;
  d.den = 1;
  for (int step = 0; step < ell; ++step) {
    std::vector<mpz_class> next(en.order(), 0);
    for (size_t a = 0; a < perms.size(); ++a)
      for (int x = 0; x < en.order(); ++x)
        if (d.num[x] != 0) next[perms[a][x]] += coef[a] * d.num[x];
    d.num = std::move(next);
    d.den *= atom_den;
  }
  return d;
}

}  // namespace

PipelineResult symmetric_coupling_pipeline(const Spec& prod, const std::vector<ExactAtom>& mu_in,
                                           const PipelineOptions& opt) {
  require(prod.kind == Kind::Product, "pipeline: spec must be a product");
  PipelineResult res;
  res.ell_used = opt.ell;

  // validate the measure: probability, exact symmetry
  std::vector<ExactAtom> mu = mu_in;
  for (ExactAtom& a : mu) a.w.canonicalize();
  Rat tot(0);
  for (const ExactAtom& a : mu) {
    require(a.w >= 0, "pipeline: negative weight");
    tot += a.w;
  }
  require(tot == 1, "pipeline: weights must sum to 1 exactly");
  {
    std::unordered_map<std::string, Rat> by_key;
    for (const ExactAtom& a : mu) by_key[groups::point_key(prod, a.g)] += a.w;
    for (const ExactAtom& a : mu) {
      auto it = by_key.find(groups::point_key(prod, groups::inv(prod, a.g)));
      require(it != by_key.end() && it->second == by_key[groups::point_key(prod, a.g)],
              "pipeline: measure must be symmetric");
    }
  }

  Discretization d1 = discretize(*prod.left, opt.delta1);
  Discretization d2 = discretize(*prod.right, opt.delta2);
  require(d1.exact && d2.exact, "pipeline: needs exact coset discretizations");
  res.N1 = d1.cells;
  res.N2 = d2.cells;

  // marginal atoms
  std::unordered_map<std::string, int> seen1, seen2;
  std::vector<ExactAtom> m1, m2;
  for (const ExactAtom& a : mu) {
    std::string k1 = groups::point_key(*prod.left, *a.g.a);
    std::string k2 = groups::point_key(*prod.right, *a.g.b);
    auto i1 = seen1.find(k1);
    if (i1 == seen1.end()) {
      seen1[k1] = int(m1.size());
      m1.push_back({*a.g.a, a.w});
    } else
      m1[i1->second].w += a.w;
    auto i2 = seen2.find(k2);
    if (i2 == seen2.end()) {
      seen2[k2] = int(m2.size());
      m2.push_back({*a.g.b, a.w});
    } else
      m2[i2->second].w += a.w;
  }

  // cell masses of mu^(ell); convolving with P_rho at or below the cell
  // scale leaves coset-cell masses unchanged, so the masses below are the
  // masses of the smoothed walk as well
  CouplingMatrix mt(res.N1, res.N2);
  bool product_measure = int(mu.size()) == int(m1.size()) * int(m2.size());
  if (product_measure) {
    for (const ExactAtom& a : mu) {
      Rat w1 = m1[seen1[groups::point_key(*prod.left, *a.g.a)]].w;
      Rat w2 = m2[seen2[groups::point_key(*prod.right, *a.g.b)]].w;
      if (a.w != w1 * w2) {
        product_measure = false;
        break;
      }
    }
  }

  auto to_int_atoms = [](const groups::Enumerated& en, const std::vector<ExactAtom>& atoms, mpz_class* den) {
    mpz_class common = 1;
    for (const ExactAtom& a : atoms) {
      mpz_class q = a.w.get_den();
      mpz_class g;
      mpz_gcd(g.get_mpz_t(), common.get_mpz_t(), q.get_mpz_t());
      common = common / g * q;
    }
    std::vector<std::pair<int, mpz_class>> out;
    for (const ExactAtom& a : atoms)
      out.push_back({en.find(a.g), mpz_class(a.w.get_num() * (common / a.w.get_den()))});
    *den = common;
    return out;
  };

  if (product_measure) {
    groups::Enumerated e1 = groups::enumerate_group(*prod.left, 2000000, 1);
    groups::Enumerated e2 = groups::enumerate_group(*prod.right, 2000000, 1);
    mpz_class den1, den2;
    auto a1 = to_int_atoms(e1, m1, &den1);
    auto a2 = to_int_atoms(e2, m2, &den2);
    ExactDist s1 = exact_power(e1, a1, den1, opt.ell);
    ExactDist s2 = exact_power(e2, a2, den2, opt.ell);
    std::vector<std::vector<int>> cells1(res.N1), cells2(res.N2);
    for (int x = 0; x < e1.order(); ++x) cells1[d1.cell_of(e1.elements[x])].push_back(x);
    for (int x = 0; x < e2.order(); ++x) cells2[d2.cell_of(e2.elements[x])].push_back(x);
    std::vector<Rat> c1(res.N1), c2(res.N2);
    for (int j = 0; j < res.N1; ++j) c1[j] = s1.mass(cells1[j]);
    for (int k = 0; k < res.N2; ++k) c2[k] = s2.mass(cells2[k]);
    for (int j = 0; j < res.N1; ++j)
      for (int k = 0; k < res.N2; ++k) mt.at(j, k) = c1[j] * c2[k];
  } else {
    groups::Enumerated en = groups::enumerate_group(prod, opt.joint_dense_cap, 1);
    mpz_class den;
    auto ia = to_int_atoms(en, mu, &den);
    ExactDist s = exact_power(en, ia, den, opt.ell);
    std::vector<std::vector<int>> cells(size_t(res.N1) * res.N2);
    for (int x = 0; x < en.order(); ++x) {
      int j = d1.cell_of(*en.elements[x].a);
      int k = d2.cell_of(*en.elements[x].b);
      cells[size_t(j) * res.N2 + k].push_back(x);
    }
    for (int j = 0; j < res.N1; ++j)
      for (int k = 0; k < res.N2; ++k) mt.at(j, k) = s.mass(cells[size_t(j) * res.N2 + k]);
  }

  // margin precondition of the repair step
  MarginPair m = mt.margins();
  res.margin_threshold = pow_rat(Rat(1, long(res.N1) * res.N2), opt.A);
  res.margin_dev1 = 0;
  res.margin_dev2 = 0;
  for (int j = 0; j < res.N1; ++j) res.margin_dev1 = std::max(res.margin_dev1, rabs(m.sigma1[j] - Rat(1, res.N1)));
  for (int k = 0; k < res.N2; ++k) res.margin_dev2 = std::max(res.margin_dev2, rabs(m.sigma2[k] - Rat(1, res.N2)));

  // spectral estimates for the required-ell report
  {
    walks::Measure w1(*prod.left, [&] {
      std::vector<walks::Atom> v;
      for (const ExactAtom& a : m1) v.push_back({a.g, a.w.get_d()});
      return v;
    }());
    walks::Measure w2(*prod.right, [&] {
      std::vector<walks::Atom> v;
      for (const ExactAtom& a : m2) v.push_back({a.g, a.w.get_d()});
      return v;
    }());
    groups::Enumerated e1 = groups::enumerate_group(*prod.left, 2000000, 1);
    groups::Enumerated e2 = groups::enumerate_group(*prod.right, 2000000, 1);
    res.lambda1_est = walks::spectral_gap_power(w1, e1).lambda;
    res.lambda2_est = walks::spectral_gap_power(w2, e2).lambda;
    double thr = res.margin_threshold.get_d();
    auto req = [&](double lam, double order, double cells) {
      if (lam <= 0 || lam >= 1) return long(-1);
      return long(std::ceil((std::log(thr) - 0.5 * std::log(order / cells)) / std::log(lam)));
    };
    res.required_ell_estimate =
        std::max(req(res.lambda1_est, double(e1.order()), res.N1), req(res.lambda2_est, double(e2.order()), res.N2));
  }

  if (res.margin_dev1 > res.margin_threshold || res.margin_dev2 > res.margin_threshold) {
    res.ok = false;
    res.failure = "marginal deviation exceeds (N1 N2)^-A: ell too small";
    return res;
  }

  CorrectionResult corr = correct_coupling(mt, opt.A);
  res.decomposition_terms = corr.terms;
  res.cell_bound = corr.bound;

  // symmetrize through the cell-inversion permutation
  std::vector<int> inv1(res.N1), inv2(res.N2);
  for (int j = 0; j < res.N1; ++j) inv1[j] = d1.cell_of(groups::inv(*prod.left, d1.reps[j]));
  for (int k = 0; k < res.N2; ++k) inv2[k] = d2.cell_of(groups::inv(*prod.right, d2.reps[k]));
  for (int j = 0; j < res.N1; ++j) require(inv1[inv1[j]] == j, "pipeline: cell inversion is not an involution");
  for (int k = 0; k < res.N2; ++k) require(inv2[inv2[k]] == k, "pipeline: cell inversion is not an involution");
  res.nu.assign(size_t(res.N1) * res.N2, Rat(0));
  for (int j = 0; j < res.N1; ++j)
    for (int k = 0; k < res.N2; ++k)
      res.nu[size_t(j) * res.N2 + k] = (corr.nu.at(j, k) + corr.nu.at(inv1[j], inv2[k])) / 2;

  // exactness and symmetry certificates
  res.exact_coupling = true;
  for (int j = 0; j < res.N1; ++j) {
    Rat s(0);
    for (int k = 0; k < res.N2; ++k) s += res.nu[size_t(j) * res.N2 + k];
    if (s != Rat(1, res.N1)) res.exact_coupling = false;
  }
  for (int k = 0; k < res.N2; ++k) {
    Rat s(0);
    for (int j = 0; j < res.N1; ++j) s += res.nu[size_t(j) * res.N2 + k];
    if (s != Rat(1, res.N2)) res.exact_coupling = false;
  }
  res.symmetric = true;
  for (int j = 0; j < res.N1 && res.symmetric; ++j)
    for (int k = 0; k < res.N2; ++k)
      if (res.nu[size_t(j) * res.N2 + k] != res.nu[size_t(inv1[j]) * res.N2 + inv2[k]]) {
        res.symmetric = false;
        break;
      }

  // distance to the walk on the cell-indicator test family
  res.max_cell_diff = 0;
  for (int j = 0; j < res.N1; ++j)
    for (int k = 0; k < res.N2; ++k)
      res.max_cell_diff = std::max(res.max_cell_diff, rabs(mt.at(j, k) - res.nu[size_t(j) * res.N2 + k]));
  res.ok = true;
  return res;
}

}  // namespace haarlab::transport
