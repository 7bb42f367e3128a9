#include "haarlab/numerics.hpp"

#include <cmath>

namespace haarlab::num {

using padic::u128;

double sigma_real(const Eigen::MatrixXd& A) {
  require(A.rows() <= A.cols(), "sigma_real: requires m <= n");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  return svd.singularValues()(A.rows() - 1);
}

SigmaPadic sigma_padic(std::uint64_t p, int K, int rows, int cols, const std::vector<u128>& a) {
  require(rows <= cols, "sigma_padic: requires rows <= cols");
  auto sf = padic::smith_form(p, K, rows, cols, a, false);
  SigmaPadic out;
  for (int i = 0; i < rows; ++i) {
    int dv = sf.divisor_valuations[i];
    if (dv >= K) {
      out.rank_deficient = true;
      out.valuation = K;
      return out;
    }
    out.valuation = std::max(out.valuation, dv);
  }
  return out;
}

void SmoothMapProbe::validate() const {
  require(m <= n, "smooth map probe: m <= n required");
  require(alpha >= 0 && r0 > 0, "smooth map probe: bad alpha or r0");
  Eigen::MatrixXd J = jacobian(x0);
  require(J.rows() == m && J.cols() == n, "smooth map probe: jacobian dimensions");
  const double h = 1e-6;
  double scale = std::max(1.0, J.cwiseAbs().maxCoeff());
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e[j] = h;
    Eigen::VectorXd fd = (phi(x0 + e) - phi(x0 - e)) / (2 * h);
    require((fd - J.col(j)).cwiseAbs().maxCoeff() <= 1e-6 * scale + 1e-9,
            "smooth map probe: jacobian oracle disagrees with finite differences");
  }
}

IFTResult solve_real_ift(const SmoothMapProbe& probe, const Eigen::VectorXd& y, double r) {
  IFTResult res;
  Eigen::MatrixXd J0 = probe.jacobian(probe.x0);
  res.sigma0 = sigma_real(J0);
  require(res.sigma0 > 0, "solve_real_ift: sigma(dPhi(x0)) must be positive");
  double rmax = std::min(res.sigma0 / (2.0 * probe.m * probe.n * std::sqrt(std::max(probe.alpha, 1e-300))),
                         probe.r0);
  require(r > 0 && r < rmax, "solve_real_ift: r must satisfy r < min(sigma0/(2mn sqrt(alpha)), r0)");
  Eigen::VectorXd f0 = probe.phi(probe.x0);
  require((y - f0).norm() <= res.sigma0 * r / 4.0,
          "solve_real_ift: target outside the guaranteed ball sigma0 r/4");

  // SVD slice: search over x0 + L v with L = first m right singular vectors
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(J0, Eigen::ComputeFullV);
  Eigen::MatrixXd L = svd.matrixV().leftCols(probe.m);

  Eigen::VectorXd v = Eigen::VectorXd::Zero(probe.m);
  auto F = [&](const Eigen::VectorXd& w) { return Eigen::VectorXd(probe.phi(probe.x0 + L * w) - y); };
  Eigen::VectorXd resid = F(v);
  double f = resid.squaredNorm();
  const double tol = 1e-10;
  for (int it = 0; it < 600 && resid.norm() > tol; ++it) {
    Eigen::MatrixXd JL = probe.jacobian(probe.x0 + L * v) * L;
    Eigen::VectorXd step;
    bool newton = resid.norm() < 1e-3;
    double grad_sq = 0;
    if (newton) {
      step = JL.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(-resid);
    } else {
      Eigen::VectorXd grad = 2.0 * JL.transpose() * resid;
      grad_sq = grad.squaredNorm();
      step = -grad;
      double glen = step.norm();
      if (glen > r / 4) step *= (r / 4) / glen;  // keep steps inside the ball scale
    }
    double t = 1.0;
    bool moved = false;
    for (int half = 0; half < 50; ++half) {
      Eigen::VectorXd vn = v + t * step;
      if (vn.norm() > r) vn *= r / vn.norm();  // the theorem puts the minimum inside
      Eigen::VectorXd rn = F(vn);
      // Armijo sufficient decrease along the descent direction; plain
      // decrease suffices for the Newton branch
      double need = newton ? f : f - 0.3 * t * grad_sq * std::min(1.0, (r / 4) / std::sqrt(std::max(grad_sq, 1e-300)));
      if (rn.squaredNorm() < need) {
        v = vn;
        resid = rn;
        f = rn.squaredNorm();
        moved = true;
        break;
      }
      t /= 2;
    }
    res.iterations = it + 1;
    if (!moved) break;
  }
  res.x = probe.x0 + L * v;
  res.residual = resid.norm();
  res.ok = res.residual <= tol;
  if (!res.ok) {
    res.why = "solver stalled at residual " + std::to_string(res.residual);
    res.theorem_alarm = true;  // preconditions were certified above
  }
  return res;
}

// ---- p-adic polynomial maps ----

std::vector<u128> PAdicPolyMap::eval(const std::vector<u128>& x) const {
  const u128 pK = padic::ipow(p, K);
  auto mulm = [&](u128 a, u128 b) { return (padic::Scalar(p, K, a) * padic::Scalar(p, K, b)).value(); };
  std::vector<u128> out(m, 0);
  for (const Term& t : terms) {
    u128 mono = 1;
    for (int j = 0; j < n; ++j) {
      u128 d = (x[j] + pK - x0[j]) % pK;
      for (int e = 0; e < t.exponents[j]; ++e) mono = mulm(mono, d);
    }
    for (int i = 0; i < m; ++i) out[i] = (out[i] + mulm(t.coeff[i], mono)) % pK;
  }
  return out;
}

std::vector<u128> PAdicPolyMap::jacobian(const std::vector<u128>& x) const {
  const u128 pK = padic::ipow(p, K);
  auto mulm = [&](u128 a, u128 b) { return (padic::Scalar(p, K, a) * padic::Scalar(p, K, b)).value(); };
  std::vector<u128> J(size_t(m) * n, 0);
  for (const Term& t : terms) {
    for (int j = 0; j < n; ++j) {
      if (t.exponents[j] == 0) continue;
      u128 mono = u128(t.exponents[j]) % pK;
      for (int q = 0; q < n; ++q) {
        u128 d = (x[q] + pK - x0[q]) % pK;
        int e = t.exponents[q] - (q == j ? 1 : 0);
        for (int w = 0; w < e; ++w) mono = mulm(mono, d);
      }
      for (int i = 0; i < m; ++i)
        J[size_t(i) * n + j] = (J[size_t(i) * n + j] + mulm(t.coeff[i], mono)) % pK;
    }
  }
  return J;
}

PAdicIFTResult solve_padic_ift(const PAdicPolyMap& map, const std::vector<u128>& y, int k0, int l) {
  const std::uint64_t p = map.p;
  const int K = map.K;
  const u128 pK = padic::ipow(p, K);
  PAdicIFTResult res;
  require(k0 >= 0 && l >= k0 + 1, "solve_padic_ift: requires l >= k0 + 1");
  SigmaPadic sg = sigma_padic(p, K, map.m, map.n, map.jacobian(map.x0));
  require(!sg.rank_deficient && sg.valuation <= k0,
          "solve_padic_ift: sigma(dPhi(x0)) below p^-k0 (precondition violated)");
  auto valv = [&](const std::vector<u128>& v) {
    int best = K;
    for (u128 w : v) best = std::min(best, padic::Scalar(p, K, w).valuation());
    return best;
  };
  std::vector<u128> f0 = map.eval(map.x0);
  std::vector<u128> d0(map.m);
  for (int i = 0; i < map.m; ++i) d0[i] = (y[i] + pK - f0[i]) % pK;
  require(valv(d0) >= k0 + l, "solve_padic_ift: target outside the guaranteed ball p^{-k0-l}");

  std::vector<u128> x = map.x0;
  int v = valv(d0);
  for (int it = 0; it < 2 * K + 4 && v < K; ++it) {
    std::vector<u128> fx = map.eval(x);
    std::vector<u128> rhs(map.m);
    for (int i = 0; i < map.m; ++i) rhs[i] = (y[i] + pK - fx[i]) % pK;
    if (valv(rhs) >= K) break;
    auto sol = padic::smith_solve(p, K, map.m, map.n, map.jacobian(x), rhs, K, k0);
    if (!sol.ok) {
      res.why = "Newton step unsolvable: " + sol.why;
      return res;
    }
    for (int j = 0; j < map.n; ++j) x[j] = (x[j] + sol.x[j]) % pK;
    std::vector<u128> fn = map.eval(x);
    std::vector<u128> rn(map.m);
    for (int i = 0; i < map.m; ++i) rn[i] = (y[i] + pK - fn[i]) % pK;
    int vn = valv(rn);
    if (vn <= v) {
      res.why = "Newton stalled";
      return res;
    }
    v = vn;
  }
  // |x - x0| <= p^{-l} certificate
  int disp = K;
  for (int j = 0; j < map.n; ++j)
    disp = std::min(disp, padic::Scalar(p, K, (x[j] + pK - map.x0[j]) % pK).valuation());
  if (disp < l) {
    res.why = "preimage left the ball p^{-l}";
    return res;
  }
  res.x = x;
  res.residual_valuation = v;
  res.ok = v >= K;
  if (!res.ok) res.why = "iteration budget exhausted";
  return res;
}

// ---- BCH ----

namespace {

using Vec = Eigen::VectorXd;

}  // namespace

BchResult bch(const lie::RealStructure& st, const Vec& x, const Vec& y, int order) {
  require(order >= 1 && order <= 5, "bch: order must be in 1..5");
  require(x.size() == st.d && y.size() == st.d, "bch: dimension mismatch");
  require(x.norm() < 0.5 && y.norm() < 0.5, "bch: requires |x|, |y| < 1/2");
  auto br = [&](const Vec& a, const Vec& b) { return st.bracket(a, b); };
  BchResult out;
  Vec H = x + y;
  if (order >= 2) H += 0.5 * br(x, y);
  if (order >= 3) H += (br(x, br(x, y)) + br(y, br(y, x))) / 12.0;
  if (order >= 4) H += -br(y, br(x, br(x, y))) / 24.0;
  if (order >= 5) {
    H += -(br(y, br(y, br(y, br(y, x)))) + br(x, br(x, br(x, br(x, y))))) / 720.0;
    H += (br(x, br(y, br(y, br(y, x)))) + br(y, br(x, br(x, br(x, y))))) / 360.0;
    H += (br(y, br(x, br(y, br(x, y)))) + br(x, br(y, br(x, br(y, x))))) / 120.0;
  }
  out.value = H;

  // majorant tail: the BCH series is dominated termwise by the coefficients
  // of -log(1 - (e^{s t} - 1)) at s = 2(|x| + |y|), halved (each degree-g
  // commutator is bounded by 2^{g-1} |x|^a |y|^b)
  const int G = 80;
  double s = 2.0 * (x.norm() + y.norm());
  std::vector<double> u(G + 1, 0.0), w(G + 1, 0.0), upow(G + 1, 0.0);
  double fact = 1;
  for (int g = 1; g <= G; ++g) {
    fact *= g;
    u[g] = std::pow(s, g) / fact;
  }
  upow[0] = 1;  // u^0
  std::vector<double> cur = {1.0};
  for (int k = 1; k <= G; ++k) {
    // cur <- cur * u (truncated)
    std::vector<double> nxt(G + 1, 0.0);
    for (int a = 0; a <= G; ++a) {
      double ca = a < int(cur.size()) ? cur[a] : 0.0;
      if (ca == 0) continue;
      for (int b = 1; a + b <= G; ++b) nxt[a + b] += ca * u[b];
    }
    cur.assign(nxt.begin(), nxt.end());
    for (int g = 0; g <= G; ++g) w[g] += cur[g] / k;
  }
  double tail = 0;
  for (int g = order + 1; g <= G; ++g) tail += w[g];
  double ratio = w[G] > 0 && w[G - 1] > 0 ? w[G] / w[G - 1] : 0.0;
  if (ratio < 0.9) tail += w[G] * ratio / (1 - ratio);
  out.tail_bound = 0.5 * tail;
  return out;
}

// ---- zonotope inradius ----

namespace {

void icosphere(int depth, std::vector<Eigen::Vector3d>* verts) {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Eigen::Vector3d> v = {
      {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0}, {0, -1, phi}, {0, 1, phi},
      {0, -1, -phi}, {0, 1, -phi}, {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
  for (auto& p : v) p.normalize();
  const int faces[20][3] = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                            {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                            {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                            {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  std::function<void(Eigen::Vector3d, Eigen::Vector3d, Eigen::Vector3d, int)> subdiv =
      [&](Eigen::Vector3d a, Eigen::Vector3d b, Eigen::Vector3d c, int d) {
        if (d == 0) {
          verts->push_back(a);
          verts->push_back(b);
          verts->push_back(c);
          return;
        }
        Eigen::Vector3d ab = (a + b).normalized(), bc = (b + c).normalized(), ca = (c + a).normalized();
        subdiv(a, ab, ca, d - 1);
        subdiv(ab, b, bc, d - 1);
        subdiv(ca, bc, c, d - 1);
        subdiv(ab, bc, ca, d - 1);
      };
  for (auto& f : faces) subdiv(v[f[0]], v[f[1]], v[f[2]], depth);
}

}  // namespace

ZonotopeResult zonotope_inradius(const std::vector<Eigen::Vector3d>& vs, int depth) {
  require(!vs.empty(), "zonotope_inradius: no generators");
  auto h = [&](const Eigen::Vector3d& u) {
    double s = 0;
    for (const auto& v : vs) s += std::fabs(u.dot(v));
    return s;
  };
  std::vector<Eigen::Vector3d> grid;
  icosphere(depth, &grid);
  // candidate critical directions: normals to pairs of generators
  for (size_t i = 0; i < vs.size(); ++i)
    for (size_t j = i + 1; j < vs.size(); ++j) {
      Eigen::Vector3d c = vs[i].cross(vs[j]);
      if (c.norm() > 1e-12) grid.push_back(c.normalized());
    }
  ZonotopeResult out;
  out.inradius = std::numeric_limits<double>::infinity();
  for (const auto& u : grid) {
    double val = h(u);
    if (val < out.inradius) {
      out.inradius = val;
      out.argmin = u;
    }
  }
  // one local polish pass: shrinking tangent steps
  double step = M_PI / (6.0 * (1 << depth));
  for (int round = 0; round < 24; ++round) {
    Eigen::Vector3d u = out.argmin;
    Eigen::Vector3d t1 = u.unitOrthogonal(), t2 = u.cross(t1);
    bool improved = false;
    std::vector<Eigen::Vector3d> dirs = {t1, Eigen::Vector3d(-t1), t2, Eigen::Vector3d(-t2)};
    for (const Eigen::Vector3d& dir : dirs) {
      Eigen::Vector3d cand = (u + step * dir).normalized();
      double val = h(cand);
      if (val < out.inradius) {
        out.inradius = val;
        out.argmin = cand;
        improved = true;
      }
    }
    if (!improved) step /= 2;
    if (step < 1e-9) break;
  }
  double lipschitz = 0;
  for (const auto& v : vs) lipschitz += v.norm();
  out.gap = 2.2 / double(1 << depth) * lipschitz;  // icosahedral edge bound times Lipschitz
  return out;
}

// ---- bounded generation probe ----

BoundedGenerationReport bounded_generation_probe(const su2::Mat2& h, double rho, const su2::Vec3& x_unit,
                                                 double r_frac, int n_targets, std::mt19937_64& rng) {
  require(su2::dist_to_id(h) <= 0.25 + 1e-12, "bounded_generation_probe: requires |h - I| <= 1/4");
  require(rho > 0 && rho <= 0.25, "bounded_generation_probe: requires 0 < rho <= 1/4");
  require(std::fabs(x_unit.norm() - 1.0) <= 1e-9, "bounded_generation_probe: x must be a unit vector");
  require(r_frac > 0 && r_frac < 1, "bounded_generation_probe: r_frac in (0,1)");

  BoundedGenerationReport rep;
  const int d2 = 9;
  std::vector<su2::Mat2> g(d2);
  for (int i = 0; i < d2; ++i) g[i] = su2::ball_uniform(rho, rng);

  auto Phi = [&](const Eigen::VectorXd& t) {
    su2::Mat2 prod = su2::Mat2::Identity();
    for (int i = 0; i < d2; ++i) {
      su2::Mat2 a = su2::exp(t[i] * x_unit);
      su2::Mat2 comm = h * a * h.adjoint() * a.adjoint();
      prod = prod * (g[i] * comm * g[i].adjoint());
    }
    return Eigen::VectorXd(su2::log(prod));
  };

  // analytic differential: columns Ad(g_i)(Ad(h) - I) x
  Eigen::Matrix3d adh = su2::adjoint(h).transpose();
  Eigen::MatrixXd J0(3, d2);
  std::vector<Eigen::Vector3d> cols;
  for (int i = 0; i < d2; ++i) {
    Eigen::Vector3d w = su2::adjoint(g[i]).transpose() * ((adh - Eigen::Matrix3d::Identity()) * x_unit);
    J0.col(i) = w;
    cols.push_back(w);
  }
  rep.sigma0 = sigma_real(J0);
  if (rep.sigma0 < 1e-9) {
    rep.degenerate = true;
    return rep;
  }

  // measured second-derivative bound with margin
  {
    double worst = 0;
    const double hh = 1e-3;
    std::uniform_real_distribution<double> u(-0.02, 0.02);
    for (int probe = 0; probe < 6; ++probe) {
      Eigen::VectorXd t0(d2);
      for (int i = 0; i < d2; ++i) t0[i] = u(rng);
      for (int a = 0; a < d2; ++a)
        for (int b = a; b < d2; ++b) {
          Eigen::VectorXd ea = Eigen::VectorXd::Zero(d2), eb = Eigen::VectorXd::Zero(d2);
          ea[a] = hh;
          eb[b] = hh;
          Eigen::VectorXd dd =
              (Phi(t0 + ea + eb) - Phi(t0 + ea - eb) - Phi(t0 - ea + eb) + Phi(t0 - ea - eb)) / (4 * hh * hh);
          worst = std::max(worst, dd.norm());
        }
    }
    rep.alpha = 1.5 * worst;
  }

  SmoothMapProbe probe;
  probe.n = d2;
  probe.m = 3;
  probe.x0 = Eigen::VectorXd::Zero(d2);
  probe.r0 = 0.25;
  probe.alpha = rep.alpha;
  probe.phi = Phi;
  probe.jacobian = [&](const Eigen::VectorXd& t) {
    // central differences around t (the analytic form is only used at 0)
    Eigen::MatrixXd J(3, d2);
    const double hh = 1e-6;
    for (int j = 0; j < d2; ++j) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(d2);
      e[j] = hh;
      J.col(j) = (Phi(t + e) - Phi(t - e)) / (2 * hh);
    }
    return J;
  };
  // the analytic differential and the finite differences must agree at 0
  require((probe.jacobian(probe.x0) - J0).cwiseAbs().maxCoeff() <= 1e-5,
          "bounded_generation_probe: analytic differential disagrees with finite differences");

  double rmax = std::min(rep.sigma0 / (2.0 * 3 * d2 * std::sqrt(rep.alpha)), probe.r0);
  rep.r = r_frac * rmax;
  std::normal_distribution<double> n01(0, 1);
  std::uniform_real_distribution<double> u01(0, 1);
  for (int t = 0; t < n_targets; ++t) {
    Eigen::Vector3d dir(n01(rng), n01(rng), n01(rng));
    dir.normalize();
    Eigen::VectorXd y = 0.97 * rep.sigma0 * rep.r / 4.0 * u01(rng) * dir;
    IFTResult r = solve_real_ift(probe, y, rep.r);
    ++rep.attempted;
    if (r.ok)
      ++rep.solved;
    else
      rep.theorem_alarm = true;
  }

  ZonotopeResult z = zonotope_inradius(cols, 5);
  rep.zonotope_scale = z.inradius;
  double hdist = su2::dist_to_id(h);
  if (hdist > 0 && z.inradius > 0) rep.c_prime = rep.sigma0 * 3.0 / (hdist * z.inradius);
  return rep;
}

// ---- commutator surjectivity ----

CommutatorSolveResult commutator_surjectivity(double rho1, double rho2, const su2::Mat2& target,
                                              double c_hat) {
  CommutatorSolveResult out;
  require(rho1 > 0 && rho1 < 1 && rho2 > 0 && rho2 < 1, "commutator_surjectivity: rho in (0,1)");
  su2::Vec3 c = su2::log(target);
  require(su2::dist_to_id(target) <= c_hat * rho1 * rho2 * (1 + 1e-9),
          "commutator_surjectivity: target outside the calibrated range c_hat rho1 rho2");

  if (c.norm() < 1e-15) {
    out.ok = true;
    out.g1 = su2::Mat2::Identity();
    out.g2 = su2::Mat2::Identity();
    out.residual = 0;
    return out;
  }
  // linearization: bracket(a, b) = 2 a x b = c with a = (rho1/2) u, u
  // orthogonal to c
  Eigen::Vector3d u = c.normalized().unitOrthogonal();
  double abar = rho1 / 2.0;
  Eigen::Vector3d a0 = abar * u;
  Eigen::Vector3d b0 = -u.cross(c) / (2.0 * abar);

  Eigen::VectorXd z(6);
  z << a0, b0;
  auto F = [&](const Eigen::VectorXd& w) {
    su2::Mat2 g1 = su2::exp(w.head<3>()), g2 = su2::exp(w.tail<3>());
    su2::Mat2 comm = g1 * g2 * g1.adjoint() * g2.adjoint();
    return Eigen::VectorXd(su2::log(comm) - c);
  };
  Eigen::VectorXd resid = F(z);
  for (int it = 0; it < 80 && resid.norm() > 1e-12; ++it) {
    Eigen::MatrixXd J(3, 6);
    const double hh = 1e-7;
    for (int j = 0; j < 6; ++j) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(6);
      e[j] = hh;
      J.col(j) = (F(z + e) - F(z - e)) / (2 * hh);
    }
    Eigen::VectorXd step = J.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(-resid);
    double t = 1.0;
    bool moved = false;
    for (int half = 0; half < 30; ++half) {
      Eigen::VectorXd zn = z + t * step;
      Eigen::VectorXd rn = F(zn);
      if (rn.norm() < resid.norm()) {
        z = zn;
        resid = rn;
        moved = true;
        break;
      }
      t /= 2;
    }
    if (!moved) break;
  }
  out.g1 = su2::exp(z.head<3>());
  out.g2 = su2::exp(z.tail<3>());
  su2::Mat2 comm = out.g1 * out.g2 * out.g1.adjoint() * out.g2.adjoint();
  out.residual = su2::dist(comm, target);
  bool inside = su2::dist_to_id(out.g1) <= rho1 + 1e-12 && su2::dist_to_id(out.g2) <= rho2 + 1e-12;
  out.ok = out.residual <= 1e-9 && inside;
  if (!out.ok) out.why = inside ? "solver stalled" : "solution left the prescribed balls";
  return out;
}

double calibrate_commutator_chat(double rho1, double rho2, int samples_per_level, std::mt19937_64& rng) {
  std::normal_distribution<double> n01(0, 1);
  auto feasible = [&](double chat) {
    for (int t = 0; t < samples_per_level; ++t) {
      Eigen::Vector3d dir(n01(rng), n01(rng), n01(rng));
      dir.normalize();
      double radius = chat * rho1 * rho2 * 0.999;
      double theta = 2.0 * std::asin(std::min(1.0, radius / 2.0));
      su2::Mat2 target = su2::exp(theta * dir);
      CommutatorSolveResult r = commutator_surjectivity(rho1, rho2, target, chat);
      if (!r.ok) return false;
    }
    return true;
  };
  double lo = 0.0, hi = 1.2;
  if (!feasible(0.05)) return 0.0;
  lo = 0.05;
  for (int it = 0; it < 12; ++it) {
    double mid = 0.5 * (lo + hi);
    (feasible(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace haarlab::num
