#include "haarlab/lie.hpp"

#include <cmath>

namespace haarlab::lie {

using padic::u128;

Eigen::VectorXd RealStructure::bracket(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) {
      double v = x[j] * y[k];
      if (v == 0) continue;
      for (int s = 0; s < d; ++s) out[s] += v * at(j, k, s);
    }
  return out;
}

void RealStructure::validate() const {
  require(int(c.size()) == d * d * d, "structure: wrong tensor size");
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k)
      for (int s = 0; s < d; ++s)
        require(std::fabs(at(j, k, s) + at(k, j, s)) <= 1e-12, "structure: antisymmetry violated");
  // Jacobi: [e_j, [e_k, e_l]] + cyclic = 0
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k)
      for (int l = 0; l < d; ++l)
        for (int s = 0; s < d; ++s) {
          double acc = 0;
          for (int i = 0; i < d; ++i)
            acc += at(k, l, i) * at(j, i, s) + at(l, j, i) * at(k, i, s) + at(j, k, i) * at(l, i, s);
          require(std::fabs(acc) <= 1e-12, "structure: Jacobi identity violated");
        }
}

RealStructure RealStructure::su2() {
  RealStructure st;
  st.d = 3;
  st.c.assign(27, 0.0);
  // basis b_k = -i sigma_k: [b_j, b_k] = 2 eps_{jks} b_s
  int eps[3][3][3] = {};
  eps[0][1][2] = 1;
  eps[1][2][0] = 1;
  eps[2][0][1] = 1;
  eps[1][0][2] = -1;
  eps[2][1][0] = -1;
  eps[0][2][1] = -1;
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k)
      for (int s = 0; s < 3; ++s) st.c[(size_t(j) * 3 + k) * 3 + s] = 2.0 * eps[j][k][s];
  st.validate();
  return st;
}

void PAdicStructure::validate() const {
  require(int(c.size()) == d * d * d, "structure: wrong tensor size");
  u128 pK = padic::ipow(p, K);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k)
      for (int s = 0; s < d; ++s)
        require((at(j, k, s) + at(k, j, s)) % pK == 0, "structure: antisymmetry violated");
}

PAdicStructure PAdicStructure::sl2(std::uint64_t p, int K) {
  PAdicStructure st;
  st.d = 3;
  st.p = p;
  st.K = K;
  u128 pK = padic::ipow(p, K);
  st.c.assign(27, 0);
  // basis (e, f, h): [h,e] = 2e, [h,f] = -2f, [e,f] = h
  auto set = [&](int j, int k, int s, long v) {
    st.c[(size_t(j) * 3 + k) * 3 + s] = v >= 0 ? u128(v) : (pK - u128(-v) % pK) % pK;
    st.c[(size_t(k) * 3 + j) * 3 + s] = v >= 0 ? (pK - u128(v) % pK) % pK : u128(-v);
  };
  set(2, 0, 0, 2);   // [h, e] = 2e
  set(2, 1, 1, -2);  // [h, f] = -2f
  set(0, 1, 2, 1);   // [e, f] = h
  st.validate();
  return st;
}

ResidualReport hom_residuals(const Eigen::MatrixXd& X, const RealStructure& c1, const RealStructure& c2) {
  const int d1 = c1.d, d2 = c2.d;
  require(X.rows() == d1 && X.cols() == d2, "hom_residuals: coefficient matrix must be d1 x d2");
  ResidualReport rep;
  rep.values.resize(d1 * d1 * d2);
  int t = 0;
  for (int j = 0; j < d1; ++j)
    for (int k = 0; k < d1; ++k)
      for (int r = 0; r < d2; ++r) {
        double quad = 0;
        for (int i1 = 0; i1 < d2; ++i1)
          for (int i2 = 0; i2 < d2; ++i2) {
            double cc = c2.at(i1, i2, r);
            if (cc != 0) quad += cc * X(j, i1) * X(k, i2);
          }
        double lin = 0;
        for (int i = 0; i < d1; ++i) lin += c1.at(j, k, i) * X(i, r);
        rep.values[t++] = quad - lin;
      }
  rep.max_abs = rep.values.cwiseAbs().maxCoeff();
  return rep;
}

PAdicResidualReport hom_residuals_padic(const padic::Matrix& X, const PAdicStructure& c1,
                                        const PAdicStructure& c2) {
  require(c1.d == X.n() && c2.d == X.n(), "hom_residuals_padic: square structures matching X");
  require(c1.p == X.p() && c1.K == X.K() && c2.p == X.p() && c2.K == X.K(),
          "hom_residuals_padic: mixed (p, K) contexts");
  const int d = X.n();
  const u128 pK = X.modulus();
  auto mulm = [&](u128 a, u128 b) { return padic::Scalar(X.p(), X.K(), a).operator*(padic::Scalar(X.p(), X.K(), b)).value(); };
  PAdicResidualReport rep;
  rep.min_valuation = X.K();
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k)
      for (int r = 0; r < d; ++r) {
        u128 quad = 0, lin = 0;
        for (int i1 = 0; i1 < d; ++i1)
          for (int i2 = 0; i2 < d; ++i2) {
            u128 cc = c2.at(i1, i2, r);
            if (cc == 0) continue;
            quad = (quad + mulm(cc, mulm(X.at(j, i1), X.at(k, i2)))) % pK;
          }
        for (int i = 0; i < d; ++i) lin = (lin + mulm(c1.at(j, k, i), X.at(i, r))) % pK;
        u128 v = (quad + pK - lin) % pK;
        rep.values.push_back(v);
        rep.min_valuation = std::min(rep.min_valuation, padic::Scalar(X.p(), X.K(), v).valuation());
      }
  return rep;
}

namespace {

// analytic Jacobian of the real residual system, rows (j,k,r), cols (a,b)
Eigen::MatrixXd residual_jacobian(const Eigen::MatrixXd& X, const RealStructure& c1,
                                  const RealStructure& c2) {
  const int d1 = c1.d, d2 = c2.d;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(d1 * d1 * d2, d1 * d2);
  int row = 0;
  for (int j = 0; j < d1; ++j)
    for (int k = 0; k < d1; ++k)
      for (int r = 0; r < d2; ++r, ++row) {
        for (int b = 0; b < d2; ++b) {
          // d/dX(j,b): sum_{i2} c2(b, i2, r) X(k, i2)
          double v = 0;
          for (int i2 = 0; i2 < d2; ++i2) v += c2.at(b, i2, r) * X(k, i2);
          J(row, j * d2 + b) += v;
          // d/dX(k,b): sum_{i1} c2(i1, b, r) X(j, i1)
          double w = 0;
          for (int i1 = 0; i1 < d2; ++i1) w += c2.at(i1, b, r) * X(j, i1);
          J(row, k * d2 + b) += w;
        }
        // linear part: -c1(j,k,a) at column (a, r)
        for (int a = 0; a < d1; ++a) J(row, a * d2 + r) -= c1.at(j, k, a);
      }
  return J;
}

}  // namespace

ProjectionResult project_to_variety_real(const Eigen::MatrixXd& theta_tilde, const RealStructure& c1,
                                         const RealStructure& c2, int max_iter, double tol) {
  const int d1 = c1.d, d2 = c2.d;
  Eigen::MatrixXd X = theta_tilde;
  ProjectionResult res;
  double cur = hom_residuals(X, c1, c2).max_abs;
  require(std::isfinite(cur), "project_to_variety_real: non-finite residuals");
  for (int it = 0; it < max_iter && cur > tol; ++it) {
    Eigen::VectorXd F = hom_residuals(X, c1, c2).values;
    Eigen::MatrixXd J = residual_jacobian(X, c1, c2);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-10);
    Eigen::VectorXd step = svd.solve(-F);  // min-norm Gauss-Newton step
    double scale = 1.0;
    for (int half = 0; half < 40; ++half) {
      Eigen::MatrixXd Xn = X;
      for (int a = 0; a < d1; ++a)
        for (int b = 0; b < d2; ++b) Xn(a, b) += scale * step[a * d2 + b];
      double nxt = hom_residuals(Xn, c1, c2).max_abs;
      if (nxt < cur || scale < 1e-8) {
        X = Xn;
        cur = nxt;
        break;
      }
      scale /= 2;
    }
    res.iterations = it + 1;
  }
  res.theta_hat = X;
  res.max_residual = cur;
  res.converged = cur <= tol;
  res.distance_op = (X - theta_tilde).operatorNorm();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(X);
  res.sigma_max = svd.singularValues()(0);
  res.sigma_min = svd.singularValues()(svd.singularValues().size() - 1);
  res.isomorphism = res.converged && res.sigma_min > 1e-6;
  return res;
}

HenselResult hensel_lift_hom(const padic::Matrix& theta_bar, int m, const PAdicStructure& c1,
                             const PAdicStructure& c2) {
  const std::uint64_t p = theta_bar.p();
  const int K = theta_bar.K();
  const int d = theta_bar.n();
  require(c1.d == d && c2.d == d, "hensel_lift_hom: structure dimensions must match");
  const u128 pK = theta_bar.modulus();

  HenselResult res;
  padic::Matrix X = theta_bar;
  PAdicResidualReport rep = hom_residuals_padic(X, c1, c2);
  res.input_valuation = rep.min_valuation;
  require(m >= 1, "hensel_lift_hom: m must be >= 1");
  if (rep.min_valuation < m) {
    res.ok = false;
    res.why = "residuals of theta_bar do not vanish mod p^m";
    return res;
  }

  // Jacobian over Z/p^K as a (d^3) x (d^2) integer matrix
  auto jac = [&](const padic::Matrix& Y) {
    std::vector<u128> J(size_t(d) * d * d * d * d, 0);
    const int cols = d * d;
    auto mulm = [&](u128 a, u128 b) {
      return padic::Scalar(p, K, a).operator*(padic::Scalar(p, K, b)).value();
    };
    int row = 0;
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int r = 0; r < d; ++r, ++row) {
          for (int b = 0; b < d; ++b) {
            u128 v = 0, w = 0;
            for (int i2 = 0; i2 < d; ++i2) v = (v + mulm(c2.at(b, i2, r), Y.at(k, i2))) % pK;
            for (int i1 = 0; i1 < d; ++i1) w = (w + mulm(c2.at(i1, b, r), Y.at(j, i1))) % pK;
            J[size_t(row) * cols + j * d + b] = (J[size_t(row) * cols + j * d + b] + v) % pK;
            J[size_t(row) * cols + k * d + b] = (J[size_t(row) * cols + k * d + b] + w) % pK;
          }
          for (int a = 0; a < d; ++a) {
            u128 cc = c1.at(j, k, a);
            J[size_t(row) * cols + a * d + r] = (J[size_t(row) * cols + a * d + r] + pK - cc) % pK;
          }
        }
    return J;
  };

  {
    // ultrametric rank truncation: pivots are retained only while 2v < m,
    // which separates the honest pivots from the near-kernel divisors of a
    // smooth non-isolated solution locus
    auto sf = padic::smith_form(p, K, d * d * d, d * d, jac(X), false);
    int s = -1;
    for (int v : sf.divisor_valuations)
      if (2 * v < m) s = std::max(s, v);
    if (s < 0) {
      res.ok = false;
      res.why = "Hensel criterion fails: no Jacobian pivot with 2v < m (degenerate Jacobian)";
      return res;
    }
    res.s_measured = s;
  }

  int v = rep.min_valuation;
  res.doubling_ok = true;
  for (int step = 0; step < 2 * K + 4 && v < K; ++step) {
    std::vector<u128> F;
    for (u128 x : rep.values) F.push_back((pK - x) % pK);  // solve J delta = -F
    int floor_next = std::min(K, 2 * (v - res.s_measured));
    auto sol = padic::smith_solve(p, K, d * d * d, d * d, jac(X), F, floor_next, res.s_measured);
    if (!sol.ok) {
      res.ok = false;
      res.why = "Newton step unsolvable: " + sol.why;
      res.lift = X;
      return res;
    }
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        X.at(a, b) = (X.at(a, b) + sol.x[size_t(a) * d + b]) % pK;
    rep = hom_residuals_padic(X, c1, c2);
    int vnew = rep.min_valuation;
    if (!(vnew > v && vnew >= std::min(K, 2 * (v - res.s_measured)))) res.doubling_ok = false;
    if (vnew <= v) {
      res.ok = false;
      res.why = "Newton stalled: residual valuation did not increase";
      res.lift = X;
      return res;
    }
    v = vnew;
    res.residual_valuations.push_back(vnew);
  }
  res.lift = X;
  res.ok = v >= K;
  if (!res.ok) res.why = "iteration budget exhausted";
  res.agreement_valuation = (X - theta_bar).min_valuation();
  return res;
}

namespace {

// p-adic square root of a unit, p odd
bool padic_sqrt_unit(std::uint64_t p, int K, u128 u, u128* out) {
  u128 pK = padic::ipow(p, K);
  u128 r0 = 0;
  for (u128 x = 1; x < p; ++x)
    if (x * x % p == u % p) {
      r0 = x;
      break;
    }
  if (r0 == 0) return false;
  // Newton: x <- (x + u/x) / 2
  padic::Scalar two_inv = padic::Scalar(p, K, 2).inverse();
  padic::Scalar x(p, K, r0);
  for (int it = 0; it < K + 2; ++it) {
    x = (x + padic::Scalar(p, K, u) * x.inverse()) * two_inv;
  }
  if ((x * x).value() != u % pK) return false;
  *out = x.value();
  return true;
}

}  // namespace

AdjointInversion sl2_from_adjoint(const padic::Matrix& theta) {
  AdjointInversion out;
  const std::uint64_t p = theta.p();
  const int K = theta.K();
  require(theta.n() == 3, "sl2_from_adjoint: theta must be 3x3");
  require(p != 2, "sl2_from_adjoint: p must be odd");
  const u128 pK = theta.modulus();
  // linear system: g * b_j - sum_s theta(j, s) b_s * g = 0 over the 4 entries
  // of g, for the basis b = (e, f, h)
  std::vector<padic::Matrix> basis = padic::sl2_basis(p, K);
  std::vector<u128> M(12 * 4, 0);
  auto mulm = [&](u128 a, u128 b) {
    return padic::Scalar(p, K, a).operator*(padic::Scalar(p, K, b)).value();
  };
  int row = 0;
  for (int j = 0; j < 3; ++j) {
    // coefficient of g_{uv} in (g b_j)_{ab}: b_j(v, b) when u == a
    // coefficient in (b_s g)_{ab}: b_s(a, u) when v == b
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b, ++row) {
        for (int u = 0; u < 2; ++u)
          for (int vv = 0; vv < 2; ++vv) {
            u128 coef = 0;
            if (u == a) coef = (coef + basis[j].at(vv, b)) % pK;
            for (int s = 0; s < 3; ++s) {
              if (vv == b) {
                u128 t = mulm(theta.at(j, s), basis[s].at(a, u));
                coef = (coef + pK - t) % pK;
              }
            }
            M[size_t(row) * 4 + u * 2 + vv] = coef;
          }
      }
  }
  auto sf = padic::smith_form(p, K, 12, 4, M, true);
  // kernel generators: columns of V for zero divisors
  int zero_cols = 0, kcol = -1;
  for (int i = 0; i < 4; ++i) {
    int dv = i < int(sf.divisor_valuations.size()) ? sf.divisor_valuations[i] : K;
    if (dv >= K) {
      ++zero_cols;
      kcol = i;
    }
  }
  if (zero_cols != 1) {
    out.why = "adjoint kernel rank != 1; not a clean inner automorphism";
    return out;
  }
  std::vector<u128> q(4);
  for (int i = 0; i < 4; ++i) q[i] = sf.V[size_t(i) * 4 + kcol];
  // strip content so that some entry is a unit
  int content = K;
  for (u128 x : q) content = std::min(content, padic::Scalar(p, K, x).valuation());
  if (content >= K) {
    out.why = "adjoint kernel vanished";
    return out;
  }
  u128 pc = padic::ipow(p, content);
  for (u128& x : q) x /= pc;
  padic::Matrix g(p, K, 2);
  g.at(0, 0) = q[0];
  g.at(0, 1) = q[1];
  g.at(1, 0) = q[2];
  g.at(1, 1) = q[3];
  u128 det = g.det().value();
  if (det % p == 0) {
    out.why = "kernel generator has singular reduction";
    return out;
  }
  u128 root;
  if (!padic_sqrt_unit(p, K, det, &root)) {
    out.why = "determinant of the kernel generator is a non-square";
    return out;
  }
  padic::Scalar rinv = padic::Scalar(p, K, root).inverse();
  g = g.scaled(rinv);
  if (!(padic::sl2_adjoint(g) == theta)) {
    out.why = "reconstructed element does not realize theta";
    return out;
  }
  out.ok = true;
  out.g = g;
  return out;
}

}  // namespace haarlab::lie
