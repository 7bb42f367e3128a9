#include "haarlab/approxhom.hpp"

#include <cmath>

namespace haarlab::approx {

using groups::Point;
using groups::Spec;

PartialMap::PartialMap(Spec dom_, Spec tgt_, double rho_, std::function<Point(const Point&)> f_)
    : dom(std::move(dom_)), tgt(std::move(tgt_)), rho(rho_), f(std::move(f_)) {
  require(rho > 0, "partial map: rho must be positive");
  Point img = f(groups::identity(dom));
  require(groups::distance(tgt, img, groups::identity(tgt)) <= 1e-12, "partial map: f(1) must be 1");
}

double approx_hom_defect(const PartialMap& pm, const std::vector<std::pair<Point, Point>>& probes) {
  require(!probes.empty(), "approx_hom_defect: no probes");
  double worst = 0;
  const double tol = 1e-9;
  for (const auto& [g1, g2] : probes) {
    Point g12 = groups::mul(pm.dom, g1, g2);
    require(groups::dist_to_id(pm.dom, g1) <= pm.rho + tol, "approx_hom_defect: probe outside domain");
    require(groups::dist_to_id(pm.dom, g2) <= pm.rho + tol, "approx_hom_defect: probe outside domain");
    require(groups::dist_to_id(pm.dom, g12) <= pm.rho + tol, "approx_hom_defect: probe product outside domain");
    Point a = pm(g12), b = groups::mul(pm.tgt, pm(g1), pm(g2));
    worst = std::max(worst, groups::distance(pm.tgt, a, b));
    worst = std::max(worst, groups::distance(pm.tgt, pm(groups::inv(pm.dom, g1)),
                                             groups::inv(pm.tgt, pm(g1))));
    worst = std::max(worst, groups::distance(pm.tgt, pm(groups::inv(pm.dom, g2)),
                                             groups::inv(pm.tgt, pm(g2))));
  }
  return worst;
}

su2::Vec3 theta_map(const PartialMap& pm, int k, const su2::Vec3& x) {
  require(pm.dom.kind == groups::Kind::SpecialUnitary && pm.dom.n == 2 &&
              pm.tgt.kind == groups::Kind::SpecialUnitary && pm.tgt.n == 2,
          "theta_map: real SU(2) specs only");
  require(x.norm() < pm.rho / 2, "theta_map: |x| must be < rho/2");
  require(k >= 1, "theta_map: k >= 1");
  double rk = std::pow(pm.rho, k);
  Point img = pm(Point::unitary(su2::exp(rk * x)));
  require(groups::dist_to_id(pm.tgt, img) < 1.9, "theta_map: image outside the principal log domain");
  return su2::log(img.u) / rk;
}

Eigen::Matrix3d fit_linear_theta(const PartialMap& pm, int k, FitMode mode, int n_probes,
                                 std::mt19937_64* rng, double* residual_out) {
  Eigen::Matrix3d X;  // row-indexed: X(j, s)
  double half = pm.rho / 2;
  for (int j = 0; j < 3; ++j) {
    su2::Vec3 e = su2::Vec3::Zero();
    e[j] = half * (1.0 - 1e-12);
    X.row(j) = (theta_map(pm, k, e) / e[j]).transpose();
  }
  if (mode == FitMode::LeastSquares) {
    require(rng != nullptr && n_probes >= 3, "fit_linear_theta: least-squares mode needs probes");
    Eigen::MatrixXd A(n_probes, 3), B(n_probes, 3);
    std::normal_distribution<double> n01(0, 1);
    for (int t = 0; t < n_probes; ++t) {
      su2::Vec3 x((*rng)() % 2 ? n01(*rng) : n01(*rng), n01(*rng), n01(*rng));
      x = x.normalized() * half * (0.2 + 0.79 * std::uniform_real_distribution<double>(0, 1)(*rng));
      A.row(t) = x.transpose();
      B.row(t) = theta_map(pm, k, x).transpose();
    }
    // theta(x) ~ X^T x, so solve A X ~ B for the row-indexed X
    X = A.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(B);
  }
  if (residual_out) {
    require(rng != nullptr, "fit_linear_theta: residual report needs an rng");
    double worst = 0;
    std::normal_distribution<double> n01(0, 1);
    for (int t = 0; t < std::max(16, n_probes); ++t) {
      su2::Vec3 x(n01(*rng), n01(*rng), n01(*rng));
      x = x.normalized() * half * (0.1 + 0.89 * std::uniform_real_distribution<double>(0, 1)(*rng));
      worst = std::max(worst, (theta_map(pm, k, x) - X.transpose() * x).norm());
    }
    *residual_out = worst;
  }
  return X;
}

CompareReport compare_to_reference(const PartialMap& pm,
                                   const std::function<Point(const Point&)>& reference,
                                   const std::vector<Point>& probes) {
  CompareReport rep;
  rep.probes = int(probes.size());
  for (const Point& g : probes)
    rep.sup_dist = std::max(rep.sup_dist, groups::distance(pm.tgt, pm(g), reference(g)));
  return rep;
}

PartialMap conjugation_map(const su2::Mat2& g, double rho) {
  Spec su = Spec::su(2);
  su2::Mat2 gc = g;
  return PartialMap(su, su, rho,
                    [gc](const Point& h) { return Point::unitary(su2::Mat2(gc * h.u * gc.adjoint())); });
}

PartialMap conjugation_with_noise(const su2::Mat2& g, double rho, double eps) {
  Spec su = Spec::su(2);
  su2::Mat2 gc = g;
  return PartialMap(su, su, rho, [gc, eps, su](const Point& h) {
    su2::Mat2 base = gc * h.u * gc.adjoint();
    if (groups::dist_to_id(su, h) <= 1e-15) return Point::unitary(base);  // f(1) = 1
    // deterministic unit direction keyed by the input
    std::uint64_t seed = std::hash<std::string>{}(groups::point_key(su, h));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n01(0, 1);
    su2::Vec3 u(n01(rng), n01(rng), n01(rng));
    u.normalize();
    double r = eps * std::uniform_real_distribution<double>(0.2, 1.0)(rng);
    double theta = 2.0 * std::asin(std::min(1.0, r / 2.0));
    return Point::unitary(su2::Mat2(base * su2::exp(theta * u)));
  });
}

PartialMap smooth_distortion_map(const su2::Mat2& g, double rho, double qscale) {
  Spec su = Spec::su(2);
  Eigen::Matrix3d ad = su2::adjoint(g);
  return PartialMap(su, su, rho, [ad, qscale](const Point& h) {
    su2::Vec3 x = su2::log(h.u);
    su2::Vec3 lin = ad.transpose() * x;
    su2::Vec3 quad(qscale * x[0] * x[1], qscale * (x[1] * x[2] - x[0] * x[0]), qscale * x[2] * x[0]);
    return Point::unitary(su2::exp(lin + quad));
  });
}

PartialMap reduce_then_lift_map(const Spec& sl, int t) {
  require(sl.kind == groups::Kind::PAdicSpecialLinear && sl.n == 2, "reduce_then_lift_map: SL_2(Z_p) spec");
  require(t >= 1 && t < sl.K, "reduce_then_lift_map: 1 <= t < K");
  return PartialMap(sl, sl, 1.0, [t, K = sl.K](const Point& h) {
    return Point::padic(padic::sl2_canonical_lift(h.pm.reduced(t), K));
  });
}

// ---- quotient ladder ----

std::pair<int, int> ladder_levels(int k0, int m) {
  int lm = 2 * int(std::ceil((double(k0) * m + 2.0 * k0 - 2.0) / 3.0)) - k0 + 1;
  int nm = k0 * (m - 1) - 2;
  return {lm, nm};
}

LadderResult quotient_hom_ladder(const std::function<padic::Matrix(const padic::Matrix&)>& phi,
                                 std::uint64_t p, int k0, int m, int K) {
  require(k0 >= padic::safe_level(p), "quotient_hom_ladder: k0 below the safe level");
  auto [lm, nm] = ladder_levels(k0, m);
  require(k0 < lm && lm < nm, "quotient_hom_ladder: m too small for k0 (empty critical window)");
  // (lm, nm) arise as (2l - k0 + 1, l + n - k0 + 1) for an underlying valid
  // pair k0 < l <= n <= 2l - 2k0 + 1 with n within the data depth k0(m-1)
  {
    int l = (lm + k0 - 1) / 2;
    int n = nm - l + k0 - 1;
    require((lm + k0 - 1) % 2 == 0, "quotient_hom_ladder: critical level parity broken");
    require(k0 < l && l <= n && n <= 2 * l - 2 * k0 + 1,
            "quotient_hom_ladder: underlying levels out of range");
    require(n <= k0 * (m - 1), "quotient_hom_ladder: critical levels exceed the data depth");
  }
  require(nm <= 2 * lm, "quotient_hom_ladder: finite-log range violated at the critical levels");
  require(K >= k0 * m, "quotient_hom_ladder: working precision below k0 m");

  // homomorphism test on the finite data
  std::mt19937_64 rng(0x1adde7);
  std::vector<padic::Matrix> basis = padic::sl2_basis(p, K);
  {
    std::uniform_int_distribution<std::uint64_t> digit(0, p - 1);
    for (int rep = 0; rep < 8; ++rep) {
      padic::Matrix x(p, K, 2), y(p, K, 2);
      for (int t = 0; t < 3; ++t) {
        padic::u128 cx = digit(rng), cy = digit(rng);
        x = x + basis[t].scaled(padic::Scalar(p, K, cx * padic::ipow(p, k0)));
        y = y + basis[t].scaled(padic::Scalar(p, K, cy * padic::ipow(p, k0)));
      }
      padic::Matrix g1 = padic_exp(x).m, g2 = padic_exp(y).m;
      padic::Matrix lhs = phi(g1 * g2).reduced(k0 * m);
      padic::Matrix rhs = (phi(g1) * phi(g2)).reduced(k0 * m);
      require(lhs == rhs, "quotient_hom_ladder: phi fails the homomorphism test on finite data");
    }
  }

  // theta(e_j) through the finite logarithms at the critical levels
  LadderResult res;
  res.l_m = lm;
  res.n_m = nm;
  std::vector<padic::Matrix> images;
  int shift = k0 - 1;  // guaranteed worst case
  int measured = K;
  for (int j = 0; j < 3; ++j) {
    padic::Matrix gj = padic_exp(basis[j].scaled(padic::Scalar(p, K, padic::ipow(p, lm)))).m;
    padic::Matrix img = phi(gj);
    images.push_back(img);
    measured = std::min(measured, img.level());
  }
  // the measured image level pins the shift; a lossless phi has shift 0
  shift = std::max(0, std::min(k0 - 1, lm - (measured == K ? lm : measured)));
  res.shift = shift;
  int prec = nm - lm;
  padic::Matrix theta(p, prec, 3);
  for (int j = 0; j < 3; ++j) {
    padic::Matrix num = images[j] - padic::Matrix::identity(p, K, 2);
    require(num.min_valuation() >= lm - shift, "quotient_hom_ladder: image level below the shift");
    padic::Matrix psi = num.divide_by_p_power(lm - shift).reduced(prec);
    // decompose psi = a e + b f + c h
    theta.at(j, 0) = psi.at(0, 1);
    theta.at(j, 1) = psi.at(1, 0);
    theta.at(j, 2) = psi.at(0, 0);
  }
  res.theta_m = theta;

  lie::PAdicStructure st = lie::PAdicStructure::sl2(p, prec);
  lie::PAdicResidualReport rr = lie::hom_residuals_padic(theta, st, st);
  res.hom_ok = rr.min_valuation >= prec;
  std::vector<padic::u128> flat;
  for (int i = 0; i < 3; ++i)
    for (int jj = 0; jj < 3; ++jj) flat.push_back(theta.at(i, jj));
  auto sf = padic::smith_form(p, prec, 3, 3, flat, false);
  res.degenerate = sf.rank < 3 || sf.divisor_valuations[2] > 0;
  return res;
}

}  // namespace haarlab::approx
