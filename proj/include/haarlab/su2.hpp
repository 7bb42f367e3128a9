#pragma once

// Closed-form SU(2) / su(2) kinematics.
//
// su(2) vectors are coordinates in the basis b_k = -i*sigma_k, so that
// [b_j, b_k] = 2 eps_{jkl} b_l and the operator norm of sum c_k b_k equals
// the Euclidean norm of c.  SU(2) elements correspond to unit quaternions
// (w, v): g = w I + v_1 b_1 + v_2 b_2 + v_3 b_3, and the operator norm of a
// matrix difference equals the quaternion chord distance.

#include <Eigen/Dense>
#include <cmath>
#include <random>

namespace haarlab::su2 {

using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2cd;
using Quat = Eigen::Vector4d;  // (w, x, y, z)

inline Mat2 from_quat(const Quat& q) {
  const std::complex<double> i(0, 1);
  Mat2 g;
  g(0, 0) = q[0] - i * q[3];
  g(0, 1) = -q[2] - i * q[1];
  g(1, 0) = q[2] - i * q[1];
  g(1, 1) = q[0] + i * q[3];
  return g;
}

inline Quat to_quat(const Mat2& g) {
  Quat q;
  q[0] = 0.5 * (g(0, 0).real() + g(1, 1).real());
  q[3] = 0.5 * (g(1, 1).imag() - g(0, 0).imag());
  q[2] = 0.5 * (g(1, 0).real() - g(0, 1).real());
  q[1] = -0.5 * (g(0, 1).imag() + g(1, 0).imag());
  return q;
}

inline Mat2 exp(const Vec3& c) {
  double t = c.norm();
  double s = t < 1e-12 ? 1.0 - t * t / 6.0 : std::sin(t) / t;
  Quat q;
  q[0] = std::cos(t);
  q[1] = s * c[0];
  q[2] = s * c[1];
  q[3] = s * c[2];
  return from_quat(q);
}

// principal logarithm; angle in [0, pi]
inline Vec3 log(const Mat2& g) {
  Quat q = to_quat(g);
  double vn = std::sqrt(q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
  double th = std::atan2(vn, q[0]);
  if (vn < 1e-300) return Vec3::Zero();
  return (th / vn) * Vec3(q[1], q[2], q[3]);
}

inline double dist(const Mat2& g, const Mat2& h) { return (to_quat(g) - to_quat(h)).norm(); }
inline double dist_to_id(const Mat2& g) { return (to_quat(g) - Quat(1, 0, 0, 0)).norm(); }

inline Mat2 haar(std::mt19937_64& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  Quat q;
  do {
    for (int i = 0; i < 4; ++i) q[i] = n01(rng);
  } while (q.norm() < 1e-8);
  q.normalize();
  return from_quat(q);
}

// exp of a uniformly drawn axis scaled so that |g - I| = r exactly;
// for g = exp(c) the quaternion is (cos|c|, sin|c| c_hat), so
// |g - I| = sqrt(2 - 2cos|c|) = 2 sin(|c|/2).
inline Mat2 at_distance(double r, std::mt19937_64& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  Vec3 u;
  do {
    u = Vec3(n01(rng), n01(rng), n01(rng));
  } while (u.norm() < 1e-8);
  u.normalize();
  double theta = 2.0 * std::asin(std::min(1.0, r / 2.0));
  return exp(theta * u);
}

// uniform point of the closed ball {|g - I| <= r}, by Haar rejection on the
// quaternion cap (exact: sample the cap angle from its marginal density)
inline Mat2 ball_uniform(double r, std::mt19937_64& rng) {
  // quaternion cap w >= 1 - r^2/2 ; density of theta = angle(w) on S^3 is
  // proportional to sin^2(theta); sample by rejection against sin^2
  double thmax = std::acos(std::max(-1.0, 1.0 - r * r / 2.0));
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> n01(0.0, 1.0);
  double th;
  do {
    th = thmax * u01(rng);
  } while (u01(rng) > std::pow(std::sin(th) / std::sin(thmax), 2.0));
  Vec3 ax;
  do {
    ax = Vec3(n01(rng), n01(rng), n01(rng));
  } while (ax.norm() < 1e-8);
  ax.normalize();
  Quat q;
  q[0] = std::cos(th);
  q[1] = std::sin(th) * ax[0];
  q[2] = std::sin(th) * ax[1];
  q[3] = std::sin(th) * ax[2];
  return from_quat(q);
}

inline Mat2 nth_root(const Mat2& g, int k) { return exp(log(g) / double(k)); }

inline Vec3 bracket(const Vec3& a, const Vec3& b) { return 2.0 * a.cross(b); }

// structure constants c_{jks}: [b_j, b_k] = sum_s c_{jks} b_s = 2 eps_{jks}
inline double structure_constant(int j, int k, int s) {
  if (j == k || k == s || j == s) return 0.0;
  int eps = (k - j + 3) % 3 == 1 && (s - k + 3) % 3 == 1 ? 1 : -1;
  return 2.0 * eps;
}

// Ad(g) in the b-basis (row convention: Ad(g) b_j = sum_s A(j,s) b_s);
// this is the SO(3) rotation matrix of the quaternion.
inline Eigen::Matrix3d adjoint(const Mat2& g) {
  Eigen::Matrix3d A;
  for (int j = 0; j < 3; ++j) {
    Mat2 bj = from_quat(Quat(0, j == 0, j == 1, j == 2));
    Mat2 c = g * bj * g.adjoint();
    Quat qc = to_quat(c);
    A(j, 0) = qc[1];
    A(j, 1) = qc[2];
    A(j, 2) = qc[3];
  }
  return A;
}

}  // namespace haarlab::su2
