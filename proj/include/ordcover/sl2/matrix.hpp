#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "ordcover/errors.hpp"

namespace ordcover::sl2 {

/// Element of PSL2(R): a unimodular 2x2 matrix modulo sign.
///
/// Stored normalized: determinant 1 (rescaled by sqrt(det)), entries that
/// are rounding noise relative to the largest entry flushed to zero, and the
/// first nonzero of (a, b, c) positive.
class ProjectiveMatrix {
 public:
  ProjectiveMatrix() = default;

  ProjectiveMatrix(double a, double b, double c, double d) : m_{a, b, c, d} { normalize(); }

  static ProjectiveMatrix identity() { return {}; }

  static ProjectiveMatrix rotation(double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    return {c, -s, s, c};
  }

  double a() const { return m_[0]; }
  double b() const { return m_[1]; }
  double c() const { return m_[2]; }
  double d() const { return m_[3]; }
  std::array<double, 4> entries() const { return m_; }

  double det() const { return m_[0] * m_[3] - m_[1] * m_[2]; }
  double trace() const { return m_[0] + m_[3]; }
  double frobenius2() const { return m_[0] * m_[0] + m_[1] * m_[1] + m_[2] * m_[2] + m_[3] * m_[3]; }

  ProjectiveMatrix inverse() const { return {m_[3], -m_[1], -m_[2], m_[0]}; }

  friend ProjectiveMatrix operator*(const ProjectiveMatrix& p, const ProjectiveMatrix& q) {
    // Entries below the rounding error of the product are noise.
    const double noise = 4.0 * std::numeric_limits<double>::epsilon() * std::sqrt(p.frobenius2() * q.frobenius2());
    return {Unimodular{noise}, p.a() * q.a() + p.b() * q.c(), p.a() * q.b() + p.b() * q.d(),
            p.c() * q.a() + p.d() * q.c(), p.c() * q.b() + p.d() * q.d()};
  }

  /// M (x, y)^T.
  std::array<double, 2> apply(double x, double y) const { return {m_[0] * x + m_[1] * y, m_[2] * x + m_[3] * y}; }

  bool near(const ProjectiveMatrix& o, double tol) const {
    for (int i = 0; i < 4; ++i) {
      if (std::abs(m_[i] - o.m_[i]) > tol) return false;
    }
    return true;
  }

  /// near() up to the sign identification.
  bool near_projective(const ProjectiveMatrix& o, double tol) const {
    if (near(o, tol)) return true;
    for (int i = 0; i < 4; ++i) {
      if (std::abs(m_[i] + o.m_[i]) > tol) return false;
    }
    return true;
  }

 private:
  struct Unimodular {
    double noise;
  };

  /// Product of unimodular factors: the determinant is 1 by construction,
  /// and recomputing it from large entries is pure cancellation, so it is
  /// only used for rescaling when it is numerically meaningful.
  ProjectiveMatrix(Unimodular u, double a, double b, double c, double d) : m_{a, b, c, d} { normalize(true, u.noise); }

  void normalize(bool unimodular = false, double noise = 0.0) {
    double scale = 0.0;
    for (double e : m_) {
      if (!std::isfinite(e)) throw invariant_error("non-finite matrix entry");
      scale = std::max(scale, std::abs(e));
    }
    const double flush = std::max(noise, 8.0 * std::numeric_limits<double>::epsilon() * scale);
    for (double& e : m_) {
      if (std::abs(e) <= flush) e = 0.0;
    }
    const double dt = det();
    const bool reliable = frobenius2() * std::numeric_limits<double>::epsilon() < 1e-6;
    if (!unimodular || reliable) {
      if (!(dt > 0.0)) throw invariant_error("matrix determinant must be positive");
      const double s = std::sqrt(dt);
      for (double& e : m_) e /= s;
    }
    const double lead = m_[0] != 0.0 ? m_[0] : (m_[1] != 0.0 ? m_[1] : m_[2]);
    if (lead < 0.0) {
      for (double& e : m_) e = -e;
    }
  }

  std::array<double, 4> m_{1.0, 0.0, 0.0, 1.0};
};

/// Boundary vector field of a Lie algebra element on the x-coordinate
/// (direction (cos pi x, sin pi x)):
///   E(x) = (c - b)/2 + ((c + b)/2) cos 2 pi x - a sin 2 pi x,
/// and the flow of exp(tX) moves x with velocity E(x)/pi.
struct BoundaryVectorField {
  double constant = 0.0;
  double cos_coeff = 0.0;
  double sin_coeff = 0.0;

  double evaluate(double x) const {
    const double w = 2.0 * std::numbers::pi * x;
    return constant + cos_coeff * std::cos(w) + sin_coeff * std::sin(w);
  }

  double velocity(double x) const { return evaluate(x) / std::numbers::pi; }

  /// Closed-form minimum over x.
  double minimum() const { return constant - std::hypot(cos_coeff, sin_coeff); }
  double maximum() const { return constant + std::hypot(cos_coeff, sin_coeff); }
};

/// Traceless matrix [[a, b], [c, -a]] in sl2(R).
struct LieAlgebraElement {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  /// -det X; sign decides the trace class of exp(tX).
  double discriminant() const { return a * a + b * c; }

  BoundaryVectorField field() const { return {(c - b) / 2.0, (c + b) / 2.0, -a}; }

  /// Bound on |velocity| of the boundary flow.
  double max_speed() const {
    const auto e = field();
    return (std::abs(e.constant) + std::hypot(e.cos_coeff, e.sin_coeff)) / std::numbers::pi;
  }

  /// exp(tX) = C I + S X with X^2 = (a^2 + bc) I.
  ProjectiveMatrix exp_matrix(double t) const {
    const double q = discriminant();
    double C = 1.0, S = t;
    if (q < 0.0) {
      const double w = std::sqrt(-q);
      C = std::cos(w * t);
      S = std::sin(w * t) / w;
    } else if (q > 0.0) {
      const double w = std::sqrt(q);
      C = std::cosh(w * t);
      S = std::sinh(w * t) / w;
    }
    return {C + S * a, S * b, S * c, C - S * a};
  }
};

}  // namespace ordcover::sl2
