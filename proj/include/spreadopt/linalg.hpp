#pragma once

#include <cmath>

namespace spreadopt {

/// Plain 2-vector for drifts, portfolio weights and Brownian increments.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Lower-triangular 2x2 matrix [[a11, 0], [a21, a22]]; the shape the
/// volatility matrix is materialized in.
struct LowerTri2 {
  double a11 = 0.0;
  double a21 = 0.0;
  double a22 = 0.0;
};

constexpr Vec2 apply(const LowerTri2& m, Vec2 v) {
  return {m.a11 * v.x, m.a21 * v.x + m.a22 * v.y};
}

constexpr Vec2 apply_transpose(const LowerTri2& m, Vec2 v) {
  return {m.a11 * v.x + m.a21 * v.y, m.a22 * v.y};
}

/// Solves m * r = v by forward substitution.
constexpr Vec2 solve_lower(const LowerTri2& m, Vec2 v) {
  const double r1 = v.x / m.a11;
  return {r1, (v.y - m.a21 * r1) / m.a22};
}

/// Solves m^T * r = v by backward substitution.
constexpr Vec2 solve_upper_transpose(const LowerTri2& m, Vec2 v) {
  const double r2 = v.y / m.a22;
  return {(v.x - m.a21 * r2) / m.a11, r2};
}

/// Solves (m m^T) r = v with two triangular substitutions; no inverse is
/// ever materialized.
constexpr Vec2 solve_gram(const LowerTri2& m, Vec2 v) {
  return solve_upper_transpose(m, solve_lower(m, v));
}

/// Symmetric 2x2 matrix; the shape of Sigma Sigma^T.
struct Sym2 {
  double a11 = 0.0;
  double a12 = 0.0;
  double a22 = 0.0;
};

constexpr Sym2 gram(const LowerTri2& m) {
  return {m.a11 * m.a11, m.a11 * m.a21, m.a21 * m.a21 + m.a22 * m.a22};
}

constexpr Vec2 apply(const Sym2& m, Vec2 v) {
  return {m.a11 * v.x + m.a12 * v.y, m.a12 * v.x + m.a22 * v.y};
}

/// Quadratic form v^T m v.
constexpr double quad(const Sym2& m, Vec2 v) {
  return m.a11 * v.x * v.x + 2.0 * m.a12 * v.x * v.y + m.a22 * v.y * v.y;
}

}  // namespace spreadopt
