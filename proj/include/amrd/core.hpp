#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace amrd {

/// Plain 2D vector used for positions, normals and momentum blocks.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
  constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
};

constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
constexpr Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
// 2D wedge product a ∧ b = a.x b.y - a.y b.x
constexpr double wedge(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
// a^⊥ = (-a.y, a.x), so that a ∧ a^⊥ = |a|^2
constexpr Vec2 perp(const Vec2& a) { return {-a.y, a.x}; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  constexpr Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  constexpr Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
};

constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

/// Conservative 4-vector (rho, m_x, m_y, E) and anything shaped like it
/// (fluxes, residuals).
using State = std::array<double, 4>;

constexpr State& operator+=(State& a, const State& b) {
  for (std::size_t i = 0; i < 4; ++i) a[i] += b[i];
  return a;
}
constexpr State& operator-=(State& a, const State& b) {
  for (std::size_t i = 0; i < 4; ++i) a[i] -= b[i];
  return a;
}
constexpr State& operator*=(State& a, double s) {
  for (auto& v : a) v *= s;
  return a;
}
constexpr State operator+(State a, const State& b) { return a += b; }
constexpr State operator-(State a, const State& b) { return a -= b; }
constexpr State operator*(double s, State a) { return a *= s; }
constexpr State operator*(State a, double s) { return a *= s; }

constexpr Vec2 momentum(const State& u) { return {u[1], u[2]}; }

inline double max_abs(const State& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

// ---------------------------------------------------------------------------
// Errors. Every failure the solver reports is an amrd::Error; the driver maps
// the families below onto process exit codes.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class MeshError : public Error {
 public:
  using Error::Error;
};

class FormatError : public MeshError {
 public:
  FormatError(const std::string& what, std::size_t line)
      : MeshError(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ConformalityError : public MeshError {
 public:
  using MeshError::MeshError;
};

class PeriodicityMismatch : public MeshError {
 public:
  using MeshError::MeshError;
};

class DegenerateMesh : public MeshError {
 public:
  using MeshError::MeshError;
};

class UnsupportedElement : public Error {
 public:
  using Error::Error;
};

class DegenerateElement : public Error {
 public:
  using Error::Error;
};

/// Inadmissible conservative state (non-positive density or pressure, NaN).
class StateError : public Error {
 public:
  StateError(const std::string& what, const State& u, long element = -1)
      : Error(what), state_(u), element_(element) {}
  const State& state() const noexcept { return state_; }
  long element() const noexcept { return element_; }

 private:
  State state_;
  long element_;
};

/// A DeC iteration produced an inadmissible nodal state.
class StepFailure : public Error {
 public:
  StepFailure(const std::string& what, int iteration, long dof)
      : Error(what), iteration_(iteration), dof_(dof) {}
  int iteration() const noexcept { return iteration_; }
  long dof() const noexcept { return dof_; }

 private:
  int iteration_;
  long dof_;
};

}  // namespace amrd
