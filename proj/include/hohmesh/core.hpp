#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hohmesh {

inline constexpr double kPi = std::numbers::pi;

inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

enum class ErrorKind {
  InvalidShape,
  DegenerateScaling,
  BoundaryIntersectsBlade,
  InfeasibleClustering,
  ExtrusionFailure,
  InvalidMesh,
  SingularMetric,
  FoldedMesh,
  InterfaceMismatch,
  DegenerateCell,
  SamplingExhausted,
  UnknownVariable,
  DimensionMismatch,
  IoError,
  ConfigError,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidShape: return "InvalidShape";
    case ErrorKind::DegenerateScaling: return "DegenerateScaling";
    case ErrorKind::BoundaryIntersectsBlade: return "BoundaryIntersectsBlade";
    case ErrorKind::InfeasibleClustering: return "InfeasibleClustering";
    case ErrorKind::ExtrusionFailure: return "ExtrusionFailure";
    case ErrorKind::InvalidMesh: return "InvalidMesh";
    case ErrorKind::SingularMetric: return "SingularMetric";
    case ErrorKind::FoldedMesh: return "FoldedMesh";
    case ErrorKind::InterfaceMismatch: return "InterfaceMismatch";
    case ErrorKind::DegenerateCell: return "DegenerateCell";
    case ErrorKind::SamplingExhausted: return "SamplingExhausted";
    case ErrorKind::UnknownVariable: return "UnknownVariable";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a kind so callers (the trainer,
/// the CLI) can branch on it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define HOHMESH_REQUIRE(cond, kind, msg)                 \
  do {                                                   \
    if (!(cond)) throw ::hohmesh::Error((kind), (msg));  \
  } while (0)

// ---------------------------------------------------------------------------
// Vec2
// ---------------------------------------------------------------------------

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
  friend constexpr bool operator==(Vec2 a, Vec2 b) = default;
};

inline constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 normalized(Vec2 a) { return a / norm(a); }
// Rotates by +90 degrees.
inline constexpr Vec2 left_normal(Vec2 a) { return {-a.y, a.x}; }
inline constexpr Vec2 right_normal(Vec2 a) { return {a.y, -a.x}; }
inline Vec2 unit_from_angle(double angle) { return {std::cos(angle), std::sin(angle)}; }

// ---------------------------------------------------------------------------
// Grid2D: ni x nj values, i fastest.
// ---------------------------------------------------------------------------

template <class T>
class Grid2D {
 public:
  Grid2D() = default;
  Grid2D(std::size_t ni, std::size_t nj, T init = T{}) : ni_(ni), nj_(nj), data_(ni * nj, init) {}

  std::size_t ni() const noexcept { return ni_; }
  std::size_t nj() const noexcept { return nj_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t i, std::size_t j) {
    assert(i < ni_ && j < nj_);
    return data_[j * ni_ + i];
  }
  const T& operator()(std::size_t i, std::size_t j) const {
    assert(i < ni_ && j < nj_);
    return data_[j * ni_ + i];
  }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }

  friend bool operator==(const Grid2D&, const Grid2D&) = default;

 private:
  std::size_t ni_ = 0;
  std::size_t nj_ = 0;
  std::vector<T> data_;
};

// Index arithmetic on a closed (wrapping) direction.
inline std::size_t wrap_index(std::ptrdiff_t i, std::size_t n) {
  const auto m = static_cast<std::ptrdiff_t>(n);
  return static_cast<std::size_t>(((i % m) + m) % m);
}

}  // namespace hohmesh
