#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hohmesh/blade_geometry.hpp"
#include "hohmesh/core.hpp"
#include "hohmesh/io/config.hpp"
#include "hohmesh/passage_domain.hpp"

namespace hohmesh {

// Space units: lengths are multiples of the chord, angles are degrees, counts are integers.
enum class VarKind { Length, Angle, Ratio, Count };

struct VariableRange {
  std::string name;
  double min = 0.0;
  double max = 1.0;
  VarKind kind = VarKind::Ratio;
};

inline constexpr std::size_t kConditionDim = 27;
inline constexpr std::size_t kDecisionDim = 8;

/// Ranges of the condition variables (the state) and the decision variables (the action).
struct SpaceSpec {
  std::vector<VariableRange> condition;
  std::vector<VariableRange> decision;
  std::size_t max_rejections = 1000;

  static SpaceSpec defaults() {
    SpaceSpec s;
    auto& c = s.condition;
    c.push_back({"x_le", -0.1, 0.1, VarKind::Length});
    c.push_back({"y_le", -0.1, 0.1, VarKind::Length});
    c.push_back({"chord", 0.8, 1.2, VarKind::Length});
    c.push_back({"stagger", -65.0, 65.0, VarKind::Angle});
    c.push_back({"theta_le", -75.0, 75.0, VarKind::Angle});
    c.push_back({"theta_te", -75.0, 75.0, VarKind::Angle});
    c.push_back({"d_le", 0.15, 0.7, VarKind::Ratio});
    c.push_back({"d_te", 0.15, 0.7, VarKind::Ratio});
    c.push_back({"rho_le", 0.002, 0.03, VarKind::Length});
    c.push_back({"rho_te", 0.002, 0.03, VarKind::Length});
    for (int k = 1; k <= 6; ++k) c.push_back({"t_upper_" + std::to_string(k), 0.005, 0.12, VarKind::Length});
    for (int k = 1; k <= 6; ++k) c.push_back({"t_lower_" + std::to_string(k), 0.005, 0.12, VarKind::Length});
    c.push_back({"pitch", 0.3, 1.0, VarKind::Length});
    c.push_back({"x_in", 0.0, 1.0, VarKind::Length});
    c.push_back({"x_out", 0.0, 1.0, VarKind::Length});
    c.push_back({"n_o", 10000, 50000, VarKind::Count});
    c.push_back({"dn1", 2e-5, 2e-4, VarKind::Length});
    auto& d = s.decision;
    d.push_back({"y_in", -0.5, 0.5, VarKind::Length});
    d.push_back({"y_out", -0.5, 0.5, VarKind::Length});
    d.push_back({"alpha_camber", 0.0, 1.0, VarKind::Ratio});
    d.push_back({"beta_in", 0.1, 0.9, VarKind::Ratio});
    d.push_back({"beta_out", 0.1, 0.9, VarKind::Ratio});
    d.push_back({"n_t", 100, 1000, VarKind::Count});
    d.push_back({"gamma_le", 0.0, 5.0, VarKind::Ratio});
    d.push_back({"gamma_te", 0.0, 5.0, VarKind::Ratio});
    return s;
  }

  const VariableRange* lookup(std::string_view name) const {
    for (const auto* list : {&condition, &decision})
      for (const auto& v : *list)
        if (v.name == name) return &v;
    return nullptr;
  }
  const VariableRange& find(std::string_view name) const {
    const auto* v = lookup(name);
    HOHMESH_REQUIRE(v != nullptr, ErrorKind::UnknownVariable, "unknown variable '" + std::string(name) + "'");
    return *v;
  }
  VariableRange& find(std::string_view name) { return const_cast<VariableRange&>(std::as_const(*this).find(name)); }

  void validate() const {
    HOHMESH_REQUIRE(condition.size() == kConditionDim && decision.size() == kDecisionDim,
                    ErrorKind::DimensionMismatch, "space must have 27 condition and 8 decision variables");
    for (const auto* list : {&condition, &decision})
      for (const auto& v : *list)
        HOHMESH_REQUIRE(v.min < v.max, ErrorKind::ConfigError, "range of '" + v.name + "' must satisfy min < max");
  }

  /// Applies `name.min = v` / `name.max = v` entries (plus `max_rejections`).
  void apply_overrides(const io::KeyValues& kv) {
    for (const auto& [key, value] : kv) {
      if (key == "max_rejections") {
        max_rejections = static_cast<std::size_t>(io::parse_double(value, key));
        continue;
      }
      const auto dot = key.rfind('.');
      HOHMESH_REQUIRE(dot != std::string::npos, ErrorKind::ConfigError, "expected name.min or name.max, got " + key);
      const std::string name = key.substr(0, dot);
      const std::string bound = key.substr(dot + 1);
      VariableRange& v = find(name);
      const double x = io::parse_double(value, key);
      if (bound == "min") v.min = x;
      else if (bound == "max") v.max = x;
      else throw Error(ErrorKind::ConfigError, "expected name.min or name.max, got " + key);
    }
    validate();
  }

  static SpaceSpec from_file(const std::filesystem::path& path) {
    SpaceSpec s = defaults();
    s.apply_overrides(io::read_key_values(path));
    return s;
  }
};

/// Affine map of [min, max] onto [-1, 1]. Out-of-range inputs are clamped and flagged.
inline double to_unit(double v, const VariableRange& r, bool* clamped = nullptr) {
  const double c = std::clamp(v, r.min, r.max);
  if (clamped) *clamped = c != v;
  return 2.0 * (c - r.min) / (r.max - r.min) - 1.0;
}

inline double from_unit(double u, const VariableRange& r) {
  const double c = std::clamp(u, -1.0, 1.0);
  const double v = r.min + 0.5 * (c + 1.0) * (r.max - r.min);
  return r.kind == VarKind::Count ? std::round(v) : v;
}

inline double to_unit(double v, std::string_view var, const SpaceSpec& s, bool* clamped = nullptr) {
  return to_unit(v, s.find(var), clamped);
}
inline double from_unit(double u, std::string_view var, const SpaceSpec& s) { return from_unit(u, s.find(var)); }

/// Condition vector in space units, ordered as SpaceSpec::defaults().condition.
inline std::array<double, kConditionDim> condition_values(const PassageCondition& c) {
  const auto& b = c.bsp;
  const double C = b.chord;
  std::array<double, kConditionDim> v{};
  std::size_t k = 0;
  v[k++] = b.x_le / C;
  v[k++] = b.y_le / C;
  v[k++] = C;
  v[k++] = rad2deg(b.stagger);
  v[k++] = rad2deg(b.theta_le);
  v[k++] = rad2deg(b.theta_te);
  v[k++] = b.d_le;
  v[k++] = b.d_te;
  v[k++] = b.rho_le / C;
  v[k++] = b.rho_te / C;
  for (double t : b.t_upper) v[k++] = t / C;
  for (double t : b.t_lower) v[k++] = t / C;
  v[k++] = c.pitch / C;
  v[k++] = c.x_in / C;
  v[k++] = c.x_out / C;
  v[k++] = static_cast<double>(c.n_o);
  v[k++] = c.dn1 / C;
  return v;
}

inline PassageCondition condition_from_values(std::span<const double> v) {
  HOHMESH_REQUIRE(v.size() == kConditionDim, ErrorKind::DimensionMismatch, "condition vector must have 27 entries");
  PassageCondition c;
  auto& b = c.bsp;
  const double C = v[2];
  std::size_t k = 0;
  b.x_le = v[k++] * C;
  b.y_le = v[k++] * C;
  b.chord = v[k++];
  b.stagger = deg2rad(v[k++]);
  b.theta_le = deg2rad(v[k++]);
  b.theta_te = deg2rad(v[k++]);
  b.d_le = v[k++];
  b.d_te = v[k++];
  b.rho_le = v[k++] * C;
  b.rho_te = v[k++] * C;
  for (double& t : b.t_upper) t = v[k++] * C;
  for (double& t : b.t_lower) t = v[k++] * C;
  c.pitch = v[k++] * C;
  c.x_in = v[k++] * C;
  c.x_out = v[k++] * C;
  c.n_o = static_cast<std::int64_t>(std::llround(v[k++]));
  c.dn1 = v[k++] * C;
  return c;
}

/// Network state: every condition variable mapped to [-1, 1].
inline std::vector<double> condition_to_state(const PassageCondition& c, const SpaceSpec& s) {
  const auto v = condition_values(c);
  std::vector<double> out(kConditionDim);
  for (std::size_t k = 0; k < kConditionDim; ++k) out[k] = to_unit(v[k], s.condition[k]);
  return out;
}

inline std::array<double, kDecisionDim> params_values(const MeshingParams& p, double chord) {
  return {p.y_in / chord, p.y_out / chord, p.alpha_camber, p.beta_in, p.beta_out, static_cast<double>(p.n_t),
          p.gamma_le, p.gamma_te};
}

inline MeshingParams params_from_values(std::span<const double> v, double chord) {
  HOHMESH_REQUIRE(v.size() == kDecisionDim, ErrorKind::DimensionMismatch, "decision vector must have 8 entries");
  for (const double x : v) HOHMESH_REQUIRE(std::isfinite(x), ErrorKind::ConfigError, "decision values must be finite");
  MeshingParams p;
  p.y_in = v[0] * chord;
  p.y_out = v[1] * chord;
  p.alpha_camber = v[2];
  p.beta_in = v[3];
  p.beta_out = v[4];
  p.n_t = static_cast<std::int64_t>(std::llround(v[5]));
  p.gamma_le = v[6];
  p.gamma_te = v[7];
  return p;
}

inline MeshingParams action_to_params(std::span<const double> a, const PassageCondition& c, const SpaceSpec& s) {
  HOHMESH_REQUIRE(a.size() == kDecisionDim, ErrorKind::DimensionMismatch, "action must have 8 entries");
  std::array<double, kDecisionDim> v{};
  for (std::size_t k = 0; k < kDecisionDim; ++k) v[k] = from_unit(a[k], s.decision[k]);
  return params_from_values(v, c.bsp.chord);
}

inline std::vector<double> params_to_action(const MeshingParams& p, const PassageCondition& c, const SpaceSpec& s) {
  const auto v = params_values(p, c.bsp.chord);
  std::vector<double> out(kDecisionDim);
  for (std::size_t k = 0; k < kDecisionDim; ++k) out[k] = to_unit(v[k], s.decision[k]);
  return out;
}

/// Shape filter: the profile must build as a simple loop and have at most two
/// extreme points along the stagger direction.
inline bool feasible_blade(const BladeShapeParams& bsp, std::size_t samples = 512) {
  try {
    const BladeProfile p = build_profile(bsp, samples);
    return count_extrema(p.surface, unit_from_angle(bsp.stagger), 1e-12 * bsp.chord) <= 2;
  } catch (const Error&) {
    return false;
  }
}

/// Uniform independent sampling per variable with rejection of infeasible blades.
template <class Rng>
PassageCondition sample_condition(const SpaceSpec& s, Rng& rng) {
  s.validate();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t attempt = 0; attempt < s.max_rejections; ++attempt) {
    std::array<double, kConditionDim> v{};
    for (std::size_t k = 0; k < kConditionDim; ++k) {
      const auto& r = s.condition[k];
      const double x = r.min + unit(rng) * (r.max - r.min);
      v[k] = r.kind == VarKind::Count ? std::round(x) : x;
    }
    PassageCondition c = condition_from_values(v);
    if (feasible_blade(c.bsp)) return c;
  }
  throw Error(ErrorKind::SamplingExhausted,
              std::to_string(s.max_rejections) + " consecutive blade samples were rejected; check the space ranges");
}

inline PassageCondition sample_condition(const SpaceSpec& s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample_condition(s, rng);
}

/// Reads a passage definition: physical lengths, angles in degrees.
/// Optional meshing parameter keys fill `params` when given.
inline PassageCondition condition_from_config(const io::KeyValues& kv, MeshingParams* params = nullptr) {
  PassageCondition c;
  auto& b = c.bsp;
  const auto get = [&](std::string_view key, double& out, bool degrees = false) {
    if (const auto it = kv.find(key); it != kv.end()) {
      const double v = io::parse_double(it->second, key);
      out = degrees ? deg2rad(v) : v;
      return true;
    }
    return false;
  };
  static const std::array<std::string_view, 39> known = {
      "x_le", "y_le", "chord", "stagger", "theta_le", "theta_te", "d_le", "d_te", "rho_le", "rho_te",
      "t_upper_1", "t_upper_2", "t_upper_3", "t_upper_4", "t_upper_5", "t_upper_6",
      "t_lower_1", "t_lower_2", "t_lower_3", "t_lower_4", "t_lower_5", "t_lower_6",
      "pitch", "x_in", "x_out", "n_o", "dn1",
      "y_in", "y_out", "alpha_camber", "beta_in", "beta_out", "n_t", "gamma_le", "gamma_te",
      "name", "seed", "format", "comment"};
  for (const auto& [key, value] : kv)
    HOHMESH_REQUIRE(std::find(known.begin(), known.end(), key) != known.end(), ErrorKind::UnknownVariable,
                    "unknown blade config key '" + key + "'");
  get("x_le", b.x_le);
  get("y_le", b.y_le);
  get("chord", b.chord);
  get("stagger", b.stagger, true);
  get("theta_le", b.theta_le, true);
  get("theta_te", b.theta_te, true);
  get("d_le", b.d_le);
  get("d_te", b.d_te);
  get("rho_le", b.rho_le);
  get("rho_te", b.rho_te);
  for (std::size_t k = 0; k < kThicknessCoefficients; ++k) {
    get("t_upper_" + std::to_string(k + 1), b.t_upper[k]);
    get("t_lower_" + std::to_string(k + 1), b.t_lower[k]);
  }
  get("pitch", c.pitch);
  get("x_in", c.x_in);
  get("x_out", c.x_out);
  double n_o = static_cast<double>(c.n_o);
  if (get("n_o", n_o)) c.n_o = static_cast<std::int64_t>(std::llround(n_o));
  get("dn1", c.dn1);
  if (params) {
    get("y_in", params->y_in);
    get("y_out", params->y_out);
    get("alpha_camber", params->alpha_camber);
    get("beta_in", params->beta_in);
    get("beta_out", params->beta_out);
    double n_t = static_cast<double>(params->n_t);
    if (get("n_t", n_t)) params->n_t = static_cast<std::int64_t>(std::llround(n_t));
    get("gamma_le", params->gamma_le);
    get("gamma_te", params->gamma_te);
  }
  c.validate();
  return c;
}

}  // namespace hohmesh
