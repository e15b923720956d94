#pragma once

#include <string>

#include "hohmesh/blade_geometry.hpp"
#include "hohmesh/elliptic_smoother.hpp"
#include "hohmesh/hmesh_assembler.hpp"
#include "hohmesh/mesh_quality.hpp"
#include "hohmesh/omesh_init.hpp"
#include "hohmesh/passage_domain.hpp"

namespace hohmesh {

/// An Error tagged with the pipeline stage that raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& e) : Error(e.kind(), stage + ": " + e.what()), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

struct PipelineOptions {
  std::size_t profile_samples = 0;  // 0 picks max(1024, 4 N_t)
  SmootherSettings smoother{};
  bool smooth = true;
};

struct MeshResult {
  MultiblockMesh mesh;
  QualityReport report;
  std::vector<double> residual_history;
  bool smoother_converged = false;
  double wall_angle_before = 0.0;
  double wall_angle_after = 0.0;
};

/// Full generator: blade profile, passage boundary, initial O block, elliptic
/// smoothing, H blocks and quality evaluation.
inline MeshResult generate_mesh(const PassageCondition& cond, const MeshingParams& params,
                                const PipelineOptions& opt = {}) {
  const auto stage = [](const char* name, auto&& fn) {
    try {
      return fn();
    } catch (const StageError&) {
      throw;
    } catch (const Error& e) {
      throw StageError(name, e);
    }
  };
  stage("condition", [&] {
    cond.validate();
    return 0;
  });
  const std::size_t samples =
      opt.profile_samples ? opt.profile_samples : std::max<std::size_t>(1024, 4 * static_cast<std::size_t>(params.n_t));
  const BladeProfile profile = stage("blade_geometry", [&] { return build_profile(cond.bsp, samples); });
  const PassageBoundary boundary = stage("passage_domain", [&] { return build_boundary(cond, params, profile); });
  const ClusterSpec spec = ClusterSpec::from(cond, params);
  StructuredBlock initial = stage("omesh_init", [&] {
    auto nodes = distribute_surface_nodes(profile, spec);
    auto block = extrude_to_outer(nodes, boundary, spec);
    require_unfolded(block, "initial O block");
    return block;
  });

  MeshResult out;
  out.wall_angle_before = mean_wall_angle_deviation(initial);
  StructuredBlock smoothed = stage("elliptic_smoother", [&] {
    if (!opt.smooth) return std::move(initial);
    SmoothResult r = smooth(std::move(initial), opt.smoother);
    out.residual_history = std::move(r.residual_history);
    out.smoother_converged = r.converged;
    require_convex(r.block, "smoothed O block");
    return std::move(r.block);
  });
  out.wall_angle_after = mean_wall_angle_deviation(smoothed);
  out.mesh = stage("hmesh_assembler", [&] { return build_h_blocks(boundary, std::move(smoothed)); });
  out.mesh.provenance = Provenance{cond, params};
  out.report = stage("mesh_quality", [&] { return evaluate(out.mesh); });
  return out;
}

}  // namespace hohmesh
