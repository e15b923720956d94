// Command-line front end: train, generate, evaluate, benchmark, export.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hohmesh/condition_space.hpp"
#include "hohmesh/drl/checkpoint.hpp"
#include "hohmesh/drl/environments.hpp"
#include "hohmesh/drl/trainer.hpp"
#include "hohmesh/io/config.hpp"
#include "hohmesh/io/mesh_io.hpp"
#include "hohmesh/mesh_quality.hpp"
#include "hohmesh/pipeline.hpp"

namespace fs = std::filesystem;
using namespace hohmesh;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitMesh = 3;

struct Options {
  std::string space;
  std::string blade;
  std::string checkpoint;
  std::string mesh;
  std::string out = ".";
  std::string format = "p3d";
  std::uint64_t seed = 0;
  std::uint64_t episodes = 1000;
  std::uint64_t iterations = 2000;
  std::uint64_t seeds = 5;
  std::uint64_t checkpoint_every = 0;
  std::size_t sweeps = drl::MeshEnvironment::default_options().smoother.max_sweeps;
  bool diagnostics = false;
};

struct ConfigFailure {
  std::string message;
};

void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw ConfigFailure{std::string("missing ") + what};
  if (!fs::is_regular_file(path)) throw ConfigFailure{std::string(what) + " not found: " + path};
}

SpaceSpec load_space(const Options& o) {
  if (o.space.empty()) return SpaceSpec::defaults();
  require_file(o.space, "space config");
  return SpaceSpec::from_file(o.space);
}

PipelineOptions pipeline_options(const Options& o) {
  PipelineOptions p = drl::MeshEnvironment::default_options();
  p.smoother.max_sweeps = o.sweeps;
  return p;
}

fs::path prepare_out(const Options& o) {
  fs::path dir(o.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) throw ConfigFailure{"output directory not writable: " + o.out};
  return dir;
}

void print_report(const QualityReport& r) {
  std::printf("qj_min %.6f\nqj_avg %.6f\nqs_min %.6f\nqs_avg %.6f\nq %.6f\n", r.qj_min, r.qj_avg, r.qs_min, r.qs_avg,
              r.q);
}

void write_report(const fs::path& dir, const QualityReport& r, const io::FileProvenance& prov) {
  std::ofstream kv(dir / "report.txt");
  kv << "# hohmesh " << prov.version << "\n# seed = " << prov.seed << "\n# condition = " << prov.condition_hash << '\n'
     << to_key_value(r);
  auto j = to_json(r);
  j["provenance"] = {{"version", prov.version}, {"seed", prov.seed}, {"condition", prov.condition_hash}};
  std::ofstream js(dir / "report.json");
  js << j.dump(2) << '\n';
}

void write_mesh(const fs::path& dir, const MultiblockMesh& mesh, const Options& o) {
  const auto prov = io::provenance_for(mesh, o.seed);
  if (o.format == "p3d") {
    io::write_plot3d_file(dir / "mesh.p3d", mesh, prov);
  } else {
    io::write_vtk(dir, "mesh", mesh, prov);
  }
  write_report(dir, evaluate(mesh), prov);
}

int cmd_train(const Options& o) {
  SpaceSpec space = load_space(o);
  const fs::path dir = prepare_out(o);
  drl::TrainerConfig cfg;
  cfg.episodes = o.episodes;
  cfg.seed = o.seed;
  cfg.checkpoint_every = o.checkpoint_every;
  std::mt19937_64 rng(o.seed);
  drl::MeshEnvironment env(space, pipeline_options(o));
  drl::PolicyBundle bundle = o.checkpoint.empty() ? drl::PolicyBundle::create(env.state_dim(), env.action_dim(), cfg, rng)
                                                  : drl::load_checkpoint(o.checkpoint);
  std::ofstream log(dir / "train_log.csv");
  log << drl::log_header() << '\n';
  drl::TrainHooks hooks;
  hooks.on_episode = [&](const drl::EpisodeLog& e) {
    log << drl::log_line(e) << '\n';
    if (o.diagnostics && e.episode % 100 == 0)
      std::fprintf(stderr, "episode %llu reward %.4f sigma %.3f\n", static_cast<unsigned long long>(e.episode),
                   e.reward, e.sigma);
  };
  hooks.on_checkpoint = [&](const drl::PolicyBundle& b) { drl::save_checkpoint(dir / "checkpoint.bin", b); };
  const auto entries = drl::train(bundle, env, cfg, rng, hooks);
  log.flush();
  drl::save_checkpoint(dir / "checkpoint.bin", bundle);

  // J_pi moving average over the last 100 actor updates.
  std::vector<double> j;
  for (const auto& e : entries)
    if (!std::isnan(e.j_pi)) j.push_back(e.j_pi);
  const std::size_t w = std::min<std::size_t>(100, j.size());
  const double j_avg = w ? std::accumulate(j.end() - static_cast<std::ptrdiff_t>(w), j.end(), 0.0) / w : 0.0;
  std::ofstream summary(dir / "summary.txt");
  summary << "episodes = " << bundle.episode << "\ncritic_steps = " << bundle.critic_steps
          << "\nactor_steps = " << bundle.actor_steps << "\nmesh_failures = " << env.stats().failures
          << "\nj_pi_moving_average = " << io::fmt17(j_avg) << '\n';
  std::printf("trained %llu episodes, J_pi (last %zu) %.6f, failures %llu\n",
              static_cast<unsigned long long>(bundle.episode), w, j_avg,
              static_cast<unsigned long long>(env.stats().failures));
  return kExitOk;
}

PassageCondition load_blade(const Options& o, MeshingParams* params = nullptr) {
  require_file(o.blade, "blade config");
  return condition_from_config(io::read_key_values(o.blade), params);
}

int cmd_generate(const Options& o) {
  require_file(o.checkpoint, "checkpoint");
  const SpaceSpec space = load_space(o);
  const PassageCondition cond = load_blade(o);
  const fs::path dir = prepare_out(o);
  const auto bundle = drl::load_checkpoint(o.checkpoint);
  const auto shot = drl::generate_single_shot(bundle, cond, space, pipeline_options(o));
  write_mesh(dir, shot.result.mesh, o);
  print_report(shot.result.report);
  return kExitOk;
}

int cmd_export(const Options& o) {
  MeshingParams params;
  const PassageCondition cond = load_blade(o, &params);
  const fs::path dir = prepare_out(o);
  const MeshResult r = generate_mesh(cond, params, pipeline_options(o));
  write_mesh(dir, r.mesh, o);
  print_report(r.report);
  return kExitOk;
}

int cmd_evaluate(const Options& o) {
  require_file(o.mesh, "mesh file");
  const MultiblockMesh mesh = io::read_plot3d_mesh(o.mesh);
  print_report(evaluate(mesh));
  return kExitOk;
}

int cmd_benchmark(const Options& o) {
  require_file(o.checkpoint, "checkpoint");
  const SpaceSpec space = load_space(o);
  const PassageCondition cond = load_blade(o);
  const fs::path dir = prepare_out(o);
  const auto bundle = drl::load_checkpoint(o.checkpoint);
  const auto shot = drl::generate_single_shot(bundle, cond, space, pipeline_options(o));
  const double q_sa = shot.result.report.q;
  std::printf("single-shot q %.6f\n", q_sa);

  drl::MeshEnvironment env(space, pipeline_options(o));
  const drl::Vector state = env.set_condition(cond);
  std::vector<std::vector<double>> traces;
  for (std::uint64_t k = 0; k < o.seeds; ++k) {
    drl::TrainerConfig cfg;
    cfg.episodes = o.iterations;
    cfg.seed = o.seed + k;
    traces.push_back(drl::iterative_optimize(env, state, cfg).trace);
    std::printf("seed %llu best q %.6f\n", static_cast<unsigned long long>(cfg.seed),
                traces.back().empty() ? 0.0 : traces.back().back());
  }
  std::ofstream csv(dir / "benchmark.csv");
  csv << "# hohmesh " << io::kToolVersion << "\n# seed = " << o.seed << "\n# condition = " << io::condition_hash(cond)
      << "\n# q_single_shot = " << io::fmt17(q_sa) << "\niteration";
  for (std::uint64_t k = 0; k < o.seeds; ++k) csv << ",seed_" << (o.seed + k);
  csv << '\n';
  for (std::uint64_t it = 0; it < o.iterations; ++it) {
    csv << it + 1;
    for (const auto& t : traces) csv << ',' << io::fmt17(t[it] / q_sa);
    csv << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structured HOH meshes for blade passages with a learned meshing policy"};
  app.require_subcommand(1);
  Options o;

  const auto common = [&](CLI::App* c) {
    c->add_option("--space", o.space, "space config (name.min / name.max lines)");
    c->add_option("--out", o.out, "output directory");
    c->add_option("--seed", o.seed, "random seed");
    c->add_option("--sweeps", o.sweeps, "smoother sweep cap");
    c->add_flag("--diagnostics", o.diagnostics, "progress on stderr");
  };
  auto* train = app.add_subcommand("train", "train the meshing policy");
  common(train);
  train->add_option("--episodes", o.episodes, "episode budget");
  train->add_option("--checkpoint", o.checkpoint, "resume from this checkpoint");
  train->add_option("--checkpoint-every", o.checkpoint_every, "checkpoint period in episodes");

  auto* generate = app.add_subcommand("generate", "single-shot mesh from a trained policy");
  common(generate);
  generate->add_option("--blade", o.blade, "blade / passage config")->required();
  generate->add_option("--checkpoint", o.checkpoint, "trained policy")->required();
  generate->add_option("--format", o.format, "mesh format")->check(CLI::IsMember({"p3d", "vtk"}));

  auto* evaluate_cmd = app.add_subcommand("evaluate", "quality of a Plot3D mesh written by this tool");
  evaluate_cmd->add_option("mesh", o.mesh, "mesh file")->required();

  auto* bench = app.add_subcommand("benchmark", "single-shot against iterative optimization");
  common(bench);
  bench->add_option("--blade", o.blade, "blade / passage config")->required();
  bench->add_option("--checkpoint", o.checkpoint, "trained policy")->required();
  bench->add_option("--iterations", o.iterations, "iterations per seed");
  bench->add_option("--seeds", o.seeds, "number of seeds");

  auto* exp = app.add_subcommand("export", "mesh with explicit meshing parameters from the blade config");
  common(exp);
  exp->add_option("--blade", o.blade, "blade / passage config with optional meshing parameters")->required();
  exp->add_option("--format", o.format, "mesh format")->check(CLI::IsMember({"p3d", "vtk"}));

  CLI11_PARSE(app, argc, argv);
  try {
    if (train->parsed()) return cmd_train(o);
    if (generate->parsed()) return cmd_generate(o);
    if (evaluate_cmd->parsed()) return cmd_evaluate(o);
    if (bench->parsed()) return cmd_benchmark(o);
    if (exp->parsed()) return cmd_export(o);
  } catch (const ConfigFailure& e) {
    std::fprintf(stderr, "error: %s\n", e.message.c_str());
    return kExitConfig;
  } catch (const StageError& e) {
    std::fprintf(stderr, "mesh generation failed in stage %s: %s\n", e.stage().c_str(), e.what());
    return kExitMesh;
  } catch (const Error& e) {
    const bool config = e.kind() == ErrorKind::ConfigError || e.kind() == ErrorKind::UnknownVariable;
    std::fprintf(stderr, "error: %s\n", e.what());
    return config ? kExitConfig : kExitError;
  }
  return kExitError;
}
