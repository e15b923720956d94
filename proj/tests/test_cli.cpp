// Runs the built command-line tool as a subprocess.

#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string output;  // stdout and stderr
};

Run run(const std::string& args) {
  const std::string cmd = std::string(HOHMESH_CLI) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  while (const auto n = std::fread(buf.data(), 1, buf.size(), pipe)) r.output.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path scratch() {
  const auto dir = fs::temp_directory_path() / "hohmesh_cli_test";
  fs::create_directories(dir);
  return dir;
}

fs::path write_blade(const fs::path& dir, const std::string& name, const std::string& extra = "") {
  const auto path = dir / name;
  std::ofstream(path) << "stagger = -30\ntheta_le = 20\ntheta_te = -60\n"
                         "t_upper_1 = 0.05\nt_upper_2 = 0.06\nt_upper_3 = 0.06\n"
                         "t_upper_4 = 0.05\nt_upper_5 = 0.04\nt_upper_6 = 0.03\n"
                         "t_lower_1 = 0.03\nt_lower_2 = 0.03\nt_lower_3 = 0.03\n"
                         "t_lower_4 = 0.02\nt_lower_5 = 0.02\nt_lower_6 = 0.01\n"
                         "pitch = 0.8\nx_in = 0.5\nx_out = 0.5\nn_o = 8000\ndn1 = 1e-4\n"
                      << extra;
  return path;
}

}  // namespace

TEST_CASE("missing space config exits 2 and names the path", "[cli]") {
  const auto r = run("train --space /no/such/space.cfg --episodes 1 --out " + (scratch() / "t0").string());
  CHECK(r.code == 2);
  CHECK(r.output.find("/no/such/space.cfg") != std::string::npos);
}

TEST_CASE("unknown blade keys exit 2", "[cli]") {
  const auto dir = scratch();
  const auto blade = write_blade(dir, "bad.cfg", "wobble = 3\n");
  const auto r = run("export --blade " + blade.string() + " --out " + (dir / "bad").string());
  CHECK(r.code == 2);
  CHECK(r.output.find("wobble") != std::string::npos);
}

TEST_CASE("zero episodes writes only the log header", "[cli]") {
  const auto out = scratch() / "t1";
  const auto r = run("train --episodes 0 --seed 3 --out " + out.string());
  REQUIRE(r.code == 0);
  CHECK(slurp(out / "train_log.csv") == "episode,reward,sigma,critic_loss,j_pi\n");
  CHECK(fs::exists(out / "checkpoint.bin"));
  CHECK(fs::exists(out / "summary.txt"));
}

TEST_CASE("export, evaluate and determinism", "[cli]") {
  const auto dir = scratch();
  const auto blade = write_blade(dir, "good.cfg", "n_t = 160\n");
  const auto a = run("export --blade " + blade.string() + " --seed 5 --out " + (dir / "ea").string());
  REQUIRE(a.code == 0);
  CHECK(a.output.find("qj_min") != std::string::npos);
  const auto b = run("export --blade " + blade.string() + " --seed 5 --out " + (dir / "eb").string());
  REQUIRE(b.code == 0);
  CHECK(slurp(dir / "ea" / "mesh.p3d") == slurp(dir / "eb" / "mesh.p3d"));
  CHECK(slurp(dir / "ea" / "report.json").find("\"provenance\"") != std::string::npos);

  const auto e = run("evaluate " + (dir / "ea" / "mesh.p3d").string());
  REQUIRE(e.code == 0);
  // The same quality line as at export time.
  const auto q_line = [](const std::string& s) { return s.substr(s.find("\nq ") + 1, 11); };
  CHECK(q_line(e.output) == q_line(a.output));

  const auto v = run("export --format vtk --blade " + blade.string() + " --out " + (dir / "ev").string());
  REQUIRE(v.code == 0);
  CHECK(fs::exists(dir / "ev" / "mesh.vtm"));
}

TEST_CASE("generate reports a failing stage with exit 3", "[cli]") {
  const auto dir = scratch();
  const auto train = run("train --episodes 2 --seed 1 --out " + (dir / "t2").string());
  REQUIRE(train.code == 0);
  const auto ckpt = (dir / "t2" / "checkpoint.bin").string();

  const auto good = write_blade(dir, "g.cfg");
  const auto ok = run("generate --blade " + good.string() + " --checkpoint " + ckpt + " --out " + (dir / "g").string());
  CHECK(ok.code == 0);
  CHECK(fs::exists(dir / "g" / "mesh.p3d"));

  std::ofstream(dir / "tight.cfg") << slurp(good).replace(slurp(good).find("pitch = 0.8"), 11, "pitch = 0.05");
  const auto bad = run("generate --blade " + (dir / "tight.cfg").string() + " --checkpoint " + ckpt + " --out " +
                       (dir / "g2").string());
  CHECK(bad.code == 3);
  CHECK(bad.output.find("passage_domain") != std::string::npos);
}

TEST_CASE("bad arguments", "[cli]") {
  CHECK(run("").code != 0);
  CHECK(run("generate --blade x.cfg").code != 0);
  CHECK(run("evaluate /no/such/mesh.p3d").code == 2);
}
