// End-to-end runs of the CLI binary: golden-report byte comparison and the
// exit-code contract.

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <catch2/catch_amalgamated.hpp>

#include "pvk/pvk.hpp"

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  std::string cmd = std::string("cd ") + PVK_SOURCE_DIR + " && " + PVK_CLI_BIN + " " + args +
                    " 2>/dev/null";
  std::array<char, 4096> buf{};
  RunResult res;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) res.out.append(buf.data(), n);
  int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

std::string read_file(const std::string& rel) {
  std::ifstream in(std::string(PVK_SOURCE_DIR) + "/" + rel, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("golden reports match byte for byte") {
  struct Golden {
    const char* args;
    const char* file;
    int exit_code;
  };
  const Golden cases[] = {
      {"check-mc fixtures/sl2_adjoint.json", "fixtures/golden/sl2_adjoint__check-mc.json", 0},
      {"modular --algebra aff1", "fixtures/golden/aff1__modular.json", 0},
      {"char-class fixtures/sl2_std.json --cocycle u2",
       "fixtures/golden/sl2_std__char-class-u2.json", 0},
      {"normalize fixtures/abelian_obstructed.json --force",
       "fixtures/golden/abelian_obstructed__normalize.json", 2},
      {"isotropy fixtures/aff1_canonical.json --point 5,0",
       "fixtures/golden/aff1_canonical__isotropy.json", 0},
      {"ce --algebra sl2 --module adjoint", "fixtures/golden/sl2_adjoint__ce.json", 0},
      {"homotopy fixtures/gauged_sl2_std.json", "fixtures/golden/gauged_sl2_std__homotopy.json",
       0},
      {"check-mc fixtures/so3_spin.json", "fixtures/golden/so3_spin__check-mc.json", 0},
      {"product fixtures/sl2_adjoint.json", "fixtures/golden/sl2_adjoint__product.json", 0},
      {"homog-check fixtures/gauged_sl2_std.json",
       "fixtures/golden/gauged_sl2_std__homog-check.json", 0},
      {"pcoh --algebra sl2 --cap 2", "fixtures/golden/sl2__pcoh.json", 0},
  };
  for (const auto& g : cases) {
    INFO(g.args);
    RunResult res = run_cli(g.args);
    CHECK(res.exit_code == g.exit_code);
    CHECK(res.out == read_file(g.file));
  }
}

TEST_CASE("reports are deterministic across runs") {
  RunResult a = run_cli("normalize fixtures/gauged_sl2_std.json");
  RunResult b = run_cli("normalize fixtures/gauged_sl2_std.json");
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("exit-code contract") {
  SECTION("success is 0") { CHECK(run_cli("check-mc fixtures/sl2_adjoint.json").exit_code == 0); }
  SECTION("validation failures are 1") {
    CHECK(run_cli("check-mc fixtures/bad/rank_mismatch.json").exit_code == 1);
    CHECK(run_cli("check-mc fixtures/bad/bad_rational.json").exit_code == 1);
    CHECK(run_cli("check-mc no_such_file.json").exit_code == 1);
    CHECK(run_cli("normalize fixtures/abelian_obstructed.json").exit_code == 1);  // gate, no force
    CHECK(run_cli("pcoh --algebra sl2 --cap 99").exit_code == 1);  // PVK_MAX_CAP guard
  }
  SECTION("mathematical obstructions are 2") {
    CHECK(run_cli("normalize fixtures/abelian_obstructed.json --force").exit_code == 2);
  }
}

TEST_CASE("text format renders and includes timing") {
  RunResult res = run_cli("check-mc fixtures/sl2_adjoint.json --format text");
  CHECK(res.exit_code == 0);
  CHECK(res.out.find("payload.residual_zero: true") != std::string::npos);
  CHECK(res.out.find("timing_ms:") != std::string::npos);
}

TEST_CASE("normalize recovers the representation through the CLI") {
  RunResult res = run_cli("normalize fixtures/gauged_sl2_std.json");
  REQUIRE(res.exit_code == 0);
  pvk::Json report = pvk::Json::parse(res.out);
  CHECK(report["payload"]["status"] == "ok");
  CHECK(report["payload"]["degrees_cleared"] == pvk::Json({1, 2, 3, 4}));
  // xi0 is conjugate to the standard representation: equal trace words
  std::vector<pvk::ScalarMat> xi0;
  for (const auto& m : report["payload"]["xi0"])
    xi0.push_back(pvk::jio::parse_scalar_matrix(m, "/"));
  auto std_mats = pvk::LieModule::standard(pvk::LieAlgebra::preset("sl2")).matrices();
  CHECK(pvk::trace_word_invariants(xi0, 3) == pvk::trace_word_invariants(std_mats, 3));
}
