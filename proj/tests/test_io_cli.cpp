#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "athermal/io.hpp"
#include "support.hpp"

using namespace athermal;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(ATHERMAL_CLI_PATH) + " " + args + " 2>/dev/null";
  RunResult result;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf;
  while (size_t got = fread(buf.data(), 1, buf.size(), pipe)) result.output.append(buf.data(), got);
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "athermal_cli_tests";
  fs::create_directories(dir);
  return dir;
}

std::string write_file(const std::string& name, const std::string& text) {
  const fs::path p = scratch_dir() / name;
  std::ofstream out(p);
  out << text;
  return p.string();
}

std::string write_json(const std::string& name, const io::json& j) {
  const fs::path p = scratch_dir() / name;
  io::save_json(j, p.string());
  return p.string();
}

ThermalContext two_level_bath() {
  Matrix h = Matrix::Zero(2, 2);
  h(1, 1) = 1.0;
  return thermal_state(HermitianOperator(h), 1.0);
}

}  // namespace

TEST_CASE("channel json round trip is bit identical") {
  const Channel c = random_channel(2, 3, 3, 42);
  const io::json j = io::channel_to_json(c, "probe");
  const Channel back = io::channel_from_json(io::json::parse(j.dump()));
  REQUIRE(back.kraus_count() == c.kraus_count());
  for (int k = 0; k < c.kraus_count(); ++k) {
    CHECK(max_abs(back.kraus()[k] - c.kraus()[k]) == 0.0);
  }
  // and the serialized form is reproducible byte for byte
  CHECK(io::channel_to_json(back, "probe").dump() == j.dump());
}

TEST_CASE("channel json validation names the offending field") {
  io::json j;
  j["dim_in"] = 2;
  j["dim_out"] = 2;
  j["kraus"] = io::json::array();
  j["kraus"].push_back(io::matrix_to_json(Matrix::Identity(2, 2)));
  j["kraus"].push_back("garbage");
  try {
    io::channel_from_json(j);
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("kraus[1]") != std::string::npos);
  }

  io::json missing;
  missing["dim_in"] = 2;
  CHECK_THROWS_AS(io::channel_from_json(missing), InputError);
}

TEST_CASE("bath json parses to a thermal context") {
  const ThermalContext ctx = two_level_bath();
  const io::json j = io::bath_to_json(ctx.beta, ctx.hamiltonian);
  const ThermalContext back = io::bath_from_json(j);
  CHECK(back.beta == ctx.beta);
  CHECK(max_abs(back.gamma.matrix() - ctx.gamma.matrix()) < 1e-14);
}

TEST_CASE("cli: report on the thermal channel prints an all-zero resource row") {
  const ThermalContext ctx = two_level_bath();
  const std::string channel =
      write_json("thermal_channel.json", io::channel_to_json(absolutely_thermal(ctx, 2), "T"));
  const std::string bath = write_json("bath.json", io::bath_to_json(ctx.beta, ctx.hamiltonian));

  const RunResult r = run_cli("report --channel " + channel + " --bath " + bath + " --format json");
  REQUIRE(r.exit_code == 0);
  const io::json out = io::json::parse(r.output);
  CHECK(std::abs(out["free_energy"].get<double>()) < 1e-7);
  CHECK(std::abs(out["extractable_work"].get<double>()) < 1e-7);
  CHECK(out["helmholtz_gap"].get<double>() >= -1e-6);
}

TEST_CASE("cli: identity channel with a degenerate bath") {
  const ThermalContext flat = thermal_state(HermitianOperator(Matrix::Zero(2, 2)), 2.0);
  const std::string channel =
      write_json("id2.json", io::channel_to_json(identity_channel(2), "id"));
  const std::string bath = write_json("flat_bath.json", io::bath_to_json(2.0, flat.hamiltonian));

  const RunResult r = run_cli("report --channel " + channel + " --bath " + bath + " --format json");
  REQUIRE(r.exit_code == 0);
  const io::json out = io::json::parse(r.output);
  CHECK(out["free_energy"].get<double>() == doctest::Approx(2.0 * std::log(2.0) / 2.0).epsilon(1e-5));
}

TEST_CASE("cli: malformed kraus entry exits 1 and names the field") {
  const std::string channel = write_file("bad_channel.json",
                                         R"({"dim_in": 2, "dim_out": 2, "kraus": [[[0.5]]]})");
  const ThermalContext ctx = two_level_bath();
  const std::string bath = write_json("bath2.json", io::bath_to_json(ctx.beta, ctx.hamiltonian));
  const std::string cmd = std::string(ATHERMAL_CLI_PATH) + " report --channel " + channel +
                          " --bath " + bath + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string output;
  std::array<char, 4096> buf;
  while (size_t got = fread(buf.data(), 1, buf.size(), pipe)) output.append(buf.data(), got);
  const int status = pclose(pipe);
  CHECK(WEXITSTATUS(status) == 1);
  CHECK(output.find("kraus[0]") != std::string::npos);
}

TEST_CASE("cli: malformed json exits 1 with a line diagnostic") {
  const std::string broken = write_file("broken.json", "{\n  \"dim_in\": 2,\n  oops\n}\n");
  const ThermalContext ctx = two_level_bath();
  const std::string bath = write_json("bath3.json", io::bath_to_json(ctx.beta, ctx.hamiltonian));
  const RunResult r = run_cli("report --channel " + broken + " --bath " + bath);
  CHECK(r.exit_code == 1);
}

TEST_CASE("cli: byte-identical output for a fixed seed") {
  const ThermalContext ctx = two_level_bath();
  const std::string channel =
      write_json("seeded_channel.json", io::channel_to_json(random_channel(2, 2, 2, 5), "n"));
  const std::string bath = write_json("bath4.json", io::bath_to_json(ctx.beta, ctx.hamiltonian));
  const std::string args = "divergence --channel " + channel + " --bath " + bath +
                           " --kind rel --format json";
  const RunResult a = run_cli("audit --suite weyl --seed 9 --samples 4 --format json");
  const RunResult b = run_cli("audit --suite weyl --seed 9 --samples 4 --format json");
  CHECK(a.output == b.output);
  const RunResult c = run_cli(args);
  const RunResult d = run_cli(args);
  CHECK(c.output == d.output);
  CHECK(c.exit_code == 0);
}

TEST_CASE("cli: audit subcommand exit codes") {
  const RunResult good = run_cli("audit --suite weyl --seed 3 --samples 4");
  CHECK(good.exit_code == 0);
  CHECK(good.output.find("PASS") != std::string::npos);

  const RunResult unknown = run_cli("audit --suite nonsense --seed 3");
  CHECK(unknown.exit_code == 1);
}

TEST_CASE("cli: one-shot distill golden unit with bits display") {
  const ThermalContext flat = thermal_state(HermitianOperator(Matrix::Zero(2, 2)), 1.0);
  const std::string channel = write_json("id2b.json", io::channel_to_json(identity_channel(2), ""));
  const std::string bath = write_json("flatb.json", io::bath_to_json(1.0, flat.hamiltonian));
  const RunResult r = run_cli("one-shot --channel " + channel + " --bath " + bath +
                              " --epsilon 0.05 --mode distill --format json --units bits");
  REQUIRE(r.exit_code == 0);
  const io::json out = io::json::parse(r.output);
  // raw >= 2 ln 2 in nats, i.e. >= 2 bits
  CHECK(out["copies_1_raw_divergence"].get<double>() >= 2.0 - 1e-6);
  CHECK(out["units"].get<std::string>() == "bits");
}

TEST_CASE("cli: work-capacity prints both forms") {
  const ThermalContext flat = thermal_state(HermitianOperator(Matrix::Zero(2, 2)), 1.0);
  const std::string from = write_json("wc_from.json", io::channel_to_json(identity_channel(2), ""));
  const std::string to =
      write_json("wc_to.json", io::channel_to_json(absolutely_thermal(flat, 2), ""));
  const std::string bath = write_json("wc_bath.json", io::bath_to_json(1.0, flat.hamiltonian));
  const RunResult r =
      run_cli("work-capacity --from " + from + " --to " + to + " --bath " + bath + " --format json");
  REQUIRE(r.exit_code == 0);
  const io::json out = io::json::parse(r.output);
  CHECK(out["work_capacity"].get<double>() == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-5));
  CHECK(out.contains("free_energy_difference_form"));
  CHECK(out.contains("divergence_difference_form"));
}
