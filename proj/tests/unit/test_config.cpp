#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "psido/config.hpp"
#include "psido/errors.hpp"
#include "psido/pipeline.hpp"

using namespace psido;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"(PSIDO v1
model.speed = sine 1 0.2 1   # trailing comment
model.density = constant 1
eps.grid = 1e-2 1e-3 1e-4 1e-5 1e-6 1e-7
angles = 30 35 50 60
factorize.N = 3
)";

std::string message_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  auto d = fs::temp_directory_path() / ("psido_" + name);
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST(Config, RoundTripFixpoint) {
  RunConfig a = parse_config(kMinimal);
  std::string once = serialize_config(a);
  RunConfig b = parse_config(once);
  EXPECT_EQ(serialize_config(b), once);
  EXPECT_EQ(b.N, 3);
  EXPECT_EQ(b.eps.size(), 6u);
  EXPECT_EQ(b.speed.kind, "sine");
  EXPECT_DOUBLE_EQ(b.angles.gamma2, 50);
}

TEST(Config, NoSilentDefaults) {
  for (const char* key : {"eps.grid", "angles", "factorize.N", "model.speed"}) {
    std::string text;
    std::istringstream is(kMinimal);
    for (std::string line; std::getline(is, line);)
      if (line.rfind(key, 0) != 0) text += line + "\n";
    EXPECT_NE(message_of(text).find(key), std::string::npos) << key;
  }
}

TEST(Config, ErrorsNameTheField) {
  std::string broken = kMinimal;
  broken.replace(broken.find("30 35 50 60"), 11, "30 55 50 60");
  EXPECT_NE(message_of(broken).find("angles: cutoff angles"), std::string::npos) << message_of(broken);
  EXPECT_NE(message_of(std::string(kMinimal) + "grid.nx = 100\n").find("grid.nx"), std::string::npos);
  EXPECT_NE(message_of(std::string(kMinimal) + "solve.gamma = 5\n").find("solve.gamma"), std::string::npos);
  EXPECT_NE(message_of(std::string(kMinimal) + "bogus = 1\n").find("bogus"), std::string::npos);
  EXPECT_NE(message_of(std::string(kMinimal) + "factorize.N = 2\n").find("twice"), std::string::npos);
  EXPECT_NE(message_of("PSIDO v2\n").find("PSIDO v1"), std::string::npos);
}

TEST(Config, Profiles) {
  auto p = Profile::parse("model.speed", "layer 1 1.5 0.5 0.1");
  PhasePoint deep{};
  deep[Z] = 5;
  EXPECT_NEAR(evaluate_at(p.expr(), deep, 1).real(), 1.5, 1e-12);
  EXPECT_NEAR(evaluate_at(p.expr(), PhasePoint{}, 1).real(), 1.0, 1e-2);
  EXPECT_THROW(Profile::parse("model.speed", "sine 1 2 1"), Error);
  EXPECT_THROW(Profile::parse("model.speed", "wobble 1"), Error);
  EXPECT_EQ(Profile::parse("model.speed", "file  a b.holder ").path, "a b.holder");
}

TEST(Config, MissingModelFile) {
  RunConfig c = parse_config(kMinimal);
  c.speed = Profile::parse("model.speed", "file does_not_exist.holder");
  try {
    build_model(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(exit_code(e.kind()), 1);
  }
}

TEST(Pipeline, ExitCodes) {
  EXPECT_EQ(exit_code(ErrorKind::InvalidInput), 1);
  EXPECT_EQ(exit_code(ErrorKind::Io), 1);
  EXPECT_EQ(exit_code(ErrorKind::Invariant), 2);
  EXPECT_EQ(exit_code(ErrorKind::Ellipticity), 2);
  EXPECT_EQ(exit_code(ErrorKind::Numeric), 3);
}

TEST(Pipeline, FactorizeOnlyRun) {
  RunConfig c = parse_config(kMinimal);
  c.output = scratch("factorize").string();
  std::ostringstream log;
  EXPECT_EQ(emit_plotdata(c.output, log), 1);
  EXPECT_EQ(run_factorize(c, log), 0);
  EXPECT_TRUE(fs::exists(fs::path(c.output) / "factorization" / "manifest.json"));
  EXPECT_EQ(emit_plotdata(c.output, log), 0);
  fs::path pd = fs::path(c.output) / "plotdata";
  EXPECT_TRUE(fs::exists(pd / "residual_fits.dat"));
  EXPECT_FALSE(fs::exists(pd / "norms.dat"));
  auto first = slurp(pd / "residual_fits.dat");
  EXPECT_EQ(emit_plotdata(c.output, log), 0);
  EXPECT_EQ(slurp(pd / "residual_fits.dat"), first);
  auto rows = residual_fits(read_factorization((fs::path(c.output) / "factorization").string()), build_model(c));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_TRUE(rows[0].identically_zero);  // density is constant
  EXPECT_LE(rows[1].slope, -0.7);
}

TEST(Pipeline, ConstantModelResidualsVanish) {
  RunConfig c = parse_config(kMinimal);
  c.speed = Profile::parse("model.speed", "constant 1.5");
  c.output = scratch("constant").string();
  std::ostringstream log;
  EXPECT_EQ(run_factorize(c, log), 0);
  auto text = slurp(fs::path(c.output) / "residual_fits.txt");
  EXPECT_NE(text.find("1 1 0 -1.7 pass"), std::string::npos) << text;
  EXPECT_NE(text.find("2 1 0 -0.7 pass"), std::string::npos) << text;
}

TEST(Pipeline, SolveIsDeterministic) {
  RunConfig c = parse_config(std::string(kMinimal) +
                             "grid.nx = 64\nsolve.dz = 0.01\nsolve.initial = broadband 10\n"
                             "solve.forcing = gaussian 0.2 0.5\nsolve.snapshots = 0 0.5 1\n");
  c.output = scratch("solve_a").string();
  std::ostringstream log;
  ASSERT_EQ(run_solve(c, log), 0) << log.str();
  ASSERT_EQ(emit_plotdata(c.output, log), 0);
  RunConfig d = c;
  d.output = scratch("solve_b").string();
  ASSERT_EQ(run_solve(d, log), 0);
  ASSERT_EQ(emit_plotdata(d.output, log), 0);
  for (auto* f : {"norms.dat", "margins.dat", "cone_energy.dat"}) {
    auto a = slurp(fs::path(c.output) / "plotdata" / f);
    EXPECT_FALSE(a.empty()) << f;
    EXPECT_EQ(a, slurp(fs::path(d.output) / "plotdata" / f)) << f;
  }
  EXPECT_TRUE(fs::exists(fs::path(c.output) / "snapshots" / "u_plus_e0_s2.grid"));
  auto man = slurp(fs::path(c.output) / "run_manifest.json");
  EXPECT_NE(man.find("\"initial_field\": 12345"), std::string::npos) << man;
}
