#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <map>

#include "psido/config.hpp"
#include "psido/errors.hpp"
#include "psido/pipeline.hpp"

using namespace psido;

namespace {

std::string flag_name(const std::string& key) {
  std::string f = "--" + key;
  for (auto& ch : f)
    if (ch == '.' || ch == '_') ch = '-';
  return f;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"psido: regularize, factorize and solve one-way wave problems"};
  app.require_subcommand(1);

  using Stage = int (*)(const RunConfig&, std::ostream&);
  const std::map<std::string, std::pair<Stage, std::string>> stages{
      {"regularize", {run_regularize, "regularize file models over the eps grid"}},
      {"factorize", {run_factorize, "factorize the wave operator and fit residual orders"}},
      {"build-oneway", {run_build_oneway, "build the one-way operators and the damping symbol"}},
      {"solve", {run_solve, "solve both one-way problems with damping and check the energy estimate"}},
      {"diagnose", {run_diagnose, "ellipticity and Garding reports"}},
      {"print-config", {nullptr, "print the canonical form of a config"}},
  };

  std::string config_path;
  std::map<std::string, std::string> overrides;
  std::map<std::string, CLI::App*> subs;
  for (auto& [name, st] : stages) {
    auto* sub = app.add_subcommand(name, st.second);
    sub->add_option("-c,--config", config_path, "PSIDO v1 config file")->required()->check(CLI::ExistingFile);
    for (auto& key : config_keys())
      sub->add_option_function<std::string>(
          flag_name(key), [&overrides, key](const std::string& v) { overrides[key] = v; }, "config key " + key);
    subs[name] = sub;
  }
  std::string run_dir;
  auto* plot = app.add_subcommand("emit-plotdata", "write plain-text series from a run directory");
  plot->add_option("run_dir", run_dir, "run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (plot->parsed()) return emit_plotdata(run_dir, std::cout);
    for (auto& [name, sub] : subs) {
      if (!sub->parsed()) continue;
      RunConfig cfg = read_config(config_path);
      if (const char* env = std::getenv("PSIDO_OUTPUT_DIR"); env && *env) cfg.output = env;
      for (auto& [k, v] : overrides) set_config_value(cfg, k, v);
      cfg.validate();
      if (name == "print-config") {
        std::cout << serialize_config(cfg);
        return 0;
      }
      return stages.at(name).first(cfg, std::cout);
    }
  } catch (const Error& e) {
    std::cerr << "error (" << error_kind_name(e.kind()) << "): " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
