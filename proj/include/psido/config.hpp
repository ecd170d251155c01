#pragma once

#include <string>
#include <vector>

#include "psido/microlocal.hpp"
#include "psido/model.hpp"
#include "psido/scalenets.hpp"

namespace psido {

// Coefficient profile: "constant V", "sine C0 AMP K" (in x), "layer C1 C2 Z0 W" (logistic in z)
// or "file PATH" (HOLDER v1 samples, regularized over the eps grid).
struct Profile {
  std::string kind;
  std::vector<double> args;
  std::string path;

  Ex expr() const;  // analytic kinds only
  std::string text() const;
  static Profile parse(const std::string& field, const std::string& text);
};

struct RunConfig {
  Profile speed, density;
  double c_ref = 1.0;
  int mollifier_budget = 2;
  EpsGrid eps;
  CutoffAngles angles;
  int N = 0;
  std::string branch = "root-minus";
  bool selfadjoint = true;
  double eta0 = 1.0;
  int nx = 256;
  double period = 2 * 3.14159265358979323846;
  double Z = 1.0, dz = 0.0;
  double tau = 20.0;
  double gamma = 1.0, L = 8.0;
  std::vector<double> sobolev{0.0, 1.0};
  std::string initial = "broadband 40";
  std::string forcing = "none";
  std::vector<double> snapshots{0.0, 0.25, 0.5, 0.75, 1.0};
  unsigned seed = 12345;
  int garding_n = 1024;
  std::string output = "psido_out";

  std::string base_dir;  // resolves relative model paths; not serialized

  void validate() const;
};

// Keys in canonical order, as written by serialize_config.
const std::vector<std::string>& config_keys();
// Assigns one key from its text form; errors name the key.
void set_config_value(RunConfig& c, const std::string& key, const std::string& value);
std::string get_config_value(const RunConfig& c, const std::string& key);

// "PSIDO v1" header, then "key = value" lines; '#' starts a comment.
// eps.grid, angles and factorize.N have no defaults.
RunConfig parse_config(const std::string& text, const std::string& base_dir = ".");
RunConfig read_config(const std::string& path);
std::string serialize_config(const RunConfig& c);

// Model named by the config: analytic when both profiles are analytic, else
// both coefficients are sampled on the file grid and regularized.
WaveModel build_model(const RunConfig& c, FileModelReport* report = nullptr);

}  // namespace psido
