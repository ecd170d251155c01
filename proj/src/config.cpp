#include "psido/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "psido/errors.hpp"
#include "psido/fft.hpp"
#include "psido/mollifier.hpp"
#include "psido/regularize.hpp"

namespace psido {

namespace {

std::string trim(const std::string& s) {
  auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string nums(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + num(v[i]);
  return out;
}

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  fail(ErrorKind::InvalidInput, key + ": " + why);
}

double to_double(const std::string& key, const std::string& s) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    bad(key, "expected a number, got '" + s + "'");
  }
  if (trim(s.substr(used)) != "" || !std::isfinite(v)) bad(key, "expected a number, got '" + s + "'");
  return v;
}

int to_int(const std::string& key, const std::string& s) {
  double v = to_double(key, s);
  if (v != std::floor(v) || std::abs(v) > 1e9) bad(key, "expected an integer, got '" + s + "'");
  return int(v);
}

std::vector<double> to_list(const std::string& key, const std::string& s) {
  std::istringstream is(s);
  std::vector<double> out;
  for (std::string w; is >> w;) out.push_back(to_double(key, w));
  return out;
}

bool to_bool(const std::string& key, const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  bad(key, "expected true or false, got '" + s + "'");
}

const std::set<std::string>& required_keys() {
  static const std::set<std::string> k{"eps.grid", "angles", "factorize.N"};
  return k;
}

Ex logistic_layer(double c1, double c2, double z0, double w) {
  return Ex(c1) + Ex(c2 - c1) * pow(Ex(1.0) + exp(-(var(Z) - Ex(z0)) * Ex(1.0 / w)), -1.0);
}

}  // namespace

Ex Profile::expr() const {
  if (kind == "constant") return Ex(args[0]);
  if (kind == "sine") return Ex(args[0]) + Ex(args[1]) * sin(Ex(args[2]) * var(X));
  if (kind == "layer") return logistic_layer(args[0], args[1], args[2], args[3]);
  fail(ErrorKind::InvalidInput, "profile '" + kind + "' has no closed form");
}

std::string Profile::text() const { return kind == "file" ? "file " + path : kind + " " + nums(args); }

Profile Profile::parse(const std::string& field, const std::string& text) {
  std::istringstream is(text);
  Profile p;
  is >> p.kind;
  if (p.kind == "file") {
    std::getline(is, p.path);
    p.path = trim(p.path);
    if (p.path.empty()) bad(field, "file profile needs a path");
    return p;
  }
  std::string rest;
  std::getline(is, rest);
  p.args = to_list(field, rest);
  const std::map<std::string, std::size_t> arity{{"constant", 1}, {"sine", 3}, {"layer", 4}};
  auto it = arity.find(p.kind);
  if (it == arity.end()) bad(field, "unknown profile '" + p.kind + "' (constant, sine, layer, file)");
  if (p.args.size() != it->second) bad(field, p.kind + " takes " + std::to_string(it->second) + " numbers");
  if (p.kind == "constant" && p.args[0] <= 0) bad(field, "coefficient must be positive");
  if (p.kind == "sine" && std::abs(p.args[1]) >= p.args[0]) bad(field, "amplitude must stay below the mean");
  if (p.kind == "layer" && (p.args[0] <= 0 || p.args[1] <= 0 || p.args[3] <= 0))
    bad(field, "layer values and width must be positive");
  return p;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> k{
      "model.speed",      "model.density",    "model.c_ref",     "model.mollifier_budget", "eps.grid",
      "angles",           "factorize.N",      "factorize.branch", "oneway.selfadjoint",    "oneway.eta0",
      "grid.nx",          "grid.period",      "solve.Z",          "solve.dz",              "solve.tau",
      "solve.gamma",      "solve.L",          "solve.sobolev",    "solve.initial",         "solve.forcing",
      "solve.snapshots",  "seed",             "diagnose.garding_n", "output"};
  return k;
}

void set_config_value(RunConfig& c, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "model.speed") c.speed = Profile::parse(key, v);
  else if (key == "model.density") c.density = Profile::parse(key, v);
  else if (key == "model.c_ref") c.c_ref = to_double(key, v);
  else if (key == "model.mollifier_budget") c.mollifier_budget = to_int(key, v);
  else if (key == "eps.grid") {
    try {
      c.eps = EpsGrid(to_list(key, v));
    } catch (const Error& e) {
      bad(key, e.detail());
    }
  } else if (key == "angles") {
    auto a = to_list(key, v);
    if (a.size() != 4) bad(key, "expected theta1 gamma1 gamma2 theta2 in degrees");
    c.angles = {a[0], a[1], a[2], a[3]};
  } else if (key == "factorize.N") c.N = to_int(key, v);
  else if (key == "factorize.branch") {
    if (v != "root-minus" && v != "root-plus") bad(key, "expected root-minus or root-plus");
    c.branch = v;
  } else if (key == "oneway.selfadjoint") c.selfadjoint = to_bool(key, v);
  else if (key == "oneway.eta0") c.eta0 = to_double(key, v);
  else if (key == "grid.nx") c.nx = to_int(key, v);
  else if (key == "grid.period") c.period = to_double(key, v);
  else if (key == "solve.Z") c.Z = to_double(key, v);
  else if (key == "solve.dz") c.dz = to_double(key, v);
  else if (key == "solve.tau") c.tau = to_double(key, v);
  else if (key == "solve.gamma") c.gamma = to_double(key, v);
  else if (key == "solve.L") c.L = to_double(key, v);
  else if (key == "solve.sobolev") c.sobolev = to_list(key, v);
  else if (key == "solve.initial") c.initial = v;
  else if (key == "solve.forcing") c.forcing = v;
  else if (key == "solve.snapshots") c.snapshots = to_list(key, v);
  else if (key == "seed") c.seed = unsigned(to_int(key, v));
  else if (key == "diagnose.garding_n") c.garding_n = to_int(key, v);
  else if (key == "output") c.output = v;
  else bad(key, "unknown key");
}

std::string get_config_value(const RunConfig& c, const std::string& key) {
  if (key == "model.speed") return c.speed.text();
  if (key == "model.density") return c.density.text();
  if (key == "model.c_ref") return num(c.c_ref);
  if (key == "model.mollifier_budget") return std::to_string(c.mollifier_budget);
  if (key == "eps.grid") return nums(c.eps.values());
  if (key == "angles") return nums({c.angles.theta1, c.angles.gamma1, c.angles.gamma2, c.angles.theta2});
  if (key == "factorize.N") return std::to_string(c.N);
  if (key == "factorize.branch") return c.branch;
  if (key == "oneway.selfadjoint") return c.selfadjoint ? "true" : "false";
  if (key == "oneway.eta0") return num(c.eta0);
  if (key == "grid.nx") return std::to_string(c.nx);
  if (key == "grid.period") return num(c.period);
  if (key == "solve.Z") return num(c.Z);
  if (key == "solve.dz") return num(c.dz);
  if (key == "solve.tau") return num(c.tau);
  if (key == "solve.gamma") return num(c.gamma);
  if (key == "solve.L") return num(c.L);
  if (key == "solve.sobolev") return nums(c.sobolev);
  if (key == "solve.initial") return c.initial;
  if (key == "solve.forcing") return c.forcing;
  if (key == "solve.snapshots") return nums(c.snapshots);
  if (key == "seed") return std::to_string(c.seed);
  if (key == "diagnose.garding_n") return std::to_string(c.garding_n);
  if (key == "output") return c.output;
  bad(key, "unknown key");
}

void RunConfig::validate() const {
  if (speed.kind.empty()) bad("model.speed", "missing");
  if (density.kind.empty()) bad("model.density", "missing");
  if (c_ref <= 0) bad("model.c_ref", "must be positive");
  if (mollifier_budget < 2) bad("model.mollifier_budget", "must be at least 2");
  if (eps.size() == 0) bad("eps.grid", "missing");
  try {
    angles.validate();
  } catch (const Error& e) {
    bad("angles", e.detail());
  }
  if (N < 1 || N > 6) bad("factorize.N", "must lie in 1..6");
  if (eta0 < 0) bad("oneway.eta0", "must be nonnegative");
  if (!is_pow2(nx) || nx < 16) bad("grid.nx", "must be a power of two >= 16");
  if (period <= 0) bad("grid.period", "must be positive");
  if (Z <= 0) bad("solve.Z", "must be positive");
  if (dz < 0) bad("solve.dz", "must be nonnegative (0 picks the stability bound / 4)");
  if (tau <= 0) bad("solve.tau", "must be positive");
  if (gamma <= 0 || 2 * gamma >= L) bad("solve.gamma", "need 0 < gamma and 2 gamma < L");
  if (sobolev.empty()) bad("solve.sobolev", "needs at least one order");
  for (double s : sobolev)
    if (std::abs(s) > 4) bad("solve.sobolev", "orders are limited to |s| <= 4");
  for (double z : snapshots)
    if (z < 0 || z > Z) bad("solve.snapshots", "depths must lie in [0, Z]");
  {
    std::istringstream is(initial);
    std::string kind;
    double a = 0;
    is >> kind >> a;
    if (!((kind == "broadband" || kind == "gaussian" || kind == "plane") && is && a > 0))
      bad("solve.initial", "expected 'broadband KMAX', 'gaussian WIDTH' or 'plane K'");
  }
  {
    std::istringstream is(forcing);
    std::string kind;
    double a = 0, w = 0;
    is >> kind;
    if (kind != "none" && !(kind == "gaussian" && (is >> a >> w) && w > 0))
      bad("solve.forcing", "expected 'none' or 'gaussian AMPLITUDE WIDTH'");
  }
  if (!is_pow2(garding_n) || garding_n < 64) bad("diagnose.garding_n", "must be a power of two >= 64");
  if (output.empty()) bad("output", "missing");
}

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  bool header = false;
  RunConfig c;
  c.base_dir = base_dir;
  std::set<std::string> seen;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (!header) {
      require(line == "PSIDO v1", ErrorKind::InvalidInput, "config must start with 'PSIDO v1'");
      header = true;
      continue;
    }
    auto eq = line.find('=');
    require(eq != std::string::npos, ErrorKind::InvalidInput,
            "line " + std::to_string(lineno) + ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    if (seen.count(key)) bad(key, "given twice");
    seen.insert(key);
    set_config_value(c, key, line.substr(eq + 1));
  }
  require(header, ErrorKind::InvalidInput, "config must start with 'PSIDO v1'");
  for (auto& k : required_keys())
    if (!seen.count(k)) bad(k, "required key is missing");
  if (!seen.count("model.speed")) bad("model.speed", "required key is missing");
  if (!seen.count("model.density")) bad("model.density", "required key is missing");
  c.validate();
  return c;
}

RunConfig read_config(const std::string& path) {
  std::ifstream f(path);
  require(bool(f), ErrorKind::Io, "cannot read config " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  auto dir = std::filesystem::path(path).parent_path().string();
  return parse_config(ss.str(), dir.empty() ? "." : dir);
}

std::string serialize_config(const RunConfig& c) {
  std::string out = "PSIDO v1\n";
  for (auto& k : config_keys()) out += k + " = " + get_config_value(c, k) + "\n";
  return out;
}

namespace {

HolderModel load_profile(const RunConfig& c, const Profile& p, const HolderModel* like) {
  if (p.kind == "file") {
    std::filesystem::path path(p.path);
    if (path.is_relative()) path = std::filesystem::path(c.base_dir) / path;
    return read_holder_model(path.string());
  }
  HolderModel h = *like;
  Ex e = p.expr();
  h.samples.resize(std::size_t(h.nx) * h.nz);
  for (int iz = 0; iz < h.nz; ++iz)
    for (int ix = 0; ix < h.nx; ++ix) {
      PhasePoint q{};
      q[X] = ix * h.dx();
      q[Z] = iz * h.dz();
      h.samples[std::size_t(iz) * h.nx + ix] = evaluate_at(e, q, 1.0).real();
    }
  auto [lo, hi] = std::minmax_element(h.samples.begin(), h.samples.end());
  h.lower = *lo;
  h.upper = *hi;
  h.mu = 1.0;
  return h;
}

}  // namespace

WaveModel build_model(const RunConfig& c, FileModelReport* report) {
  const bool files = c.speed.kind == "file" || c.density.kind == "file";
  if (!files) return analytic_model("config", c.speed.expr(), c.density.expr(), c.c_ref);
  HolderModel first = c.speed.kind == "file" ? load_profile(c, c.speed, nullptr) : load_profile(c, c.density, nullptr);
  HolderModel sp = c.speed.kind == "file" ? first : load_profile(c, c.speed, &first);
  HolderModel de = c.density.kind == "file" ? load_profile(c, c.density, &first) : load_profile(c, c.density, &first);
  WaveModel m = file_model("config", sp, de, make_loglog_net(c.eps), build_mollifier(c.mollifier_budget), report);
  m.c_ref = c.c_ref;
  return m;
}

}  // namespace psido
