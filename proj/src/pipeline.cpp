#include "psido/pipeline.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

#include "psido/fft.hpp"
#include "psido/grid.hpp"
#include "psido/solver.hpp"

namespace psido {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidInput:
    case ErrorKind::Io:
      return 1;
    case ErrorKind::Numeric:
      return 3;
    default:
      return 2;
  }
}

namespace {

double rad(double deg) { return deg * std::numbers::pi / 180.0; }

std::string g17(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  require(bool(f), ErrorKind::Io, "cannot write " + p.string());
  f << text;
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  require(bool(f), ErrorKind::Io, "cannot read " + p.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// run_manifest.json keeps the config, the seeds and one entry per finished stage.
// A different config starts a fresh manifest.
void record_stage(const RunConfig& cfg, const std::string& stage, const json& info) {
  fs::path dir(cfg.output);
  fs::create_directories(dir);
  const fs::path path = dir / "run_manifest.json";
  const std::string text = serialize_config(cfg);
  json man;
  if (fs::exists(path)) {
    try {
      man = json::parse(read_file(path));
    } catch (const json::exception&) {
      man = json();
    }
    if (man.value("config", "") != text) man = json();
  }
  man["format"] = "psido run v1";
  man["config"] = text;
  man["seeds"] = {{"initial_field", cfg.seed}, {"garding_fields", cfg.seed + 1}};
  man["stages"][stage] = info;
  write_file(path, man.dump(2) + "\n");
}

std::pair<double, double> speed_range(const WaveModel& m) {
  Points p;
  p.eps = m.sample_eps();
  std::vector<double> xs, zs;
  for (int i = 0; i < 64; ++i)
    for (int k = 0; k < 9; ++k) {
      xs.push_back(2 * std::numbers::pi * i / 64);
      zs.push_back(0.25 * k);
    }
  p.set(X, xs);
  p.set(Z, zs);
  double lo = std::numeric_limits<double>::infinity(), hi = 0;
  for (auto& v : evaluate(m.speed(), p)) {
    lo = std::min(lo, std::abs(v));
    hi = std::max(hi, std::abs(v));
  }
  return {lo, hi};
}

double max_speed(const WaveModel& m) { return speed_range(m).second; }

std::vector<PhasePoint> cone_rays() {
  std::vector<PhasePoint> pts;
  for (int ix = 0; ix < 16; ++ix)
    for (double z : {0.0, 0.5, 1.0})
      for (int iu = 0; iu < 33; ++iu)
        for (double r = 1; r <= 512; r *= 2) {
          double u = -1.0 + 2.0 * iu / 32;
          PhasePoint p{};
          p[X] = 2 * std::numbers::pi * ix / 16;
          p[Z] = z;
          p[TAU] = r / std::sqrt(1 + u * u);
          p[XI] = r * u / std::sqrt(1 + u * u);
          pts.push_back(p);
        }
  return pts;
}

EllipticityReport ellipticity(const WaveModel& m, const RunConfig& cfg) {
  EllipticityOptions eo;
  eo.m = 2;
  EpsGrid g = m.grid ? *m.grid : EpsGrid({1.0});
  return ellipticity_probe(wave_symbol(m), PhaseRegion::cone(rad(cfg.angles.theta1), m.speed()), cone_rays(), g, eo);
}

FactorizationResult factorize(const WaveModel& m, const RunConfig& cfg, Branch b) {
  FactorizeOptions o;
  o.N = cfg.N;
  o.angles = cfg.angles;
  o.branch = b;
  return factorize_L(m, o);
}

GridField initial_field(const RunConfig& cfg) {
  const int n = cfg.nx;
  GridField u({n}, {cfg.period / n});
  std::istringstream is(cfg.initial);
  std::string kind;
  double a = 0;
  is >> kind >> a;
  const auto xs = u.coords(0);
  const double k0 = 2 * std::numbers::pi / cfg.period;
  if (kind == "gaussian") {
    for (int j = 0; j < n; ++j) u.values[j] = std::exp(-std::pow((xs[j] - 0.5 * cfg.period) / a, 2));
  } else if (kind == "plane") {
    for (int j = 0; j < n; ++j) u.values[j] = std::exp(cplx(0, a * k0 * xs[j]));
  } else {
    // random spectrum under a Gaussian envelope of width a (angular wavenumber)
    std::mt19937_64 gen(cfg.seed);
    std::normal_distribution<double> nd;
    std::vector<cplx> w(n);
    for (int k = 0; k < n; ++k) {
      double m = fft_index(k, n) * k0 / a;
      w[k] = cplx(nd(gen), nd(gen)) * std::exp(-m * m);
    }
    fft_backward(w, {n});
    u.values = w;
  }
  const double nn = l2_norm(u);
  for (auto& v : u.values) v /= nn;
  return u;
}

std::vector<GridField> forcing_slices(const RunConfig& cfg) {
  std::istringstream is(cfg.forcing);
  std::string kind;
  double amp = 0, w = 1;
  is >> kind >> amp >> w;
  if (kind != "gaussian") return {};
  std::vector<GridField> out;
  for (double z : {0.0, cfg.Z}) {
    GridField f({cfg.nx}, {cfg.period / cfg.nx}, z);
    const auto xs = f.coords(0);
    // a pulse drifting across the cell
    const double x0 = cfg.period * (0.3 + 0.4 * z / cfg.Z);
    for (int j = 0; j < cfg.nx; ++j) f.values[j] = amp * std::exp(-std::pow((xs[j] - x0) / w, 2));
    out.push_back(f);
  }
  return out;
}

struct Table {
  std::string header;
  std::ostringstream rows;
};

}  // namespace

std::vector<ResidualFitRow> residual_fits(const FactorizationResult& r, const WaveModel& m) {
  const double cmax = max_speed(m);
  OrderFitOptions o;
  for (double u : {0.0, 0.2, -0.4}) {
    PhasePoint p{};
    p[TAU] = 1;
    p[XI] = u * 0.5 / cmax;
    o.rays.push_back(p);
  }
  for (double x : {0.3, 1.7, 4.0})
    for (double z : {0.0, 0.5}) {
      PhasePoint b{};
      b[X] = x;
      b[Z] = z;
      o.bases.push_back(b);
    }
  o.magnitudes = {16, 32, 64, 128, 256, 512, 1024};
  o.eps = m.sample_eps();
  std::vector<ResidualFitRow> rows;
  for (int j : {1, 2}) {
    OrderFit f = fit_order(r.gamma(j), o);
    ResidualFitRow row;
    row.j = j;
    row.identically_zero = f.identically_zero;
    row.slope = f.identically_zero ? 0.0 : f.slope;
    row.bound = j - r.N + 0.3;
    row.pass = f.identically_zero || f.slope <= row.bound;
    rows.push_back(row);
  }
  return rows;
}

int run_regularize(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  fs::create_directories(cfg.output);
  std::ostringstream os;
  os << std::setprecision(10);
  json info;
  if (cfg.speed.kind != "file" && cfg.density.kind != "file") {
    os << "analytic model: coefficients are smooth and used as given\n";
    info["kind"] = "analytic";
  } else {
    FileModelReport rep;
    WaveModel m = build_model(cfg, &rep);
    auto dump = [&](const char* name, const RegularizationReport& r) {
      os << name << ": eps_star " << r.eps_star << " within_bounds " << (r.within_bounds ? "yes" : "no") << "\n";
      os << "# eps inf sup\n";
      for (std::size_t i = 0; i < r.grid.size(); ++i) os << r.grid[i] << " " << r.inf[i] << " " << r.sup[i] << "\n";
    };
    dump("inv_c2", rep.speed);
    dump("inv_rho", rep.density);
    info["kind"] = "file";
    info["eps_star"] = m.eps_star;
  }
  write_file(fs::path(cfg.output) / "regularize.txt", os.str());
  record_stage(cfg, "regularize", info);
  log << os.str();
  return 0;
}

int run_factorize(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  fs::path out(cfg.output);
  fs::create_directories(out);
  WaveModel m = build_model(cfg);
  EllipticityReport ell = ellipticity(m, cfg);
  write_file(out / "ellipticity.txt", ell.text());
  FactorizationResult r = factorize(m, cfg, branch_from_name(cfg.branch));
  write_factorization((out / "factorization").string(), r);
  auto rows = residual_fits(r, m);
  std::ostringstream os;
  os << "# j identically_zero slope bound status\n" << std::setprecision(10);
  bool ok = true;
  json fits = json::array();
  for (auto& row : rows) {
    os << row.j << " " << (row.identically_zero ? 1 : 0) << " " << row.slope << " " << row.bound << " "
       << (row.pass ? "pass" : "fail") << "\n";
    ok = ok && row.pass;
    fits.push_back({{"j", row.j}, {"zero", row.identically_zero}, {"slope", row.slope}, {"bound", row.bound}});
  }
  write_file(out / "residual_fits.txt", os.str());
  record_stage(cfg, "factorize", {{"N", cfg.N}, {"branch", cfg.branch}, {"residual_fits", fits}, {"pass", ok}});
  log << ell.text() << os.str();
  if (!ok) log << "residual order check failed\n";
  return ok ? 0 : 2;
}

int run_build_oneway(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  fs::path out(cfg.output);
  WaveModel m = build_model(cfg);
  auto minus = factorize(m, cfg, Branch::RootMinus);
  auto plus = factorize(m, cfg, Branch::RootPlus);
  OneWayOperators ops = build_Bpm(m, minus, plus, cfg.selfadjoint);
  Symbol c = build_damping(cfg.angles, m, cfg.eta0);
  write_oneway((out / "oneway").string(), ops, c);
  record_stage(cfg, "build-oneway", {{"selfadjoint", cfg.selfadjoint}, {"eta0", cfg.eta0}});
  log << "one-way operators written to " << (out / "oneway").string() << "\n";
  return 0;
}

int run_solve(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  fs::path out(cfg.output);
  fs::create_directories(out / "snapshots");
  WaveModel m = build_model(cfg);
  auto minus = factorize(m, cfg, Branch::RootMinus);
  auto plus = factorize(m, cfg, Branch::RootPlus);
  OneWayOperators ops = build_Bpm(m, minus, plus, cfg.selfadjoint);
  Symbol damping = build_damping(cfg.angles, m, cfg.eta0);
  const GridField u0 = initial_field(cfg);
  const auto forcing = forcing_slices(cfg);
  const bool eps_free = !m.grid;
  const double inf = std::numeric_limits<double>::infinity();
  // outside the cone at every x: measured with the slowest speed
  const double c_cone = speed_range(m).first;

  Table margins{"# branch eps s p lambda lhs rhs margin"};
  Table cone{"# branch eps z fraction"};
  margins.rows << std::setprecision(12);
  cone.rows << std::setprecision(12);
  bool ok = true;
  json runs = json::array();
  for (auto [name, b] : {std::pair<const char*, const Graded*>{"plus", &ops.b_plus}, {"minus", &ops.b_minus}}) {
    CauchyProblem p;
    p.A = b->total();
    p.B = damping;
    p.u0 = u0;
    p.forcing = forcing;
    p.Z = cfg.Z;
    p.dz = cfg.dz;
    p.tau = cfg.tau;
    p.gamma = cfg.gamma;
    p.L = cfg.L;
    p.hermitian = cfg.selfadjoint;
    p.sobolev = cfg.sobolev;
    p.snapshot_depths = cfg.snapshots;

    // the stepper resolves every grid mode at every eps, so probe the solve grid at full band
    GardingOptions go;
    go.n = cfg.nx;
    go.period = cfg.period;
    go.seed = cfg.seed + 1;
    go.tau = cfg.tau;
    go.band_exponent = 64;
    Symbol gen = scale(p.A, cplx(0, -1)) + damping;
    GardingReport gr = garding_check(gen, cfg.eps, go);
    EpsNet lambda = energy_lambda(gr);

    std::vector<EnergyTrace> traces;
    std::optional<SolveResult> shared;
    for (std::size_t ie = 0; ie < cfg.eps.size(); ++ie) {
      const double eps = cfg.eps[ie];
      SolveResult r;
      if (eps_free && shared) {
        r = *shared;  // eps enters only through lambda
      } else {
        r = solve_cauchy(p, eps, lambda[ie]);
        if (eps_free) shared = r;
        for (std::size_t k = 0; k < r.snapshots.size(); ++k)
          write_grid((out / "snapshots" / (std::string("u_") + name + "_e" + std::to_string(ie) + "_s" +
                                           std::to_string(k) + ".grid"))
                         .string(),
                     r.snapshots[k]);
      }
      r.trace.eps = eps;
      r.trace.lambda = lambda[ie];
      for (double s : cfg.sobolev)
        for (double q : {1.0, 2.0, inf}) {
          auto em = check_energy_estimate(r.trace, s, q, lambda[ie]);
          margins.rows << name << " " << eps << " " << s << " " << (std::isinf(q) ? "inf" : g17(q)) << " "
                       << em.lambda << " " << em.lhs << " " << em.rhs << " " << em.margin << "\n";
          ok = ok && em.margin >= -1e-8;
        }
      for (auto& snap : r.snapshots)
        cone.rows << name << " " << eps << " " << snap.z << " "
                  << cone_energy_fraction(snap, cfg.tau, c_cone, rad(cfg.angles.theta2)) << "\n";
      runs.push_back({{"branch", name}, {"eps", eps}, {"lambda", lambda[ie]}, {"dz", r.dz}, {"steps", r.steps},
                      {"stable_dz", r.stable_dz}});
      traces.push_back(r.trace);
    }
    write_trace_csv((out / (std::string("trace_") + name + ".csv")).string(), traces);
    write_file(out / (std::string("garding_") + name + ".txt"), gr.text());
  }
  write_file(out / "margins.txt", margins.header + "\n" + margins.rows.str());
  write_file(out / "cone_energy.txt", cone.header + "\n" + cone.rows.str());
  record_stage(cfg, "solve", {{"runs", runs}, {"pass", ok}});
  log << margins.header << "\n" << margins.rows.str();
  if (!ok) log << "energy estimate margin below -1e-8\n";
  return ok ? 0 : 2;
}

int run_diagnose(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  fs::path out(cfg.output);
  fs::create_directories(out);
  WaveModel m = build_model(cfg);
  std::ostringstream os;
  os << "ellipticity on the inner cone\n" << ellipticity(m, cfg).text();
  Symbol c = build_damping(cfg.angles, m, cfg.eta0);
  GardingOptions go;
  go.n = cfg.garding_n;
  go.period = cfg.period;
  go.seed = cfg.seed + 1;
  go.tau = cfg.tau;
  auto plus = garding_check(c, cfg.eps, go);
  auto minus = garding_check(scale(c, -1.0), cfg.eps, go);
  os << "damping +c\n" << plus.text() << "damping -c\n" << minus.text();
  write_file(out / "diagnose.txt", os.str());
  record_stage(cfg, "diagnose", {{"damping_plus", plus.pass}, {"damping_minus", minus.pass}});
  log << os.str();
  return 0;
}

namespace {

std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);)
    if (!line.empty() && line[0] != '#') out.push_back(line);
  return out;
}

// trace CSV rows -> "branch eps s z norm pnorm"
std::string norms_from_csv(const std::string& branch, const std::string& text) {
  std::istringstream is(text);
  std::string line, out;
  std::getline(is, line);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> c;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) c.push_back(cell);
    require(c.size() == 6, ErrorKind::InvalidInput, "malformed trace row: " + line);
    out += branch + " " + c[1] + " " + c[2] + " " + c[0] + " " + c[3] + " " + c[4] + "\n";
  }
  return out;
}

}  // namespace

int emit_plotdata(const std::string& run_dir, std::ostream& log) {
  fs::path dir(run_dir);
  const fs::path man_path = dir / "run_manifest.json";
  if (!fs::exists(man_path)) {
    log << "incomplete run directory: no run_manifest.json in " << run_dir << "\n";
    return 1;
  }
  json man;
  try {
    man = json::parse(read_file(man_path));
  } catch (const json::exception& e) {
    log << "bad run manifest: " << e.what() << "\n";
    return 1;
  }
  const json stages = man.value("stages", json::object());
  std::map<std::string, std::string> files;
  auto need = [&](const char* name) -> std::optional<std::string> {
    if (!fs::exists(dir / name)) {
      log << "incomplete run directory: missing " << name << "\n";
      return std::nullopt;
    }
    return read_file(dir / name);
  };
  if (stages.contains("factorize")) {
    auto t = need("residual_fits.txt");
    if (!t) return 1;
    std::string body = "# j slope bound\n";
    for (auto& l : data_lines(*t)) {
      std::istringstream ls(l);
      std::string j, zero, slope, bound;
      ls >> j >> zero >> slope >> bound;
      body += j + " " + slope + " " + bound + "\n";
    }
    files["residual_fits.dat"] = body;
  }
  if (stages.contains("solve")) {
    auto tp = need("trace_plus.csv"), tm = need("trace_minus.csv"), mg = need("margins.txt"),
         ce = need("cone_energy.txt");
    if (!tp || !tm || !mg || !ce) return 1;
    files["norms.dat"] = "# branch eps s z norm_Hs Pnorm_Hs\n" + norms_from_csv("plus", *tp) + norms_from_csv("minus", *tm);
    std::string mb = "# branch eps s p lambda lhs rhs margin\n", cb = "# branch eps z fraction\n";
    for (auto& l : data_lines(*mg)) mb += l + "\n";
    for (auto& l : data_lines(*ce)) cb += l + "\n";
    files["margins.dat"] = mb;
    files["cone_energy.dat"] = cb;
  }
  if (files.empty()) {
    log << "incomplete run directory: no factorize or solve stage recorded\n";
    return 1;
  }
  fs::create_directories(dir / "plotdata");
  for (auto& [name, body] : files) {
    write_file(dir / "plotdata" / name, body);
    log << "wrote " << (dir / "plotdata" / name).string() << "\n";
  }
  return 0;
}

}  // namespace psido
