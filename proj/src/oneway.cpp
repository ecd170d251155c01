#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "psido/errors.hpp"
#include "psido/factorize.hpp"

namespace psido {

namespace {

constexpr cplx I(0.0, 1.0);

// Principal part must be real and positive on a spread of (x, z, frequency) samples.
void check_positive(const Symbol& s, double eps) {
  Points p;
  p.eps = eps;
  for (int ix = 0; ix < 16; ++ix)
    for (int ia = 0; ia < 16; ++ia)
      for (double r : {2.0, 16.0, 128.0}) {
        double phi = s.has_tau ? (ia + 0.5) * std::numbers::pi / 16 : ia * 2 * std::numbers::pi / 16;
        p.c[X].push_back(2 * std::numbers::pi * ix / 16);
        p.c[TAU].push_back(s.has_tau ? r * std::sin(phi) : 0.0);
        p.c[XI].push_back(s.has_tau ? r * std::cos(phi) : r * std::cos(phi) + 1.0);
      }
  for (int v : {Y, Z, ETA}) p.c[v] = {0.0};
  auto vals = evaluate(s.e, p);
  for (auto& v : vals)
    require(std::isfinite(v.real()) && v.real() > 0 && std::abs(v.imag()) <= 1e-8 * std::abs(v), ErrorKind::InvalidInput,
            "principal symbol of the square-root argument is not real positive");
}

std::string sym_file(const std::string& stem, int k) { return stem + "_" + std::to_string(k) + ".sym"; }

void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream f(p);
  require(bool(f), ErrorKind::Io, "cannot write " + p.string());
  f << s;
}

std::string read_text(const std::filesystem::path& p) {
  std::ifstream f(p);
  require(bool(f), ErrorKind::Io, "cannot read " + p.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

nlohmann::json write_graded(const std::filesystem::path& dir, const std::string& stem, const Graded& g) {
  nlohmann::json j;
  j["top"] = g.base.m;
  j["depth"] = g.depth();
  for (int k = 0; k < g.depth(); ++k) write_text(dir / sym_file(stem, k), serialize_symbol(g.grade(k)));
  return j;
}

Graded read_graded(const std::filesystem::path& dir, const std::string& stem, const nlohmann::json& j) {
  int d = j.at("depth").get<int>();
  Graded g(deserialize_symbol(read_text(dir / sym_file(stem, 0))), d);
  g.base.m = j.at("top").get<double>();
  for (int k = 1; k < d; ++k) g.g[k] = deserialize_symbol(read_text(dir / sym_file(stem, k))).e;
  return g;
}

}  // namespace

Graded selfadjoint_sqrt(const Graded& T, int N, double eps) {
  require(N >= 0, ErrorKind::InvalidInput, "square root needs N >= 0");
  check_positive(T.grade(0), eps);
  const int depth = N + 1;
  Ex root0 = sqrt(T.g[0]);
  Graded x = symmetrize(Graded(T.base.with(root0, T.base.m / 2)), depth);
  for (int k = 1; k <= N; ++k) {
    Graded r = graded_compose(x, x, k + 1) - T.truncated(k + 1);
    Ex c = Ex(-0.5) * r.g[k] / root0;
    if (c.is_zero()) continue;
    Graded corr = symmetrize(Graded(T.base.with(c, x.order(k))), depth - k);
    x = (x + corr.retopped(x.base.m)).truncated(depth);
  }
  return x;
}

OneWayOperators build_Bpm(const WaveModel& m, const FactorizationResult& minus, const FactorizationResult& plus,
                          bool selfadjoint) {
  require(minus.branch == Branch::RootMinus && plus.branch == Branch::RootPlus, ErrorKind::InvalidInput,
          "build_Bpm needs one root-minus and one root-plus factorization");
  require(minus.N == plus.N, ErrorKind::InvalidInput, "factorizations use different truncations");
  const auto& am = minus.angles;
  const auto& ap = plus.angles;
  require(am.theta1 == ap.theta1 && am.gamma1 == ap.gamma1 && am.gamma2 == ap.gamma2 && am.theta2 == ap.theta2,
          ErrorKind::InvalidInput, "factorizations use different regions");
  const int N = minus.N;
  const double eps = m.sample_eps();
  OneWayOperators ops;
  ops.N = N;
  ops.selfadjoint = selfadjoint;
  ops.chi = build_chi(am, m.speed());
  Graded q(Symbol(m.inv_rho, 0.0, 1, true), 1);

  auto block = [&](const Graded& a, double sign, Graded& x, Graded& p) {
    if (selfadjoint) {
      Graded t = (sign * I) * (graded_compose(a, q, N) - q.base.e * graded_adjoint(a, N));
      x = selfadjoint_sqrt(t, N - 1, eps);
    } else {
      Ex b = extended_root(m, am);
      x = Graded(Symbol(sqrt(Ex(2.0) * b * m.inv_rho), 0.5, 1, true), N);
    }
    p = parametrix(x, N, Ex(1.0), eps);
    Graded lead = graded_compose(graded_compose(p, a, N), x, N);
    Graded dz = graded_compose(p, graded_diff(x, Z), N).retopped(lead.base.m).truncated(N);
    return I * (lead + dz);
  };
  ops.raw_plus = block(minus.a1, 1.0, ops.x_plus, ops.p12);
  ops.raw_minus = block(plus.a1, -1.0, ops.x_minus, ops.p22);
  // continuation past the region: pointwise chi cut, no further symmetrization
  ops.b_plus = ops.chi.e * ops.raw_plus;
  ops.b_minus = ops.chi.e * ops.raw_minus;
  return ops;
}

Symbol build_damping(const CutoffAngles& angles, const WaveModel& m, double eta0, int depth) {
  angles.validate();
  require(eta0 >= 0, ErrorKind::InvalidInput, "damping strength must be non-negative");
  Symbol chi = build_chi(angles, m.speed());
  Ex c = Ex(eta0) * sqrt(pow(var(TAU), 2) + pow(var(XI), 2)) * (Ex(1.0) - chi.e);
  return symmetrize(Graded(Symbol(c, 1.0, 1, true)), depth).total();
}

void write_factorization(const std::string& dir, const FactorizationResult& r) {
  std::filesystem::path d(dir);
  std::filesystem::create_directories(d);
  nlohmann::json man;
  man["format"] = "factorization v1";
  man["model"] = r.model;
  man["N"] = r.N;
  man["branch"] = branch_name(r.branch);
  man["region"] = {{"theta1", r.angles.theta1}, {"gamma1", r.angles.gamma1}, {"gamma2", r.angles.gamma2},
                   {"theta2", r.angles.theta2}};
  man["a1"] = write_graded(d, "a1", r.a1);
  man["a2"] = write_graded(d, "a2", r.a2);
  man["gamma1"] = write_graded(d, "gamma1", r.gamma1);
  man["gamma2"] = write_graded(d, "gamma2", r.gamma2);
  write_text(d / "manifest.json", man.dump(2) + "\n");
}

FactorizationResult read_factorization(const std::string& dir) {
  std::filesystem::path d(dir);
  nlohmann::json man;
  try {
    man = nlohmann::json::parse(read_text(d / "manifest.json"));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidInput, std::string("bad factorization manifest: ") + e.what());
  }
  require(man.value("format", "") == "factorization v1", ErrorKind::InvalidInput, "unknown factorization format");
  FactorizationResult r;
  r.model = man.at("model").get<std::string>();
  r.N = man.at("N").get<int>();
  r.branch = branch_from_name(man.at("branch").get<std::string>());
  auto& reg = man.at("region");
  r.angles = {reg.at("theta1"), reg.at("gamma1"), reg.at("gamma2"), reg.at("theta2")};
  r.a1 = read_graded(d, "a1", man.at("a1"));
  r.a2 = read_graded(d, "a2", man.at("a2"));
  r.gamma1 = read_graded(d, "gamma1", man.at("gamma1"));
  r.gamma2 = read_graded(d, "gamma2", man.at("gamma2"));
  return r;
}

void write_oneway(const std::string& dir, const OneWayOperators& ops, const Symbol& damping) {
  std::filesystem::path d(dir);
  std::filesystem::create_directories(d);
  nlohmann::json man;
  man["format"] = "oneway v1";
  man["N"] = ops.N;
  man["selfadjoint"] = ops.selfadjoint;
  man["b_plus"] = write_graded(d, "b_plus", ops.b_plus);
  man["b_minus"] = write_graded(d, "b_minus", ops.b_minus);
  man["x_plus"] = write_graded(d, "x_plus", ops.x_plus);
  man["x_minus"] = write_graded(d, "x_minus", ops.x_minus);
  write_text(d / "damping.sym", serialize_symbol(damping));
  write_text(d / "chi.sym", serialize_symbol(ops.chi));
  write_text(d / "manifest.json", man.dump(2) + "\n");
}

}  // namespace psido
