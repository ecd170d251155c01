#include "psido/model.hpp"

#include <algorithm>
#include <cmath>

#include "psido/errors.hpp"

namespace psido {

bool WaveModel::constant() const {
  for (int v : {X, Y, Z})
    if (inv_c2.depends_on(v) || inv_rho.depends_on(v)) return false;
  return true;
}

WaveModel analytic_model(const std::string& name, const Ex& speed, const Ex& density, double c_ref) {
  for (int v : {TAU, XI, ETA})
    require(!speed.depends_on(v) && !density.depends_on(v), ErrorKind::InvalidInput,
            "coefficients may depend on space and depth only");
  WaveModel m;
  m.name = name;
  m.inv_c2 = pow(speed, -2.0);
  m.inv_rho = pow(density, -1.0);
  m.c_ref = c_ref;
  return m;
}

namespace {

double inv_sq(double c) { return 1.0 / (c * c); }
double inv(double r) { return 1.0 / r; }

}  // namespace

WaveModel file_model(const std::string& name, const HolderModel& speed, const HolderModel& density,
                     const EpsNet& omega, const Mollifier& phi, FileModelReport* report) {
  speed.validate();
  density.validate();
  require(speed.lower > 0 && density.lower > 0, ErrorKind::InvalidInput, "speed and density need positive lower bounds");
  HolderModel s = map_samples(speed, inv_sq);
  s.lower = inv_sq(speed.upper);
  s.upper = inv_sq(speed.lower);
  HolderModel q = map_samples(density, inv);
  q.lower = inv(density.upper);
  q.upper = inv(density.lower);
  FileModelReport rep;
  rep.speed = regularization_report(s, omega, phi);
  rep.density = regularization_report(q, omega, phi);
  require(rep.speed.eps_star > 0 && rep.density.eps_star > 0, ErrorKind::InvalidInput,
          "regularized coefficients are not strongly positive on any grid eps");
  WaveModel m;
  m.name = name;
  m.inv_c2 = field(regularized_family("inv_c2", s, omega, phi));
  m.inv_rho = field(regularized_family("inv_rho", q, omega, phi));
  m.grid = omega.grid();
  m.omega = omega;
  m.c_ref = speed.lower;
  m.eps_star = std::min(rep.speed.eps_star, rep.density.eps_star);
  if (report) *report = rep;
  return m;
}

Symbol wave_symbol(const WaveModel& m) {
  return Symbol(pow(var(TAU), 2) * m.inv_c2 - pow(var(XI), 2), 2.0, 1, true);
}

}  // namespace psido
