#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "psido/grid.hpp"
#include "psido/scalenets.hpp"
#include "psido/symbol.hpp"

namespace psido {

// tau != 0 and |c xi / tau| <= sin(theta).
bool cone_membership(const PhasePoint& p, double theta, double c_star);

class PhaseRegion {
 public:
  enum class Kind { Cone, Complement, Intersection, Box };

  // Cone I'_theta with reference speed c*(x, z) given as an expression.
  static PhaseRegion cone(double theta, Ex c_star);
  static PhaseRegion complement(const PhaseRegion& r);
  static PhaseRegion intersection(const PhaseRegion& a, const PhaseRegion& b);
  static PhaseRegion box(const PhasePoint& lo, const PhasePoint& hi);

  bool contains(const PhasePoint& p, double eps = 1.0) const;
  Kind kind() const { return kind_; }
  double theta() const { return theta_; }
  std::string describe() const;

 private:
  Kind kind_ = Kind::Box;
  double theta_ = 0;
  Ex c_star_;
  PhasePoint lo_{}, hi_{};
  std::vector<std::shared_ptr<const PhaseRegion>> parts_;
};

// Distance function zeta^2 - tau^2 / c^2 + |xi|^2 of the characteristic set.
double sigma_distance(const PhasePoint& p, double zeta, double c);
bool on_sigma(const PhasePoint& p, double zeta, double c, double tol = 1e-6);

struct CutoffAngles {
  double theta1 = 30, gamma1 = 35, gamma2 = 50, theta2 = 60;  // degrees
  void validate() const;
};

// chi = J(|c xi / tau|; sin gamma1, sin gamma2). Order 0 symbol in (tau, xi).
Symbol build_chi(const CutoffAngles& a, const Ex& speed, int n_lat = 1);

struct EllipticityOptions {
  double m = 0;
  // Sample only the unit sphere in the frequencies and use the symbol as
  // given (principal, homogeneous); no radius search.
  bool homogeneous = false;
  int angular_samples = 721;
  std::vector<double> radii;  // dyadic candidates; default 1, 2, ..., 512
};

struct EllipticityReport {
  std::string region;
  EpsNet lower_bound;   // 1 / s_eps
  EpsNet radius;        // r_eps
  NetClass reciprocal_class = NetClass::Unset;
  bool elliptic = false;
  std::size_t samples = 0;
  std::string text() const;
};

// With a single-eps grid the verdict only needs a positive lower bound.
EllipticityReport ellipticity_probe(const Symbol& s, const PhaseRegion& region, const SampleBox& box,
                                    const EpsGrid& grid, const EllipticityOptions& opt);
// Same probe over an explicit point list (rays, scattered samples).
EllipticityReport ellipticity_probe(const Symbol& s, const PhaseRegion& region, const std::vector<PhasePoint>& points,
                                    const EpsGrid& grid, const EllipticityOptions& opt);

struct WindowSpec {
  double center = 0;      // x0
  double inner = 0.5;     // window is 1 within this distance of x0
  double outer = 1.0;     // and 0 beyond this distance (periodic distance)
  double eval(double x, double period) const;
};

struct ConeSpec {
  std::vector<double> direction;  // (xi) or (tau, xi)
  double half_angle = 0;          // radians; required
};

struct WavefrontResult {
  std::vector<int> orders;                 // l = 0..l_max
  std::vector<double> exponents;           // fitted N per l
  std::vector<std::vector<double>> norms;  // [l][eps]
  double growth = 0;                       // slope of N_l against l
  double bound = 0;                        // max N_l
  bool singular = false;
  std::string text() const;
};

struct WavefrontOptions {
  int l_max = 6;
  double growth_tol = 0.1;
  double noise_floor = 1e-13;  // relative to the largest windowed coefficient
};

WavefrontResult wavefront_probe(const std::vector<GridField>& family, const EpsGrid& grid, const WindowSpec& w,
                                const ConeSpec& cone, const WavefrontOptions& opt = {});

}  // namespace psido
