#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace psido {

// Strictly decreasing regularization parameters in (0,1].
class EpsGrid {
 public:
  EpsGrid() = default;
  explicit EpsGrid(std::vector<double> values);

  // 10^-k for k = kmin..kmax.
  static EpsGrid decades(int kmin = 2, int kmax = 9);

  std::size_t size() const { return v_.size(); }
  double operator[](std::size_t i) const { return v_[i]; }
  const std::vector<double>& values() const { return v_; }

  // Index of eps in the grid, matching to 1e-9 relative. Throws invalid-input.
  std::size_t index_of(double eps) const;
  std::optional<std::size_t> find(double eps) const;

  double decades_spanned() const;
  bool operator==(const EpsGrid& o) const { return v_ == o.v_; }

 private:
  std::vector<double> v_;
};

// Classification of a scale net. Order matters only for reporting.
enum class NetClass { Unset, Lsc, ScNotLsc, ModerateNotSc, Negligible, Unclassified };

const char* net_class_name(NetClass c);
NetClass net_class_from_name(const std::string& s);

class EpsNet {
 public:
  EpsNet() = default;
  EpsNet(EpsGrid grid, std::vector<double> values, std::string name = {});

  const EpsGrid& grid() const { return grid_; }
  const std::vector<double>& values() const { return vals_; }
  const std::string& name() const { return name_; }
  std::size_t size() const { return vals_.size(); }
  double operator[](std::size_t i) const { return vals_[i]; }
  double at(double eps) const { return vals_[grid_.index_of(eps)]; }

  NetClass net_class() const { return cls_; }
  void set_class(NetClass c) { cls_ = c; }

 private:
  EpsGrid grid_;
  std::vector<double> vals_;
  std::string name_;
  NetClass cls_ = NetClass::Unset;
};

EpsNet make_loglog_net(const EpsGrid& g);
EpsNet make_const_net(const EpsGrid& g, double c);
EpsNet make_power_net(const EpsGrid& g, double exponent);  // eps^exponent

struct ClassifyOptions {
  std::size_t min_points = 6;
  double min_decades = 4.0;
  // Slope of log(omega^p / log(1/eps)) against log(1/eps) above which the
  // ratio counts as divergent.
  double ratio_growth_tol = 0.25;
  // Power-law exponent (against 1/eps) separating slow scale from moderate.
  double sc_power_tol = 0.1;
  // Decay exponent below which a net is negligible.
  double negligible_power = -0.5;
  // Tail decay exponent tolerated by the lower-bound test.
  double lower_bound_tol = 0.05;
};

struct Classification {
  NetClass cls = NetClass::Unclassified;
  bool bounded_below = false;
  double lower_bound = 0.0;
  double power_exponent = 0.0;       // fitted d log|w| / d log(1/eps)
  std::array<double, 3> c_p{};       // max ratio omega^p / log(1/eps), p = 1, 2, 4
  std::array<double, 3> ratio_slope{};
  std::string note;
};

// Throws invalid-input for non-finite samples, insufficient-data for short grids.
Classification classify_net(const EpsNet& net, const ClassifyOptions& opt = {});

double lsq_slope(const std::vector<double>& x, const std::vector<double>& y,
                 double* intercept = nullptr, double* rms = nullptr);

EpsGrid read_eps_grid(const std::string& path);
void write_eps_grid(const std::string& path, const EpsGrid& g);
std::string format_eps_grid(const EpsGrid& g);
EpsGrid parse_eps_grid(const std::string& text);

}  // namespace psido
