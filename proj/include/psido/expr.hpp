#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "psido/scalenets.hpp"

namespace psido {

using cplx = std::complex<double>;

// Fixed variable slots shared by every symbol: space (x, y), depth z,
// and the dual frequencies (tau for t, xi for x, eta for y).
enum Var : int { X = 0, Y = 1, Z = 2, TAU = 3, XI = 4, ETA = 5 };
constexpr int kNumVars = 6;
const char* var_name(int v);
int var_from_name(const std::string& s);  // -1 if unknown

struct TrigMode {
  double kx = 0, kz = 0;
  cplx c;
};

// Band-limited field in (x, z), one mode list per eps on a grid.
// A field with an empty grid holds a single eps-independent mode list.
class TrigField {
 public:
  TrigField(std::string name, EpsGrid grid, std::vector<std::vector<TrigMode>> modes, bool real);
  TrigField(std::string name, std::vector<TrigMode> modes, bool real);

  const std::string& name() const { return name_; }
  const EpsGrid& grid() const { return grid_; }
  bool eps_independent() const { return grid_.size() == 0; }
  bool real() const { return real_; }
  const std::vector<TrigMode>& modes_at(double eps) const;
  const std::vector<std::vector<TrigMode>>& all_modes() const { return modes_; }
  bool depends_x() const { return dep_x_; }
  bool depends_z() const { return dep_z_; }

 private:
  std::string name_;
  EpsGrid grid_;
  std::vector<std::vector<TrigMode>> modes_;
  bool real_;
  bool dep_x_ = false, dep_z_ = false;
};

enum class Op : std::uint8_t { Const, Var, Net, Field, Add, Mul, Pow, Func };
enum class Fn : std::uint8_t { Sin, Cos, Exp, Log, JoinAbs };

struct Node {
  Op op;
  std::uint64_t id;
  std::uint64_t shash;  // structural hash, independent of construction order
  std::uint8_t deps;  // bit v set if the node depends on variable v
  cplx c;             // Const
  int var = -1;       // Var
  double p = 0;       // Pow exponent
  Fn fn = Fn::Sin;    // Func
  int order = 0;      // Func derivative order; Field packs dx + 16*dz
  double pa = 0, pb = 0;
  std::shared_ptr<const EpsNet> net;
  std::shared_ptr<const TrigField> field;
  std::vector<const Node*> kids;
};

// Value handle for an interned expression node. Structurally equal
// expressions share one node, so pointer equality is structural equality.
class Ex {
 public:
  Ex();
  Ex(double v);
  Ex(cplx v);
  Ex(int v) : Ex(double(v)) {}
  explicit Ex(const Node* n) : n_(n) {}

  const Node* node() const { return n_; }
  const Node* operator->() const { return n_; }
  bool operator==(const Ex& o) const { return n_ == o.n_; }
  bool operator!=(const Ex& o) const { return n_ != o.n_; }

  bool is_const() const { return n_->op == Op::Const; }
  bool is_zero() const;
  bool depends_on(int v) const { return (n_->deps >> v) & 1; }

 private:
  const Node* n_;
};

Ex var(int v);
Ex constant(cplx v);
Ex net(std::shared_ptr<const EpsNet> n);
Ex field(std::shared_ptr<const TrigField> f, int dx = 0, int dz = 0);

Ex operator+(const Ex& a, const Ex& b);
Ex operator-(const Ex& a, const Ex& b);
Ex operator-(const Ex& a);
Ex operator*(const Ex& a, const Ex& b);
Ex operator/(const Ex& a, const Ex& b);
Ex& operator+=(Ex& a, const Ex& b);
Ex& operator*=(Ex& a, const Ex& b);

Ex sum(const std::vector<Ex>& terms);
Ex product(const std::vector<Ex>& factors);
Ex pow(const Ex& b, double p);
Ex sqrt(const Ex& b);
Ex sin(const Ex& a);
Ex cos(const Ex& a);
Ex exp(const Ex& a);
Ex log(const Ex& a);
// s -> J(|s|) with the smooth join J from profiles.hpp.
Ex join_abs(const Ex& s, double a, double b, int order = 0);
// <v> = (1 + sum of squares of the listed variables)^(1/2).
Ex japanese(const std::vector<int>& vars);

Ex diff(const Ex& e, int v, int times = 1);
Ex conj(const Ex& e);

std::size_t node_count(const Ex& e);
// True if some net or eps-indexed field appears in e.
bool depends_on_eps(const Ex& e);
std::string to_string(const Ex& e);

// Line-oriented DAG text form starting with "SYM v1".
std::string serialize(const Ex& e);
Ex deserialize(const std::string& text);

}  // namespace psido
