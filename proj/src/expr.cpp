#include "psido/expr.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "psido/errors.hpp"
#include "psido/profiles.hpp"

namespace psido {

namespace {

const char* kVarNames[kNumVars] = {"x", "y", "z", "tau", "xi", "eta"};

std::uint64_t bits(double d) {
  if (d == 0.0) d = 0.0;  // fold -0
  std::uint64_t u;
  std::memcpy(&u, &d, sizeof u);
  return u;
}

struct Key {
  Op op;
  int var;
  std::uint64_t p, cr, ci, pa, pb;
  Fn fn;
  int order;
  const void* ptr;
  std::vector<std::uint64_t> kids;
  bool operator==(const Key& o) const {
    return op == o.op && var == o.var && p == o.p && cr == o.cr && ci == o.ci && pa == o.pa &&
           pb == o.pb && fn == o.fn && order == o.order && ptr == o.ptr && kids == o.kids;
  }
};

struct KeyHash {
  std::size_t operator()(const Key& k) const {
    std::size_t h = std::hash<int>()(int(k.op));
    auto mix = [&h](std::uint64_t v) { h ^= std::hash<std::uint64_t>()(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
    mix(std::uint64_t(k.var));
    mix(k.p);
    mix(k.cr);
    mix(k.ci);
    mix(k.pa);
    mix(k.pb);
    mix(std::uint64_t(k.fn));
    mix(std::uint64_t(k.order));
    mix(reinterpret_cast<std::uintptr_t>(k.ptr));
    for (auto c : k.kids) mix(c);
    return h;
  }
};

struct Table {
  std::recursive_mutex mu;
  std::unordered_map<Key, std::unique_ptr<Node>, KeyHash> nodes;
  std::uint64_t next_id = 1;
  std::unordered_map<std::uint64_t, const Node*> diff_cache;  // id * 8 + var
  std::unordered_map<std::uint64_t, const Node*> conj_cache;
};

Table& table() {
  static Table* t = new Table();
  return *t;
}

const Node* intern(Node proto) {
  Table& t = table();
  std::lock_guard<std::recursive_mutex> lk(t.mu);
  Key k{proto.op, proto.var, bits(proto.p), bits(proto.c.real()), bits(proto.c.imag()),
        bits(proto.pa), bits(proto.pb), proto.fn, proto.order,
        proto.net ? static_cast<const void*>(proto.net.get())
                  : static_cast<const void*>(proto.field.get()),
        {}};
  k.kids.reserve(proto.kids.size());
  for (auto* c : proto.kids) k.kids.push_back(c->id);
  auto it = t.nodes.find(k);
  if (it != t.nodes.end()) return it->second.get();
  auto n = std::make_unique<Node>(std::move(proto));
  n->id = t.next_id++;
  {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](std::uint64_t v) {
      h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      h *= 1099511628211ULL;
    };
    mix(std::uint64_t(n->op));
    mix(std::uint64_t(n->var + 1));
    mix(bits(n->p));
    mix(bits(n->c.real()));
    mix(bits(n->c.imag()));
    mix(bits(n->pa));
    mix(bits(n->pb));
    mix(std::uint64_t(n->fn));
    mix(std::uint64_t(n->order));
    if (n->net) {
      for (char ch : n->net->name()) mix(std::uint64_t(ch));
      for (double v : n->net->values()) mix(bits(v));
    }
    if (n->field) {
      for (char ch : n->field->name()) mix(std::uint64_t(ch));
      for (auto& l : n->field->all_modes())
        for (auto& md : l) {
          mix(bits(md.kx));
          mix(bits(md.c.real()));
        }
    }
    for (auto* c : n->kids) mix(c->shash);
    n->shash = h;
  }
  std::uint8_t d = n->deps;
  for (auto* c : n->kids) d |= c->deps;
  n->deps = d;
  const Node* raw = n.get();
  t.nodes.emplace(std::move(k), std::move(n));
  return raw;
}

Node blank(Op op) {
  Node n;
  n.op = op;
  n.id = 0;
  n.deps = 0;
  return n;
}

const Node* make_const(cplx v) {
  Node n = blank(Op::Const);
  n.c = cplx(v.real() == 0.0 ? 0.0 : v.real(), v.imag() == 0.0 ? 0.0 : v.imag());
  return intern(std::move(n));
}

bool is_int(double p) { return std::floor(p) == p && std::abs(p) < 1e6; }

cplx const_pow(cplx b, double p) {
  if (is_int(p)) {
    long k = long(p);
    cplx r = 1.0, x = b;
    bool inv = k < 0;
    unsigned long m = inv ? -k : k;
    while (m) {
      if (m & 1) r *= x;
      x *= x;
      m >>= 1;
    }
    return inv ? 1.0 / r : r;
  }
  if (b.imag() == 0.0 && b.real() > 0) return std::pow(b.real(), p);
  return std::pow(b, p);
}

bool by_id(const Node* a, const Node* b) {
  return a->shash != b->shash ? a->shash < b->shash : a->id < b->id;
}

}  // namespace

const char* var_name(int v) { return (v >= 0 && v < kNumVars) ? kVarNames[v] : "?"; }

int var_from_name(const std::string& s) {
  for (int v = 0; v < kNumVars; ++v)
    if (s == kVarNames[v]) return v;
  return -1;
}

TrigField::TrigField(std::string name, EpsGrid grid, std::vector<std::vector<TrigMode>> modes,
                     bool real)
    : name_(std::move(name)), grid_(std::move(grid)), modes_(std::move(modes)), real_(real) {
  require(modes_.size() == grid_.size(), ErrorKind::InvalidInput, "field mode lists do not match grid");
  for (auto& l : modes_)
    for (auto& m : l) {
      if (m.kx != 0) dep_x_ = true;
      if (m.kz != 0) dep_z_ = true;
    }
}

TrigField::TrigField(std::string name, std::vector<TrigMode> modes, bool real)
    : name_(std::move(name)), modes_{std::move(modes)}, real_(real) {
  for (auto& m : modes_[0]) {
    if (m.kx != 0) dep_x_ = true;
    if (m.kz != 0) dep_z_ = true;
  }
}

const std::vector<TrigMode>& TrigField::modes_at(double eps) const {
  if (eps_independent()) return modes_[0];
  return modes_[grid_.index_of(eps)];
}

Ex::Ex() : n_(make_const(0.0)) {}
Ex::Ex(double v) : n_(make_const(v)) {}
Ex::Ex(cplx v) : n_(make_const(v)) {}

bool Ex::is_zero() const { return n_->op == Op::Const && n_->c == cplx(0.0); }

Ex var(int v) {
  require(v >= 0 && v < kNumVars, ErrorKind::InvalidInput, "bad variable index");
  Node n = blank(Op::Var);
  n.var = v;
  n.deps = std::uint8_t(1u << v);
  return Ex(intern(std::move(n)));
}

Ex constant(cplx v) { return Ex(make_const(v)); }

Ex net(std::shared_ptr<const EpsNet> nt) {
  Node n = blank(Op::Net);
  n.net = std::move(nt);
  return Ex(intern(std::move(n)));
}

Ex field(std::shared_ptr<const TrigField> f, int dx, int dz) {
  require(dx >= 0 && dz >= 0 && dx < 16, ErrorKind::InvalidInput, "bad field derivative order");
  if ((dx > 0 && !f->depends_x()) || (dz > 0 && !f->depends_z())) return Ex(0.0);
  Node n = blank(Op::Field);
  n.order = dx + 16 * dz;
  n.deps = std::uint8_t((f->depends_x() ? 1u << X : 0u) | (f->depends_z() ? 1u << Z : 0u));
  n.field = std::move(f);
  return Ex(intern(std::move(n)));
}

namespace {

Ex make_pow(const Ex& b, double p);

Ex make_mul(const std::vector<Ex>& in) {
  cplx coef = 1.0;
  std::vector<const Node*> flat;
  std::function<void(const Node*)> push = [&](const Node* n) {
    if (n->op == Op::Mul) {
      for (auto* k : n->kids) push(k);
    } else if (n->op == Op::Const) {
      coef *= n->c;
    } else {
      flat.push_back(n);
    }
  };
  for (auto& e : in) push(e.node());
  if (coef == cplx(0.0)) return Ex(0.0);
  std::map<std::uint64_t, std::pair<const Node*, double>> powers;
  for (auto* n : flat) {
    const Node* base = n;
    double p = 1.0;
    if (n->op == Op::Pow) {
      base = n->kids[0];
      p = n->p;
    }
    auto it = powers.find(base->id);
    if (it == powers.end())
      powers.emplace(base->id, std::make_pair(base, p));
    else
      it->second.second += p;
  }
  std::vector<const Node*> fac;
  for (auto& [id, bp] : powers) {
    if (bp.second == 0.0) continue;
    Ex f = bp.second == 1.0 ? Ex(bp.first) : make_pow(Ex(bp.first), bp.second);
    if (f.is_const()) {
      coef *= f->c;
    } else if (f->op == Op::Mul) {
      for (auto* k : f->kids) {
        if (k->op == Op::Const)
          coef *= k->c;
        else
          fac.push_back(k);
      }
    } else {
      fac.push_back(f.node());
    }
  }
  if (coef == cplx(0.0)) return Ex(0.0);
  std::sort(fac.begin(), fac.end(), by_id);
  if (fac.empty()) return Ex(coef);
  if (fac.size() == 1 && coef == cplx(1.0)) return Ex(fac[0]);
  Node n = blank(Op::Mul);
  if (coef != cplx(1.0)) n.kids.push_back(make_const(coef));
  for (auto* f : fac) n.kids.push_back(f);
  return Ex(intern(std::move(n)));
}

// Split a term into constant coefficient and the remaining factor.
std::pair<cplx, const Node*> split_coef(const Node* n) {
  if (n->op == Op::Const) return {n->c, nullptr};
  if (n->op == Op::Mul && n->kids[0]->op == Op::Const) {
    if (n->kids.size() == 2) return {n->kids[0]->c, n->kids[1]};
    Node m = blank(Op::Mul);
    m.kids.assign(n->kids.begin() + 1, n->kids.end());
    return {n->kids[0]->c, intern(std::move(m))};
  }
  return {1.0, n};
}

Ex make_add(const std::vector<Ex>& in) {
  cplx cst = 0.0;
  std::map<std::uint64_t, std::pair<const Node*, cplx>> terms;
  std::function<void(const Node*)> push = [&](const Node* n) {
    if (n->op == Op::Add) {
      for (auto* k : n->kids) push(k);
      return;
    }
    auto [c, rest] = split_coef(n);
    if (!rest) {
      cst += c;
      return;
    }
    auto it = terms.find(rest->id);
    if (it == terms.end())
      terms.emplace(rest->id, std::make_pair(rest, c));
    else
      it->second.second += c;
  };
  for (auto& e : in) push(e.node());
  std::vector<const Node*> out;
  for (auto& [id, tc] : terms) {
    if (tc.second == cplx(0.0)) continue;
    if (tc.second == cplx(1.0))
      out.push_back(tc.first);
    else
      out.push_back(make_mul({Ex(tc.second), Ex(tc.first)}).node());
  }
  if (cst != cplx(0.0)) out.push_back(make_const(cst));
  if (out.empty()) return Ex(0.0);
  if (out.size() == 1) return Ex(out[0]);
  std::sort(out.begin(), out.end(), by_id);
  Node n = blank(Op::Add);
  n.kids = std::move(out);
  return Ex(intern(std::move(n)));
}

Ex make_pow(const Ex& b, double p) {
  if (p == 0.0) return Ex(1.0);
  if (p == 1.0) return b;
  if (b.is_const()) {
    require(!(b->c == cplx(0.0) && p < 0), ErrorKind::Numeric, "zero raised to a negative power");
    return Ex(const_pow(b->c, p));
  }
  if (b->op == Op::Pow && is_int(p)) return make_pow(Ex(b->kids[0]), b->p * p);
  if (b->op == Op::Mul && is_int(p)) {
    std::vector<Ex> f;
    for (auto* k : b->kids) f.push_back(make_pow(Ex(k), p));
    return make_mul(f);
  }
  Node n = blank(Op::Pow);
  n.p = p;
  n.kids = {b.node()};
  return Ex(intern(std::move(n)));
}

Ex make_func(Fn fn, const Ex& a, int order = 0, double pa = 0, double pb = 0) {
  if (a.is_const()) {
    cplx v = a->c;
    switch (fn) {
      case Fn::Sin: return Ex(std::sin(v));
      case Fn::Cos: return Ex(std::cos(v));
      case Fn::Exp: return Ex(std::exp(v));
      case Fn::Log: return Ex(std::log(v));
      case Fn::JoinAbs: return Ex(join_abs_deriv(v.real(), pa, pb, order));
    }
  }
  Node n = blank(Op::Func);
  n.fn = fn;
  n.order = order;
  n.pa = pa;
  n.pb = pb;
  n.kids = {a.node()};
  return Ex(intern(std::move(n)));
}

}  // namespace

Ex operator+(const Ex& a, const Ex& b) { return make_add({a, b}); }
Ex operator-(const Ex& a, const Ex& b) { return make_add({a, make_mul({Ex(-1.0), b})}); }
Ex operator-(const Ex& a) { return make_mul({Ex(-1.0), a}); }
Ex operator*(const Ex& a, const Ex& b) { return make_mul({a, b}); }
Ex operator/(const Ex& a, const Ex& b) { return make_mul({a, make_pow(b, -1.0)}); }
Ex& operator+=(Ex& a, const Ex& b) { return a = a + b; }
Ex& operator*=(Ex& a, const Ex& b) { return a = a * b; }

Ex sum(const std::vector<Ex>& terms) { return make_add(terms); }
Ex product(const std::vector<Ex>& factors) { return make_mul(factors); }
Ex pow(const Ex& b, double p) { return make_pow(b, p); }
Ex sqrt(const Ex& b) { return make_pow(b, 0.5); }
Ex sin(const Ex& a) { return make_func(Fn::Sin, a); }
Ex cos(const Ex& a) { return make_func(Fn::Cos, a); }
Ex exp(const Ex& a) { return make_func(Fn::Exp, a); }
Ex log(const Ex& a) { return make_func(Fn::Log, a); }

Ex join_abs(const Ex& s, double a, double b, int order) {
  require(a > 0 && b > a, ErrorKind::InvalidInput, "join needs 0 < a < b");
  return make_func(Fn::JoinAbs, s, order, a, b);
}

Ex japanese(const std::vector<int>& vars) {
  std::vector<Ex> t{Ex(1.0)};
  for (int v : vars) t.push_back(pow(var(v), 2));
  return sqrt(sum(t));
}

Ex diff(const Ex& e, int v, int times) {
  Ex cur = e;
  for (int t = 0; t < times; ++t) {
    const Node* n = cur.node();
    if (!((n->deps >> v) & 1)) return Ex(0.0);
    Table& tb = table();
    std::uint64_t key = n->id * 8 + std::uint64_t(v);
    {
      std::lock_guard<std::recursive_mutex> lk(tb.mu);
      auto it = tb.diff_cache.find(key);
      if (it != tb.diff_cache.end()) {
        cur = Ex(it->second);
        continue;
      }
    }
    Ex r;
    switch (n->op) {
      case Op::Const:
      case Op::Net: r = Ex(0.0); break;
      case Op::Var: r = Ex(n->var == v ? 1.0 : 0.0); break;
      case Op::Field: {
        int dx = n->order % 16, dz = n->order / 16;
        if (v == X)
          r = field(n->field, dx + 1, dz);
        else if (v == Z)
          r = field(n->field, dx, dz + 1);
        else
          r = Ex(0.0);
        break;
      }
      case Op::Add: {
        std::vector<Ex> t;
        for (auto* k : n->kids) t.push_back(diff(Ex(k), v));
        r = make_add(t);
        break;
      }
      case Op::Mul: {
        std::vector<Ex> t;
        for (std::size_t i = 0; i < n->kids.size(); ++i) {
          Ex d = diff(Ex(n->kids[i]), v);
          if (d.is_zero()) continue;
          std::vector<Ex> f{d};
          for (std::size_t j = 0; j < n->kids.size(); ++j)
            if (j != i) f.push_back(Ex(n->kids[j]));
          t.push_back(make_mul(f));
        }
        r = make_add(t);
        break;
      }
      case Op::Pow: {
        Ex b(n->kids[0]);
        r = make_mul({Ex(n->p), make_pow(b, n->p - 1.0), diff(b, v)});
        break;
      }
      case Op::Func: {
        Ex a(n->kids[0]);
        Ex da = diff(a, v);
        Ex outer;
        switch (n->fn) {
          case Fn::Sin: outer = cos(a); break;
          case Fn::Cos: outer = -sin(a); break;
          case Fn::Exp: outer = Ex(n); break;
          case Fn::Log: outer = make_pow(a, -1.0); break;
          case Fn::JoinAbs: outer = make_func(Fn::JoinAbs, a, n->order + 1, n->pa, n->pb); break;
        }
        r = make_mul({outer, da});
        break;
      }
    }
    {
      std::lock_guard<std::recursive_mutex> lk(tb.mu);
      tb.diff_cache[key] = r.node();
    }
    cur = r;
  }
  return cur;
}

Ex conj(const Ex& e) {
  const Node* n = e.node();
  Table& tb = table();
  {
    std::lock_guard<std::recursive_mutex> lk(tb.mu);
    auto it = tb.conj_cache.find(n->id);
    if (it != tb.conj_cache.end()) return Ex(it->second);
  }
  Ex r;
  switch (n->op) {
    case Op::Const: r = Ex(std::conj(n->c)); break;
    case Op::Var:
    case Op::Net: r = e; break;
    case Op::Field:
      require(n->field->real(), ErrorKind::InvalidInput, "conjugate of a complex field");
      r = e;
      break;
    case Op::Add:
    case Op::Mul: {
      std::vector<Ex> k;
      for (auto* c : n->kids) k.push_back(conj(Ex(c)));
      r = n->op == Op::Add ? make_add(k) : make_mul(k);
      break;
    }
    case Op::Pow: r = make_pow(conj(Ex(n->kids[0])), n->p); break;
    case Op::Func: r = make_func(n->fn, conj(Ex(n->kids[0])), n->order, n->pa, n->pb); break;
  }
  std::lock_guard<std::recursive_mutex> lk(tb.mu);
  tb.conj_cache[n->id] = r.node();
  return r;
}

namespace {

void topo(const Node* n, std::unordered_set<const Node*>& seen, std::vector<const Node*>& out) {
  if (seen.count(n)) return;
  seen.insert(n);
  for (auto* k : n->kids) topo(k, seen, out);
  out.push_back(n);
}

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string const_str(cplx c) {
  if (c.imag() == 0.0) return num(c.real());
  return "(c " + num(c.real()) + " " + num(c.imag()) + ")";
}

const char* fn_name(Fn f) {
  switch (f) {
    case Fn::Sin: return "sin";
    case Fn::Cos: return "cos";
    case Fn::Exp: return "exp";
    case Fn::Log: return "log";
    case Fn::JoinAbs: return "join";
  }
  return "?";
}

void print(const Node* n, std::ostream& os) {
  switch (n->op) {
    case Op::Const: os << const_str(n->c); return;
    case Op::Var: os << var_name(n->var); return;
    case Op::Net: os << "(net " << (n->net->name().empty() ? "_" : n->net->name()) << ")"; return;
    case Op::Field:
      os << "(field " << n->field->name() << " " << n->order % 16 << " " << n->order / 16 << ")";
      return;
    case Op::Add:
    case Op::Mul:
      os << (n->op == Op::Add ? "(+" : "(*");
      for (auto* k : n->kids) {
        os << " ";
        print(k, os);
      }
      os << ")";
      return;
    case Op::Pow:
      os << "(^ ";
      print(n->kids[0], os);
      os << " " << num(n->p) << ")";
      return;
    case Op::Func:
      if (n->fn == Fn::JoinAbs)
        os << "(join " << n->order << " " << num(n->pa) << " " << num(n->pb) << " ";
      else
        os << "(" << fn_name(n->fn) << " ";
      print(n->kids[0], os);
      os << ")";
      return;
  }
}

}  // namespace

std::size_t node_count(const Ex& e) {
  std::unordered_set<const Node*> seen;
  std::vector<const Node*> order;
  topo(e.node(), seen, order);
  return order.size();
}

bool depends_on_eps(const Ex& e) {
  std::unordered_set<const Node*> seen;
  std::vector<const Node*> order;
  topo(e.node(), seen, order);
  for (auto* n : order)
    if (n->op == Op::Net || (n->op == Op::Field && !n->field->eps_independent())) return true;
  return false;
}

std::string to_string(const Ex& e) {
  std::ostringstream os;
  print(e.node(), os);
  return os.str();
}

std::string serialize(const Ex& e) {
  std::unordered_set<const Node*> seen;
  std::vector<const Node*> order;
  topo(e.node(), seen, order);
  std::map<const void*, int> nets, fields;
  std::ostringstream os;
  os << std::setprecision(17);
  os << "SYM v1\n";
  for (auto* n : order) {
    if (n->op == Op::Net && !nets.count(n->net.get())) {
      int id = int(nets.size());
      nets[n->net.get()] = id;
      const EpsNet& nt = *n->net;
      os << "net " << id << " " << (nt.name().empty() ? "_" : nt.name()) << " "
         << net_class_name(nt.net_class()) << " " << nt.size();
      for (std::size_t i = 0; i < nt.size(); ++i) os << " " << nt.grid()[i] << " " << nt[i];
      os << "\n";
    }
    if (n->op == Op::Field && !fields.count(n->field.get())) {
      int id = int(fields.size());
      fields[n->field.get()] = id;
      const TrigField& f = *n->field;
      os << "field " << id << " " << f.name() << " " << (f.real() ? 1 : 0) << " "
         << f.grid().size();
      for (std::size_t i = 0; i < f.grid().size(); ++i) os << " " << f.grid()[i];
      os << "\n";
      for (auto& l : f.all_modes()) {
        os << "modes " << l.size();
        for (auto& m : l) os << " " << m.kx << " " << m.kz << " " << m.c.real() << " " << m.c.imag();
        os << "\n";
      }
    }
  }
  std::unordered_map<const Node*, int> idx;
  os << "nodes " << order.size() << "\n";
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Node* n = order[i];
    idx[n] = int(i);
    switch (n->op) {
      case Op::Const: os << "const " << n->c.real() << " " << n->c.imag(); break;
      case Op::Var: os << "var " << var_name(n->var); break;
      case Op::Net: os << "netref " << nets[n->net.get()]; break;
      case Op::Field:
        os << "fieldref " << fields[n->field.get()] << " " << n->order % 16 << " " << n->order / 16;
        break;
      case Op::Add:
      case Op::Mul:
        os << (n->op == Op::Add ? "add" : "mul") << " " << n->kids.size();
        for (auto* k : n->kids) os << " " << idx[k];
        break;
      case Op::Pow: os << "pow " << idx[n->kids[0]] << " " << n->p; break;
      case Op::Func:
        os << "fn " << fn_name(n->fn) << " " << n->order << " " << n->pa << " " << n->pb << " "
           << idx[n->kids[0]];
        break;
    }
    os << "\n";
  }
  os << "root " << idx[e.node()] << "\n";
  return os.str();
}

Ex deserialize(const std::string& text) {
  std::istringstream is(text);
  std::string a, b;
  is >> a >> b;
  require(a == "SYM" && b == "v1", ErrorKind::InvalidInput, "symbol text must start with 'SYM v1'");
  std::vector<std::shared_ptr<const EpsNet>> nets;
  std::vector<std::shared_ptr<const TrigField>> fields;
  std::vector<Ex> nodes;
  std::string tok;
  auto bad = [](const std::string& w) { fail(ErrorKind::InvalidInput, "malformed symbol text near '" + w + "'"); };
  while (is >> tok) {
    if (tok == "net") {
      int id;
      std::string name, cls;
      std::size_t n;
      if (!(is >> id >> name >> cls >> n)) bad(tok);
      std::vector<double> e(n), v(n);
      for (std::size_t i = 0; i < n; ++i)
        if (!(is >> e[i] >> v[i])) bad(tok);
      auto nt = std::make_shared<EpsNet>(EpsGrid(e), v, name == "_" ? "" : name);
      nt->set_class(net_class_from_name(cls));
      nets.push_back(nt);
    } else if (tok == "field") {
      int id, real;
      std::string name;
      std::size_t ng;
      if (!(is >> id >> name >> real >> ng)) bad(tok);
      std::vector<double> g(ng);
      for (auto& x : g)
        if (!(is >> x)) bad(tok);
      std::vector<std::vector<TrigMode>> modes(std::max<std::size_t>(ng, 1));
      for (auto& l : modes) {
        std::string m;
        std::size_t cnt;
        if (!(is >> m >> cnt) || m != "modes") bad(tok);
        l.resize(cnt);
        for (auto& md : l) {
          double re, im;
          if (!(is >> md.kx >> md.kz >> re >> im)) bad(tok);
          md.c = cplx(re, im);
        }
      }
      if (ng == 0)
        fields.push_back(std::make_shared<TrigField>(name, modes[0], real != 0));
      else
        fields.push_back(std::make_shared<TrigField>(name, EpsGrid(g), modes, real != 0));
    } else if (tok == "nodes") {
      std::size_t cnt;
      if (!(is >> cnt)) bad(tok);
      for (std::size_t i = 0; i < cnt; ++i) {
        std::string kind;
        if (!(is >> kind)) bad("nodes");
        if (kind == "const") {
          double re, im;
          if (!(is >> re >> im)) bad(kind);
          nodes.push_back(Ex(cplx(re, im)));
        } else if (kind == "var") {
          std::string v;
          is >> v;
          int vi = var_from_name(v);
          if (vi < 0) bad(v);
          nodes.push_back(var(vi));
        } else if (kind == "netref") {
          std::size_t id;
          if (!(is >> id) || id >= nets.size()) bad(kind);
          nodes.push_back(net(nets[id]));
        } else if (kind == "fieldref") {
          std::size_t id;
          int dx, dz;
          if (!(is >> id >> dx >> dz) || id >= fields.size()) bad(kind);
          nodes.push_back(field(fields[id], dx, dz));
        } else if (kind == "add" || kind == "mul") {
          std::size_t k;
          if (!(is >> k)) bad(kind);
          std::vector<Ex> ch;
          for (std::size_t j = 0; j < k; ++j) {
            std::size_t c;
            if (!(is >> c) || c >= nodes.size()) bad(kind);
            ch.push_back(nodes[c]);
          }
          nodes.push_back(kind == "add" ? sum(ch) : product(ch));
        } else if (kind == "pow") {
          std::size_t c;
          double p;
          if (!(is >> c >> p) || c >= nodes.size()) bad(kind);
          nodes.push_back(pow(nodes[c], p));
        } else if (kind == "fn") {
          std::string f;
          int order;
          double pa, pb;
          std::size_t c;
          if (!(is >> f >> order >> pa >> pb >> c) || c >= nodes.size()) bad(kind);
          Ex arg = nodes[c];
          if (f == "sin") nodes.push_back(sin(arg));
          else if (f == "cos") nodes.push_back(cos(arg));
          else if (f == "exp") nodes.push_back(exp(arg));
          else if (f == "log") nodes.push_back(log(arg));
          else if (f == "join") nodes.push_back(join_abs(arg, pa, pb, order));
          else bad(f);
        } else {
          bad(kind);
        }
      }
    } else if (tok == "root") {
      std::size_t r;
      if (!(is >> r) || r >= nodes.size()) bad(tok);
      return nodes[r];
    } else {
      bad(tok);
    }
  }
  fail(ErrorKind::InvalidInput, "symbol text has no root");
}

}  // namespace psido
