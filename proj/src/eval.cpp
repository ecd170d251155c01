#include "psido/eval.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "psido/errors.hpp"
#include "psido/profiles.hpp"

namespace psido {

std::size_t Points::size() const {
  std::size_t n = 1;
  for (auto& a : c)
    if (a.size() > 1) {
      require(n == 1 || n == a.size(), ErrorKind::InvalidInput, "coordinate arrays differ in length");
      n = a.size();
    }
  return n;
}

namespace {

constexpr std::size_t kChunk = 512;

void topo(const Node* n, std::unordered_set<const Node*>& seen, std::vector<const Node*>& out) {
  if (seen.count(n)) return;
  seen.insert(n);
  for (auto* k : n->kids) topo(k, seen, out);
  out.push_back(n);
}

cplx ipow(cplx b, int k) {
  cplx r = 1.0;
  for (int i = 0; i < k; ++i) r *= b;
  return r;
}

void eval_pow(const cplx* b, double p, cplx* out, std::size_t m) {
  if (p == -1.0) {
    for (std::size_t i = 0; i < m; ++i) out[i] = 1.0 / b[i];
  } else if (p == 2.0) {
    for (std::size_t i = 0; i < m; ++i) out[i] = b[i] * b[i];
  } else if (std::floor(p) == p && std::abs(p) <= 64) {
    int k = int(std::abs(p));
    for (std::size_t i = 0; i < m; ++i) {
      cplx r = ipow(b[i], k);
      out[i] = p < 0 ? 1.0 / r : r;
    }
  } else if (p == 0.5) {
    for (std::size_t i = 0; i < m; ++i)
      out[i] = (b[i].imag() == 0.0 && b[i].real() >= 0) ? cplx(std::sqrt(b[i].real())) : std::sqrt(b[i]);
  } else if (p == -0.5) {
    for (std::size_t i = 0; i < m; ++i)
      out[i] = (b[i].imag() == 0.0 && b[i].real() > 0) ? cplx(1.0 / std::sqrt(b[i].real()))
                                                       : 1.0 / std::sqrt(b[i]);
  } else {
    for (std::size_t i = 0; i < m; ++i)
      out[i] = (b[i].imag() == 0.0 && b[i].real() > 0) ? cplx(std::pow(b[i].real(), p))
                                                       : std::pow(b[i], p);
  }
}

}  // namespace

std::vector<cplx> evaluate(const Ex& e, const Points& pts) {
  const std::size_t n = pts.size();
  std::vector<cplx> result(n);
  std::unordered_set<const Node*> seen;
  std::vector<const Node*> order;
  topo(e.node(), seen, order);
  std::unordered_map<const Node*, int> idx;
  for (std::size_t i = 0; i < order.size(); ++i) idx[order[i]] = int(i);
  std::vector<int> last(order.size(), -1);
  for (std::size_t i = 0; i < order.size(); ++i)
    for (auto* k : order[i]->kids) last[idx[k]] = int(i);
  last.back() = int(order.size());

  // Constant per-node data resolved once.
  std::vector<cplx> netval(order.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    if (order[i]->op == Op::Net) netval[i] = order[i]->net->at(pts.eps);

  std::vector<std::vector<cplx>> buf(order.size());
  std::vector<std::vector<cplx>> pool;
  std::vector<unsigned char> zero(kChunk);

  auto coord = [&](int v, std::size_t i) -> double {
    const auto& a = pts.c[v];
    if (a.empty()) return 0.0;
    return a.size() == 1 ? a[0] : a[i];
  };

  for (std::size_t s0 = 0; s0 < n; s0 += kChunk) {
    const std::size_t m = std::min(kChunk, n - s0);
    for (std::size_t i = 0; i < order.size(); ++i) {
      const Node* nd = order[i];
      std::vector<cplx> out;
      if (!pool.empty()) {
        out = std::move(pool.back());
        pool.pop_back();
      }
      out.resize(m);
      switch (nd->op) {
        case Op::Const: std::fill(out.begin(), out.end(), nd->c); break;
        case Op::Var:
          for (std::size_t j = 0; j < m; ++j) out[j] = coord(nd->var, s0 + j);
          break;
        case Op::Net: std::fill(out.begin(), out.end(), netval[i]); break;
        case Op::Field: {
          const auto& modes = nd->field->modes_at(pts.eps);
          int dx = nd->order % 16, dz = nd->order / 16;
          std::fill(out.begin(), out.end(), cplx(0.0));
          for (const auto& md : modes) {
            cplx f = md.c * ipow(cplx(0, md.kx), dx) * ipow(cplx(0, md.kz), dz);
            if (f == cplx(0.0)) continue;
            for (std::size_t j = 0; j < m; ++j) {
              double ph = md.kx * coord(X, s0 + j) + md.kz * coord(Z, s0 + j);
              out[j] += f * cplx(std::cos(ph), std::sin(ph));
            }
          }
          if (nd->field->real())
            for (auto& v : out) v = v.real();
          break;
        }
        case Op::Add: {
          const auto& a = buf[idx[nd->kids[0]]];
          std::copy(a.begin(), a.begin() + m, out.begin());
          for (std::size_t k = 1; k < nd->kids.size(); ++k) {
            const auto& b = buf[idx[nd->kids[k]]];
            for (std::size_t j = 0; j < m; ++j) out[j] += b[j];
          }
          break;
        }
        case Op::Mul: {
          const auto& a = buf[idx[nd->kids[0]]];
          std::fill(zero.begin(), zero.begin() + m, 0);
          for (std::size_t j = 0; j < m; ++j) {
            out[j] = a[j];
            if (a[j] == cplx(0.0)) zero[j] = 1;
          }
          for (std::size_t k = 1; k < nd->kids.size(); ++k) {
            const auto& b = buf[idx[nd->kids[k]]];
            for (std::size_t j = 0; j < m; ++j) {
              out[j] *= b[j];
              if (b[j] == cplx(0.0)) zero[j] = 1;
            }
          }
          // An exact zero factor masks non-finite companions.
          for (std::size_t j = 0; j < m; ++j)
            if (zero[j]) out[j] = 0.0;
          break;
        }
        case Op::Pow: eval_pow(buf[idx[nd->kids[0]]].data(), nd->p, out.data(), m); break;
        case Op::Func: {
          const auto& a = buf[idx[nd->kids[0]]];
          switch (nd->fn) {
            case Fn::Sin:
              for (std::size_t j = 0; j < m; ++j)
                out[j] = a[j].imag() == 0.0 ? cplx(std::sin(a[j].real())) : std::sin(a[j]);
              break;
            case Fn::Cos:
              for (std::size_t j = 0; j < m; ++j)
                out[j] = a[j].imag() == 0.0 ? cplx(std::cos(a[j].real())) : std::cos(a[j]);
              break;
            case Fn::Exp:
              for (std::size_t j = 0; j < m; ++j)
                out[j] = a[j].imag() == 0.0 ? cplx(std::exp(a[j].real())) : std::exp(a[j]);
              break;
            case Fn::Log:
              for (std::size_t j = 0; j < m; ++j)
                out[j] = (a[j].imag() == 0.0 && a[j].real() > 0) ? cplx(std::log(a[j].real()))
                                                                  : std::log(a[j]);
              break;
            case Fn::JoinAbs:
              for (std::size_t j = 0; j < m; ++j)
                out[j] = join_abs_deriv(a[j].real(), nd->pa, nd->pb, nd->order);
              break;
          }
          break;
        }
      }
      buf[i] = std::move(out);
      for (auto* k : nd->kids) {
        int ki = idx[k];
        if (last[ki] == int(i)) pool.push_back(std::move(buf[ki]));
      }
    }
    std::copy(buf.back().begin(), buf.back().begin() + m, result.begin() + s0);
    pool.push_back(std::move(buf.back()));
  }
  return result;
}

cplx evaluate_at(const Ex& e, const std::array<double, kNumVars>& point, double eps) {
  Points p;
  for (int v = 0; v < kNumVars; ++v) p.c[v] = {point[v]};
  p.eps = eps;
  return evaluate(e, p)[0];
}

}  // namespace psido
