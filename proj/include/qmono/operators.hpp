#pragma once

// Operators on quaternionic fields, acting from the left: position X_i, the
// multipliers e^_i, J and B_i, canonical shifts V(a), transport multipliers W(a),
// twisted translations U(a) = V(a) W(a), covariant derivatives, rotation
// generators and the Hamiltonian. Every operator applies to both analytic and
// lattice fields and knows its adjoint.

#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "geometry.hpp"
#include "hilbert.hpp"

namespace qmono {

/// Discretization of the covariant derivative and Laplacian.
///
/// `central` is the connection formula term by term: central differences for the
/// flat derivative plus the multiplier (1/2) e·(u x x)/|x|^2. `transported` builds
/// derivatives from twisted translations, (U(-hu) - U(hu))/2h, so it commutes with J
/// and is anti-hermitian exactly on a lattice.
enum class Scheme { central, transported };

class Operator {
 public:
  enum class Kind { multiplier, shift, stencil, composite };
  using AnalyticMap = std::function<AnalyticField(const AnalyticField&)>;
  using LatticeMap = std::function<LatticeField(const LatticeField&)>;
  using AdjointRule = std::function<Operator()>;

  /// Pointwise left multiplication by symbol(x). The adjoint multiplies by symbol(x)*.
  static Operator multiplier(std::string name, PointSymbol symbol) {
    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::multiplier;
    impl->name = std::move(name);
    impl->symbol = std::move(symbol);
    return Operator(std::move(impl));
  }

  /// Canonical translation [V(a) psi](x) = psi(x - a). On lattices a must be a
  /// whole number of grid steps per axis; sites shifted in from outside are zero.
  static Operator shift(const Vec3& a) {
    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::shift;
    std::ostringstream os;
    os << "V" << a;
    impl->name = os.str();
    impl->displacement = a;
    return Operator(std::move(impl));
  }

  static Operator stencil(std::string name, AnalyticMap analytic, LatticeMap lattice, AdjointRule adjoint) {
    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::stencil;
    impl->name = std::move(name);
    impl->analytic = std::move(analytic);
    impl->lattice = std::move(lattice);
    impl->adjoint = std::move(adjoint);
    return Operator(std::move(impl));
  }

  static Operator identity() {
    return multiplier("I", [](const Vec3&) { return e0; });
  }

  Kind kind() const { return impl_->kind; }
  const std::string& name() const { return impl_->name; }

  /// Symbol of a multiplier-kind operator.
  Quaternion symbol(const Vec3& x) const {
    if (impl_->kind != Kind::multiplier) throw usage_error("symbol: " + name() + " is not a multiplier");
    return impl_->symbol(x);
  }
  const PointSymbol& symbol_fn() const { return impl_->symbol; }

  const Vec3& displacement() const { return impl_->displacement; }
  /// Factors of a composite, leftmost first; they act right to left.
  const std::vector<Operator>& factors() const { return impl_->factors; }

  AnalyticField apply(const AnalyticField& psi) const {
    switch (impl_->kind) {
      case Kind::multiplier: return multop(impl_->symbol, psi);
      case Kind::shift: {
        const Vec3 a = impl_->displacement;
        return [psi, a](const Vec3& x) { return psi(x - a); };
      }
      case Kind::stencil: return impl_->analytic(psi);
      case Kind::composite: {
        AnalyticField out = psi;
        for (auto it = impl_->factors.rbegin(); it != impl_->factors.rend(); ++it) out = it->apply(out);
        return out;
      }
    }
    return psi;
  }

  LatticeField apply(const LatticeField& psi) const {
    switch (impl_->kind) {
      case Kind::multiplier: return multop(impl_->symbol, psi);
      case Kind::shift: return apply_shift(impl_->displacement, psi);
      case Kind::stencil:
        if (!impl_->lattice) throw usage_error(name() + " has no lattice form");
        return impl_->lattice(psi);
      case Kind::composite: {
        LatticeField out = psi;
        for (auto it = impl_->factors.rbegin(); it != impl_->factors.rend(); ++it) out = it->apply(out);
        return out;
      }
    }
    return psi;
  }

  AnalyticField operator()(const AnalyticField& psi) const { return apply(psi); }
  LatticeField operator()(const LatticeField& psi) const { return apply(psi); }

  Operator adjoint() const {
    switch (impl_->kind) {
      case Kind::multiplier: {
        PointSymbol f = impl_->symbol;
        return multiplier(name() + "*", [f](const Vec3& x) { return conj(f(x)); });
      }
      case Kind::shift: return shift(-impl_->displacement);
      case Kind::stencil: return impl_->adjoint();
      case Kind::composite: {
        std::vector<Operator> reversed;
        for (auto it = impl_->factors.rbegin(); it != impl_->factors.rend(); ++it) reversed.push_back(it->adjoint());
        return compose(std::move(reversed));
      }
    }
    return *this;
  }

  /// a * b applies b first.
  friend Operator operator*(const Operator& a, const Operator& b) { return compose({a, b}); }

  static Operator compose(std::vector<Operator> factors) {
    std::vector<Operator> flat;
    for (auto& f : factors) {
      if (f.kind() == Kind::composite)
        flat.insert(flat.end(), f.factors().begin(), f.factors().end());
      else
        flat.push_back(std::move(f));
    }
    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::composite;
    for (std::size_t i = 0; i < flat.size(); ++i) impl->name += (i ? "·" : "") + flat[i].name();
    impl->factors = std::move(flat);
    return Operator(std::move(impl));
  }

  static LatticeField apply_shift(const Vec3& a, const LatticeField& psi) {
    const LatticeSpec& spec = psi.spec();
    const double h = spec.step();
    int steps[3];
    for (int k = 0; k < 3; ++k) {
      const double m = a[k] / h;
      steps[k] = static_cast<int>(std::lround(m));
      if (std::abs(m - steps[k]) > 1e-9) {
        std::ostringstream os;
        os << "shift " << a << " is not a whole number of grid steps (h = " << h << ")";
        throw usage_error(os.str());
      }
    }
    LatticeField out(spec);
    for (int i = 0; i < spec.n; ++i)
      for (int j = 0; j < spec.n; ++j)
        for (int k = 0; k < spec.n; ++k) {
          const int si = i - steps[0], sj = j - steps[1], sk = k - steps[2];
          if (spec.contains(si, sj, sk)) out[spec.index(i, j, k)] = psi[spec.index(si, sj, sk)];
        }
    return out;
  }

 private:
  struct Impl {
    Kind kind = Kind::multiplier;
    std::string name;
    PointSymbol symbol;
    Vec3 displacement;
    AnalyticMap analytic;
    LatticeMap lattice;
    AdjointRule adjoint;
    std::vector<Operator> factors;
  };

  explicit Operator(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  std::shared_ptr<const Impl> impl_;
};

/// sum_k c_k A_k with real coefficients; the adjoint is sum_k c_k A_k*.
inline Operator combination(std::string name, std::vector<std::pair<double, Operator>> terms) {
  auto analytic = [terms](const AnalyticField& psi) -> AnalyticField {
    std::vector<std::pair<double, AnalyticField>> parts;
    for (const auto& [c, op] : terms) parts.emplace_back(c, op.apply(psi));
    return [parts](const Vec3& x) {
      Quaternion acc{};
      for (const auto& [c, f] : parts) acc += c * f(x);
      return acc;
    };
  };
  auto lattice = [terms](const LatticeField& psi) {
    LatticeField acc(psi.spec());
    for (const auto& [c, op] : terms) {
      const LatticeField part = op.apply(psi);
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += c * part[i];
    }
    return acc;
  };
  auto adjoint = [name, terms]() {
    std::vector<std::pair<double, Operator>> adj;
    for (const auto& [c, op] : terms) adj.emplace_back(c, op.adjoint());
    return combination(name + "*", std::move(adj));
  };
  return Operator::stencil(std::move(name), analytic, lattice, adjoint);
}

/// [A, B] = AB - BA.
inline Operator commutator(const Operator& a, const Operator& b) {
  return combination("[" + a.name() + "," + b.name() + "]", {{1.0, a * b}, {-1.0, b * a}});
}

// ---------------------------------------------------------------------------
// Multipliers

/// X_i (0-based axis).
inline Operator position(int i) {
  return Operator::multiplier("X" + std::to_string(i + 1), [i](const Vec3& x) { return Quaternion::real(x[i]); });
}

/// Left multiplication by the basis unit e_{i+1}.
inline Operator eop(int i) {
  const Quaternion unit = basis(i + 1);
  return Operator::multiplier("e" + std::to_string(i + 1), [unit](const Vec3&) { return unit; });
}

/// J: left multiplication by j(x).
inline Operator jop() { return Operator::multiplier("J", [](const Vec3& x) { return dirq(x); }); }

/// B_i: multiplication by x_i / (2|x|^3).
inline Operator bop(int i) {
  return Operator::multiplier("B" + std::to_string(i + 1), [i](const Vec3& x) { return Quaternion::real(bfield(x)[i]); });
}

inline Operator vshift(const Vec3& a) { return Operator::shift(a); }

/// W(a): multiplication by the transport w(a;x).
inline Operator wop(const Vec3& a, TransportFn w = transport) {
  std::ostringstream os;
  os << "W" << a;
  return Operator::multiplier(os.str(), [a, w](const Vec3& x) { return w(a, x); });
}

/// Twisted translation U(a) = V(a) W(a): [U(a) psi](x) = w(a; x-a) psi(x-a).
inline Operator uop(const Vec3& a, TransportFn w = transport) { return vshift(a) * wop(a, w); }

/// M(a,b) = U(a+b)^{-1} U(a) U(b); a pointwise multiplier with symbol m(a,b;x).
inline Operator compose_defect(const Vec3& a, const Vec3& b) { return uop(a + b).adjoint() * uop(a) * uop(b); }

// ---------------------------------------------------------------------------
// Differential operators

namespace detail {

/// Central difference of a lattice field along axis `ax`, Dirichlet outside.
inline LatticeField lattice_partial(int ax, const LatticeField& psi) {
  const LatticeSpec& spec = psi.spec();
  const double inv2h = 1.0 / (2.0 * spec.step());
  LatticeField out(spec);
  for (int i = 0; i < spec.n; ++i)
    for (int j = 0; j < spec.n; ++j)
      for (int k = 0; k < spec.n; ++k) {
        int lo[3] = {i, j, k};
        int hi[3] = {i, j, k};
        lo[ax] -= 1;
        hi[ax] += 1;
        Quaternion d{};
        if (spec.contains(hi[0], hi[1], hi[2])) d += psi[spec.index(hi[0], hi[1], hi[2])];
        if (spec.contains(lo[0], lo[1], lo[2])) d -= psi[spec.index(lo[0], lo[1], lo[2])];
        out[spec.index(i, j, k)] = inv2h * d;
      }
  return out;
}

inline AnalyticField analytic_partial(const Vec3& direction, double h, const AnalyticField& psi) {
  return [psi, direction, h](const Vec3& x) {
    return (psi(x + h * direction) - psi(x - h * direction)) / (2.0 * h);
  };
}

/// Connection term (1/2) e·(u x x) / |x|^2.
inline Quaternion connection(const Vec3& u, const Vec3& x) {
  const double r2 = dot(x, x);
  return Quaternion::pure(cross(u, x) / (2.0 * r2));
}

inline int axis_of(const Vec3& u) {
  for (int k = 0; k < 3; ++k)
    if (std::abs(std::abs(u[k]) - 1.0) < 1e-15 && std::abs(u[(k + 1) % 3]) == 0.0 && std::abs(u[(k + 2) % 3]) == 0.0)
      return k;
  return -1;
}

inline std::string direction_name(const Vec3& u) {
  std::ostringstream os;
  os << u;
  return os.str();
}

}  // namespace detail

/// Covariant derivative along the unit vector u. `fd_step` is the difference
/// step for analytic fields; lattice fields use the grid step.
inline Operator covderiv(const Vec3& u, double fd_step = 1e-3, Scheme scheme = Scheme::central) {
  if (std::abs(norm(u) - 1.0) > 1e-12) throw usage_error("covderiv: direction must be a unit vector");
  const std::string name = "∇" + detail::direction_name(u);
  auto adjoint = [u, fd_step, scheme]() {
    return combination("-∇" + detail::direction_name(u), {{-1.0, covderiv(u, fd_step, scheme)}});
  };
  if (scheme == Scheme::central) {
    auto analytic = [u, fd_step](const AnalyticField& psi) -> AnalyticField {
      AnalyticField flat = detail::analytic_partial(u, fd_step, psi);
      return [flat, psi, u](const Vec3& x) { return flat(x) + detail::connection(u, x) * psi(x); };
    };
    auto lattice = [u](const LatticeField& psi) {
      LatticeField out(psi.spec());
      for (int k = 0; k < 3; ++k)
        if (u[k] != 0.0) out += u[k] * detail::lattice_partial(k, psi);
      const LatticeSpec& spec = psi.spec();
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += detail::connection(u, spec.site(i)) * psi[i];
      return out;
    };
    return Operator::stencil(name, analytic, lattice, adjoint);
  }
  auto analytic = [u, fd_step](const AnalyticField& psi) -> AnalyticField {
    const AnalyticField back = uop(-fd_step * u).apply(psi);
    const AnalyticField fwd = uop(fd_step * u).apply(psi);
    return [back, fwd, fd_step](const Vec3& x) { return (back(x) - fwd(x)) / (2.0 * fd_step); };
  };
  auto lattice = [u](const LatticeField& psi) {
    if (detail::axis_of(u) < 0) throw usage_error("covderiv: transported lattice stencil needs an axis direction");
    const double h = psi.spec().step();
    LatticeField out = uop(-h * u).apply(psi) - uop(h * u).apply(psi);
    return (1.0 / (2.0 * h)) * std::move(out);
  };
  return Operator::stencil(name, analytic, lattice, adjoint);
}

/// Rotation generator M_i = eps_ijk x_j d_k - (1/2) e^_i.
inline Operator rotgen(int i, double fd_step = 1e-3) {
  const std::string name = "M" + std::to_string(i + 1);
  const Quaternion half_unit = 0.5 * basis(i + 1);
  auto analytic = [i, fd_step, half_unit](const AnalyticField& psi) -> AnalyticField {
    std::vector<std::pair<int, AnalyticField>> parts;
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        if (levi_civita(i, j, k) != 0) parts.emplace_back(j, detail::analytic_partial(axis(k), fd_step, psi));
    std::vector<int> signs;
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        if (levi_civita(i, j, k) != 0) signs.push_back(levi_civita(i, j, k));
    return [parts, signs, psi, half_unit](const Vec3& x) {
      Quaternion acc{};
      for (std::size_t p = 0; p < parts.size(); ++p) acc += (signs[p] * x[parts[p].first]) * parts[p].second(x);
      return acc - half_unit * psi(x);
    };
  };
  auto lattice = [i, half_unit](const LatticeField& psi) {
    const LatticeSpec& spec = psi.spec();
    LatticeField out(spec);
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        const int eps = levi_civita(i, j, k);
        if (eps == 0) continue;
        const LatticeField d = detail::lattice_partial(k, psi);
        for (std::size_t s = 0; s < out.size(); ++s) out[s] += (eps * spec.site(s)[j]) * d[s];
      }
    for (std::size_t s = 0; s < out.size(); ++s) out[s] -= half_unit * psi[s];
    return out;
  };
  auto adjoint = [i, fd_step]() { return combination("-M" + std::to_string(i + 1), {{-1.0, rotgen(i, fd_step)}}); };
  return Operator::stencil(name, analytic, lattice, adjoint);
}

/// exp(angle n·M): [R psi](x) = exp(-(angle/2) e·n) psi(R_n(angle) x), where R_n
/// rotates counterclockwise about n. On lattices only quarter turns about a
/// coordinate axis are accepted.
inline Operator rotation(const Vec3& n, double angle) {
  if (std::abs(norm(n) - 1.0) > 1e-12) throw usage_error("rotation: axis must be a unit vector");
  const Quaternion spin = qexp(Quaternion::pure(-0.5 * angle * n));
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  auto rotate = [n, c, s](const Vec3& x) { return c * x + s * cross(n, x) + ((1.0 - c) * dot(n, x)) * n; };
  auto analytic = [spin, rotate](const AnalyticField& psi) -> AnalyticField {
    return [spin, rotate, psi](const Vec3& x) { return spin * psi(rotate(x)); };
  };
  auto lattice = [n, angle, spin, rotate](const LatticeField& psi) {
    const double quarter = angle / (std::numbers::pi / 2.0);
    if (detail::axis_of(n) < 0 || std::abs(quarter - std::round(quarter)) > 1e-12)
      throw usage_error("rotation: lattice form needs a quarter turn about a coordinate axis");
    const LatticeSpec& spec = psi.spec();
    LatticeField out(spec);
    const double h = spec.step();
    for (std::size_t idx = 0; idx < out.size(); ++idx) {
      const Vec3 y = rotate(spec.site(idx));
      int ijk[3];
      for (int k = 0; k < 3; ++k) ijk[k] = static_cast<int>(std::lround((y[k] + spec.half_width) / h - 0.5));
      out[idx] = spin * psi[spec.index(ijk[0], ijk[1], ijk[2])];
    }
    return out;
  };
  std::ostringstream os;
  os << "exp(" << angle << " " << n << "·M)";
  auto adjoint = [n, angle]() { return rotation(n, -angle); };
  return Operator::stencil(os.str(), analytic, lattice, adjoint);
}

/// H = -(1/2m) nabla^2. The central scheme composes the covariant derivatives;
/// the transported scheme uses sum_i (U(-h e_i) + U(h e_i) - 2) / h^2.
inline Operator hamiltonian(double mass, double fd_step = 1e-3, Scheme scheme = Scheme::central) {
  if (!(mass > 0.0)) throw usage_error("hamiltonian: mass must be positive");
  const double c = -1.0 / (2.0 * mass);
  if (scheme == Scheme::central) {
    std::vector<std::pair<double, Operator>> terms;
    for (int i = 0; i < 3; ++i) {
      const Operator d = covderiv(axis(i), fd_step, Scheme::central);
      terms.emplace_back(c, d * d);
    }
    return combination("H", std::move(terms));
  }
  auto analytic = [c, fd_step](const AnalyticField& psi) -> AnalyticField {
    std::vector<AnalyticField> hops;
    for (int i = 0; i < 3; ++i) {
      hops.push_back(uop(-fd_step * axis(i)).apply(psi));
      hops.push_back(uop(fd_step * axis(i)).apply(psi));
    }
    const double scale = c / (fd_step * fd_step);
    return [hops, psi, scale](const Vec3& x) {
      Quaternion acc = -6.0 * psi(x);
      for (const auto& f : hops) acc += f(x);
      return scale * acc;
    };
  };
  auto lattice = [c](const LatticeField& psi) {
    const double h = psi.spec().step();
    LatticeField acc = -6.0 * psi;
    for (int i = 0; i < 3; ++i) {
      acc += uop(-h * axis(i)).apply(psi);
      acc += uop(h * axis(i)).apply(psi);
    }
    return (c / (h * h)) * std::move(acc);
  };
  auto adjoint = [mass, fd_step, scheme]() { return hamiltonian(mass, fd_step, scheme); };
  return Operator::stencil("H", analytic, lattice, adjoint);
}

}  // namespace qmono
