#pragma once

// Randomized verification suites. Each returns a Report whose checks compare a
// computed quantity with the identity it should satisfy. A fixed seed gives the
// same sample set and the same report.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "checks.hpp"
#include "geometry.hpp"
#include "hilbert.hpp"
#include "operators.hpp"
#include "quaternion.hpp"
#include "report.hpp"
#include "splitting.hpp"

namespace qmono {

/// Deliberate defects for negative controls.
enum class Fault {
  none,
  flip_mul,           // eps_ijk -> -eps_ijk in the product
  literal_transport,  // second radicand with the sign of a·x flipped
};

inline Fault parse_fault(const std::string& s) {
  if (s.empty() || s == "none") return Fault::none;
  if (s == "flip-mul") return Fault::flip_mul;
  if (s == "literal-transport") return Fault::literal_transport;
  throw usage_error("unknown fault '" + s + "' (expected none, flip-mul or literal-transport)");
}

struct SuiteConfig {
  std::size_t samples = 10000;
  std::uint64_t seed = 42;
  double tol = 1e-12;
  LatticeSpec lattice{32, 6.0};
  int fields = 20;          // smooth test fields for finite-difference checks
  double fd_step = 0.01;    // h for finite-difference checks; h/2 for the Richardson partner
  double ratio_tol = 0.5;   // |dev(h)/dev(h/2) - 4|
  Fault fault = Fault::none;
};

namespace detail {

inline Quaternion random_quaternion(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  return {g(rng), g(rng), g(rng), g(rng)};
}

inline Vec3 random_vec(std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  return {g(rng), g(rng), g(rng)};
}

/// Segment x -> x+a stays 5% of its length scale away from the origin.
inline bool well_separated(const Vec3& a, const Vec3& x) {
  const double scale = std::max(norm(x), norm(x + a));
  return scale > 0.0 && segment_origin_distance(x, a) >= 0.05 * scale;
}

/// Product with the sign of the cross term flipped: the reversed-order product.
inline Quaternion flipped_mul(const Quaternion& p, const Quaternion& q) { return q * p; }

inline std::string describe_q(const Quaternion& q) {
  std::ostringstream os;
  os << q;
  return os.str();
}

inline std::string describe_v(const Vec3& v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

/// Random field with support on lattice indices [margin, n - margin) per axis.
inline LatticeField random_lattice_field(const LatticeSpec& spec, std::mt19937_64& rng, int margin = 0) {
  LatticeField psi(spec);
  for (int i = margin; i < spec.n - margin; ++i)
    for (int j = margin; j < spec.n - margin; ++j)
      for (int k = margin; k < spec.n - margin; ++k) psi[spec.index(i, j, k)] = random_quaternion(rng);
  return psi;
}

/// Random lattice-commensurate displacement with components in [-max_steps, max_steps] steps.
inline Vec3 random_grid_shift(const LatticeSpec& spec, std::mt19937_64& rng, int max_steps) {
  std::uniform_int_distribution<int> d(-max_steps, max_steps);
  const double h = spec.step();
  return {d(rng) * h, d(rng) * h, d(rng) * h};
}

/// True when w(a; x) is well conditioned at every site (segments avoid the origin by h/20).
inline bool shift_clear_of_origin(const LatticeSpec& spec, const Vec3& a) {
  const double margin = 0.05 * spec.step();
  for (std::size_t i = 0; i < spec.size(); ++i)
    if (segment_origin_distance(spec.site(i), a) < margin) return false;
  return true;
}

/// Random box with faces on cell boundaries, inside [lo_index, hi_index) per axis.
inline Box random_cell_box(const LatticeSpec& spec, std::mt19937_64& rng, int lo_index, int hi_index) {
  std::uniform_int_distribution<int> d(lo_index, hi_index);
  Box b;
  const double h = spec.step();
  for (int ax = 0; ax < 3; ++ax) {
    int p = d(rng);
    int q = d(rng);
    while (q == p) q = d(rng);
    if (p > q) std::swap(p, q);
    b.lo[ax] = -spec.half_width + p * h;
    b.hi[ax] = -spec.half_width + q * h;
  }
  return b;
}

/// Origin strictly inside the tetrahedron (p0..p3), from barycentric signs.
inline std::optional<bool> origin_inside(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& p3) {
  const double v = dot(p1 - p0, cross(p2 - p0, p3 - p0));
  const double l[4] = {dot(p1, cross(p2, p3)) / v, dot(p0, cross(p3, p2)) / v, dot(p0, cross(p1, p3)) / v,
                       dot(p0, cross(p2, p1)) / v};
  bool inside = true;
  for (double li : l) {
    if (std::abs(li) < 1e-6) return std::nullopt;  // too close to a face to classify
    inside = inside && li > 0.0;
  }
  return inside;
}

/// Tetrahedron with Gaussian vertices x, x+a, x+a+b, x+a+b+c; about one in eight
/// encloses the origin. Returns whether it does.
inline std::optional<bool> random_tetrahedron(std::mt19937_64& rng, Vec3& x, Vec3& a, Vec3& b, Vec3& c) {
  std::optional<bool> inside;
  do {
    const Vec3 p0 = random_vec(rng), p1 = random_vec(rng), p2 = random_vec(rng), p3 = random_vec(rng);
    x = p0;
    a = p1 - p0;
    b = p2 - p1;
    c = p3 - p2;
    inside = origin_inside(p0, p1, p2, p3);
  } while (!inside);
  return inside;
}

struct RichardsonStats {
  DeviationStats coarse;
  DeviationStats ratio;
};

/// Runs `check(h)` and `check(h/2)` and records dev(h) and |dev(h)/dev(h/2) - 4|.
template <class CheckFn>
void richardson(RichardsonStats& s, CheckFn&& check, double h, const std::string& where) {
  const CommutatorReport coarse = check(h);
  const CommutatorReport fine = check(h / 2.0);
  const double ratio = coarse.max_dev / fine.max_dev;
  s.coarse.add(coarse.max_dev, where);
  s.ratio.add(std::abs(ratio - 4.0), [&] { return where + ", ratio " + std::to_string(ratio); });
}

inline std::vector<TestField> test_fields(const SuiteConfig& cfg, std::mt19937_64& rng) {
  std::vector<TestField> out;
  for (int f = 0; f < cfg.fields; ++f) out.push_back(random_packet(rng));
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------

/// Quaternion algebra: multiplication table, associativity, norm multiplicativity,
/// conjugation, SU(2) embedding, automorphisms and complex slices.
inline Report algebra_suite(const SuiteConfig& cfg) {
  using MulFn = Quaternion (*)(const Quaternion&, const Quaternion&);
  const MulFn product = cfg.fault == Fault::flip_mul ? MulFn{&detail::flipped_mul} : MulFn{&mul};
  std::mt19937_64 rng(cfg.seed);
  Report report;
  report.suite = "algebra";
  report.seed = cfg.seed;
  report.n_samples = cfg.samples;

  DeviationStats table;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      Quaternion expected;
      if (i == 0) {
        expected = basis(j);
      } else if (j == 0) {
        expected = basis(i);
      } else {
        expected = Quaternion::real(i == j ? -1.0 : 0.0);
        for (int k = 1; k <= 3; ++k) expected += static_cast<double>(levi_civita(i - 1, j - 1, k - 1)) * basis(k);
      }
      table.add(norm(product(basis(i), basis(j)) - expected),
                [&] { return "e" + std::to_string(i) + " e" + std::to_string(j); });
    }
  report.checks.push_back(Check::from_stats("multiplication table", "e_i e_j = -δ_ij + ε_ijk e_k", table, 0.0));

  DeviationStats assoc, normmul, anti, hom, unitary, automorph, slice_group;
  const ImaginaryUnit omega = ImaginaryUnit::from_vector({0.3, -0.5, 0.8});
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  for (std::size_t s = 0; s < cfg.samples; ++s) {
    const Quaternion p = detail::random_quaternion(rng);
    const Quaternion q = detail::random_quaternion(rng);
    const Quaternion r = detail::random_quaternion(rng);
    const double scale2 = norm(p) * norm(q);
    const double scale3 = scale2 * norm(r);
    auto where = [&] { return "p = " + detail::describe_q(p) + ", q = " + detail::describe_q(q); };

    assoc.add(norm(product(product(p, q), r) - product(p, product(q, r))) / scale3, where);
    normmul.add(std::abs(norm(product(p, q)) - scale2) / scale2, where);
    anti.add(norm(conj(product(p, q)) - product(conj(q), conj(p))) / scale2, where);

    const Quaternion pq = product(p, q);
    hom.add((su2(p) * su2(q)).max_abs_diff(su2(pq)) / scale2, where);

    const Quaternion u = p / norm(p);
    const Mat2C m = su2(u);
    const double det_dev = std::abs(m.det() - std::complex<double>(1.0, 0.0));
    const double unit_dev = (m.adjoint() * m).max_abs_diff(Mat2C::identity());
    unitary.add(std::max(det_dev, unit_dev), where);

    const Quaternion w = u;  // unit, so the automorphism is defined
    const Quaternion lhs = product(product(conj(w), pq), w);
    const Quaternion rhs = product(product(product(conj(w), p), w), product(product(conj(w), q), w));
    automorph.add(norm(lhs - rhs) / scale2, where);

    const double a = angle(rng);
    const double b = angle(rng);
    slice_group.add(norm(product(qexp(a * omega.value()), qexp(b * omega.value())) - qexp((a + b) * omega.value())),
                    [&] { return "theta = " + std::to_string(a) + ", phi = " + std::to_string(b); });
  }
  const double tol = cfg.tol;
  report.checks.push_back(Check::from_stats("associativity", "(pq)r = p(qr)", assoc, tol));
  report.checks.push_back(Check::from_stats("norm multiplicativity", "|pq| = |p||q|", normmul, tol));
  report.checks.push_back(Check::from_stats("conjugation reverses products", "(pq)* = q* p*", anti, tol));
  report.checks.push_back(Check::from_stats("SU(2) homomorphism", "su2(pq) = su2(p) su2(q), e_k = -i σ_k", hom, tol));
  report.checks.push_back(Check::from_stats("unit quaternions land in SU(2)", "det su2(u) = 1, su2(u)† su2(u) = I",
                                            unitary, tol));
  report.checks.push_back(
      Check::from_stats("inner automorphism is multiplicative", "ω*(pq)ω = (ω*pω)(ω*qω)", automorph, tol));
  report.checks.push_back(
      Check::from_stats("one-parameter group in a slice", "exp(θω) exp(φω) = exp((θ+φ)ω)", slice_group, tol));
  return report;
}

/// Transport cocycle, multiplier flux formula, flux quantization and the Chern integral.
inline Report geometry_suite(const SuiteConfig& cfg) {
  const TransportFn w = cfg.fault == Fault::literal_transport ? TransportFn{&transport_literal} : TransportFn{&transport};
  std::mt19937_64 rng(cfg.seed);
  Report report;
  report.suite = "geometry";
  report.seed = cfg.seed;
  report.n_samples = cfg.samples;
  const double tol = cfg.tol;

  DeviationStats unitarity, cocycle, intertwine;
  std::uniform_real_distribution<double> param(-1.5, 1.5);
  for (std::size_t s = 0; s < cfg.samples; ++s) {
    Vec3 x, a;
    double ss = 0.0, tt = 0.0;
    do {
      x = detail::random_vec(rng, 2.0);
      a = detail::random_vec(rng, 2.0);
      ss = param(rng);
      tt = param(rng);
    } while (!detail::well_separated(a, x) || !detail::well_separated(ss * a, x) ||
             !detail::well_separated(tt * a, x + ss * a) || !detail::well_separated((ss + tt) * a, x));
    auto where = [&] { return "a = " + detail::describe_v(a) + ", x = " + detail::describe_v(x); };
    const Quaternion wx = w(a, x);
    unitarity.add(std::abs(norm(wx) - 1.0), where);
    intertwine.add(norm(wx * dirq(x) * conj(wx) - dirq(x + a)), where);
    const Quaternion two_step = w(tt * a, x + ss * a) * w(ss * a, x);
    cocycle.add(norm(two_step - w((ss + tt) * a, x)), [&] {
      return where() + ", s = " + std::to_string(ss) + ", t = " + std::to_string(tt);
    });
  }
  report.checks.push_back(Check::from_stats("transport unitarity", "w(a;x) w(a;x)* = 1", unitarity, tol));
  report.checks.push_back(
      Check::from_stats("transport carries j(x) to j(x+a)", "w(a;x) j(x) w(a;x)* = j(x+a)", intertwine, tol));
  report.checks.push_back(
      Check::from_stats("transport cocycle", "w(ta; x+sa) w(sa; x) = w((s+t)a; x)", cocycle, tol));

  DeviationStats mult, mult_unit;
  for (std::size_t s = 0; s < cfg.samples; ++s) {
    Vec3 x, a, b;
    do {
      x = detail::random_vec(rng, 2.0);
      a = detail::random_vec(rng, 1.5);
      b = detail::random_vec(rng, 1.5);
    } while (!detail::well_separated(a + b, x) || !detail::well_separated(a, x + b) ||
             !detail::well_separated(b, x));
    auto where = [&] {
      return "a = " + detail::describe_v(a) + ", b = " + detail::describe_v(b) + ", x = " + detail::describe_v(x);
    };
    const Quaternion m = multiplier(a, b, x, w);
    mult.add(norm(m - multiplier_from_flux(a, b, x)), where);
    mult_unit.add(std::abs(norm(m) - 1.0), where);
  }
  report.checks.push_back(Check::from_stats("multiplier equals flux exponential",
                                            "w(a+b;x)* w(a;x+b) w(b;x) = exp(j(x) Φ(x, x+b, x+a+b))", mult,
                                            std::max(tol, 1e-9)));
  report.checks.push_back(Check::from_stats("multiplier is a unit quaternion", "|m(a,b;x)| = 1", mult_unit, tol));

  DeviationStats tetra;
  std::size_t inside_count = 0;
  for (std::size_t s = 0; s < cfg.samples; ++s) {
    Vec3 x, a, b, c;
    const std::optional<bool> inside = detail::random_tetrahedron(rng, x, a, b, c);
    const double expected = *inside ? 2.0 * std::numbers::pi : 0.0;
    inside_count += *inside ? 1 : 0;
    tetra.add(std::abs(tetraflux(x, a, b, c) - expected), [&] {
      return "x = " + detail::describe_v(x) + ", a = " + detail::describe_v(a) + ", b = " + detail::describe_v(b) +
             ", c = " + detail::describe_v(c);
    });
  }
  report.checks.push_back(Check::from_stats("tetraflux quantization (" + std::to_string(inside_count) + " of " +
                                                std::to_string(cfg.samples) + " enclose the origin)",
                                            "Φ(closed tetrahedron) = 2π inside, 0 outside", tetra, std::max(tol, 1e-9)));

  DeviationStats full_turn;
  for (int s = 0; s < 1000; ++s) {
    const Vec3 x = detail::random_vec(rng, 2.0);
    full_turn.add(norm(qexp(2.0 * std::numbers::pi * dirq(x)) - e0));
  }
  report.checks.push_back(Check::from_stats("full flux quantum is trivial", "exp(2π j(x)) = 1", full_turn, tol));

  DeviationStats cevian;
  for (int s = 0; s < 1000; ++s) {
    const Vec3 p1 = detail::random_vec(rng, 2.0);
    const Vec3 p2 = detail::random_vec(rng, 2.0);
    const Vec3 p3 = detail::random_vec(rng, 2.0);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    const double lambda = u(rng);
    const Vec3 q = (1.0 - lambda) * p2 + lambda * p3;
    try {
      const double whole = triflux({p1, p2, p3});
      const double parts = triflux({p1, p2, q}) + triflux({p1, q, p3});
      double d = std::abs(whole - parts);
      d = std::min(d, std::abs(d - 2.0 * std::numbers::pi));  // a part may straddle the solid-angle branch
      cevian.add(d);
    } catch (const domain_error&) {
    }
  }
  report.checks.push_back(
      Check::from_stats("triangle flux is additive", "Φ(p1,p2,p3) = Φ(p1,p2,q) + Φ(p1,q,p3)", cevian, 1e-10));

  DeviationStats curv;
  for (int s = 0; s < 1000; ++s) {
    const Vec3 x = detail::random_vec(rng, 2.0);
    const CurvatureSample k = curvature(x);
    const double r = norm(x);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        curv.add(std::abs(k.kappa[i][j] + k.kappa[j][i]));
        for (int rr = 0; rr < 3; ++rr) curv.add(std::abs(k.omega[rr][i][j] - k.kappa[i][j] * x[rr] / r));
      }
  }
  report.checks.push_back(
      Check::from_stats("curvature forms", "κ_ij = -κ_ji, Ω^r_ij = κ_ij x_r/|x|", curv, tol));

  const double c1 = chern(256, 256, 1.0);
  const double c7 = chern(256, 256, 7.0);
  report.checks.push_back(Check::single("Chern integral, unit sphere", "-∫ κ over S² = 2π",
                                        std::abs(c1 - 2.0 * std::numbers::pi), 1e-6, "256 x 256"));
  report.checks.push_back(Check::single("Chern integral, radius 7", "-∫ κ over |x| = 7 = 2π",
                                        std::abs(c7 - 2.0 * std::numbers::pi), 1e-6, "256 x 256"));
  return report;
}

/// Finite-difference operator identities on smooth analytic packets, plus lattice
/// adjoint and unitarity checks.
inline Report operators_suite(const SuiteConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  Report report;
  report.suite = "operators";
  report.seed = cfg.seed;
  const std::vector<TestField> fields = detail::test_fields(cfg, rng);
  report.n_samples = fields.size();
  const double h = cfg.fd_step;

  detail::RichardsonStats pos, curv, rot, rot_pos, rot_j, hx;
  DeviationStats pos_offdiag, curv_diag;
  for (std::size_t f = 0; f < fields.size(); ++f) {
    const TestField& field = fields[f];
    const std::string tag = "field " + std::to_string(f);
    for (int i = 0; i < 3; ++i) {
      detail::richardson(pos, [&](double s) { return position_commutator_check(i, i, field, s); }, h,
                         tag + ", [∇" + std::to_string(i + 1) + ",X" + std::to_string(i + 1) + "]");
      detail::richardson(rot_j, [&](double s) { return j_commutator_check(rotgen(i, s), field, s); }, h,
                         tag + ", [M" + std::to_string(i + 1) + ",J]");
      detail::richardson(hx, [&](double s) { return ehrenfest_operator_check(i, 1.0, field, s); }, h,
                         tag + ", [H,X" + std::to_string(i + 1) + "]");
      for (int j = 0; j < 3; ++j) {
        const std::string pair = std::to_string(i + 1) + std::to_string(j + 1);
        if (i != j) {
          pos_offdiag.add(position_commutator_check(i, j, field, h).max_dev, tag + ", [∇,X] " + pair);
          detail::richardson(curv, [&](double s) { return commutator_check(i, j, field, s); }, h,
                             tag + ", [∇,∇] " + pair);
        } else {
          curv_diag.add(commutator_check(i, j, field, h).max_dev, tag + ", [∇,∇] " + pair);
        }
        detail::richardson(rot, [&](double s) { return rotation_commutator_check(i, j, field, s); }, h,
                           tag + ", [M,∇] " + pair);
        if (i != j)
          detail::richardson(rot_pos, [&](double s) { return rotation_position_check(i, j, field, s); }, h,
                             tag + ", [M,X] " + pair);
      }
    }
  }
  const double rt = cfg.ratio_tol;
  auto add_pair = [&](const std::string& name, const std::string& identity, const detail::RichardsonStats& s,
                      double dev_tol) {
    report.checks.push_back(Check::from_stats(name + ", deviation at h", identity, s.coarse, dev_tol));
    report.checks.push_back(Check::from_stats(name + ", |ratio - 4|", identity + " (second order)", s.ratio, rt));
  };
  add_pair("[∇_i, X_i] = 1", "[∇_i, X_j] = δ_ij", pos, 1e-2);
  report.checks.push_back(Check::from_stats("[∇_i, X_j] = 0 for i ≠ j", "[∇_i, X_j] = δ_ij", pos_offdiag, 1e-10));
  add_pair("[∇_i, ∇_j] = curvature", "[∇_i, ∇_j] = -½ ε_ijk x_k/|x|³ J", curv, 1e-1);
  report.checks.push_back(Check::from_stats("[∇_i, ∇_i] = 0", "[∇_i, ∇_j] antisymmetric", curv_diag, cfg.tol));
  add_pair("[M_i, ∇_j] = -ε_ijk ∇_k", "[M_i, ∇_j] = -ε_ijk ∇_k", rot, 1e-1);
  add_pair("[M_i, X_j] = -ε_ijk X_k", "[M_i, X_j] = -ε_ijk X_k", rot_pos, 1e-1);
  add_pair("[M_i, J] = 0", "[M_i, J] = 0", rot_j, 1e-1);
  add_pair("[H, X_i] = -∇_i/m", "[H, X_i] = -(1/m) ∇_i", hx, 1e-1);

  // Spin one-half: a full turn about e3 is -1.
  DeviationStats full_turn;
  const Operator turn = rotation({0.0, 0.0, 1.0}, 2.0 * std::numbers::pi);
  for (std::size_t f = 0; f < fields.size(); ++f) {
    const AnalyticField rotated = turn.apply(fields[f].psi);
    for (const auto& x : fields[f].samples)
      full_turn.add(norm(rotated(x) + fields[f].psi(x)), "field " + std::to_string(f));
  }
  report.checks.push_back(Check::from_stats("full rotation is -1", "exp(2π M_3) = -I", full_turn, cfg.tol));

  // Lattice: adjoints and unitarity on fields supported away from the boundary.
  const LatticeSpec spec = cfg.lattice;
  const int margin = std::max(2, spec.n / 8);
  DeviationStats adjoint, unit, j_props;
  for (int s = 0; s < 4; ++s) {
    const LatticeField phi = detail::random_lattice_field(spec, rng, margin);
    const LatticeField psi = detail::random_lattice_field(spec, rng, margin);
    const double scale = norm(phi) * norm(psi);
    Vec3 a;
    do a = detail::random_grid_shift(spec, rng, 2);
    while (!detail::shift_clear_of_origin(spec, a));
    const std::vector<Operator> ops{position(s % 3),  jop(),         bop(s % 3),   eop(s % 3),
                                    vshift(a),        wop(a),        uop(a),       covderiv(axis(s % 3), h, Scheme::transported),
                                    hamiltonian(1.0, h, Scheme::transported)};
    for (const auto& op : ops) {
      const Quaternion lhs = inner(phi, op.apply(psi));
      const Quaternion rhs = inner(op.adjoint().apply(phi), psi);
      adjoint.add(norm(lhs - rhs) / scale, op.name());
    }
    unit.add(std::abs(norm(uop(a).apply(psi)) - norm(psi)) / norm(psi), "U" + detail::describe_v(a));
    const LatticeField jpsi = jop().apply(psi);
    j_props.add(max_deviation(jop().apply(jpsi), -1.0 * psi), "J² = -I");
    j_props.add(norm(inner(phi, jpsi) + inner(jop().apply(phi), psi)) / scale, "J* = -J");
  }
  report.checks.push_back(Check::from_stats("declared adjoints", "(φ, Aψ) = (A*φ, ψ)", adjoint, 1e-10));
  report.checks.push_back(Check::from_stats("U(a) is unitary", "|U(a)ψ| = |ψ|", unit, cfg.tol));
  report.checks.push_back(Check::from_stats("J is a unitary anti-hermitian involution", "J² = -I, J* = -J", j_props,
                                            cfg.tol));
  return report;
}

/// Slice reduction: the splitting psi = psi1 + psi2 omega~ and J-commuting operators.
inline Report splitting_suite(const SuiteConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  Report report;
  report.suite = "splitting";
  report.seed = cfg.seed;
  const SliceSpec slice = SliceSpec::standard();
  const LatticeSpec small{8, 2.0};
  const std::size_t n_fields = std::min<std::size_t>(cfg.samples, 1000);
  report.n_samples = n_fields;

  DeviationStats recon, additivity, membership, orth, cvalued, xj, xj_applied;
  for (std::size_t s = 0; s < n_fields; ++s) {
    const LatticeField psi = detail::random_lattice_field(small, rng);
    const SplitPair p = split(psi, slice);
    double peak = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) peak = std::max(peak, norm(psi[i]));
    const std::string tag = "field " + std::to_string(s);
    recon.add(max_deviation(reconstruct(p, slice), psi) / peak, tag);
    const double n2 = real_inner(psi, psi);
    additivity.add(std::abs(n2 - real_inner(p.psi1, p.psi1) - real_inner(p.psi2, p.psi2)) / n2, tag);
    membership.add(std::max(in_slice(p.psi1, slice).relative_residual, in_slice(p.psi2, slice).relative_residual), tag);
    // (psi1, psi2 omega~) has no C_omega part; its omega-orthogonal part is (1/2)(psi, J psi) x omega.
    const Quaternion cross_term = inner(p.psi1, rscale(p.psi2, slice.omega_tilde()));
    const Quaternion omega = slice.omega();
    const double c_part = std::hypot(cross_term.q0, dot(cross_term.vec(), omega.vec()));
    orth.add(c_part / n2, tag);
    // Inner products of slice members lie in C_omega.
    const Quaternion ip = inner(p.psi1, p.psi2);
    const Vec3 perp = ip.vec() - dot(ip.vec(), omega.vec()) * omega.vec();
    cvalued.add(norm(perp) / n2, tag);
    // [X_i, J] = 0: the symbols commute exactly; applied in sequence only up to rounding.
    for (int i = 0; i < 3; ++i) {
      const Operator x_op = position(i);
      const Operator j_op = jop();
      for (std::size_t k = 0; k < psi.size(); ++k) {
        const Vec3 site = small.site(k);
        xj.add(norm(x_op.symbol(site) * j_op.symbol(site) - j_op.symbol(site) * x_op.symbol(site)), tag);
      }
      const LatticeField a = x_op.apply(j_op.apply(psi));
      const LatticeField b = j_op.apply(x_op.apply(psi));
      xj_applied.add(max_deviation(a, b) / peak, tag);
    }
  }
  report.checks.push_back(Check::from_stats("reconstruction", "ψ = ψ1 + ψ2 ω~", recon, 1e-14));
  report.checks.push_back(Check::from_stats("norm additivity", "|ψ|² = |ψ1|² + |ψ2|²", additivity, cfg.tol));
  report.checks.push_back(Check::from_stats("components lie in the slice", "J ψ_k = ψ_k ω", membership, 1e-14));
  report.checks.push_back(Check::from_stats("orthogonality, C_ω part", "Re(ψ1, ψ2 ω~) = ω·(ψ1, ψ2 ω~) = 0", orth,
                                            cfg.tol));
  report.checks.push_back(Check::from_stats("slice inner products are C_ω-valued", "(φ, ψ) ∈ C_ω", cvalued, cfg.tol));
  report.checks.push_back(Check::from_stats("[X_i, J] = 0, symbols (exact)", "[X_i, J] = 0", xj, 0.0));
  report.checks.push_back(Check::from_stats("[X_i, J] = 0, applied", "[X_i, J] = 0", xj_applied, cfg.tol));

  // J-commuting lattice operators keep slice members in the slice.
  const LatticeSpec spec = cfg.lattice;
  std::vector<LatticeField> members;
  for (int s = 0; s < 3; ++s) members.push_back(split(detail::random_lattice_field(spec, rng), slice).psi1);
  Vec3 a;
  do a = detail::random_grid_shift(spec, rng, 2);
  while (!detail::shift_clear_of_origin(spec, a));
  for (const Operator& op : {uop(a), hamiltonian(1.0, cfg.fd_step, Scheme::transported),
                             covderiv(axis(0), cfg.fd_step, Scheme::transported)}) {
    const Report r = reduce_check(op, slice, members, cfg.tol);
    report.checks.push_back(r.checks.back());
  }

  // Differential splitting relations on smooth fields, second order in h.
  const std::vector<TestField> fields = detail::test_fields(cfg, rng);
  detail::RichardsonStats dj, hj;
  for (std::size_t f = 0; f < fields.size(); ++f) {
    const std::string tag = "field " + std::to_string(f);
    for (int i = 0; i < 3; ++i)
      detail::richardson(dj, [&](double s) { return j_commutator_check(covderiv(axis(i), s), fields[f], s); },
                         cfg.fd_step, tag + ", [∇" + std::to_string(i + 1) + ",J]");
    detail::richardson(hj, [&](double s) { return j_commutator_check(hamiltonian(1.0, s), fields[f], s); },
                       cfg.fd_step, tag + ", [H,J]");
  }
  report.checks.push_back(Check::from_stats("[∇_i, J] = 0, deviation at h", "[∇_u, J] = 0", dj.coarse, 1e-1));
  report.checks.push_back(Check::from_stats("[∇_i, J] = 0, |ratio - 4|", "[∇_u, J] = 0 (second order)", dj.ratio,
                                            cfg.ratio_tol));
  report.checks.push_back(Check::from_stats("[H, J] = 0, deviation at h", "[H, J] = 0", hj.coarse, 1e-1));
  report.checks.push_back(
      Check::from_stats("[H, J] = 0, |ratio - 4|", "[H, J] = 0 (second order)", hj.ratio, cfg.ratio_tol));
  return report;
}

/// Generalized imprimitivity for lattice translations: covariance of the spectral
/// family, the composition defect as a pointwise multiplier, and flux quantization.
inline Report gis_suite(const SuiteConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  Report report;
  report.suite = "gis";
  report.seed = cfg.seed;
  const LatticeSpec spec = cfg.lattice;
  const std::size_t n_pairs = std::min<std::size_t>(cfg.samples, 1000);
  report.n_samples = n_pairs;
  const int max_steps = 2;
  const int margin = 2 * max_steps + 1;  // keeps every intermediate shift inside the box

  DeviationStats cov_u, cov_v, conj_u, defect_symbol, defect_flux, defect_unit, defect_commutes, one_param;
  for (std::size_t s = 0; s < n_pairs; ++s) {
    Vec3 a, b;
    do {
      a = detail::random_grid_shift(spec, rng, max_steps);
      b = detail::random_grid_shift(spec, rng, max_steps);
    } while (!detail::shift_clear_of_origin(spec, a) || !detail::shift_clear_of_origin(spec, b) ||
             !detail::shift_clear_of_origin(spec, a + b));
    // Boxes and their translates stay inside the lattice.
    const int lo = max_steps, hi = spec.n - max_steps;
    const BorelSet delta({detail::random_cell_box(spec, rng, lo, hi), detail::random_cell_box(spec, rng, lo, hi)});
    const LatticeField psi = detail::random_lattice_field(spec, rng, margin);
    const std::string tag = "a = " + detail::describe_v(a) + ", b = " + detail::describe_v(b);

    const Operator ua = uop(a);
    const BorelSet moved = delta.translated(a);
    cov_u.add(max_deviation(ua.apply(project(delta, psi)), project(moved, ua.apply(psi))), tag);
    cov_v.add(max_deviation(vshift(a).apply(project(delta, vshift(-1.0 * a).apply(psi))), project(moved, psi)), tag);
    conj_u.add(max_deviation(ua.apply(project(delta, ua.adjoint().apply(psi))), project(moved, psi)), tag);

    const Operator defect = compose_defect(a, b);
    const LatticeField mpsi = defect.apply(psi);
    double sym = 0.0, flux = 0.0, unit = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
      if (psi[i] == Quaternion{}) continue;
      const Vec3 x = spec.site(i);
      const Quaternion m = multiplier(a, b, x);
      sym = std::max(sym, norm(mpsi[i] - m * psi[i]) / norm(psi[i]));
      unit = std::max(unit, std::abs(norm(m) - 1.0));
      try {
        flux = std::max(flux, norm(m - multiplier_from_flux(a, b, x)));
      } catch (const domain_error&) {
        // origin on the triangle: the flux is undefined there, m is not
      }
    }
    defect_symbol.add(sym, tag);
    defect_unit.add(unit, tag);
    defect_flux.add(flux, tag);
    defect_commutes.add(max_deviation(defect.apply(project(delta, psi)), project(delta, mpsi)), tag);

    // One-parameter subgroups along a lattice axis: U(a) U(a) = U(2a).
    const Vec3 unit_step = axis(static_cast<int>(s % 3)) * spec.step();
    one_param.add(max_deviation(uop(unit_step).apply(uop(unit_step).apply(psi)), uop(2.0 * unit_step).apply(psi)),
                  "direction " + std::to_string(s % 3));
  }
  report.checks.push_back(Check::from_stats("covariance of E under U (exact)", "U(a) E(Δ) = E(Δ+a) U(a)", cov_u, 0.0));
  report.checks.push_back(
      Check::from_stats("covariance of E under V (exact)", "V(a) E(Δ) V(-a) = E(Δ+a)", cov_v, 0.0));
  report.checks.push_back(
      Check::from_stats("covariance of E under U, conjugated", "U(a) E(Δ) U(a)* = E(Δ+a)", conj_u, 1e-14));
  report.checks.push_back(Check::from_stats("defect is the multiplier m(a,b;x)",
                                            "U(a+b)* U(a) U(b) = ∫ m(a,b;x) dE(x)", defect_symbol, cfg.tol));
  report.checks.push_back(
      Check::from_stats("defect commutes with E (exact)", "M(a,b) E(Δ) = E(Δ) M(a,b)", defect_commutes, 0.0));
  report.checks.push_back(Check::from_stats("defect symbol is unit", "|m(a,b;x)| = 1", defect_unit, cfg.tol));
  report.checks.push_back(Check::from_stats("defect symbol equals flux exponential",
                                            "m(a,b;x) = exp(j(x) Φ(x, x+b, x+a+b))", defect_flux,
                                            std::max(cfg.tol, 1e-9)));
  report.checks.push_back(
      Check::from_stats("one-parameter subgroups compose", "U(su) U(tu) = U((s+t)u)", one_param, cfg.tol));

  // Associativity of the multiplier: fluxes through closed tetrahedra are quantized.
  DeviationStats tetra, assoc;
  std::size_t inside_count = 0;
  for (std::size_t s = 0; s < cfg.samples; ++s) {
    Vec3 x, a, b, c;
    const std::optional<bool> inside = detail::random_tetrahedron(rng, x, a, b, c);
    inside_count += *inside ? 1 : 0;
    const double phi = tetraflux(x, a, b, c);
    tetra.add(std::abs(phi - (*inside ? 2.0 * std::numbers::pi : 0.0)));
    assoc.add(norm(qexp(phi * dirq(x)) - e0));
  }
  report.checks.push_back(Check::from_stats("tetraflux quantization (" + std::to_string(inside_count) + " of " +
                                                std::to_string(cfg.samples) + " enclose the origin)",
                                            "Φ(closed tetrahedron) ∈ {0, 2π}", tetra, std::max(cfg.tol, 1e-9)));
  report.checks.push_back(Check::from_stats("associativity defect is trivial", "exp(j(x) Φ_tetra) = 1", assoc,
                                            std::max(cfg.tol, 1e-9)));
  return report;
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"algebra", "geometry", "operators", "splitting", "gis"};
  return names;
}

inline Report run_suite(const std::string& name, const SuiteConfig& cfg) {
  if (name == "algebra") return algebra_suite(cfg);
  if (name == "geometry") return geometry_suite(cfg);
  if (name == "operators") return operators_suite(cfg);
  if (name == "splitting") return splitting_suite(cfg);
  if (name == "gis") return gis_suite(cfg);
  throw usage_error("unknown suite '" + name + "'");
}

}  // namespace qmono
