#pragma once

// Time evolution psi(t) = exp(-J H t) psi on a lattice with the Cayley step
// (I + dt/2 JH)^{-1} (I - dt/2 JH), plus the expectation values that enter the
// Ehrenfest relations
//   d<X_i>/dt   = <-(J/m) nabla_i>
//   d^2<X_i>/dt^2 = <(1/2m) eps_ijk (V_j B_k + B_k V_j)>,  V = -(J/m) nabla.

#include <cmath>
#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "error.hpp"
#include "geometry.hpp"
#include "hilbert.hpp"
#include "report.hpp"
#include "splitting.hpp"

namespace qmono {

class solver_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Lattice covariant derivatives and Laplacian from cached transport links.
/// link(i, x) = w(h e_i; x) carries x to x + h e_i; the hops
///   [U(+h e_i) psi](x) = link(i, x - h e_i) psi(x - h e_i)
///   [U(-h e_i) psi](x) = link(i, x)* psi(x + h e_i)
/// are exactly adjoint to each other and commute with J, so the derivative is
/// anti-hermitian and the Laplacian hermitian on the Dirichlet box.
class LinkLattice {
 public:
  explicit LinkLattice(const LatticeSpec& spec) : spec_(spec), j_(spec.size()) {
    spec_.validate();
    const double h = spec_.step();
    for (int ax = 0; ax < 3; ++ax) links_[ax].assign(spec_.size(), Quaternion{});
    for (std::size_t idx = 0; idx < spec_.size(); ++idx) {
      const Vec3 x = spec_.site(idx);
      j_[idx] = dirq(x);
      const auto ijk = spec_.unpack(idx);
      for (int ax = 0; ax < 3; ++ax) {
        auto next = ijk;
        next[ax] += 1;
        if (spec_.contains(next[0], next[1], next[2])) links_[ax][idx] = transport(h * axis(ax), x);
      }
    }
  }

  const LatticeSpec& spec() const { return spec_; }

  LatticeField apply_j(const LatticeField& psi) const {
    LatticeField out(spec_);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = j_[i] * psi[i];
    return out;
  }

  /// (U(-h e_ax) - U(h e_ax)) psi / 2h.
  LatticeField derivative(int ax, const LatticeField& psi) const {
    LatticeField out(spec_);
    const double inv2h = 1.0 / (2.0 * spec_.step());
    const std::size_t stride = stride_of(ax);
    for (std::size_t idx = 0; idx < out.size(); ++idx) {
      const int c = spec_.unpack(idx)[ax];
      Quaternion acc{};
      if (c + 1 < spec_.n) acc += conj(links_[ax][idx]) * psi[idx + stride];
      if (c > 0) acc -= links_[ax][idx - stride] * psi[idx - stride];
      out[idx] = inv2h * acc;
    }
    return out;
  }

  /// -(1/2m) sum_i (U(-h e_i) + U(h e_i) - 2) psi / h^2.
  LatticeField apply_h(const LatticeField& psi, double mass) const {
    LatticeField out(spec_);
    const double h = spec_.step();
    const double scale = -1.0 / (2.0 * mass * h * h);
    const int n = spec_.n;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          const std::size_t idx = spec_.index(i, j, k);
          const int c[3] = {i, j, k};
          Quaternion acc = -6.0 * psi[idx];
          for (int ax = 0; ax < 3; ++ax) {
            const std::size_t stride = stride_of(ax);
            if (c[ax] + 1 < n) acc += conj(links_[ax][idx]) * psi[idx + stride];
            if (c[ax] > 0) acc += links_[ax][idx - stride] * psi[idx - stride];
          }
          out[idx] = scale * acc;
        }
    return out;
  }

  /// J H psi.
  LatticeField apply_jh(const LatticeField& psi, double mass) const { return apply_j(apply_h(psi, mass)); }

 private:
  std::size_t stride_of(int ax) const {
    return ax == 0 ? static_cast<std::size_t>(spec_.n) * spec_.n : (ax == 1 ? static_cast<std::size_t>(spec_.n) : 1);
  }

  LatticeSpec spec_;
  std::vector<Quaternion> j_;
  std::array<std::vector<Quaternion>, 3> links_;
};

struct Packet {
  Vec3 center{3.0, 0.0, 0.0};
  double width = 0.8;
  Vec3 momentum{};
};

struct EvolutionConfig {
  double mass = 1.0;
  double dt = 0.01;
  int steps = 100;
  LatticeSpec lattice{32, 6.0};
  Packet packet;
  double solver_tol = 1e-14;
  int max_iterations = 500;
  bool record_forces = true;

  void validate() const {
    if (!(mass > 0.0)) throw usage_error("evolution: mass must be positive");
    if (!(dt >= 0.0)) throw usage_error("evolution: dt must be nonnegative");
    if (steps < 0) throw usage_error("evolution: steps must be nonnegative");
    lattice.validate();
    const double margin = 3.0 * packet.width;
    if (!(packet.width > 0.0)) throw usage_error("evolution: packet width must be positive");
    if (norm(packet.center) < margin) throw usage_error("evolution: packet closer than 3 widths to the monopole");
    for (int k = 0; k < 3; ++k)
      if (lattice.half_width - std::abs(packet.center[k]) < margin)
        throw usage_error("evolution: packet closer than 3 widths to the box boundary");
  }
};

/// Unit quaternion q with q u q* = v for unit imaginary u, v.
inline Quaternion rotation_between(const Quaternion& u, const Quaternion& v) {
  Quaternion q = e0 - v * u;  // 1 + u·v + u x v
  const double n = norm(q);
  if (n > 1e-12) return q / n;
  // Antipodal: half turn about any axis orthogonal to u.
  Vec3 perp = cross(u.vec(), Vec3{1.0, 0.0, 0.0});
  if (norm(perp) < 1e-6) perp = cross(u.vec(), Vec3{0.0, 1.0, 0.0});
  return Quaternion::pure(perp / norm(perp));
}

/// Gaussian packet in the slice H_omega with a C_omega momentum phase:
///   psi(x) = g(x) w(x - x0; x0) q0 exp(omega p·(x - x0)),  q0 omega q0* = j(x0),
/// normalized to 1. The transport factor makes the section covariantly constant
/// along rays from x0; sites whose ray from x0 meets the origin are set to 0.
inline LatticeField make_packet(const LatticeSpec& spec, const Packet& p, const SliceSpec& slice) {
  const Quaternion q0 = rotation_between(slice.omega(), dirq(p.center));
  LatticeField psi(spec);
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const Vec3 x = spec.site(i);
    const Vec3 d = x - p.center;
    if (!transport_admissible(d, p.center)) continue;
    const double g = std::exp(-dot(d, d) / (2.0 * p.width * p.width));
    const Quaternion phase = qexp(slice.omega() * dot(p.momentum, d));
    psi[i] = g * (transport(d, p.center) * q0 * phase);
  }
  psi *= 1.0 / norm(psi);
  return psi;
}

struct SolverStats {
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Cayley stepper. Uses [H, J] = 0 and J^2 = -1:
///   (I + t JH)^{-1} (I - t JH) = (I + t^2 H^2)^{-1} (I - t JH)^2,  t = dt/2,
/// and solves the SPD system with conjugate gradients in the real inner product.
class Evolver {
 public:
  Evolver(const LatticeSpec& spec, double mass, double tol = 1e-14, int max_iterations = 500)
      : links_(spec), mass_(mass), tol_(tol), max_iterations_(max_iterations) {
    if (!(mass > 0.0)) throw usage_error("Evolver: mass must be positive");
  }

  const LinkLattice& links() const { return links_; }
  double mass() const { return mass_; }
  const SolverStats& last_solve() const { return stats_; }

  LatticeField step(const LatticeField& psi, double dt) const {
    if (dt == 0.0) return psi;
    const double t = 0.5 * dt;
    LatticeField y = psi - t * links_.apply_jh(psi, mass_);
    const LatticeField b = y - t * links_.apply_jh(y, mass_);
    return solve(b, psi, t);
  }

  /// Applies (I + t^2 H^2).
  LatticeField apply_system(const LatticeField& x, double t) const {
    return x + (t * t) * links_.apply_h(links_.apply_h(x, mass_), mass_);
  }

 private:
  LatticeField solve(const LatticeField& b, const LatticeField& guess, double t) const {
    LatticeField x = guess;
    LatticeField r = b - apply_system(x, t);
    LatticeField p = r;
    double rr = real_inner(r, r);
    const double bb = real_inner(b, b);
    const double target = tol_ * tol_ * bb;
    int it = 0;
    while (rr > target && it < max_iterations_) {
      const LatticeField ap = apply_system(p, t);
      const double alpha = rr / real_inner(p, ap);
      axpy(alpha, p, x);
      axpy(-alpha, ap, r);
      const double rr_new = real_inner(r, r);
      const double beta = rr_new / rr;
      rr = rr_new;
      for (std::size_t i = 0; i < p.size(); ++i) p[i] = r[i] + beta * p[i];
      ++it;
    }
    stats_.iterations = it;
    stats_.relative_residual = bb > 0.0 ? std::sqrt(rr / bb) : 0.0;
    if (rr > target) {
      // Recursive residuals can stall near round-off; accept if the true residual is small.
      const LatticeField true_r = b - apply_system(x, t);
      const double rel = std::sqrt(real_inner(true_r, true_r) / bb);
      stats_.relative_residual = rel;
      if (rel > 100.0 * tol_)
        throw solver_error("Cayley solve did not converge: relative residual " + std::to_string(rel) + " after " +
                           std::to_string(it) + " iterations");
    }
    return x;
  }

  static void axpy(double a, const LatticeField& x, LatticeField& y) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
  }

  LinkLattice links_;
  double mass_;
  double tol_;
  int max_iterations_;
  mutable SolverStats stats_;
};

/// Expectation values Re(psi, A psi) / (psi, psi).
class Observables {
 public:
  Observables(const LinkLattice& links, double mass) : links_(links), mass_(mass) {}

  Vec3 position(const LatticeField& psi) const {
    const LatticeSpec& spec = psi.spec();
    Vec3 acc;
    double nn = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
      const double w = norm2(psi[i]);
      acc += w * spec.site(i);
      nn += w;
    }
    return acc / nn;
  }

  /// V_i psi = -(J/m) nabla_i psi.
  LatticeField velocity_field(int ax, const LatticeField& psi) const {
    return (-1.0 / mass_) * links_.apply_j(links_.derivative(ax, psi));
  }

  Vec3 velocity(const LatticeField& psi) const {
    const double nn = real_inner(psi, psi);
    Vec3 v;
    for (int ax = 0; ax < 3; ++ax) v[ax] = real_inner(psi, velocity_field(ax, psi)) / nn;
    return v;
  }

  double energy(const LatticeField& psi) const {
    return real_inner(psi, links_.apply_h(psi, mass_)) / real_inner(psi, psi);
  }

  /// <(1/2m) eps_ijk (V_j B_k + B_k V_j)>: the symmetrized Lorentz force.
  Vec3 force(const LatticeField& psi) const { return force_impl(psi, false); }

  /// <(1/2m) eps_ijk (V_j B_k + B_j V_k)>: a commutator, so it has no classical part.
  Vec3 force_commutator_order(const LatticeField& psi) const { return force_impl(psi, true); }

 private:
  LatticeField multiply_b(int k, const LatticeField& psi) const {
    const LatticeSpec& spec = psi.spec();
    LatticeField out(spec);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = bfield(spec.site(i))[k] * psi[i];
    return out;
  }

  Vec3 force_impl(const LatticeField& psi, bool commutator_order) const {
    const double nn = real_inner(psi, psi);
    std::array<LatticeField, 3> v_psi;
    std::array<LatticeField, 3> b_psi;
    for (int k = 0; k < 3; ++k) {
      v_psi[k] = velocity_field(k, psi);
      b_psi[k] = multiply_b(k, psi);
    }
    Vec3 f;
    for (int i = 0; i < 3; ++i) {
      LatticeField acc(psi.spec());
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
          const int eps = levi_civita(i, j, k);
          if (eps == 0) continue;
          acc += static_cast<double>(eps) * velocity_field(j, b_psi[k]);
          if (commutator_order)
            acc += static_cast<double>(eps) * multiply_b(j, v_psi[k]);
          else
            acc += static_cast<double>(eps) * multiply_b(k, v_psi[j]);
        }
      f[i] = real_inner(psi, acc) / (2.0 * mass_ * nn);
    }
    return f;
  }

  const LinkLattice& links_;
  double mass_;
};

struct Trajectory {
  std::vector<double> time;
  std::vector<Vec3> position;
  std::vector<Vec3> velocity;
  std::vector<Vec3> force;
  std::vector<Vec3> force_commutator_order;
  std::vector<double> norm;
  std::vector<double> energy;
  double dt = 0.0;
  double mass = 1.0;

  std::size_t size() const { return time.size(); }
};

/// Trajectory CSV columns: t,x1,x2,x3,v1,v2,v3,norm,energy.
inline void write_csv(std::ostream& os, const Trajectory& traj) {
  const auto old_precision = os.precision(17);
  os << "t,x1,x2,x3,v1,v2,v3,norm,energy\n";
  for (std::size_t n = 0; n < traj.size(); ++n) {
    const Vec3& x = traj.position[n];
    const Vec3& v = traj.velocity[n];
    os << traj.time[n] << ',' << x.x1 << ',' << x.x2 << ',' << x.x3 << ',' << v.x1 << ',' << v.x2 << ',' << v.x3 << ','
       << traj.norm[n] << ',' << traj.energy[n] << '\n';
  }
  os.precision(old_precision);
}

struct EvolutionResult {
  Trajectory trajectory;
  LatticeField initial;
  LatticeField final_state;
  int max_solver_iterations = 0;
};

/// Runs cfg.steps Cayley steps from the configured packet, recording every step.
inline EvolutionResult evolve(const EvolutionConfig& cfg, const SliceSpec& slice = SliceSpec::standard()) {
  cfg.validate();
  const Evolver evolver(cfg.lattice, cfg.mass, cfg.solver_tol, cfg.max_iterations);
  const Observables obs(evolver.links(), cfg.mass);
  EvolutionResult result;
  result.initial = make_packet(cfg.lattice, cfg.packet, slice);
  Trajectory& traj = result.trajectory;
  traj.dt = cfg.dt;
  traj.mass = cfg.mass;
  LatticeField psi = result.initial;
  auto record = [&](int n) {
    traj.time.push_back(n * cfg.dt);
    traj.position.push_back(obs.position(psi));
    traj.velocity.push_back(obs.velocity(psi));
    traj.norm.push_back(norm(psi));
    traj.energy.push_back(obs.energy(psi));
    if (cfg.record_forces) {
      traj.force.push_back(obs.force(psi));
      traj.force_commutator_order.push_back(obs.force_commutator_order(psi));
    }
  };
  record(0);
  for (int n = 1; n <= cfg.steps; ++n) {
    psi = evolver.step(psi, cfg.dt);
    result.max_solver_iterations = std::max(result.max_solver_iterations, evolver.last_solve().iterations);
    record(n);
  }
  result.final_state = std::move(psi);
  return result;
}

/// Named starting points.
///   free:   far from the monopole, ballistic; velocity relation only
///   static: no kick, packet on the x1 axis
///   flyby:  kicked past the monopole at impact parameter 3; force relation included
inline EvolutionConfig preset(const std::string& name) {
  EvolutionConfig c;
  if (name == "free") {
    c.lattice = {32, 10.0};
    c.mass = 1.0;
    c.dt = 0.02;
    c.steps = 100;
    c.packet = {{-5.0, 5.0, 0.0}, 1.2, {1.0, 0.0, 0.0}};
    c.record_forces = false;
  } else if (name == "static") {
    c.lattice = {32, 6.0};
    c.mass = 1.0;
    c.dt = 0.01;
    c.steps = 50;
    c.packet = {{3.0, 0.0, 0.0}, 0.8, {0.0, 0.0, 0.0}};
    c.record_forces = false;
  } else if (name == "flyby") {
    c.lattice = {48, 8.0};
    c.mass = 3.0;
    c.dt = 0.02;
    c.steps = 250;
    c.packet = {{-4.0, 3.0, 0.0}, 1.2, {2.1, 0.0, 0.0}};
    c.record_forces = true;
  } else {
    throw usage_error("unknown preset '" + name + "' (expected free, static or flyby)");
  }
  return c;
}

struct EhrenfestTolerances {
  double velocity = 0.01;
  double force = 0.05;
  double norm = 1e-10;
  double interior_fraction = 0.1;  // trimmed from each end of the run
};

/// Compares finite-difference derivatives of <X> with the velocity and force
/// expectations. Deviations are relative to the largest predicted magnitude.
inline Report ehrenfest(const Trajectory& traj, const EhrenfestTolerances& tol = {}) {
  Report report;
  report.suite = "ehrenfest";
  report.n_samples = traj.size();
  const std::size_t n = traj.size();
  if (n < 3) {
    report.checks.push_back(Check::single("norm conservation", "|psi(t)| = |psi(0)|",
                                          n ? std::abs(traj.norm.back() - traj.norm.front()) : 0.0, tol.norm));
    return report;
  }
  std::size_t first = static_cast<std::size_t>(std::ceil(tol.interior_fraction * static_cast<double>(n)));
  first = std::max<std::size_t>(first, 1);
  const std::size_t last = n - first;  // exclusive
  const double dt = traj.dt;

  double v_scale = 0.0;
  double f_scale = 0.0;
  double v_dev = 0.0;
  double f_dev = 0.0;
  std::string v_where;
  std::string f_where;
  for (std::size_t k = first; k < last; ++k) {
    const Vec3 dx = (traj.position[k + 1] - traj.position[k - 1]) / (2.0 * dt);
    const Vec3 ddx = (traj.position[k + 1] - 2.0 * traj.position[k] + traj.position[k - 1]) / (dt * dt);
    v_scale = std::max(v_scale, norm(traj.velocity[k]));
    const double dv = norm(dx - traj.velocity[k]);
    if (dv >= v_dev) {
      v_dev = dv;
      v_where = "t = " + std::to_string(traj.time[k]);
    }
    if (!traj.force.empty()) {
      f_scale = std::max(f_scale, norm(traj.force[k]));
      const double df = norm(ddx - traj.force[k]);
      if (df >= f_dev) {
        f_dev = df;
        f_where = "t = " + std::to_string(traj.time[k]);
      }
    }
  }
  report.checks.push_back(Check::single("velocity: d<X>/dt vs <-(J/m)∇>", "dX_i/dt = -(J/m) ∇_i",
                                        v_scale > 0.0 ? v_dev / v_scale : v_dev, tol.velocity, v_where));
  if (!traj.force.empty())
    report.checks.push_back(Check::single("force: d²<X>/dt² vs symmetrized Lorentz force",
                                          "d²X_i/dt² = (1/2m) eps_ijk (V_j B_k + B_k V_j)",
                                          f_scale > 0.0 ? f_dev / f_scale : f_dev, tol.force, f_where));
  double norm_dev = 0.0;
  for (double v : traj.norm) norm_dev = std::max(norm_dev, std::abs(v - traj.norm.front()));
  report.checks.push_back(Check::single("norm conservation", "|psi(t)| = |psi(0)|", norm_dev, tol.norm));
  return report;
}

}  // namespace qmono
