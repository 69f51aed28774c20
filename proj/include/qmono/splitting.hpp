#pragma once

// Reduction to the complex slice H_omega = {psi : J psi = psi omega} and the
// splitting psi = psi1 + psi2 omega~ onto H_omega (+) H_omega.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "geometry.hpp"
#include "hilbert.hpp"
#include "operators.hpp"
#include "report.hpp"

namespace qmono {

/// An anticommuting pair of imaginary units (omega, omega~).
class SliceSpec {
 public:
  SliceSpec(const ImaginaryUnit& omega, const ImaginaryUnit& omega_tilde) : omega_(omega), omega_tilde_(omega_tilde) {
    const Quaternion anti = omega_tilde_.value() * omega_.value() + omega_.value() * omega_tilde_.value();
    if (norm(anti) > 1e-12) throw usage_error("SliceSpec: omega~ must anticommute with omega");
  }

  /// omega = e3, omega~ = e1.
  static SliceSpec standard() {
    return {ImaginaryUnit::from_vector({0.0, 0.0, 1.0}), ImaginaryUnit::from_vector({1.0, 0.0, 0.0})};
  }

  const Quaternion& omega() const { return omega_.value(); }
  const Quaternion& omega_tilde() const { return omega_tilde_.value(); }

 private:
  ImaginaryUnit omega_;
  ImaginaryUnit omega_tilde_;
};

struct SplitPair {
  LatticeField psi1;
  LatticeField psi2;
};

/// psi1 = (psi - J psi omega)/2, psi2 = -(psi + J psi omega) omega~ / 2.
inline SplitPair split(const LatticeField& psi, const SliceSpec& s) {
  const LatticeSpec& spec = psi.spec();
  SplitPair out{LatticeField(spec), LatticeField(spec)};
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const Quaternion jpw = dirq(spec.site(i)) * psi[i] * s.omega();
    out.psi1[i] = 0.5 * (psi[i] - jpw);
    out.psi2[i] = -0.5 * ((psi[i] + jpw) * s.omega_tilde());
  }
  return out;
}

/// psi1 + psi2 omega~.
inline LatticeField reconstruct(const SplitPair& p, const SliceSpec& s) {
  return p.psi1 + rscale(p.psi2, s.omega_tilde());
}

struct SliceResidual {
  double max_residual = 0.0;       // max_x |(J psi)(x) - psi(x) omega|
  double relative_residual = 0.0;  // max_residual / max_x |psi(x)|
  bool in_slice = false;
};

inline SliceResidual in_slice(const LatticeField& psi, const SliceSpec& s, double tol = 1e-12) {
  const LatticeSpec& spec = psi.spec();
  SliceResidual r;
  double scale = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    r.max_residual = std::max(r.max_residual, norm(dirq(spec.site(i)) * psi[i] - psi[i] * s.omega()));
    scale = std::max(scale, norm(psi[i]));
  }
  r.relative_residual = scale > 0.0 ? r.max_residual / scale : r.max_residual;
  r.in_slice = r.relative_residual <= tol;
  return r;
}

/// Applies `op` to each slice member and reports the relative slice residual of
/// the image. Operators commuting with J keep the residual at the input level.
inline Report reduce_check(const Operator& op, const SliceSpec& s, std::span<const LatticeField> members, double tol) {
  Report report;
  report.suite = "reduce";
  report.n_samples = members.size();
  DeviationStats before;
  DeviationStats after;
  for (std::size_t k = 0; k < members.size(); ++k) {
    before.add(in_slice(members[k], s).relative_residual, "member " + std::to_string(k));
    after.add(in_slice(op.apply(members[k]), s).relative_residual, "member " + std::to_string(k));
  }
  report.checks.push_back(Check::from_stats("input slice residual", "J psi = psi omega", before, tol));
  report.checks.push_back(
      Check::from_stats("slice residual after " + op.name(), "J (A psi) = (A psi) omega", after, tol));
  return report;
}

}  // namespace qmono
