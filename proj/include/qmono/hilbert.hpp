#pragma once

// The quaternionic Hilbert space L^2(R^3; H) with scalars acting from the right,
// in two representations: analytic fields (callables) and cell-centered lattice
// fields. Inner products are conjugate-linear in the first slot.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <functional>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "quaternion.hpp"
#include "vec3.hpp"

namespace qmono {

using AnalyticField = std::function<Quaternion(const Vec3&)>;
using PointSymbol = std::function<Quaternion(const Vec3&)>;

/// n^3 cell-centered sites covering [-L, L]^3 with spacing h = 2L/n. With n even
/// every coordinate is an odd multiple of L/n, so the origin is never sampled.
struct LatticeSpec {
  int n = 32;
  double half_width = 6.0;

  void validate() const {
    if (n < 4) throw usage_error("LatticeSpec: n must be >= 4");
    if (n % 2 != 0) throw usage_error("LatticeSpec: n must be even so the origin is not a site");
    if (!(half_width > 0.0)) throw usage_error("LatticeSpec: half-width must be positive");
  }

  double step() const { return 2.0 * half_width / n; }
  double cell_volume() const {
    const double h = step();
    return h * h * h;
  }
  std::size_t size() const { return static_cast<std::size_t>(n) * n * n; }
  double coordinate(int i) const { return -half_width + (i + 0.5) * step(); }

  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * n + j) * n + k;
  }
  std::array<int, 3> unpack(std::size_t idx) const {
    const int k = static_cast<int>(idx % n);
    const int j = static_cast<int>((idx / n) % n);
    const int i = static_cast<int>(idx / (static_cast<std::size_t>(n) * n));
    return {i, j, k};
  }
  Vec3 site(std::size_t idx) const {
    const auto [i, j, k] = unpack(idx);
    return {coordinate(i), coordinate(j), coordinate(k)};
  }
  bool contains(int i, int j, int k) const { return i >= 0 && i < n && j >= 0 && j < n && k >= 0 && k < n; }

  friend bool operator==(const LatticeSpec&, const LatticeSpec&) = default;
};

class LatticeField {
 public:
  LatticeField() = default;
  explicit LatticeField(const LatticeSpec& spec) : spec_(spec), values_(spec.size()) { spec_.validate(); }
  LatticeField(const LatticeSpec& spec, std::vector<Quaternion> values) : spec_(spec), values_(std::move(values)) {
    spec_.validate();
    if (values_.size() != spec_.size()) throw usage_error("LatticeField: value count does not match lattice");
  }

  const LatticeSpec& spec() const { return spec_; }
  std::size_t size() const { return values_.size(); }
  std::span<const Quaternion> values() const { return values_; }
  std::span<Quaternion> values() { return values_; }

  const Quaternion& operator[](std::size_t i) const { return values_[i]; }
  Quaternion& operator[](std::size_t i) { return values_[i]; }

  LatticeField& operator+=(const LatticeField& o) {
    require_same_lattice(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
  }
  LatticeField& operator-=(const LatticeField& o) {
    require_same_lattice(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
  }
  LatticeField& operator*=(double s) {
    for (auto& v : values_) v = s * v;
    return *this;
  }
  friend LatticeField operator+(LatticeField a, const LatticeField& b) { return a += b; }
  friend LatticeField operator-(LatticeField a, const LatticeField& b) { return a -= b; }
  friend LatticeField operator*(double s, LatticeField a) { return a *= s; }

  /// Bit-level equality (signed zeros compare equal).
  friend bool operator==(const LatticeField& a, const LatticeField& b) {
    return a.spec_ == b.spec_ && a.values_ == b.values_;
  }

  void require_same_lattice(const LatticeField& o) const {
    if (!(spec_ == o.spec_)) throw usage_error("lattice fields live on different lattices");
  }

 private:
  LatticeSpec spec_;
  std::vector<Quaternion> values_;
};

/// Samples an analytic field at every site.
inline LatticeField sample(const LatticeSpec& spec, const AnalyticField& psi) {
  LatticeField out(spec);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = psi(spec.site(i));
  return out;
}

/// (phi, psi) = sum_x h^3 phi(x)* psi(x).
inline Quaternion inner(const LatticeField& phi, const LatticeField& psi) {
  phi.require_same_lattice(psi);
  Quaternion acc{};
  for (std::size_t i = 0; i < phi.size(); ++i) acc += conj(phi[i]) * psi[i];
  return phi.spec().cell_volume() * acc;
}

/// Inner product of analytic fields on a shared quadrature lattice.
inline Quaternion inner(const AnalyticField& phi, const AnalyticField& psi, const LatticeSpec& grid) {
  return inner(sample(grid, phi), sample(grid, psi));
}

/// Real part of (phi, psi): the real inner product on the underlying R^{4N}.
inline double real_inner(const LatticeField& phi, const LatticeField& psi) {
  phi.require_same_lattice(psi);
  double acc = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i)
    acc += phi[i].q0 * psi[i].q0 + phi[i].q1 * psi[i].q1 + phi[i].q2 * psi[i].q2 + phi[i].q3 * psi[i].q3;
  return phi.spec().cell_volume() * acc;
}

inline double norm(const LatticeField& psi) { return std::sqrt(real_inner(psi, psi)); }

/// Largest pointwise |a(x) - b(x)|.
inline double max_deviation(const LatticeField& a, const LatticeField& b) {
  a.require_same_lattice(b);
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, norm(a[i] - b[i]));
  return d;
}

/// [psi q](x) = psi(x) q.
inline LatticeField rscale(LatticeField psi, const Quaternion& q) {
  for (auto& v : psi.values()) v = v * q;
  return psi;
}

inline AnalyticField rscale(AnalyticField psi, const Quaternion& q) {
  return [psi = std::move(psi), q](const Vec3& x) { return psi(x) * q; };
}

/// Pointwise left multiplication (f^ psi)(x) = f(x) psi(x).
inline LatticeField multop(const PointSymbol& f, LatticeField psi) {
  const LatticeSpec& spec = psi.spec();
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = f(spec.site(i)) * psi[i];
  return psi;
}

inline AnalyticField multop(PointSymbol f, AnalyticField psi) {
  return [f = std::move(f), psi = std::move(psi)](const Vec3& x) { return f(x) * psi(x); };
}

/// Half-open axis-aligned box [lo, hi).
struct Box {
  Vec3 lo;
  Vec3 hi;

  bool contains(const Vec3& x) const {
    for (int a = 0; a < 3; ++a)
      if (!(x[a] >= lo[a] && x[a] < hi[a])) return false;
    return true;
  }
  bool empty() const {
    for (int a = 0; a < 3; ++a)
      if (!(lo[a] < hi[a])) return true;
    return false;
  }
};

/// Finite union of boxes: the Borel sets used for the spectral family.
class BorelSet {
 public:
  BorelSet() = default;
  explicit BorelSet(std::vector<Box> boxes) {
    for (auto& b : boxes)
      if (!b.empty()) boxes_.push_back(b);
  }
  static BorelSet box(const Vec3& lo, const Vec3& hi) { return BorelSet({Box{lo, hi}}); }
  /// A box containing every site of the lattice.
  static BorelSet whole(const LatticeSpec& spec) {
    const double l = spec.half_width;
    return box({-l, -l, -l}, {l, l, l});
  }

  bool contains(const Vec3& x) const {
    return std::any_of(boxes_.begin(), boxes_.end(), [&](const Box& b) { return b.contains(x); });
  }

  const std::vector<Box>& boxes() const { return boxes_; }

  BorelSet translated(const Vec3& a) const {
    std::vector<Box> out;
    for (const auto& b : boxes_) out.push_back({b.lo + a, b.hi + a});
    return BorelSet(std::move(out));
  }

  friend BorelSet intersect(const BorelSet& s, const BorelSet& t) {
    std::vector<Box> out;
    for (const auto& b : s.boxes_)
      for (const auto& c : t.boxes_) {
        Box d;
        for (int a = 0; a < 3; ++a) {
          d.lo[a] = std::max(b.lo[a], c.lo[a]);
          d.hi[a] = std::min(b.hi[a], c.hi[a]);
        }
        out.push_back(d);
      }
    return BorelSet(std::move(out));
  }

 private:
  std::vector<Box> boxes_;
};

/// [E(delta) psi](x) = chi_delta(x) psi(x).
inline LatticeField project(const BorelSet& delta, LatticeField psi) {
  const LatticeSpec& spec = psi.spec();
  for (std::size_t i = 0; i < psi.size(); ++i)
    if (!delta.contains(spec.site(i))) psi[i] = Quaternion{};
  return psi;
}

// Serialization. CSV: a "# qmono-lattice n=<n> L=<L>" line, a header
// "index,q0,q1,q2,q3", then one row per site in index order. Binary: the bytes
// "QMLF", uint32 version 1, int32 n, float64 L, then 4 n^3 float64 values (q0..q3
// per site in index order), all little-endian.

inline void write_csv(std::ostream& os, const LatticeField& psi) {
  const auto old_precision = os.precision(17);
  os << "# qmono-lattice n=" << psi.spec().n << " L=" << psi.spec().half_width << "\n";
  os << "index,q0,q1,q2,q3\n";
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const Quaternion& q = psi[i];
    os << i << ',' << q.q0 << ',' << q.q1 << ',' << q.q2 << ',' << q.q3 << '\n';
  }
  os.precision(old_precision);
}

inline LatticeField read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# qmono-lattice", 0) != 0) throw usage_error("read_csv: missing lattice line");
  LatticeSpec spec;
  if (std::sscanf(line.c_str(), "# qmono-lattice n=%d L=%lf", &spec.n, &spec.half_width) != 2)
    throw usage_error("read_csv: malformed lattice line");
  LatticeField psi(spec);
  if (!std::getline(is, line) || line != "index,q0,q1,q2,q3") throw usage_error("read_csv: missing header");
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    unsigned long long idx = 0;
    Quaternion q;
    if (std::sscanf(line.c_str(), "%llu,%lf,%lf,%lf,%lf", &idx, &q.q0, &q.q1, &q.q2, &q.q3) != 5 ||
        idx >= psi.size())
      throw usage_error("read_csv: malformed row: " + line);
    psi[idx] = q;
    ++rows;
  }
  if (rows != psi.size()) throw usage_error("read_csv: row count does not match lattice");
  return psi;
}

namespace detail {

template <class T>
void put_le(std::ostream& os, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
  unsigned char bytes[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw usage_error("read_binary: truncated stream");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace detail

inline void write_binary(std::ostream& os, const LatticeField& psi) {
  os.write("QMLF", 4);
  detail::put_le<std::uint32_t>(os, 1);
  detail::put_le<std::int32_t>(os, psi.spec().n);
  detail::put_le<double>(os, psi.spec().half_width);
  for (const auto& q : psi.values())
    for (int mu = 0; mu < 4; ++mu) detail::put_le<double>(os, q[mu]);
}

inline LatticeField read_binary(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::string(magic, 4) != "QMLF") throw usage_error("read_binary: bad magic");
  if (detail::get_le<std::uint32_t>(is) != 1) throw usage_error("read_binary: unsupported version");
  LatticeSpec spec;
  spec.n = detail::get_le<std::int32_t>(is);
  spec.half_width = detail::get_le<double>(is);
  LatticeField psi(spec);
  for (auto& q : psi.values()) {
    q.q0 = detail::get_le<double>(is);
    q.q1 = detail::get_le<double>(is);
    q.q2 = detail::get_le<double>(is);
    q.q3 = detail::get_le<double>(is);
  }
  return psi;
}

}  // namespace qmono
