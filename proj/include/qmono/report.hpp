#pragma once

// Verification records. A Check aggregates deviations of one identity over a
// sample set; a Report groups the checks of one suite and serializes to JSON:
//   {suite, seed, n_samples, checks: [{name, paper_ref, max_dev, mean_dev, tol, pass, worst}]}
// plus an optional top-level "timestamp" that is the only non-reproducible field.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <functional>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace qmono {

/// Running max/mean of nonnegative deviations; NaN counts as +inf.
class DeviationStats {
 public:
  void add(double dev, const std::string& where = {}) {
    if (std::isnan(dev)) dev = std::numeric_limits<double>::infinity();
    ++count_;
    sum_ += dev;
    if (count_ == 1 || dev > max_) {
      max_ = dev;
      worst_ = where;
    }
  }
  void add(double dev, const std::function<std::string()>& where) {
    if (std::isnan(dev) || count_ == 0 || dev > max_) {
      add(dev, where());
    } else {
      add(dev, std::string{});
    }
  }

  std::size_t count() const { return count_; }
  double max() const { return max_; }
  double mean() const { return count_ ? sum_ / static_cast<double>(count_) : 0.0; }
  const std::string& worst() const { return worst_; }

 private:
  std::size_t count_ = 0;
  double sum_ = 0.0;
  double max_ = 0.0;
  std::string worst_;
};

struct Check {
  std::string name;
  std::string paper_ref;  // the identity being checked, as a formula
  double max_dev = 0.0;
  double mean_dev = 0.0;
  double tol = 0.0;
  bool pass = false;
  std::string worst;

  static Check from_stats(std::string name, std::string identity, const DeviationStats& s, double tol) {
    Check c{std::move(name), std::move(identity), s.max(), s.mean(), tol, false, s.worst()};
    c.pass = s.count() > 0 && s.max() <= tol;
    return c;
  }
  static Check single(std::string name, std::string identity, double dev, double tol, std::string worst = {}) {
    DeviationStats s;
    s.add(dev, worst);
    return from_stats(std::move(name), std::move(identity), s, tol);
  }
};

struct Report {
  std::string suite;
  std::uint64_t seed = 0;
  std::size_t n_samples = 0;
  std::vector<Check> checks;

  bool passed() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return !checks.empty();
  }

  /// Failing check with the largest max_dev / tol, or nullptr.
  const Check* worst_failure() const {
    const Check* worst = nullptr;
    double ratio = -1.0;
    for (const auto& c : checks) {
      if (c.pass) continue;
      const double r = c.tol > 0.0 ? c.max_dev / c.tol : std::numeric_limits<double>::infinity();
      if (worst == nullptr || r > ratio) {
        worst = &c;
        ratio = r;
      }
    }
    return worst;
  }

  void append(const Report& other) {
    for (const auto& c : other.checks) checks.push_back(c);
    n_samples += other.n_samples;
  }

  nlohmann::ordered_json to_json(bool with_timestamp = false) const {
    nlohmann::ordered_json j;
    j["suite"] = suite;
    j["seed"] = seed;
    j["n_samples"] = n_samples;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
      nlohmann::ordered_json e;
      e["name"] = c.name;
      e["paper_ref"] = c.paper_ref;
      e["max_dev"] = finite_or_string(c.max_dev);
      e["mean_dev"] = finite_or_string(c.mean_dev);
      e["tol"] = c.tol;
      e["pass"] = c.pass;
      e["worst"] = c.worst;
      arr.push_back(std::move(e));
    }
    j["checks"] = std::move(arr);
    j["pass"] = passed();
    if (with_timestamp) j["timestamp"] = utc_timestamp();
    return j;
  }

  std::string to_text() const {
    std::ostringstream os;
    os << "suite " << suite << " (seed " << seed << ", " << n_samples << " samples)\n";
    for (const auto& c : checks) {
      os << "  [" << (c.pass ? "PASS" : "FAIL") << "] " << std::left << std::setw(44) << c.name
         << " max " << std::scientific << std::setprecision(3) << c.max_dev << "  mean " << c.mean_dev
         << "  tol " << c.tol << std::defaultfloat << "\n";
    }
    return os.str();
  }

 private:
  static nlohmann::ordered_json finite_or_string(double v) {
    if (std::isfinite(v)) return v;
    return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  }

  static std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
  }
};

}  // namespace qmono
