#ifndef PDMTORUS_NUMERICS_TRAJECTORY_HPP
#define PDMTORUS_NUMERICS_TRAJECTORY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pdmtorus/errors.hpp"

namespace pdmtorus::numerics {

/// Time-ordered state samples. States are stored row-major in one buffer;
/// diagnostics are named series with one value per sample.
class Trajectory {
 public:
  explicit Trajectory(std::size_t dimension) : dim_(dimension) {
    if (dimension == 0) throw InvalidArgument("trajectory dimension must be positive");
  }

  void reserve(std::size_t samples) {
    times_.reserve(samples);
    data_.reserve(samples * dim_);
  }

  void push_back(double t, std::span<const double> state) {
    if (state.size() != dim_) throw InvalidArgument("state dimension mismatch");
    if (!times_.empty() && !(t > times_.back())) throw InvalidArgument("trajectory times must increase");
    times_.push_back(t);
    data_.insert(data_.end(), state.begin(), state.end());
  }

  std::size_t size() const noexcept { return times_.size(); }
  bool empty() const noexcept { return times_.empty(); }
  std::size_t dimension() const noexcept { return dim_; }

  std::span<const double> times() const noexcept { return times_; }
  double time(std::size_t i) const { return times_[i]; }

  std::span<const double> state(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
  std::span<const double> back() const { return state(size() - 1); }

  /// Component `c` of every state, copied out.
  std::vector<double> component(std::size_t c) const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < size(); ++i) out[i] = data_[i * dim_ + c];
    return out;
  }

  void set_diagnostic(const std::string& name, std::vector<double> values) {
    if (values.size() != size()) throw InvalidArgument("diagnostic '" + name + "' has wrong length");
    diagnostics_[name] = std::move(values);
  }

  bool has_diagnostic(const std::string& name) const { return diagnostics_.count(name) != 0; }

  const std::vector<double>& diagnostic(const std::string& name) const {
    auto it = diagnostics_.find(name);
    if (it == diagnostics_.end()) throw InvalidArgument("no diagnostic named '" + name + "'");
    return it->second;
  }

  const std::map<std::string, std::vector<double>>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::size_t dim_;
  std::vector<double> times_;
  std::vector<double> data_;
  std::map<std::string, std::vector<double>> diagnostics_;
};

/// max - min of a series.
inline double peak_to_peak(std::span<const double> series) {
  if (series.empty()) return 0.0;
  auto [lo, hi] = std::minmax_element(series.begin(), series.end());
  return *hi - *lo;
}

/// max_i |s_i - s_0| / |s_0|; falls back to the absolute drift when s_0 == 0.
inline double relative_drift(std::span<const double> series) {
  if (series.empty()) return 0.0;
  const double ref = series.front();
  double worst = 0.0;
  for (double s : series) worst = std::max(worst, std::abs(s - ref));
  return ref != 0.0 ? worst / std::abs(ref) : worst;
}

}  // namespace pdmtorus::numerics

#endif  // PDMTORUS_NUMERICS_TRAJECTORY_HPP
