#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "soen/errors.hpp"

// Plug-in mutual information between a discrete stimulus ensemble and binned
// response rates, and the dynamic range of a transfer curve.

namespace soen {

class JointHistogram {
 public:
  JointHistogram(std::size_t stimulus_bins, std::size_t response_bins)
      : n_s_(stimulus_bins), n_r_(response_bins), counts_(stimulus_bins * response_bins, 0) {
    if (n_s_ == 0 || n_r_ == 0) throw DomainError("histogram needs at least one bin per axis");
  }

  // Row-major table, one row per stimulus.
  static JointHistogram from_table(const std::vector<std::vector<std::uint64_t>>& rows) {
    if (rows.empty() || rows.front().empty()) throw DomainError("empty count table");
    JointHistogram h(rows.size(), rows.front().size());
    for (std::size_t s = 0; s < rows.size(); ++s) {
      if (rows[s].size() != h.n_r_) throw DomainError("ragged count table");
      for (std::size_t r = 0; r < h.n_r_; ++r) h.at(s, r) = rows[s][r];
    }
    return h;
  }

  // Bins (stimulus index, response value) samples; responses are assigned to
  // half-open bins [edges[k], edges[k+1]), the last bin closed on the right.
  static JointHistogram from_samples(std::size_t stimulus_count, const std::vector<double>& response_edges,
                                     const std::vector<std::pair<std::size_t, double>>& samples) {
    if (response_edges.size() < 2 || !std::is_sorted(response_edges.begin(), response_edges.end()))
      throw DomainError("response edges must be sorted with at least two entries");
    JointHistogram h(stimulus_count, response_edges.size() - 1);
    for (const auto& [s, value] : samples) {
      if (s >= stimulus_count) throw DomainError("stimulus index out of range");
      if (value < response_edges.front() || value > response_edges.back()) continue;
      auto it = std::upper_bound(response_edges.begin(), response_edges.end(), value);
      auto bin = static_cast<std::size_t>(std::distance(response_edges.begin(), it)) - 1;
      bin = std::min(bin, h.n_r_ - 1);
      ++h.at(s, bin);
    }
    return h;
  }

  std::size_t stimulus_bins() const { return n_s_; }
  std::size_t response_bins() const { return n_r_; }
  std::uint64_t& at(std::size_t s, std::size_t r) { return counts_[s * n_r_ + r]; }
  std::uint64_t at(std::size_t s, std::size_t r) const { return counts_[s * n_r_ + r]; }

  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (auto c : counts_) t += c;
    return t;
  }
  std::vector<std::uint64_t> stimulus_marginal() const {
    std::vector<std::uint64_t> m(n_s_, 0);
    for (std::size_t s = 0; s < n_s_; ++s)
      for (std::size_t r = 0; r < n_r_; ++r) m[s] += at(s, r);
    return m;
  }
  std::vector<std::uint64_t> response_marginal() const {
    std::vector<std::uint64_t> m(n_r_, 0);
    for (std::size_t s = 0; s < n_s_; ++s)
      for (std::size_t r = 0; r < n_r_; ++r) m[r] += at(s, r);
    return m;
  }

 private:
  std::size_t n_s_;
  std::size_t n_r_;
  std::vector<std::uint64_t> counts_;
};

namespace detail {
inline double entropy_bits(const std::vector<std::uint64_t>& counts, double total) {
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / total;
    h -= p * std::log2(p);
  }
  return h;
}
}  // namespace detail

inline double stimulus_entropy_bits(const JointHistogram& h) {
  const auto total = static_cast<double>(h.total());
  if (total == 0) throw DomainError("empty histogram");
  return detail::entropy_bits(h.stimulus_marginal(), total);
}

inline double response_entropy_bits(const JointHistogram& h) {
  const auto total = static_cast<double>(h.total());
  if (total == 0) throw DomainError("empty histogram");
  return detail::entropy_bits(h.response_marginal(), total);
}

// sum_s sum_r P[s] P[r|s] log2(P[r|s] / P[r]); 0 log 0 terms vanish.
inline double mutual_information_bits(const JointHistogram& h) {
  const std::uint64_t total = h.total();
  if (total == 0) throw DomainError("mutual information of an empty histogram");
  const auto n = static_cast<double>(total);
  const auto ps = h.stimulus_marginal();
  const auto pr = h.response_marginal();
  double info = 0.0;
  for (std::size_t s = 0; s < h.stimulus_bins(); ++s) {
    if (ps[s] == 0) continue;
    const double p_s = static_cast<double>(ps[s]) / n;
    for (std::size_t r = 0; r < h.response_bins(); ++r) {
      const auto c = h.at(s, r);
      if (c == 0) continue;
      const double p_r_given_s = static_cast<double>(c) / static_cast<double>(ps[s]);
      const double p_r = static_cast<double>(pr[r]) / n;
      info += p_s * p_r_given_s * std::log2(p_r_given_s / p_r);
    }
  }
  // Rounding can leave -1e-17 for independent tables.
  return std::max(0.0, info);
}

struct DynamicRangeOptions {
  double turn_on_fraction = 0.05;
  double saturation_fraction = 0.95;
};

struct DynamicRange {
  double turn_on_input = 0.0;     // last input still at or below the turn-on level
  double saturation_input = 0.0;  // first input at or above the saturation level
  double bits = 0.0;              // log2(saturation - turn-on)
};

// Dynamic range of a transfer curve sampled at increasing inputs. Levels are
// fractions of the output span (max - min).
inline DynamicRange dynamic_range(const std::vector<std::pair<double, double>>& curve,
                                  const DynamicRangeOptions& options = {}) {
  if (curve.size() < 2) throw DomainError("transfer curve needs at least two points");
  double lo = curve.front().second;
  double hi = lo;
  for (const auto& [x, y] : curve) {
    lo = std::min(lo, y);
    hi = std::max(hi, y);
  }
  const double span = hi - lo;
  if (!(span > 0.0)) throw DomainError("flat transfer curve has no dynamic range");
  const double on_level = lo + options.turn_on_fraction * span;
  const double sat_level = lo + options.saturation_fraction * span;

  DynamicRange dr;
  std::size_t sat_index = curve.size() - 1;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (curve[i].second >= sat_level) {
      sat_index = i;
      break;
    }
  }
  std::size_t on_index = 0;
  for (std::size_t i = 0; i <= sat_index; ++i) {
    if (curve[i].second <= on_level) on_index = i;
  }
  if (on_index == sat_index && on_index > 0) --on_index;
  dr.turn_on_input = curve[on_index].first;
  dr.saturation_input = curve[sat_index].first;
  const double width = dr.saturation_input - dr.turn_on_input;
  if (!(width > 0.0)) throw DomainError("transfer curve inputs must increase");
  dr.bits = std::log2(width);
  return dr;
}

// Firing rate (events per second) of every neuron over [t0_ns, t1_ns).
template <typename Record>
std::vector<double> firing_rates_hz(const std::vector<Record>& trace, std::size_t n_neurons, double t0_ns,
                                    double t1_ns) {
  if (!(t1_ns > t0_ns)) throw DomainError("rate window must have positive length");
  std::vector<double> rates(n_neurons, 0.0);
  for (const auto& rec : trace) {
    if (rec.neuron < n_neurons && rec.t_ns >= t0_ns && rec.t_ns < t1_ns) rates[rec.neuron] += 1.0;
  }
  for (auto& r : rates) r /= (t1_ns - t0_ns) * 1e-9;
  return rates;
}

}  // namespace soen
