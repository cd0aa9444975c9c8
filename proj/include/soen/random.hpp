#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <random>
#include <thread>
#include <vector>

// Seed-stream derivation and a deterministic parallel trial runner.
//
// Every Monte Carlo trial t draws from its own engine seeded by
// derive_seed(seed, t). Per-trial results are stored by index and reduced in
// index order, so output is bit-identical for any worker count.

namespace soen::random {

using Engine = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed) { return splitmix64(seed); }

template <typename... Rest>
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index, Rest... rest) {
  return derive_seed(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL), rest...);
}

template <typename... Indices>
inline Engine stream(std::uint64_t seed, Indices... indices) {
  return Engine(derive_seed(seed, static_cast<std::uint64_t>(indices)...));
}

// Uniform double in [0, 1) from the top 53 bits; independent of the
// standard library's distribution implementation.
inline double uniform01(Engine& engine) { return static_cast<double>(engine() >> 11) * 0x1.0p-53; }

inline unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

// Evaluates fn(t) for t in [0, n) on up to `workers` threads and returns the
// results in index order. The first worker exception (by worker index) is
// rethrown after all threads have joined.
template <typename Fn>
auto parallel_map(std::uint64_t n, unsigned workers, Fn&& fn) {
  using Result = decltype(fn(std::uint64_t{0}));
  std::vector<Result> out(n);
  workers = std::max(1u, workers);
  if (workers == 1 || n < 2) {
    for (std::uint64_t t = 0; t < n; ++t) out[t] = fn(t);
    return out;
  }
  const auto n_threads = static_cast<unsigned>(std::min<std::uint64_t>(workers, n));
  std::vector<std::exception_ptr> errors(n_threads);
  std::vector<std::jthread> pool;
  pool.reserve(n_threads);
  for (unsigned w = 0; w < n_threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::uint64_t t = w; t < n; t += n_threads) out[t] = fn(t);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  pool.clear();  // joins
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

// Number of trials in [0, n) for which trial(engine, t) returns true.
template <typename Trial>
std::uint64_t count_successes(std::uint64_t n, std::uint64_t seed, unsigned workers, Trial&& trial) {
  const auto hits = parallel_map(n, workers, [&](std::uint64_t t) -> std::uint8_t {
    auto engine = stream(seed, t);
    return trial(engine, t) ? 1 : 0;
  });
  std::uint64_t total = 0;
  for (auto h : hits) total += h;
  return total;
}

}  // namespace soen::random
