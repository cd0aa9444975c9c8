#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "soen/errors.hpp"
#include "soen/network.hpp"

// Event-trace export.
//
// CSV: header "t_ns,neuron_id,photons_out", numbers with 9 significant digits.
//
// Binary: the 8-byte magic "SOENTRC1", a little-endian u64 record count, then
// one 16-byte record per event: u64 time in picoseconds, u32 neuron id, u32
// photon count, all little-endian.

namespace soen {

inline std::string format_number(double v) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.9g", v);
  return buf.data();
}

inline void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace) {
  out << "t_ns,neuron_id,photons_out\n";
  for (const auto& r : trace) out << format_number(r.t_ns) << ',' << r.neuron << ',' << r.photons_out << '\n';
}

inline constexpr char kTraceMagic[8] = {'S', 'O', 'E', 'N', 'T', 'R', 'C', '1'};

namespace detail {
template <typename T>
void put_le(std::ostream& out, T v) {
  std::array<char, sizeof(T)> bytes{};
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff);
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) throw IoError("truncated binary trace");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return static_cast<T>(v);
}
}  // namespace detail

inline std::uint64_t trace_time_ps(double t_ns) {
  if (!(t_ns >= 0.0) || t_ns * 1e3 >= 1.8e19) throw DomainError("trace time not representable in picoseconds");
  return static_cast<std::uint64_t>(std::llround(t_ns * 1e3));
}

inline void write_trace_binary(std::ostream& out, const std::vector<TraceRecord>& trace) {
  out.write(kTraceMagic, sizeof kTraceMagic);
  detail::put_le<std::uint64_t>(out, trace.size());
  for (const auto& r : trace) {
    if (r.photons_out > 0xffffffffULL) throw DomainError("photon count does not fit the binary trace format");
    detail::put_le<std::uint64_t>(out, trace_time_ps(r.t_ns));
    detail::put_le<std::uint32_t>(out, r.neuron);
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(r.photons_out));
  }
  if (!out) throw IoError("failed to write binary trace");
}

// Times come back rounded to the picosecond.
inline std::vector<TraceRecord> read_trace_binary(std::istream& in) {
  char magic[sizeof kTraceMagic];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kTraceMagic, sizeof magic) != 0)
    throw IoError("not a binary trace");
  const auto n = detail::get_le<std::uint64_t>(in);
  std::vector<TraceRecord> trace;
  for (std::uint64_t i = 0; i < n; ++i) {
    TraceRecord r;
    r.t_ns = static_cast<double>(detail::get_le<std::uint64_t>(in)) * 1e-3;
    r.neuron = detail::get_le<std::uint32_t>(in);
    r.photons_out = detail::get_le<std::uint32_t>(in);
    trace.push_back(r);
  }
  return trace;
}

}  // namespace soen
