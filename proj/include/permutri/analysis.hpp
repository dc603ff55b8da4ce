// Cryptographic metrics for instantiated or discovered permutations:
// differential uniformity with the full derivative spectrum, and fixed-point
// counts.
#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "permutri/families.hpp"
#include "permutri/permcheck.hpp"

#include "json.hpp"

namespace permutri {

// Differential-sweep ceiling; the sweep is quadratic in the field order.
inline constexpr std::uint64_t kSpectrumBound = 1ull << 16;

struct DifferentialProfile {
  std::uint64_t order = 0;
  std::uint64_t delta = 0;  // max over a != 0, b of #{x : f(x+a) - f(x) = b}
  // solution-count value -> number of (a, b) pairs attaining it (0 included)
  std::map<std::uint64_t, std::uint64_t> spectrum;
};

// delta = max over nonzero a and all b of the number of solutions to
// f(x+a) - f(x) = b; delta = 2 in characteristic 2 is APN.  Partitioned by
// derivative direction a; merged by per-b max and histogram addition.
inline DifferentialProfile differential_spectrum(const TrinomialSpec& spec,
                                                 SweepOptions opts = {.max_order = kSpectrumBound}) {
  const FieldCtx& f = spec.field();
  const std::uint64_t order = f.order();
  if (order > opts.max_order || order > kSpectrumBound)
    throw std::domain_error("differential_spectrum: field order " + std::to_string(order) +
                            " exceeds the quadratic-sweep bound " +
                            std::to_string(std::min<std::uint64_t>(opts.max_order, kSpectrumBound)));

  std::vector<std::uint32_t> lut(order);
  for (std::uint64_t x = 0; x < order; ++x) lut[x] = static_cast<std::uint32_t>(spec.eval_raw(x));

  const std::uint32_t threads = std::max<std::uint32_t>(1, opts.threads);
  struct Partial {
    std::uint64_t delta = 0;
    std::map<std::uint64_t, std::uint64_t> spectrum;
  };
  std::vector<Partial> partial(64);
  detail::parallel_ranges(order - 1, threads, [&](std::uint32_t w, std::uint64_t lo, std::uint64_t hi) {
    std::vector<std::uint32_t> cnt(order);
    Partial& out = partial[w];
    for (std::uint64_t i = lo; i < hi; ++i) {
      const std::uint64_t a = i + 1;
      std::fill(cnt.begin(), cnt.end(), 0);
      for (std::uint64_t x = 0; x < order; ++x) {
        const std::uint64_t b = f.sub_raw(lut[f.add_raw(x, a)], lut[x]);
        ++cnt[b];
      }
      for (std::uint64_t b = 0; b < order; ++b) {
        out.delta = std::max<std::uint64_t>(out.delta, cnt[b]);
        ++out.spectrum[cnt[b]];
      }
    }
  });

  DifferentialProfile profile;
  profile.order = order;
  for (const Partial& p : partial) {
    profile.delta = std::max(profile.delta, p.delta);
    for (const auto& [count, freq] : p.spectrum) profile.spectrum[count] += freq;
  }

  // mass conservation: every (a, x) pair lands on exactly one b
  std::uint64_t mass = 0;
  for (const auto& [count, freq] : profile.spectrum) mass += count * freq;
  if (mass != (order - 1) * order)
    throw std::logic_error("differential spectrum mass-conservation violation");
  if (f.characteristic() == 2 && (profile.delta < 2 || profile.delta % 2))
    throw std::logic_error("characteristic-2 differential uniformity must be even and >= 2");
  return profile;
}

inline std::uint64_t fixed_point_count(const TrinomialSpec& spec, SweepOptions opts = {}) {
  const FieldCtx& f = spec.field();
  detail::require_within_bound(f.order(), opts, "fixed_point_count");
  std::vector<std::uint64_t> local(64, 0);
  detail::parallel_ranges(f.order(), std::max<std::uint32_t>(1, opts.threads),
                          [&](std::uint32_t w, std::uint64_t lo, std::uint64_t hi) {
    std::uint64_t c = 0;
    for (std::uint64_t x = lo; x < hi; ++x)
      if (spec.eval_raw(x) == x) ++c;
    local[w] = c;
  });
  std::uint64_t total = 0;
  for (std::uint64_t c : local) total += c;
  return total;
}

inline nlohmann::ordered_json profile_to_json(const DifferentialProfile& p) {
  nlohmann::ordered_json j;
  j["order"] = p.order;
  j["delta"] = p.delta;
  j["is_apn"] = p.delta == 2;
  nlohmann::ordered_json spectrum = nlohmann::ordered_json::object();
  for (const auto& [count, freq] : p.spectrum) spectrum[std::to_string(count)] = freq;
  j["spectrum"] = std::move(spectrum);
  return j;
}

}  // namespace permutri
