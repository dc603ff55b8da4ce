// Exhaustive verification: bijectivity sweeps with collision witnesses,
// compositional-inverse checking, and the solution census for the
// bar-twisted quadratic form behind the T33 family.
//
// Sweeps enumerate packed element values in increasing order.  Domains are
// partitionable into contiguous index ranges with pure merges (bitwise-or of
// presence bitmaps, minimum-witness selection), so multi-threaded results
// are bit-identical to serial ones.
#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

#include "permutri/families.hpp"
#include "permutri/galois.hpp"

#include "json.hpp"

namespace permutri {

struct SweepOptions {
  std::uint64_t max_order = kDefaultSweepBound;
  std::uint32_t threads = 1;
};

struct VerificationReport {
  bool is_permutation = false;
  std::uint64_t domain_size = 0;
  // first (x1, x2) in enumeration order with f(x1) = f(x2), x1 < x2
  std::optional<std::pair<std::uint64_t, std::uint64_t>> collision{};
  std::uint64_t image_deficit = 0;
  double elapsed_ms = 0.0;
};

namespace detail {

inline void require_within_bound(std::uint64_t order, const SweepOptions& opts,
                                 const char* what) {
  if (order > opts.max_order)
    throw std::domain_error(std::string(what) + ": field order " + std::to_string(order) +
                            " exceeds the exhaustive bound " + std::to_string(opts.max_order) +
                            " (raise max_order to override)");
}

// Runs fn(worker, lo, hi) over contiguous chunks of [0, total).
template <typename Fn>
void parallel_ranges(std::uint64_t total, std::uint32_t threads, Fn&& fn) {
  if (threads <= 1 || total < 1024) {
    fn(0u, std::uint64_t{0}, total);
    return;
  }
  threads = std::min<std::uint32_t>(threads, 64);
  const std::uint64_t chunk = (total + threads - 1) / threads;
  std::vector<std::thread> pool;
  for (std::uint32_t w = 0; w < threads; ++w) {
    const std::uint64_t lo = w * chunk;
    const std::uint64_t hi = std::min(total, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&fn, w, lo, hi] { fn(w, lo, hi); });
  }
  for (auto& t : pool) t.join();
}

struct Bitmap {
  explicit Bitmap(std::uint64_t bits) : words((bits + 63) / 64, 0) {}
  void set(std::uint64_t i) { words[i >> 6] |= 1ull << (i & 63); }
  bool test(std::uint64_t i) const { return words[i >> 6] >> (i & 63) & 1; }
  void merge_or(const Bitmap& other) {
    for (std::size_t i = 0; i < words.size(); ++i) words[i] |= other.words[i];
  }
  std::uint64_t popcount() const {
    std::uint64_t c = 0;
    for (std::uint64_t w : words) c += static_cast<std::uint64_t>(__builtin_popcountll(w));
    return c;
  }
  std::vector<std::uint64_t> words;
};

}  // namespace detail

// Evaluates f on every field element and checks the image covers the field.
// The collision witness is the first pair found in enumeration order: the
// smallest x2 whose value repeats an earlier one, with x1 its first
// preimage.
inline VerificationReport is_permutation(const TrinomialSpec& spec, SweepOptions opts = {}) {
  const FieldCtx& f = spec.field();
  const std::uint64_t order = f.order();
  detail::require_within_bound(order, opts, "is_permutation");
  const auto start = std::chrono::steady_clock::now();

  std::vector<detail::Bitmap> partial;
  const std::uint32_t threads = std::max<std::uint32_t>(1, opts.threads);
  for (std::uint32_t w = 0; w < std::min<std::uint32_t>(threads, 64); ++w)
    partial.emplace_back(order);
  detail::parallel_ranges(order, threads, [&](std::uint32_t w, std::uint64_t lo, std::uint64_t hi) {
    detail::Bitmap& bm = partial[w];
    for (std::uint64_t x = lo; x < hi; ++x) bm.set(spec.eval_raw(x));
  });
  detail::Bitmap& hits = partial[0];
  for (std::size_t w = 1; w < partial.size(); ++w) hits.merge_or(partial[w]);

  VerificationReport report;
  report.domain_size = order;
  report.image_deficit = order - hits.popcount();
  report.is_permutation = report.image_deficit == 0;
  if (!report.is_permutation) {
    // deterministic witness: serial rescan, stopping at the first repeat
    detail::Bitmap seen(order);
    for (std::uint64_t x = 0; x < order; ++x) {
      const std::uint64_t y = spec.eval_raw(x);
      if (seen.test(y)) {
        std::uint64_t x1 = 0;
        while (spec.eval_raw(x1) != y) ++x1;
        report.collision = {x1, x};
        break;
      }
      seen.set(y);
    }
  }
  report.elapsed_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start).count();
  if (report.is_permutation != !report.collision.has_value() ||
      report.is_permutation != (report.image_deficit == 0))
    throw std::logic_error("verification report inconsistency");
  return report;
}

struct ComposeReport {
  bool is_inverse = false;
  std::optional<std::uint64_t> witness{};  // first x with g(f(x)) != x
  double elapsed_ms = 0.0;
};

// True iff g(f(x)) = x for every field element.
inline ComposeReport compose_check(const TrinomialSpec& f, const TrinomialSpec& g,
                                   SweepOptions opts = {}) {
  if (!f.field().same_field(g.field()))
    throw std::invalid_argument("compose_check: specs live in different fields");
  const std::uint64_t order = f.field().order();
  detail::require_within_bound(order, opts, "compose_check");
  const auto start = std::chrono::steady_clock::now();

  constexpr std::uint64_t kNone = ~0ull;
  std::vector<std::uint64_t> local_witness(64, kNone);
  detail::parallel_ranges(order, std::max<std::uint32_t>(1, opts.threads),
                          [&](std::uint32_t w, std::uint64_t lo, std::uint64_t hi) {
    for (std::uint64_t x = lo; x < hi; ++x) {
      if (g.eval_raw(f.eval_raw(x)) != x) {
        local_witness[w] = x;
        return;
      }
    }
  });
  ComposeReport report;
  std::uint64_t best = kNone;
  for (std::uint64_t w : local_witness) best = std::min(best, w);
  if (best != kNone) report.witness = best;
  report.is_inverse = !report.witness.has_value();
  report.elapsed_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start).count();
  return report;
}

// Number of y in GF(q^m) with y^(2k) + y^k*ybar^k + ybar^(2k) = 0, where
// ybar = y^(q^(m/2)).  Exactly 1 (y = 0 alone) precisely when a T33
// applicability condition holds.
inline std::uint64_t eqa_solution_count(std::uint64_t q, std::uint32_t m, std::uint64_t k,
                                        SweepOptions opts = {}) {
  if (q % 3 == 0)
    throw std::domain_error("eqa_solution_count: q divisible by 3 is outside the hypothesis");
  if (m == 0 || m % 2) throw std::invalid_argument("eqa_solution_count: m must be even");
  if (k == 0) throw std::invalid_argument("eqa_solution_count: k must be positive");
  const auto [p, s] = detail::prime_power_split(q);
  (void)p;
  const FieldCtx& f = make_field_qm(q, m);
  detail::require_within_bound(f.order(), opts, "eqa_solution_count");

  const std::uint32_t bar_shift = s * (m / 2);
  const std::uint64_t order = f.order();
  std::vector<std::uint64_t> local_count(64, 0);
  detail::parallel_ranges(order - 1, std::max<std::uint32_t>(1, opts.threads),
                          [&](std::uint32_t w, std::uint64_t lo, std::uint64_t hi) {
    std::uint64_t c = 0;
    for (std::uint64_t i = lo; i < hi; ++i) {
      const std::uint64_t y = i + 1;  // skip y = 0, counted unconditionally
      const std::uint64_t t = f.pow_folded(y, k);
      const std::uint64_t tb = f.frobenius_raw(t, bar_shift);
      const std::uint64_t expr =
          f.add_raw(f.add_raw(f.mul_raw(t, t), f.mul_raw(t, tb)), f.mul_raw(tb, tb));
      if (expr == 0) ++c;
    }
    local_count[w] = c;
  });
  std::uint64_t count = 1;
  for (std::uint64_t c : local_count) count += c;
  return count;
}

struct ValueSetReport {
  std::uint64_t image_size = 0;
  std::uint64_t fixed_points = 0;
  // preimage multiplicity -> how many values have it (0 included)
  std::map<std::uint64_t, std::uint64_t> preimage_histogram;
};

// Exact image statistics from one sweep.
inline ValueSetReport value_set(const TrinomialSpec& spec, SweepOptions opts = {}) {
  const FieldCtx& f = spec.field();
  const std::uint64_t order = f.order();
  detail::require_within_bound(order, opts, "value_set");

  const std::uint32_t threads = std::max<std::uint32_t>(1, opts.threads);
  std::vector<std::vector<std::uint32_t>> counts;
  std::vector<std::uint64_t> fixed(64, 0);
  for (std::uint32_t w = 0; w < std::min<std::uint32_t>(threads, 64); ++w)
    counts.emplace_back(order, 0);
  detail::parallel_ranges(order, threads, [&](std::uint32_t w, std::uint64_t lo, std::uint64_t hi) {
    for (std::uint64_t x = lo; x < hi; ++x) {
      const std::uint64_t y = spec.eval_raw(x);
      ++counts[w][y];
      if (y == x) ++fixed[w];
    }
  });
  ValueSetReport report;
  for (std::uint64_t w = 0; w < fixed.size(); ++w) report.fixed_points += fixed[w];
  for (std::uint64_t y = 0; y < order; ++y) {
    std::uint64_t c = 0;
    for (const auto& part : counts) c += part[y];
    if (c) ++report.image_size;
    ++report.preimage_histogram[c];
  }
  return report;
}

inline nlohmann::ordered_json report_to_json(const VerificationReport& r, const FieldCtx& ctx) {
  nlohmann::ordered_json j;
  j["is_permutation"] = r.is_permutation;
  j["domain_size"] = r.domain_size;
  if (r.collision)
    j["collision"] = {ctx.format_element(r.collision->first),
                      ctx.format_element(r.collision->second)};
  else
    j["collision"] = nullptr;
  j["image_deficit"] = r.image_deficit;
  return j;
}

}  // namespace permutri
