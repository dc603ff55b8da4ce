// Exhaustive enumeration of unit-coefficient permutation trinomials over
// GF(2^m), canonicalization under the doubling (cyclotomic-coset)
// equivalence, and classification against the catalog.
//
// Squaring a trinomial's argument reindexes its exponents by e -> 2e mod
// (2^m - 1) without changing whether it permutes the field, so enumeration
// only needs one representative per doubling orbit: the lexicographically
// smallest sorted triple.  Compositions with monomial permutations are
// deliberately not quotiented out -- the catalog presents families in fixed
// form, and collapsing those orbits would hide which family a triple
// instantiates.
#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "permutri/families.hpp"
#include "permutri/galois.hpp"
#include "permutri/permcheck.hpp"

#include "json.hpp"

namespace permutri {

struct ExponentTriple {
  std::uint32_t m = 0;
  std::array<std::uint64_t, 3> e{};  // sorted ascending, within [1, 2^m - 2]
  bool canonical = false;

  friend bool operator==(const ExponentTriple& a, const ExponentTriple& b) {
    return a.m == b.m && a.e == b.e;
  }
};

namespace detail {

// Doubling mod 2^m - 1 is a left bit rotation in an m-bit word.
inline std::uint64_t rot_exp(std::uint64_t e, std::uint32_t j, std::uint32_t m) {
  j %= m;
  if (j == 0) return e;
  const std::uint64_t mask = (m == 64) ? ~0ull : (1ull << m) - 1;
  return ((e << j) | (e >> (m - j))) & mask;
}

inline std::array<std::uint64_t, 3> rot_triple(std::array<std::uint64_t, 3> t,
                                               std::uint32_t j, std::uint32_t m) {
  for (auto& e : t) e = rot_exp(e, j, m);
  std::sort(t.begin(), t.end());
  return t;
}

inline void validate_triple(const ExponentTriple& t) {
  if (t.m < 2 || t.m > 62) throw std::invalid_argument("triple: m out of range");
  const std::uint64_t top = (1ull << t.m) - 2;
  if (!(t.e[0] < t.e[1] && t.e[1] < t.e[2]))
    throw std::invalid_argument("triple exponents must be strictly increasing");
  if (t.e[0] < 1 || t.e[2] > top)
    throw std::invalid_argument("triple exponents must lie in [1, 2^m - 2]");
}

}  // namespace detail

inline ExponentTriple double_triple(const ExponentTriple& t) {
  detail::validate_triple(t);
  return {t.m, detail::rot_triple(t.e, 1, t.m), false};
}

// Lexicographically smallest sorted triple over the doubling orbit.
inline ExponentTriple canonicalize(const ExponentTriple& t) {
  detail::validate_triple(t);
  std::array<std::uint64_t, 3> best = t.e, cur = t.e;
  for (std::uint32_t j = 1; j < t.m; ++j) {
    cur = detail::rot_triple(cur, 1, t.m);
    if (cur < best) best = cur;
  }
  return {t.m, best, true};
}

inline std::uint32_t orbit_size(const ExponentTriple& t) {
  detail::validate_triple(t);
  std::array<std::uint64_t, 3> cur = t.e;
  for (std::uint32_t j = 1; j <= t.m; ++j) {
    cur = detail::rot_triple(cur, 1, t.m);
    if (cur == t.e) return j;
  }
  throw std::logic_error("doubling orbit failed to close");
}

struct ClassifyOutcome {
  std::optional<FamilyId> family;
  bool linearized = false;  // all exponents powers of 2 (a linear map)
};

// Catalog families instantiable as unit-coefficient trinomials over GF(2^m),
// each carried to its canonical triple.  K5 (free coefficient) and the
// rational inverse forms C35/C37 cannot match a unit trinomial and are
// skipped; T33 is tried for every subfield parameterization q = 2^s with
// m/s even, with k covering one full period q^(m/(2s)) + 1.
class Classifier {
 public:
  explicit Classifier(std::uint32_t m) : m_(m) {
    const FieldCtx& ctx = make_field(2, m);
    const std::uint64_t top = ctx.order() - 2;
    auto try_add = [&](FamilyId id, const FamilyInstance& inst) {
      if (permutri::detail::structural_error(inst)) return;
      const TrinomialSpec spec = instantiate(inst, ctx);
      if (spec.pre_exponent != 0 || spec.outer_exponent != 1) return;
      if (spec.terms.size() != 3) return;  // term collapse: not a trinomial here
      std::array<std::uint64_t, 3> e{};
      for (std::size_t i = 0; i < 3; ++i) {
        if (spec.terms[i].coeff != 1 || spec.terms[i].exponent > top) return;
        e[i] = spec.terms[i].exponent;
      }
      candidates_.push_back({id, canonicalize({m, e, false}).e});
    };
    for (const CatalogEntry& entry : catalog()) {
      switch (entry.id) {
        case FamilyId::K5:
        case FamilyId::C35:
        case FamilyId::C37:
          break;
        case FamilyId::T33:
          for (std::uint32_t s = 1; s <= m / 2; ++s) {
            if (m % s || (m / s) % 2) continue;
            const std::uint64_t q = 1ull << s;
            const std::uint64_t kmax = permutri::detail::ipow(q, m / (2 * s)) + 1;
            for (std::uint64_t k = 1; k <= kmax; ++k)
              try_add(entry.id, {entry.id, m / s, q, k, std::nullopt});
          }
          break;
        default:
          try_add(entry.id, {entry.id, m, 2, 1, std::nullopt});
      }
    }
  }

  ClassifyOutcome classify(const ExponentTriple& t) const {
    if (canonicalize(t).e != t.e)
      throw std::invalid_argument("classify expects a canonical triple");
    ClassifyOutcome out;
    out.linearized = std::all_of(t.e.begin(), t.e.end(),
                                 [](std::uint64_t e) { return (e & (e - 1)) == 0; });
    for (const auto& [id, e] : candidates_)
      if (e == t.e) { out.family = id; break; }
    return out;
  }

 private:
  std::vector<std::pair<FamilyId, std::array<std::uint64_t, 3>>> candidates_;
  std::uint32_t m_;
};

inline ClassifyOutcome classify(const ExponentTriple& t, std::uint32_t m) {
  if (t.m != m) throw std::invalid_argument("classify: m mismatch");
  return Classifier(m).classify(t);
}

struct SearchOptions {
  bool classify = true;
  std::uint32_t threads = 1;
  std::uint64_t max_order = kDefaultSweepBound;
  std::optional<std::vector<std::uint32_t>> modulus{};
};

struct SearchRecord {
  ExponentTriple triple;
  std::uint32_t orbit = 0;
  std::string family;  // matched tag, "unexplained", or "" when unclassified
  bool linearized = false;
  bool verified = false;
};

struct SearchOutcome {
  std::uint32_t m = 0;
  std::string field;
  std::vector<SearchRecord> records;
  std::uint64_t canonical_candidates = 0;
  std::uint64_t permutations_found = 0;
  double elapsed_ms = 0.0;
};

namespace detail {

// Bijectivity sweep specialized for unit trinomials on a table-backed
// context: x walks the powers of the generator while three exponent
// accumulators advance mod 2^m - 1, so each evaluation is three table loads
// and two xors.  Collision detection uses an epoch-stamped scratch array to
// avoid clearing between candidates.
struct TrinomialSweeper {
  explicit TrinomialSweeper(const FieldCtx& ctx)
      : exp(ctx.exp_table()), N(ctx.order() - 1), stamp(ctx.order(), 0) {}

  bool is_permutation(std::uint64_t e1, std::uint64_t e2, std::uint64_t e3) {
    if (++epoch == 0) {
      std::fill(stamp.begin(), stamp.end(), 0);
      epoch = 1;
    }
    stamp[0] = epoch;  // f(0) = 0
    std::uint64_t a1 = 0, a2 = 0, a3 = 0;
    for (std::uint64_t j = 0; j < N; ++j) {
      const std::uint32_t v = exp[a1] ^ exp[a2] ^ exp[a3];
      if (stamp[v] == epoch) return false;
      stamp[v] = epoch;
      a1 += e1; if (a1 >= N) a1 -= N;
      a2 += e2; if (a2 >= N) a2 -= N;
      a3 += e3; if (a3 >= N) a3 -= N;
    }
    return true;
  }

  std::span<const std::uint32_t> exp;
  std::uint64_t N;
  std::vector<std::uint32_t> stamp;
  std::uint32_t epoch = 0;
};

// Fallback for contexts without tables: generic per-element evaluation.
inline bool verify_generic(const FieldCtx& ctx, std::uint64_t e1, std::uint64_t e2,
                           std::uint64_t e3) {
  std::vector<std::uint64_t> seen((ctx.order() + 63) / 64, 0);
  seen[0] |= 1;
  for (std::uint64_t x = 1; x < ctx.order(); ++x) {
    const std::uint64_t v =
        ctx.pow_folded(x, e1) ^ ctx.pow_folded(x, e2) ^ ctx.pow_folded(x, e3);
    auto& word = seen[v >> 6];
    const std::uint64_t bit = 1ull << (v & 63);
    if (word & bit) return false;
    word |= bit;
  }
  return true;
}

}  // namespace detail

// All canonical exponent triples whose unit trinomial permutes GF(2^m).
// Candidates iterate with the leading exponent restricted to coset leaders
// and the remaining exponents prefiltered by orbit minimum, so only
// canonical triples reach verification; each reported triple is then
// re-verified through permcheck as an independent check.
inline SearchOutcome enumerate_trinomials(std::uint32_t m, SearchOptions opts = {}) {
  if (m < 2 || m > 62) throw std::invalid_argument("enumerate: m out of range");
  const FieldCtx& ctx = make_field(2, m, opts.modulus);
  if (ctx.order() > opts.max_order)
    throw std::domain_error("enumerate: field order " + std::to_string(ctx.order()) +
                            " exceeds the exhaustive bound " + std::to_string(opts.max_order));
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t N = ctx.order() - 1;

  SearchOutcome outcome;
  outcome.m = m;
  outcome.field = ctx.descriptor();

  // orbit minimum (coset leader value) for each exponent, plus the number of
  // doublings carrying an exponent onto its leader
  std::vector<std::uint32_t> leader_of(N, 0);
  std::vector<std::uint8_t> shift_to_leader(N, 0);
  std::vector<std::uint64_t> leaders;
  {
    std::vector<std::uint64_t> orbit;
    for (std::uint64_t e = 1; e < N; ++e) {
      if (leader_of[e]) continue;
      orbit.clear();
      std::uint64_t cur = e, min_v = e;
      std::uint32_t min_at = 0;
      do {
        orbit.push_back(cur);
        cur = detail::rot_exp(cur, 1, m);
        if (cur < min_v && cur != e) {
          min_v = cur;
          min_at = static_cast<std::uint32_t>(orbit.size());
        }
      } while (cur != e);
      const std::uint32_t len = static_cast<std::uint32_t>(orbit.size());
      for (std::uint32_t i = 0; i < len; ++i) {
        leader_of[orbit[i]] = static_cast<std::uint32_t>(min_v);
        shift_to_leader[orbit[i]] = static_cast<std::uint8_t>((min_at + len - i) % len);
      }
      leaders.push_back(min_v);
    }
    std::sort(leaders.begin(), leaders.end());
  }

  const std::uint32_t threads =
      std::min<std::uint32_t>(std::max<std::uint32_t>(1, opts.threads), 64);

  struct WorkerResult {
    std::vector<std::array<std::uint64_t, 3>> found;
    std::uint64_t canonical = 0;
  };
  std::vector<WorkerResult> results(threads);

  auto worker = [&](std::uint32_t w) {
    WorkerResult& res = results[w];
    std::optional<detail::TrinomialSweeper> sweeper;
    if (ctx.has_tables()) sweeper.emplace(ctx);
    std::vector<std::uint64_t> admissible;
    std::vector<std::uint32_t> check_shifts;

    for (std::size_t li = w; li < leaders.size(); li += threads) {
      const std::uint64_t e1 = leaders[li];
      // period of e1's own coset
      std::uint32_t c1 = 1;
      for (std::uint64_t cur = detail::rot_exp(e1, 1, m); cur != e1;
           cur = detail::rot_exp(cur, 1, m))
        ++c1;
      admissible.clear();
      for (std::uint64_t e = e1 + 1; e < N; ++e)
        if (leader_of[e] >= e1) admissible.push_back(e);

      const std::size_t n_adm = admissible.size();
      for (std::size_t i = 0; i + 1 < n_adm; ++i) {
        const std::uint64_t e2 = admissible[i];
        check_shifts.clear();
        // shifts where a rotated exponent can tie the leading e1: e1's own
        // period, and alignments of e2/e3 when they share e1's coset
        for (std::uint32_t j = c1; j < m; j += c1) check_shifts.push_back(j);
        if (leader_of[e2] == e1)
          for (std::uint32_t j = shift_to_leader[e2]; j < m; j += c1)
            if (j) check_shifts.push_back(j);
        const std::size_t base_checks = check_shifts.size();

        for (std::size_t jj = i + 1; jj < n_adm; ++jj) {
          const std::uint64_t e3 = admissible[jj];
          check_shifts.resize(base_checks);
          if (leader_of[e3] == e1)
            for (std::uint32_t j = shift_to_leader[e3]; j < m; j += c1)
              if (j) check_shifts.push_back(j);

          const std::array<std::uint64_t, 3> t{e1, e2, e3};
          bool canon = true;
          for (std::uint32_t j : check_shifts) {
            if (detail::rot_triple(t, j, m) < t) { canon = false; break; }
          }
          if (!canon) continue;
          ++res.canonical;
          const bool ok = sweeper ? sweeper->is_permutation(e1, e2, e3)
                                  : detail::verify_generic(ctx, e1, e2, e3);
          if (ok) res.found.push_back(t);
        }
      }
    }
  };

  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (std::uint32_t w = 0; w < threads; ++w) pool.emplace_back(worker, w);
    for (auto& t : pool) t.join();
  }

  std::vector<std::array<std::uint64_t, 3>> found;
  for (const WorkerResult& res : results) {
    outcome.canonical_candidates += res.canonical;
    found.insert(found.end(), res.found.begin(), res.found.end());
  }
  std::sort(found.begin(), found.end());
  outcome.permutations_found = found.size();

  std::optional<Classifier> classifier;
  if (opts.classify) classifier.emplace(m);
  for (const auto& e : found) {
    SearchRecord rec;
    rec.triple = {m, e, true};
    rec.orbit = orbit_size(rec.triple);
    // independent re-check through the generic sweep, not trust in the
    // fast path
    TrinomialSpec spec = make_spec(ctx, {{1, static_cast<std::int64_t>(e[0])},
                                         {1, static_cast<std::int64_t>(e[1])},
                                         {1, static_cast<std::int64_t>(e[2])}});
    rec.verified = is_permutation(spec, {.max_order = opts.max_order}).is_permutation;
    if (opts.classify) {
      const ClassifyOutcome c = classifier->classify(rec.triple);
      rec.family = c.family ? std::string(family_name(*c.family)) : "unexplained";
      rec.linearized = c.linearized;
    }
    outcome.records.push_back(std::move(rec));
  }
  outcome.elapsed_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - start).count();
  return outcome;
}

// One record per canonical triple: m,e1,e2,e3,orbit_size,family,verified
// (plus the linearized annotation for unexplained triples).
inline std::string search_to_csv(const SearchOutcome& outcome) {
  std::string out = "m,e1,e2,e3,orbit_size,family,verified,linearized\n";
  for (const SearchRecord& r : outcome.records) {
    out += std::to_string(outcome.m) + ',' + std::to_string(r.triple.e[0]) + ',' +
           std::to_string(r.triple.e[1]) + ',' + std::to_string(r.triple.e[2]) + ',' +
           std::to_string(r.orbit) + ',' + r.family + ',' +
           (r.verified ? "true" : "false") + ',' + (r.linearized ? "true" : "false") + '\n';
  }
  return out;
}

inline std::string search_to_jsonl(const SearchOutcome& outcome) {
  std::string out;
  for (const SearchRecord& r : outcome.records) {
    nlohmann::ordered_json j;
    j["m"] = outcome.m;
    j["e1"] = r.triple.e[0];
    j["e2"] = r.triple.e[1];
    j["e3"] = r.triple.e[2];
    j["orbit_size"] = r.orbit;
    j["family"] = r.family;
    j["verified"] = r.verified;
    j["linearized"] = r.linearized;
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace permutri
