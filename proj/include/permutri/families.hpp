// Catalog of permutation-trinomial families over GF(2^m) and GF(q^m):
// exponent instantiation with normalization, applicability predicates, and
// the trace diagnostic backing the odd-m family T23.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "permutri/galois.hpp"

#include "json.hpp"

namespace permutri {

enum class FamilyId {
  K2, K3, K4, K5, K6,        // known classes (K1, linearized, has no fixed formula)
  T21, T22, T23, T24,        // odd-m series
  T32, T33,                  // even-m series; T33 is the (q, k) parameterized family
  C34, C35, C36, C37,        // T33 specializations at q = 2 and their inverses
};

inline constexpr std::array<FamilyId, 15> kAllFamilies = {
    FamilyId::K2,  FamilyId::K3,  FamilyId::K4,  FamilyId::K5,  FamilyId::K6,
    FamilyId::T21, FamilyId::T22, FamilyId::T23, FamilyId::T24, FamilyId::T32,
    FamilyId::T33, FamilyId::C34, FamilyId::C35, FamilyId::C36, FamilyId::C37};

inline std::string_view family_name(FamilyId id) {
  switch (id) {
    case FamilyId::K2: return "K2";
    case FamilyId::K3: return "K3";
    case FamilyId::K4: return "K4";
    case FamilyId::K5: return "K5";
    case FamilyId::K6: return "K6";
    case FamilyId::T21: return "T21";
    case FamilyId::T22: return "T22";
    case FamilyId::T23: return "T23";
    case FamilyId::T24: return "T24";
    case FamilyId::T32: return "T32";
    case FamilyId::T33: return "T33";
    case FamilyId::C34: return "C34";
    case FamilyId::C35: return "C35";
    case FamilyId::C36: return "C36";
    case FamilyId::C37: return "C37";
  }
  throw std::logic_error("unknown family id");
}

inline FamilyId family_from_name(std::string_view name) {
  for (FamilyId id : kAllFamilies)
    if (family_name(id) == name) return id;
  throw std::invalid_argument("unknown family: " + std::string(name));
}

// Largest e with 3^e dividing i.
inline std::uint32_t exp3(std::uint64_t i) {
  if (i == 0) throw std::invalid_argument("exp3 requires a positive integer");
  std::uint32_t e = 0;
  while (i % 3 == 0) { i /= 3; ++e; }
  return e;
}

// A family plus concrete parameters, before instantiation into a field.
struct FamilyInstance {
  FamilyId family;
  std::uint32_t m = 0;
  std::uint64_t q = 2;                    // T33 only
  std::uint64_t k = 1;                    // T33 and K5
  std::optional<FieldElement> coeff_a{};  // K5 only
};

struct Term {
  std::uint64_t coeff;
  std::uint64_t exponent;
  friend bool operator==(const Term&, const Term&) = default;
};

// A concrete sparse polynomial bound to a field.  Plain trinomials have
// pre_exponent = 0 and outer_exponent = 1; the catalog's compositional
// inverses C35/C37 use the full shape x^pre * (sum of terms)^outer.
struct TrinomialSpec {
  const FieldCtx* ctx = nullptr;
  std::vector<Term> terms;  // exponents strictly increasing, coefficients nonzero
  std::uint64_t pre_exponent = 0;
  std::uint64_t outer_exponent = 1;
  bool zero_maps_to_zero = true;

  const FieldCtx& field() const {
    if (!ctx) throw std::logic_error("spec has no field context");
    return *ctx;
  }

  std::uint64_t eval_raw(std::uint64_t x) const {
    const FieldCtx& f = field();
    if (x == 0) {
      if (zero_maps_to_zero) return 0;
      std::uint64_t acc = 0;
      for (const Term& t : terms)
        if (t.exponent == 0) acc = f.add_raw(acc, t.coeff);
      return acc;
    }
    std::uint64_t acc = 0;
    for (const Term& t : terms) {
      std::uint64_t c = f.pow_folded(x, t.exponent);
      if (t.coeff != 1) c = f.mul_raw(c, t.coeff);
      acc = f.add_raw(acc, c);
    }
    if (pre_exponent == 0 && outer_exponent == 1) return acc;
    std::uint64_t r = acc == 0 ? (outer_exponent == 0 ? 1u : 0u)
                               : f.pow_folded(acc, outer_exponent);
    if (pre_exponent) r = f.mul_raw(r, f.pow_folded(x, pre_exponent));
    return r;
  }

  FieldElement eval(const FieldElement& x) const {
    if (!x.ctx().same_field(field()))
      throw std::invalid_argument("eval: element from a different field");
    return FieldElement(field(), eval_raw(x.packed()));
  }

  friend bool operator==(const TrinomialSpec& a, const TrinomialSpec& b) {
    return a.ctx == b.ctx && a.terms == b.terms && a.pre_exponent == b.pre_exponent &&
           a.outer_exponent == b.outer_exponent;
  }
};

// e -> ((e - 1) mod (order - 1)) + 1, into [1, order-1].  An exponent that
// folds to order-1 reads as "1 on every nonzero x, 0 at x = 0", which is the
// functional interpretation the catalog uses for degenerate exponents.
inline std::uint64_t normalize_exponent(std::int64_t e, std::uint64_t order) {
  const std::int64_t n1 = static_cast<std::int64_t>(order - 1);
  return static_cast<std::uint64_t>(detail::floor_mod(e - 1, n1)) + 1;
}

// Normalizes, sorts, and merges exponents; coefficients of colliding terms
// add in the field and vanished terms are dropped (term collapse).
inline TrinomialSpec make_spec(const FieldCtx& ctx,
                               std::vector<std::pair<std::uint64_t, std::int64_t>> raw_terms) {
  TrinomialSpec spec;
  spec.ctx = &ctx;
  std::vector<Term> folded;
  for (const auto& [coeff, e] : raw_terms) {
    if (coeff == 0) continue;
    folded.push_back({coeff, normalize_exponent(e, ctx.order())});
  }
  std::sort(folded.begin(), folded.end(),
            [](const Term& a, const Term& b) { return a.exponent < b.exponent; });
  for (const Term& t : folded) {
    if (!spec.terms.empty() && spec.terms.back().exponent == t.exponent) {
      spec.terms.back().coeff = ctx.add_raw(spec.terms.back().coeff, t.coeff);
      if (spec.terms.back().coeff == 0) spec.terms.pop_back();
    } else {
      spec.terms.push_back(t);
    }
  }
  return spec;
}

struct Applicability {
  bool applicable;
  std::string reason;
};

struct CatalogEntry {
  FamilyId id;
  std::string_view name;
  std::string_view formula;
  std::string_view params;
  std::string_view conditions;
  std::string_view provenance;
  std::string_view note;  // empty unless the entry needed a resolution
};

// Complete stable-ordered catalog.  Known classes come first so that search
// classification prefers the classical label when exponents coincide.
inline const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = {
      {FamilyId::K2, "K2", "x + x^3 + x^5", "m", "m odd",
       "classical: Dickson polynomial of degree 5", ""},
      {FamilyId::K3, "K3", "x + x^5 + x^7", "m", "m % 3 != 0",
       "classical: Dickson polynomial of degree 7", ""},
      {FamilyId::K4, "K4", "x + x^3 + x^(2^((m+1)/2)+1)", "m", "m odd",
       "classical: Dobbertin's trinomial (Welch exponent)", ""},
      {FamilyId::K5, "K5", "x^(2^(2k)+1) + (a*x)^(2^k+1) + a*x^2", "m, k (m = 3k), a",
       "m = 3k and a^((2^m-1)/(2^k-1)) != 1",
       "classical: Blokhuis-Coulter-Henderson-O'Keefe family",
       "the leading exponent is sometimes quoted as 2^(2k); exhaustive sweeps "
       "show only the 2^(2k)+1 form matches the stated coefficient condition"},
      {FamilyId::K6, "K6", "x^(3*2^((m+1)/2)+4) + x^(2^((m+1)/2)+2) + x^(2^((m+1)/2))", "m",
       "m odd", "classical: Cherowitzo-Dobbertin form", ""},
      {FamilyId::T21, "T21", "x + x^(2^((m+1)/2)-1) + x^(2^m-2^((m+1)/2)+1)", "m",
       "m odd, m > 1", "catalog: odd-m series", ""},
      {FamilyId::T22, "T22", "x^(2^((m-1)/2)-1) + x^(2^m-2^((m-1)/2)-2) + x^(2^m-2^((m-1)/2)-1)",
       "m", "m odd, m > 1", "catalog: odd-m series", ""},
      {FamilyId::T23, "T23", "x + x^3 + x^(2^m-2^((m+3)/2)+2)", "m", "m odd",
       "catalog: odd-m series", ""},
      {FamilyId::T24, "T24", "x^(2^(m-2)-1) + x^(2^(m-2)+2^((m-1)/2)-1) + x^(2^m-2^(m-2)-1)",
       "m", "m odd, m >= 3", "catalog: odd-m series", ""},
      {FamilyId::T32, "T32", "x + x^(2^((m+2)/2)-1) + x^(2^m-2^(m/2)+1)", "m", "m even",
       "catalog: even-m series", ""},
      {FamilyId::T33, "T33", "x + x^(k*q^(m/2)-(k-1)) + x^((k+1)-k*q^(m/2))", "q, k, m",
       "q % 3 != 0, m even; permutation iff m % 4 == 0, or q % 3 == 1, or "
       "(m % 4 == 2 and q % 3 == 2 and exp3(k) >= exp3(q^(m/2)+1))",
       "catalog: parameterized (q,k) family over GF(q^m)", ""},
      {FamilyId::C34, "C34", "x + x^(2^(m/2+1)-1) + x^(2^m-2^(m/2+1)+2)", "m",
       "m % 4 == 0", "T33 specialized at q = 2, k = 2", ""},
      {FamilyId::C35, "C35",
       "x^(2^(m/2+1)+3) * (x^4 + x^(2^(m/2+1)+2) + x^(2^(m/2+2)))^(2^m-2)", "m",
       "m % 4 == 0", "compositional inverse of C34 (rational form)",
       "half-integer exponents in the source form were resolved against the "
       "compose oracle; the leading factor takes the rounded-up reading "
       "(m+1)/2 -> m/2+1, the inner trinomial the rounded-down readings"},
      {FamilyId::C36, "C36", "x + x^(2^(m/2)) + x^(2^m-2^(m/2)+1)", "m", "m % 4 == 0",
       "T33 specialized at q = 2, k = 1", ""},
      {FamilyId::C37, "C37",
       "x^(2^(m/2)+2) * (x^2 + x^(2^(m/2)+1) + x^(2^(m/2+1)))^(2^m-2)", "m",
       "m % 4 == 0", "compositional inverse of C36 (rational form)",
       "half-integer exponents in the source form were resolved against the "
       "compose oracle; every occurrence takes the rounded-down reading "
       "(m+1)/2 -> m/2"},
  };
  return entries;
}

inline const CatalogEntry& catalog_entry(FamilyId id) {
  for (const CatalogEntry& e : catalog())
    if (e.id == id) return e;
  throw std::logic_error("family missing from catalog");
}

namespace detail {

// Structural preconditions: what the exponent formulas need to be
// well-defined integers.  The theorem-level hypotheses live in
// applicability() instead, so non-applicable points can still be
// instantiated and demonstrated non-bijective.
inline std::optional<std::string> structural_error(const FamilyInstance& inst) {
  const std::uint32_t m = inst.m;
  if (m == 0) return "m must be positive";
  switch (inst.family) {
    case FamilyId::K2:
    case FamilyId::K3:
      return std::nullopt;
    case FamilyId::K4:
    case FamilyId::K6:
    case FamilyId::T21:
    case FamilyId::T22:
    case FamilyId::T23:
      if (m % 2 == 0) return "m must be odd";
      return std::nullopt;
    case FamilyId::T24:
      if (m % 2 == 0) return "m must be odd";
      if (m < 3) return "m must be at least 3";
      return std::nullopt;
    case FamilyId::K5:
      if (inst.k == 0 || inst.m != 3 * inst.k) return "K5 requires m = 3k with k >= 1";
      if (!inst.coeff_a) return "K5 requires the coefficient a";
      if (inst.coeff_a->is_zero()) return "K5 coefficient a must be nonzero";
      return std::nullopt;
    case FamilyId::T32:
      if (m % 2) return "m must be even";
      return std::nullopt;
    case FamilyId::T33: {
      if (m % 2) return "m must be even";
      if (inst.k == 0) return "k must be positive";
      if (inst.k > (1ull << 30)) return "k out of supported range";
      std::uint64_t q = inst.q;
      try {
        prime_power_split(q);
      } catch (const std::exception&) {
        return "q must be a prime power";
      }
      if (q % 3 == 0) return "q must not be divisible by 3";
      return std::nullopt;
    }
    case FamilyId::C34:
    case FamilyId::C35:
    case FamilyId::C36:
    case FamilyId::C37:
      if (m % 2) return "m must be even";
      return std::nullopt;
  }
  return "unknown family";
}

}  // namespace detail

// Whether the family's permutation statement covers these parameters.  For
// T33 this is the full iff-condition, so a false answer predicts a
// non-bijective instantiation.
inline Applicability applicability(const FamilyInstance& inst) {
  const std::uint32_t m = inst.m;
  if (m == 0) return {false, "m must be positive"};
  switch (inst.family) {
    case FamilyId::K2:
    case FamilyId::K4:
    case FamilyId::K6:
      if (m % 2 == 0) return {false, "m must be odd"};
      return {true, "m odd"};
    case FamilyId::K3:
      if (m % 3 == 0) return {false, "m must not be divisible by 3"};
      return {true, "m % 3 != 0"};
    case FamilyId::K5: {
      if (auto err = detail::structural_error(inst)) return {false, *err};
      const FieldCtx& f = inst.coeff_a->ctx();
      if (f.order() != (1ull << m)) return {false, "coefficient a must live in GF(2^m)"};
      const std::uint64_t e = (f.order() - 1) / ((1ull << inst.k) - 1);
      if (f.pow_folded(inst.coeff_a->packed(), e) == 1)
        return {false, "a^((2^m-1)/(2^k-1)) = 1"};
      return {true, "m = 3k and a^((2^m-1)/(2^k-1)) != 1"};
    }
    case FamilyId::T21:
    case FamilyId::T22:
      if (m % 2 == 0) return {false, "m must be odd"};
      if (m == 1) return {false, "m must exceed 1"};
      return {true, "m odd, m > 1"};
    case FamilyId::T23:
      if (m % 2 == 0) return {false, "m must be odd"};
      return {true, "m odd"};
    case FamilyId::T24:
      if (m % 2 == 0) return {false, "m must be odd"};
      if (m < 3) return {false, "m must be at least 3"};
      return {true, "m odd, m >= 3"};
    case FamilyId::T32:
      if (m % 2) return {false, "m must be even"};
      return {true, "m even"};
    case FamilyId::T33: {
      if (auto err = detail::structural_error(inst)) return {false, *err};
      if (m % 4 == 0) return {true, "condition (i): m % 4 == 0"};
      if (inst.q % 3 == 1) return {true, "condition (ii): q % 3 == 1"};
      const std::uint64_t half = detail::ipow(inst.q, m / 2);
      const std::uint32_t ek = exp3(inst.k), eq = exp3(half + 1);
      if (ek >= eq)
        return {true, "condition (iii): m % 4 == 2, q % 3 == 2, exp3(k)=" +
                          std::to_string(ek) + " >= exp3(q^(m/2)+1)=" + std::to_string(eq)};
      return {false, "no condition holds: exp3(k)=" + std::to_string(ek) +
                         " < exp3(q^(m/2)+1)=" + std::to_string(eq) +
                         " and neither m % 4 == 0 nor q % 3 == 1"};
    }
    case FamilyId::C34:
    case FamilyId::C35:
    case FamilyId::C36:
    case FamilyId::C37:
      if (m % 4) return {false, "m must be divisible by 4"};
      return {true, "m % 4 == 0"};
  }
  return {false, "unknown family"};
}

// The field a given instance naturally lives in (table-default modulus
// unless one is supplied).
inline const FieldCtx& field_for(const FamilyInstance& inst,
                                 std::optional<std::vector<std::uint32_t>> modulus = std::nullopt) {
  if (inst.family == FamilyId::T33) return make_field_qm(inst.q, inst.m, std::move(modulus));
  return make_field(2, inst.m, std::move(modulus));
}

inline TrinomialSpec make_inverse_form(const FieldCtx& ctx, std::uint32_t m, bool c35,
                                       std::array<std::uint32_t, 3> rounding);

// Exponent formulas for each family, instantiated into ctx and normalized
// into [1, order-1].  Term collapse (formulas colliding after folding) is
// merged rather than rejected.
inline TrinomialSpec instantiate(const FamilyInstance& inst, const FieldCtx& ctx) {
  if (auto err = detail::structural_error(inst))
    throw std::invalid_argument(std::string(family_name(inst.family)) + ": " + *err);

  const std::uint32_t m = inst.m;
  const auto expect_order = [&](std::uint64_t want) {
    if (ctx.order() != want)
      throw std::invalid_argument(std::string(family_name(inst.family)) +
                                  ": field order mismatch (expected " + std::to_string(want) +
                                  ", got " + std::to_string(ctx.order()) + ")");
  };

  auto unit_trinomial = [&](std::int64_t e1, std::int64_t e2, std::int64_t e3) {
    return make_spec(ctx, {{1, e1}, {1, e2}, {1, e3}});
  };

  switch (inst.family) {
    case FamilyId::K2:
      expect_order(1ull << m);
      return unit_trinomial(1, 3, 5);
    case FamilyId::K3:
      expect_order(1ull << m);
      return unit_trinomial(1, 5, 7);
    case FamilyId::K4:
      expect_order(1ull << m);
      return unit_trinomial(1, 3, (1ll << ((m + 1) / 2)) + 1);
    case FamilyId::K5: {
      expect_order(1ull << m);
      if (!inst.coeff_a->ctx().same_field(ctx))
        throw std::invalid_argument("K5: coefficient a lives in a different field");
      const std::uint64_t a = inst.coeff_a->packed();
      const std::uint64_t k = inst.k;
      const std::uint64_t a_pow = ctx.pow_folded(a, (1ull << k) + 1);
      return make_spec(ctx, {{a, 2},
                             {a_pow, static_cast<std::int64_t>((1ull << k) + 1)},
                             {1, static_cast<std::int64_t>((1ull << (2 * k)) + 1)}});
    }
    case FamilyId::K6: {
      expect_order(1ull << m);
      const std::int64_t h = 1ll << ((m + 1) / 2);
      return unit_trinomial(h, h + 2, 3 * h + 4);
    }
    case FamilyId::T21: {
      expect_order(1ull << m);
      const std::int64_t h = 1ll << ((m + 1) / 2);
      return unit_trinomial(1, h - 1, (1ll << m) - h + 1);
    }
    case FamilyId::T22: {
      expect_order(1ull << m);
      const std::int64_t h = 1ll << ((m - 1) / 2);
      return unit_trinomial(h - 1, (1ll << m) - h - 2, (1ll << m) - h - 1);
    }
    case FamilyId::T23: {
      expect_order(1ull << m);
      const std::int64_t h = 1ll << ((m + 3) / 2);
      return unit_trinomial(1, 3, (1ll << m) - h + 2);
    }
    case FamilyId::T24: {
      expect_order(1ull << m);
      const std::int64_t quarter = 1ll << (m - 2);
      const std::int64_t h = 1ll << ((m - 1) / 2);
      return unit_trinomial(quarter - 1, quarter + h - 1, (1ll << m) - quarter - 1);
    }
    case FamilyId::T32: {
      expect_order(1ull << m);
      return unit_trinomial(1, (1ll << ((m + 2) / 2)) - 1,
                            (1ll << m) - (1ll << (m / 2)) + 1);
    }
    case FamilyId::T33: {
      const std::uint64_t order = detail::ipow(inst.q, m);
      expect_order(order);
      const std::int64_t half = static_cast<std::int64_t>(detail::ipow(inst.q, m / 2));
      const std::int64_t k = static_cast<std::int64_t>(inst.k);
      return unit_trinomial(1, k * half - (k - 1), (k + 1) - k * half);
    }
    case FamilyId::C34: {
      expect_order(1ull << m);
      const std::int64_t h = 1ll << (m / 2 + 1);
      return unit_trinomial(1, h - 1, (1ll << m) - h + 2);
    }
    case FamilyId::C36: {
      expect_order(1ull << m);
      const std::int64_t h = 1ll << (m / 2);
      return unit_trinomial(1, h, (1ll << m) - h + 1);
    }
    case FamilyId::C35:
    case FamilyId::C37: {
      expect_order(1ull << m);
      // Frozen readings; inverse_reading_candidates() enumerates the
      // alternatives the compose oracle selected these from.
      const bool c35 = inst.family == FamilyId::C35;
      const std::array<std::uint32_t, 3> rounding =
          c35 ? std::array<std::uint32_t, 3>{1, 0, 0} : std::array<std::uint32_t, 3>{0, 0, 0};
      return make_inverse_form(ctx, m, c35, rounding);
    }
  }
  throw std::logic_error("unknown family id");
}

// Builds the rational inverse form x^pre * (trinomial)^(2^m-2) for C35/C37.
// rounding[i] picks floor (0) or floor+1 (1) for the i-th half-integer
// exponent of the source form: the leading factor, then the two non-constant
// trinomial exponents.
inline TrinomialSpec make_inverse_form(const FieldCtx& ctx, std::uint32_t m, bool c35,
                                       std::array<std::uint32_t, 3> rounding) {
  TrinomialSpec spec;
  const std::uint64_t order = ctx.order();
  if (c35) {
    // source: x^(2^((m+1)/2)+3) * (x^4 + x^(2^((m+3)/2)+2) + x^(2^((m+5)/2)))^(2^m-2)
    const std::uint64_t h1 = 1ull << (m / 2 + rounding[0]);
    const std::uint64_t h2 = 1ull << (m / 2 + 1 + rounding[1]);
    const std::uint64_t h3 = 1ull << (m / 2 + 2 + rounding[2]);
    spec = make_spec(ctx, {{1, 4},
                           {1, static_cast<std::int64_t>(h2 + 2)},
                           {1, static_cast<std::int64_t>(h3)}});
    spec.pre_exponent = normalize_exponent(static_cast<std::int64_t>(h1 + 3), order);
  } else {
    // source: x^(2^((m+1)/2)+2) * (x^2 + x^(2^((m+1)/2)+1) + x^(2^((m+3)/2)))^(2^m-2)
    const std::uint64_t h1 = 1ull << (m / 2 + rounding[0]);
    const std::uint64_t h2 = 1ull << (m / 2 + rounding[1]);
    const std::uint64_t h3 = 1ull << (m / 2 + 1 + rounding[2]);
    spec = make_spec(ctx, {{1, 2},
                           {1, static_cast<std::int64_t>(h2 + 1)},
                           {1, static_cast<std::int64_t>(h3)}});
    spec.pre_exponent = normalize_exponent(static_cast<std::int64_t>(h1 + 2), order);
  }
  spec.outer_exponent = order - 2;
  return spec;
}

struct ReadingCandidate {
  std::array<std::uint32_t, 3> rounding;
  std::string label;
  TrinomialSpec spec;
};

// All eight floor/ceil readings of an inverse form's half-integer exponents.
// The compose oracle picks the one that actually inverts C34/C36; the frozen
// choice in instantiate() must match it.
inline std::vector<ReadingCandidate> inverse_reading_candidates(FamilyId id, std::uint32_t m,
                                                                const FieldCtx& ctx) {
  if (id != FamilyId::C35 && id != FamilyId::C37)
    throw std::invalid_argument("readings only apply to C35/C37");
  std::vector<ReadingCandidate> out;
  for (std::uint32_t bits = 0; bits < 8; ++bits) {
    std::array<std::uint32_t, 3> r = {bits & 1, (bits >> 1) & 1, (bits >> 2) & 1};
    std::string label;
    for (std::uint32_t i = 0; i < 3; ++i) label += r[i] ? 'u' : 'd';
    out.push_back({r, label, make_inverse_form(ctx, m, id == FamilyId::C35, r)});
  }
  return out;
}

inline std::array<std::uint32_t, 3> frozen_reading(FamilyId id) {
  if (id == FamilyId::C35) return {1, 0, 0};
  if (id == FamilyId::C37) return {0, 0, 0};
  throw std::invalid_argument("readings only apply to C35/C37");
}

// --- instance strings: "T33:q=2,k=3,m=6", "T21:m=7", "K5:k=2,m=6,a=0x5" ---

struct ParsedInstance {
  FamilyId family;
  std::uint32_t m = 0;
  std::uint64_t q = 2;
  std::uint64_t k = 1;
  bool k_given = false;
  std::optional<std::string> a_text;  // bound to a field by realize()
};

inline ParsedInstance parse_instance(const std::string& text) {
  const std::size_t colon = text.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("instance string needs <family>:<params>: " + text);
  ParsedInstance out;
  out.family = family_from_name(text.substr(0, colon));
  std::size_t pos = colon + 1;
  while (pos < text.size()) {
    const std::size_t eq = text.find('=', pos);
    if (eq == std::string::npos) throw std::invalid_argument("bad instance string: " + text);
    const std::string key = text.substr(pos, eq - pos);
    std::size_t end = text.find(',', eq);
    if (end == std::string::npos) end = text.size();
    const std::string val = text.substr(eq + 1, end - eq - 1);
    if (key == "m") out.m = static_cast<std::uint32_t>(std::stoul(val));
    else if (key == "q") out.q = std::stoull(val);
    else if (key == "k") { out.k = std::stoull(val); out.k_given = true; }
    else if (key == "a") out.a_text = val;
    else throw std::invalid_argument("unknown instance key '" + key + "' in " + text);
    pos = end + 1;
  }
  if (out.m == 0) throw std::invalid_argument("instance string needs m: " + text);
  if (out.family == FamilyId::K5 && !out.k_given) {
    if (out.m % 3) throw std::invalid_argument("K5 needs m = 3k");
    out.k = out.m / 3;
  }
  return out;
}

// Binds a parsed instance to its field (building the default one if none is
// supplied) and materializes the K5 coefficient.
inline std::pair<FamilyInstance, const FieldCtx*> realize(
    const ParsedInstance& parsed, const FieldCtx* field = nullptr) {
  FamilyInstance inst{parsed.family, parsed.m, parsed.q, parsed.k, std::nullopt};
  const FieldCtx& ctx = field ? *field : field_for(inst);
  if (parsed.family == FamilyId::K5) {
    if (!parsed.a_text) throw std::invalid_argument("K5 instance needs a=<element>");
    inst.coeff_a = FieldElement(ctx, ctx.parse_element(*parsed.a_text));
  } else if (parsed.a_text) {
    throw std::invalid_argument("coefficient a only applies to K5");
  }
  return {inst, &ctx};
}

inline std::string instance_string(const FamilyInstance& inst) {
  std::string out{family_name(inst.family)};
  out += ':';
  if (inst.family == FamilyId::T33) {
    out += "q=" + std::to_string(inst.q) + ",k=" + std::to_string(inst.k) + ",";
  } else if (inst.family == FamilyId::K5) {
    out += "k=" + std::to_string(inst.k) + ",";
  }
  out += "m=" + std::to_string(inst.m);
  if (inst.family == FamilyId::K5 && inst.coeff_a)
    out += ",a=" + inst.coeff_a->str();
  return out;
}

// --- Claim-1 diagnostic -------------------------------------------------
// For GF(2^m) with m odd, d = (m+1)/2 and b = a^(2^d), the quantity
//   D1 = A1 * A3^(2^d+1) / A2^(2^d+2),
//   A1 = a(b+1)^2(a^2+a+1), A2 = a(b+1)^2, A3 = (a+1)^3 + (b+1)^2
// has absolute trace 1 for every a outside GF(2); this identity underpins
// the odd-m family T23 and is checked here by exhaustive evaluation.

struct Claim1Report {
  bool holds;
  std::optional<std::uint64_t> witness;  // first a (packed) with Tr(D1) != 1
  std::uint64_t checked;
};

inline Claim1Report claim1_check(const FieldCtx& ctx) {
  if (ctx.characteristic() != 2) throw std::domain_error("claim1_check requires GF(2^m)");
  const std::uint32_t m = ctx.degree();
  if (m % 2 == 0) throw std::domain_error("claim1_check requires odd m");
  const std::uint32_t d = (m + 1) / 2;
  Claim1Report report{true, std::nullopt, 0};
  for (std::uint64_t a = 2; a < ctx.order(); ++a) {
    const std::uint64_t b = ctx.frobenius_raw(a, d);
    const std::uint64_t a1 = a ^ 1, b1 = b ^ 1;
    const std::uint64_t b1sq = ctx.mul_raw(b1, b1);
    const std::uint64_t a_sq = ctx.mul_raw(a, a);
    const std::uint64_t A2 = ctx.mul_raw(a, b1sq);
    const std::uint64_t A1 = ctx.mul_raw(A2, a_sq ^ a ^ 1);
    const std::uint64_t A3 = ctx.mul_raw(ctx.mul_raw(a1, a1), a1) ^ b1sq;
    const std::uint64_t e = (1ull << d) + 1;
    const std::uint64_t num = ctx.mul_raw(A1, ctx.pow_folded(A3, e));
    const std::uint64_t den = ctx.pow_folded(A2, e + 1);
    const std::uint64_t d1 = ctx.mul_raw(num, ctx.inv_raw(den));
    ++report.checked;
    if (ctx.trace_raw(d1) != 1) {
      report.holds = false;
      report.witness = a;
      break;
    }
  }
  return report;
}

// --- JSON ---------------------------------------------------------------

inline nlohmann::ordered_json spec_to_json(const TrinomialSpec& spec) {
  nlohmann::ordered_json j;
  j["field"] = spec.field().descriptor();
  nlohmann::ordered_json terms = nlohmann::ordered_json::array();
  for (const Term& t : spec.terms)
    terms.push_back({spec.field().format_element(t.coeff), t.exponent});
  j["terms"] = std::move(terms);
  if (spec.pre_exponent != 0) j["pre_exponent"] = spec.pre_exponent;
  if (spec.outer_exponent != 1) j["outer_exponent"] = spec.outer_exponent;
  return j;
}

}  // namespace permutri
