#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"
#include "permutri/families.hpp"

using namespace permutri;

namespace {

std::vector<std::uint64_t> exponents_of(const TrinomialSpec& spec) {
  std::vector<std::uint64_t> out;
  for (const Term& t : spec.terms) out.push_back(t.exponent);
  return out;
}

TrinomialSpec inst(FamilyId id, std::uint32_t m, std::uint64_t q = 2, std::uint64_t k = 1) {
  FamilyInstance fi{id, m, q, k, std::nullopt};
  return instantiate(fi, field_for(fi));
}

}  // namespace

TEST_CASE("catalog is complete and stable") {
  const auto& entries = catalog();
  REQUIRE(entries.size() == 15);
  CHECK(entries.front().name == "K2");
  CHECK(entries.front().formula == "x + x^3 + x^5");
  CHECK(entries.front().conditions == "m odd");
  bool saw_t33 = false;
  for (const auto& e : entries)
    if (e.name == "T33") {
      saw_t33 = true;
      CHECK(e.params == "q, k, m");
    }
  CHECK(saw_t33);
  // enum order matches listing order
  for (std::size_t i = 0; i < entries.size(); ++i) CHECK(entries[i].id == kAllFamilies[i]);
}

TEST_CASE("exp3") {
  CHECK(exp3(9) == 2);
  CHECK(exp3(12) == 1);
  CHECK(exp3(5) == 0);
  CHECK(exp3(1) == 0);
  CHECK(exp3(81) == 4);
  CHECK_THROWS_AS(exp3(0), std::invalid_argument);
}

TEST_CASE("exponent normalization") {
  CHECK(normalize_exponent(1, 8) == 1);
  CHECK(normalize_exponent(7, 8) == 7);
  CHECK(normalize_exponent(8, 8) == 1);   // 8 = 1 mod 7
  CHECK(normalize_exponent(0, 8) == 7);   // degenerate exponent reads as x^(q^m-1)
  CHECK(normalize_exponent(-5, 16) == 10);
  // idempotent
  for (std::int64_t e = -40; e <= 40; ++e) {
    const std::uint64_t n = normalize_exponent(e, 16);
    CHECK(n >= 1);
    CHECK(n <= 15);
    CHECK(normalize_exponent(static_cast<std::int64_t>(n), 16) == n);
  }
}

TEST_CASE("normalization preserves the induced function on nonzero points") {
  const FieldCtx& f = make_field(2, 4);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::int64_t e = 1 + static_cast<std::int64_t>(rng() % 60);
    const TrinomialSpec folded = make_spec(f, {{1, e}});
    for (std::uint64_t x = 1; x < f.order(); ++x) {
      // literal repeated multiplication, no folding
      std::uint64_t expect = 1;
      for (std::int64_t i = 0; i < e; ++i) expect = oracle::field_mul(f, expect, x);
      REQUIRE(folded.eval_raw(x) == expect);
    }
  }
}

TEST_CASE("instantiation produces the expected exponents") {
  CHECK(exponents_of(inst(FamilyId::T21, 3)) == std::vector<std::uint64_t>{1, 3, 5});
  CHECK(inst(FamilyId::T21, 3).terms == inst(FamilyId::K2, 3).terms);

  CHECK(exponents_of(inst(FamilyId::T33, 4, 2, 2)) == std::vector<std::uint64_t>{1, 7, 10});
  CHECK(exponents_of(inst(FamilyId::T23, 5)) == std::vector<std::uint64_t>{1, 3, 18});
  CHECK(exponents_of(inst(FamilyId::T22, 3)) == std::vector<std::uint64_t>{1, 4, 5});
  CHECK(exponents_of(inst(FamilyId::T24, 3)) == std::vector<std::uint64_t>{1, 3, 5});
  CHECK(exponents_of(inst(FamilyId::K4, 5)) == std::vector<std::uint64_t>{1, 3, 9});
  CHECK(exponents_of(inst(FamilyId::K6, 3)) == std::vector<std::uint64_t>{2, 4, 6});
  CHECK(exponents_of(inst(FamilyId::K3, 7)) == std::vector<std::uint64_t>{1, 5, 7});

  // negative raw exponent folds into [1, q^m-1]
  CHECK(exponents_of(inst(FamilyId::T33, 2, 2, 1)) == std::vector<std::uint64_t>{1, 2, 3});

  // term collapse: T32 at m = 2 degenerates to the identity map
  const TrinomialSpec t32_m2 = inst(FamilyId::T32, 2);
  CHECK(exponents_of(t32_m2) == std::vector<std::uint64_t>{1});

  SECTION("specialization equalities with T33") {
    for (std::uint32_t m : {4u, 8u, 12u, 16u}) {
      CHECK(inst(FamilyId::T33, m, 2, 2).terms == inst(FamilyId::C34, m).terms);
      CHECK(inst(FamilyId::T33, m, 2, 1).terms == inst(FamilyId::C36, m).terms);
    }
  }

  SECTION("K5 carries its coefficient") {
    const FieldCtx& f64 = make_field(2, 6);
    // pick the smallest valid a: a^((2^6-1)/(2^2-1)) = a^21 != 1
    std::uint64_t a = 2;
    while (f64.pow_folded(a, 21) == 1) ++a;
    FamilyInstance fi{FamilyId::K5, 6, 2, 2, FieldElement(f64, a)};
    const TrinomialSpec spec = instantiate(fi, f64);
    REQUIRE(spec.terms.size() == 3);
    CHECK(spec.terms[0].exponent == 2);
    CHECK(spec.terms[0].coeff == a);
    CHECK(spec.terms[1].exponent == 5);  // 2^k + 1
    CHECK(spec.terms[1].coeff == f64.pow_folded(a, 5));
    CHECK(spec.terms[2].exponent == 17);  // 2^(2k) + 1
    CHECK(spec.terms[2].coeff == 1);
  }

  SECTION("structural violations are hard errors") {
    CHECK_THROWS_AS(inst(FamilyId::T21, 4), std::invalid_argument);
    CHECK_THROWS_AS(inst(FamilyId::T32, 5), std::invalid_argument);
    CHECK_THROWS_AS(inst(FamilyId::T33, 4, 9, 1), std::invalid_argument);  // q = 9 divisible by 3
    CHECK_THROWS_AS(inst(FamilyId::T24, 1), std::invalid_argument);
    // ctx/parameter mismatch
    FamilyInstance fi{FamilyId::T21, 5, 2, 1, std::nullopt};
    CHECK_THROWS_AS(instantiate(fi, make_field(2, 7)), std::invalid_argument);
  }
}

TEST_CASE("applicability predicates") {
  CHECK_FALSE(applicability({FamilyId::T33, 2, 2, 1, std::nullopt}).applicable);
  CHECK(applicability({FamilyId::T33, 2, 2, 1, std::nullopt}).reason.find("exp3") !=
        std::string::npos);
  CHECK(applicability({FamilyId::T33, 2, 4, 1, std::nullopt}).applicable);  // q = 1 mod 3
  CHECK(applicability({FamilyId::T33, 4, 2, 1, std::nullopt}).applicable);  // m = 0 mod 4
  CHECK(applicability({FamilyId::T33, 2, 2, 3, std::nullopt}).applicable);  // exp3(k) >= exp3(3)
  CHECK_FALSE(applicability({FamilyId::T21, 4, 2, 1, std::nullopt}).applicable);
  CHECK(applicability({FamilyId::T21, 7, 2, 1, std::nullopt}).applicable);
  CHECK_FALSE(applicability({FamilyId::T21, 1, 2, 1, std::nullopt}).applicable);
  CHECK_FALSE(applicability({FamilyId::K3, 6, 2, 1, std::nullopt}).applicable);
  CHECK(applicability({FamilyId::K3, 7, 2, 1, std::nullopt}).applicable);
  CHECK_FALSE(applicability({FamilyId::C34, 6, 2, 1, std::nullopt}).applicable);
  CHECK(applicability({FamilyId::C34, 8, 2, 1, std::nullopt}).applicable);

  SECTION("T33 decision depends only on (m mod 4, q mod 3, exp3 data)") {
    for (std::uint64_t q : {2ull, 4ull, 5ull, 8ull, 7ull}) {
      for (std::uint32_t m = 2; m <= 12; m += 2) {
        for (std::uint64_t k = 1; k <= 9; ++k) {
          const auto a = applicability({FamilyId::T33, m, q, k, std::nullopt});
          const std::uint64_t half = detail::ipow(q, m / 2);
          const bool expect = m % 4 == 0 || q % 3 == 1 ||
                              (m % 4 == 2 && q % 3 == 2 && exp3(k) >= exp3(half + 1));
          REQUIRE(a.applicable == expect);
        }
      }
    }
  }

  SECTION("K5 coefficient validity is evaluated in-field") {
    const FieldCtx& f64 = make_field(2, 6);
    std::uint64_t valid = 0, invalid = 0;
    for (std::uint64_t a = 1; a < 64; ++a) {
      FamilyInstance fi{FamilyId::K5, 6, 2, 2, FieldElement(f64, a)};
      const bool ok = applicability(fi).applicable;
      const bool expect = f64.pow_folded(a, 21) != 1;
      REQUIRE(ok == expect);
      (ok ? valid : invalid) += 1;
    }
    CHECK(valid == 42);    // 63 - gcd(21, 63) elements violate a^21 = 1
    CHECK(invalid == 21);
  }
}

TEST_CASE("every admissible catalog instantiation stays trinomial-shaped") {
  std::uint64_t instantiations = 0;
  auto check_spec = [&](const FamilyInstance& fi) {
    const FieldCtx& f = field_for(fi);
    const TrinomialSpec spec = instantiate(fi, f);
    REQUIRE(spec.terms.size() <= 3);
    REQUIRE(!spec.terms.empty());
    for (std::size_t i = 0; i < spec.terms.size(); ++i) {
      REQUIRE(spec.terms[i].coeff != 0);
      REQUIRE(spec.terms[i].exponent >= 1);
      REQUIRE(spec.terms[i].exponent <= f.order() - 1);
      if (i) REQUIRE(spec.terms[i].exponent > spec.terms[i - 1].exponent);
    }
    ++instantiations;
  };

  for (std::uint32_t m = 1; m <= 16; ++m) {
    check_spec({FamilyId::K2, m, 2, 1, std::nullopt});
    check_spec({FamilyId::K3, m, 2, 1, std::nullopt});
    if (m % 2) {
      check_spec({FamilyId::K4, m, 2, 1, std::nullopt});
      check_spec({FamilyId::K6, m, 2, 1, std::nullopt});
      check_spec({FamilyId::T21, m, 2, 1, std::nullopt});
      check_spec({FamilyId::T22, m, 2, 1, std::nullopt});
      check_spec({FamilyId::T23, m, 2, 1, std::nullopt});
      if (m >= 3) check_spec({FamilyId::T24, m, 2, 1, std::nullopt});
    } else {
      check_spec({FamilyId::T32, m, 2, 1, std::nullopt});
      check_spec({FamilyId::C34, m, 2, 1, std::nullopt});
      check_spec({FamilyId::C36, m, 2, 1, std::nullopt});
    }
  }
  for (std::uint64_t q : {2ull, 4ull, 5ull, 8ull}) {
    for (std::uint32_t m = 2; m <= 16; m += 2) {
      if (detail::ipow(q, m) > (1ull << 16)) break;
      for (std::uint64_t k = 1; k <= 6; ++k)
        check_spec({FamilyId::T33, m, q, k, std::nullopt});
    }
  }
  for (std::uint32_t m : {3u, 6u, 9u, 12u}) {
    const FieldCtx& f = make_field(2, m);
    const std::uint64_t k = m / 3;
    const std::uint64_t e = (f.order() - 1) / ((1ull << k) - 1);
    for (std::uint64_t a = 1; a < f.order(); ++a) {
      if (f.pow_folded(a, e) == 1) continue;
      check_spec({FamilyId::K5, m, 2, k, FieldElement(f, a)});
    }
  }
  CHECK(instantiations > 1000);
}

TEST_CASE("eval honors the zero convention and matches pointwise") {
  const TrinomialSpec k2 = inst(FamilyId::K2, 3);
  const TrinomialSpec t21 = inst(FamilyId::T21, 3);
  const FieldCtx& f = k2.field();

  CHECK(k2.eval_raw(0) == 0);
  CHECK(k2.eval_raw(1) == 1);  // unit-coefficient trinomial in characteristic 2
  for (std::uint64_t x = 0; x < 8; ++x) REQUIRE(t21.eval_raw(x) == k2.eval_raw(x));

  // folded degenerate exponent: 1 on every nonzero point, 0 at zero
  const TrinomialSpec folded = make_spec(f, {{1, 0}});
  REQUIRE(folded.terms.size() == 1);
  CHECK(folded.terms[0].exponent == 7);
  CHECK(folded.eval_raw(0) == 0);
  for (std::uint64_t x = 1; x < 8; ++x) CHECK(folded.eval_raw(x) == 1);

  CHECK_THROWS_AS(k2.eval(FieldElement(make_field(2, 4), 1)), std::invalid_argument);
}

TEST_CASE("claim-1 diagnostic") {
  const Claim1Report r3 = claim1_check(make_field(2, 3));
  CHECK(r3.holds);
  CHECK_FALSE(r3.witness.has_value());
  CHECK(r3.checked == 6);  // a = 0, 1 excluded from the sweep

  const Claim1Report r5 = claim1_check(make_field(2, 5));
  CHECK(r5.holds);
  CHECK(r5.checked == 30);

  CHECK(claim1_check(make_field(2, 7)).holds);

  CHECK_THROWS_AS(claim1_check(make_field(2, 4)), std::domain_error);
  CHECK_THROWS_AS(claim1_check(make_field(3, 3)), std::domain_error);

  SECTION("diagnostic agrees with a from-scratch evaluation at m = 3") {
    const FieldCtx& f = make_field(2, 3);
    const std::uint32_t d = 2;  // (m+1)/2
    for (std::uint64_t av = 2; av < 8; ++av) {
      const FieldElement a(f, av);
      const FieldElement one(f, 1);
      const FieldElement b = pow(a, 1ll << d);
      const FieldElement a1 = a + one, b1 = b + one;
      const FieldElement A1 = a * b1 * b1 * (a * a + a + one);
      const FieldElement A2 = a * b1 * b1;
      const FieldElement A3 = a1 * a1 * a1 + b1 * b1;
      const FieldElement d1 = A1 * pow(A3, (1ll << d) + 1) / pow(A2, (1ll << d) + 2);
      REQUIRE(trace(d1) == 1);
    }
  }
}

TEST_CASE("inverse-form readings") {
  const FieldCtx& f16 = make_field(2, 4);
  const auto candidates = inverse_reading_candidates(FamilyId::C35, 4, f16);
  REQUIRE(candidates.size() == 8);

  const TrinomialSpec frozen = inst(FamilyId::C35, 4);
  CHECK(frozen.pre_exponent != 0);
  CHECK(frozen.outer_exponent == f16.order() - 2);
  bool found = false;
  for (const auto& cand : candidates)
    if (cand.rounding == frozen_reading(FamilyId::C35)) {
      found = true;
      CHECK(cand.spec == frozen);
    }
  CHECK(found);

  // C35 at m = 4: leading exponent 2^3+3 = 11, inner terms 4, 10, 16 -> 16 folds to 1
  CHECK(frozen.pre_exponent == 11);

  const TrinomialSpec c37 = inst(FamilyId::C37, 4);
  CHECK(c37.pre_exponent == 6);  // 2^2 + 2
  CHECK(exponents_of(c37) == std::vector<std::uint64_t>{2, 5, 8});

  CHECK_THROWS_AS(inverse_reading_candidates(FamilyId::T21, 5, make_field(2, 5)),
                  std::invalid_argument);
}

TEST_CASE("instance strings parse and print") {
  const ParsedInstance p1 = parse_instance("T33:q=2,k=3,m=6");
  CHECK(p1.family == FamilyId::T33);
  CHECK(p1.q == 2);
  CHECK(p1.k == 3);
  CHECK(p1.m == 6);

  const ParsedInstance p2 = parse_instance("T21:m=7");
  CHECK(p2.family == FamilyId::T21);
  CHECK(p2.m == 7);

  auto [k5, ctx] = realize(parse_instance("K5:k=2,m=6,a=0x5"));
  CHECK(k5.coeff_a->packed() == 5);
  CHECK(ctx->order() == 64);
  CHECK(instance_string(k5) == "K5:k=2,m=6,a=0x5");

  // k defaults to m/3 for K5
  auto [k5b, ctx2] = realize(parse_instance("K5:m=6,a=0x5"));
  CHECK(k5b.k == 2);

  auto [t33, ctx3] = realize(parse_instance("T33:q=4,k=1,m=2"));
  CHECK(ctx3->order() == 16);
  CHECK(ctx3->subfield_order() == 4);
  CHECK(instance_string(t33) == "T33:q=4,k=1,m=2");

  CHECK_THROWS_AS(parse_instance("T21"), std::invalid_argument);
  CHECK_THROWS_AS(parse_instance("ZZ:m=3"), std::invalid_argument);
  CHECK_THROWS_AS(parse_instance("T21:m=5,bogus=1"), std::invalid_argument);
  CHECK_THROWS_AS(realize(parse_instance("T21:m=5,a=0x2")), std::invalid_argument);
}

TEST_CASE("spec JSON shape") {
  const nlohmann::ordered_json j = spec_to_json(inst(FamilyId::T21, 5));
  CHECK(j["field"] == "gf:p=2,n=5,mod=0x25");
  REQUIRE(j["terms"].size() == 3);
  CHECK(j["terms"][0][0] == "0x1");
  CHECK(j["terms"][0][1] == 1);
  CHECK_FALSE(j.contains("pre_exponent"));

  const nlohmann::ordered_json inv = spec_to_json(inst(FamilyId::C37, 4));
  CHECK(inv.contains("pre_exponent"));
  CHECK(inv["outer_exponent"] == 14);
}
