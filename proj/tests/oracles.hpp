// Test-only reference implementations, written independently of the library
// internals: digit-vector polynomial arithmetic with explicit long division,
// brute-force inverse search, and repeated-multiplication exponentiation.
// These are the oracles the fast paths are checked against.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "permutri/galois.hpp"

namespace oracle {

using Digits = std::vector<int>;

inline Digits unpack(std::uint64_t v, int p, int n) {
  Digits d(n, 0);
  for (int i = 0; i < n; ++i) {
    d[i] = static_cast<int>(v % p);
    v /= p;
  }
  return d;
}

inline std::uint64_t pack(const Digits& d, int p) {
  std::uint64_t v = 0;
  for (int i = static_cast<int>(d.size()) - 1; i >= 0; --i) v = v * p + d[i];
  return v;
}

// schoolbook product followed by long division by the (monic) modulus
inline Digits poly_mul_mod(const Digits& a, const Digits& b, const Digits& mod, int p) {
  std::vector<long long> prod(a.size() + b.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) prod[i + j] += 1ll * a[i] * b[j];
  const int deg_mod = static_cast<int>(mod.size()) - 1;
  for (int i = static_cast<int>(prod.size()) - 1; i >= deg_mod; --i) {
    long long c = ((prod[i] % p) + p) % p;
    if (!c) continue;
    for (int j = 0; j <= deg_mod; ++j) prod[i - deg_mod + j] -= c * mod[j];
  }
  Digits out(deg_mod, 0);
  for (int i = 0; i < deg_mod; ++i) out[i] = static_cast<int>(((prod[i] % p) + p) % p);
  return out;
}

inline std::uint64_t field_mul(const permutri::FieldCtx& f, std::uint64_t a, std::uint64_t b) {
  const int p = static_cast<int>(f.characteristic());
  const int n = static_cast<int>(f.degree());
  Digits mod(f.modulus().begin(), f.modulus().end());
  return pack(poly_mul_mod(unpack(a, p, n), unpack(b, p, n), mod, p), p);
}

// a^e by literal repeated multiplication
inline std::uint64_t field_pow(const permutri::FieldCtx& f, std::uint64_t a, std::uint64_t e) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < e; ++i) r = field_mul(f, r, a);
  return r;
}

// multiplicative inverse by exhaustive scan
inline std::uint64_t field_inv(const permutri::FieldCtx& f, std::uint64_t a) {
  for (std::uint64_t b = 1; b < f.order(); ++b)
    if (field_mul(f, a, b) == 1) return b;
  throw std::logic_error("no inverse found");
}

}  // namespace oracle
