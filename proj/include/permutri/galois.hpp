// Finite-field contexts and arithmetic for GF(2^m) and odd-characteristic
// GF(p^n), in polynomial-basis coordinates.  Elements are packed into a
// single machine word: bit mask for p = 2, base-p digit packing otherwise.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace permutri {

// Fields at or below this order get exp/log tables (fast mul/pow).
inline constexpr std::uint64_t kTableLimit = 1ull << 20;
// Default ceiling for exhaustive sweeps; contexts above it carry a warning
// flag and sweep operations refuse unless the caller raises their bound.
inline constexpr std::uint64_t kDefaultSweepBound = 1ull << 24;
// Hard cap so packed representations stay inside a 64-bit word with room
// for exponent products.
inline constexpr std::uint64_t kMaxOrder = 1ull << 48;

namespace detail {

inline bool is_prime(std::uint64_t v) {
  if (v < 2) return false;
  for (std::uint64_t d = 2; d * d <= v; ++d)
    if (v % d == 0) return false;
  return true;
}

// q = p^s with p prime, s >= 1; throws otherwise.
inline std::pair<std::uint32_t, std::uint32_t> prime_power_split(std::uint64_t q) {
  if (q < 2) throw std::invalid_argument("prime power must be >= 2");
  std::uint64_t p = q;
  for (std::uint64_t d = 2; d * d <= q; ++d) {
    if (q % d == 0) { p = d; break; }
  }
  std::uint32_t s = 0;
  std::uint64_t t = q;
  while (t % p == 0) { t /= p; ++s; }
  if (t != 1) throw std::invalid_argument("not a prime power: " + std::to_string(q));
  return {static_cast<std::uint32_t>(p), s};
}

inline std::uint64_t ipow(std::uint64_t base, std::uint32_t e) {
  std::uint64_t r = 1;
  while (e--) r *= base;
  return r;
}

// Euclidean remainder, result in [0, m).
inline std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

inline std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

inline std::uint64_t powmod_u64(std::uint64_t base, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  base %= m;
  while (e) {
    if (e & 1) r = mulmod_u64(r, base, m);
    base = mulmod_u64(base, base, m);
    e >>= 1;
  }
  return r;
}

inline std::vector<std::uint64_t> prime_factors(std::uint64_t v) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 2; d * d <= v; ++d) {
    if (v % d == 0) {
      out.push_back(d);
      while (v % d == 0) v /= d;
    }
  }
  if (v > 1) out.push_back(v);
  return out;
}

// --- dense polynomials over GF(p), little-endian coefficient vectors ---
// Only used at context-construction time (irreducibility checks, default
// modulus search), so clarity over speed.

using Poly = std::vector<std::uint32_t>;

inline void ptrim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline int pdeg(const Poly& a) { return static_cast<int>(a.size()) - 1; }

inline Poly pmul(const Poly& a, const Poly& b, std::uint32_t p) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i]) continue;
    for (std::size_t j = 0; j < b.size(); ++j)
      r[i + j] = static_cast<std::uint32_t>(
          (r[i + j] + static_cast<std::uint64_t>(a[i]) * b[j]) % p);
  }
  ptrim(r);
  return r;
}

inline Poly pmod(Poly a, const Poly& m, std::uint32_t p) {
  ptrim(a);
  const int dm = pdeg(m);
  // modulus is monic by construction
  while (pdeg(a) >= dm) {
    const std::uint32_t c = a.back();
    const int shift = pdeg(a) - dm;
    for (int j = 0; j <= dm; ++j) {
      std::uint64_t t = a[j + shift] + static_cast<std::uint64_t>(c) * (p - m[j]) % p;
      a[j + shift] = static_cast<std::uint32_t>(t % p);
    }
    ptrim(a);
  }
  return a;
}

inline Poly pgcd(Poly a, Poly b, std::uint32_t p) {
  ptrim(a);
  ptrim(b);
  while (!b.empty()) {
    // make b monic so pmod applies
    Poly bm = b;
    const std::uint32_t lead = bm.back();
    if (lead != 1) {
      const std::uint32_t linv =
          static_cast<std::uint32_t>(powmod_u64(lead, p - 2, p));
      for (auto& c : bm)
        c = static_cast<std::uint32_t>(static_cast<std::uint64_t>(c) * linv % p);
    }
    Poly r = pmod(a, bm, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

inline Poly ppowmod(Poly base, std::uint64_t e, const Poly& m, std::uint32_t p) {
  Poly r{1};
  base = pmod(std::move(base), m, p);
  while (e) {
    if (e & 1) r = pmod(pmul(r, base, p), m, p);
    base = pmod(pmul(base, base, p), m, p);
    e >>= 1;
  }
  return r;
}

// Rabin's test: f (monic, degree n) is irreducible over GF(p) iff
// x^(p^n) == x (mod f) and gcd(x^(p^(n/l)) - x, f) = 1 for each prime l | n.
inline bool is_irreducible(const Poly& f, std::uint32_t p) {
  const int n = pdeg(f);
  if (n <= 0) return false;
  if (n == 1) return true;
  const Poly x{0, 1};
  auto frob_iter = [&](std::uint32_t steps) {
    Poly t = x;
    for (std::uint32_t i = 0; i < steps; ++i) t = ppowmod(std::move(t), p, f, p);
    return t;
  };
  for (std::uint64_t l : prime_factors(static_cast<std::uint64_t>(n))) {
    Poly t = frob_iter(static_cast<std::uint32_t>(n / l));
    // t - x
    Poly d = t;
    if (d.size() < 2) d.resize(2, 0);
    d[1] = static_cast<std::uint32_t>((d[1] + p - 1) % p);
    ptrim(d);
    Poly g = pgcd(f, d, p);
    if (pdeg(g) != 0) return false;
  }
  Poly t = frob_iter(static_cast<std::uint32_t>(n));
  Poly d = t;
  if (d.size() < 2) d.resize(2, 0);
  d[1] = static_cast<std::uint32_t>((d[1] + p - 1) % p);
  ptrim(d);
  return d.empty();
}

// Monic degree-n polynomial whose non-leading coefficient vector, read as a
// base-p integer, is the smallest value strictly greater than `after` that
// gives an irreducible polynomial.  after = -1 yields the table default.
inline Poly smallest_irreducible_above(std::uint32_t p, std::uint32_t n,
                                       std::int64_t after) {
  const std::uint64_t span = ipow(p, n);
  for (std::uint64_t low = static_cast<std::uint64_t>(after + 1); low < span; ++low) {
    Poly f(n + 1, 0);
    std::uint64_t v = low;
    for (std::uint32_t i = 0; i < n; ++i) { f[i] = v % p; v /= p; }
    f[n] = 1;
    if (is_irreducible(f, p)) return f;
  }
  throw std::runtime_error("no irreducible polynomial found (degree " +
                           std::to_string(n) + " over GF(" + std::to_string(p) + "))");
}

}  // namespace detail

class FieldCtx;
const FieldCtx& make_field(std::uint32_t p, std::uint32_t n,
                           std::optional<std::vector<std::uint32_t>> modulus = std::nullopt,
                           std::optional<std::uint64_t> subfield_order = std::nullopt);

// Immutable description of a concrete finite field GF(p^n).  Construction
// validates the reduction modulus; contexts at or below kTableLimit carry
// exp/log tables keyed to a fixed primitive element.  Never constructed
// directly -- make_field interns contexts so identical parameters give the
// same object.
class FieldCtx {
 public:
  std::uint32_t characteristic() const { return p_; }
  std::uint32_t degree() const { return n_; }
  std::uint64_t order() const { return order_; }
  std::uint64_t order_minus_one() const { return order_ - 1; }
  const std::vector<std::uint32_t>& modulus() const { return modulus_; }
  // p = 2 only: modulus as a bit mask, bit i = coefficient of x^i.
  std::uint64_t modulus_mask() const { return mod_mask_; }
  std::optional<std::uint64_t> subfield_order() const { return subfield_; }
  bool exceeds_sweep_bound() const { return order_ > kDefaultSweepBound; }
  bool has_tables() const { return !exp_.empty(); }
  std::uint64_t generator() const {
    if (!has_tables()) throw std::logic_error("no generator cached for large field");
    return exp_[1];
  }

  bool same_field(const FieldCtx& other) const {
    return this == &other ||
           (p_ == other.p_ && n_ == other.n_ && modulus_ == other.modulus_);
  }

  // "gf:p=2,n=7,mod=0x83" / "gf:p=3,n=2,mod=[1,0,1]"
  std::string descriptor() const {
    std::ostringstream os;
    os << "gf:p=" << p_ << ",n=" << n_ << ",mod=" << format_modulus();
    if (subfield_) os << ",q=" << *subfield_;
    return os.str();
  }

  // --- packed-value arithmetic ------------------------------------------
  // Values are coefficient vectors read as base-p integers (bit i is the
  // coefficient of x^i when p = 2).  No context checks at this layer.

  std::uint64_t add_raw(std::uint64_t a, std::uint64_t b) const {
    if (p_ == 2) return a ^ b;
    std::uint64_t r = 0;
    for (std::uint32_t i = 0; i < n_; ++i) {
      r += pow_p_[i] * ((a % p_ + b % p_) % p_);
      a /= p_;
      b /= p_;
    }
    return r;
  }

  std::uint64_t neg_raw(std::uint64_t a) const {
    if (p_ == 2) return a;
    std::uint64_t r = 0;
    for (std::uint32_t i = 0; i < n_; ++i) {
      const std::uint64_t d = a % p_;
      r += pow_p_[i] * (d ? p_ - d : 0);
      a /= p_;
    }
    return r;
  }

  std::uint64_t sub_raw(std::uint64_t a, std::uint64_t b) const {
    return p_ == 2 ? a ^ b : add_raw(a, neg_raw(b));
  }

  std::uint64_t mul_raw(std::uint64_t a, std::uint64_t b) const {
    if (has_tables()) {
      if (a == 0 || b == 0) return 0;
      std::uint64_t s = log_[a] + log_[b];
      if (s >= order_ - 1) s -= order_ - 1;
      return exp_[s];
    }
    return mul_generic(a, b);
  }

  // Carryless shift-xor product with on-the-fly reduction for p = 2,
  // schoolbook digit convolution plus long division otherwise.
  std::uint64_t mul_generic(std::uint64_t a, std::uint64_t b) const {
    if (p_ == 2) {
      std::uint64_t r = 0;
      const std::uint64_t top = 1ull << n_;
      while (b) {
        if (b & 1) r ^= a;
        b >>= 1;
        a <<= 1;
        if (a & top) a ^= mod_mask_;
      }
      return r;
    }
    std::uint32_t da[64], db[64];
    std::int64_t acc[128] = {0};
    for (std::uint32_t i = 0; i < n_; ++i) { da[i] = a % p_; a /= p_; }
    for (std::uint32_t i = 0; i < n_; ++i) { db[i] = b % p_; b /= p_; }
    for (std::uint32_t i = 0; i < n_; ++i) {
      if (!da[i]) continue;
      for (std::uint32_t j = 0; j < n_; ++j)
        acc[i + j] += static_cast<std::int64_t>(da[i]) * db[j];
    }
    for (std::int32_t i = 2 * static_cast<std::int32_t>(n_) - 2;
         i >= static_cast<std::int32_t>(n_); --i) {
      const std::int64_t c = detail::floor_mod(acc[i], p_);
      if (!c) continue;
      for (std::uint32_t j = 0; j < n_; ++j)
        acc[i - n_ + j] -= c * modulus_[j];
      acc[i] = 0;
    }
    std::uint64_t r = 0;
    for (std::uint32_t i = 0; i < n_; ++i)
      r += pow_p_[i] * static_cast<std::uint64_t>(detail::floor_mod(acc[i], p_));
    return r;
  }

  // a^e with negative e folded through e mod (p^n - 1); 0^e errors for e <= 0.
  std::uint64_t pow_raw(std::uint64_t a, std::int64_t e) const {
    if (a == 0) {
      if (e <= 0) throw std::domain_error("pow: zero base with non-positive exponent");
      return 0;
    }
    const std::uint64_t folded = static_cast<std::uint64_t>(
        detail::floor_mod(e, static_cast<std::int64_t>(order_ - 1)));
    return pow_folded(a, folded);
  }

  // a != 0, 0 <= e < order; exponent already reduced mod (order - 1) except
  // that e = order - 1 is allowed and gives 1.
  std::uint64_t pow_folded(std::uint64_t a, std::uint64_t e) const {
    if (a == 0) return e == 0 ? throw std::domain_error("pow: 0^0") : 0;
    if (has_tables()) {
      const std::uint64_t j = detail::mulmod_u64(log_[a], e % (order_ - 1), order_ - 1);
      return exp_[j];
    }
    std::uint64_t r = one_raw(), base = a;
    e %= order_ - 1;
    while (e) {
      if (e & 1) r = mul_generic(r, base);
      base = mul_generic(base, base);
      e >>= 1;
    }
    return r;
  }

  std::uint64_t inv_raw(std::uint64_t a) const {
    if (a == 0) throw std::domain_error("inverse of zero");
    return pow_folded(a, order_ - 2);
  }

  // Absolute trace onto GF(p): sum of a^(p^i), i = 0..n-1.
  std::uint32_t trace_raw(std::uint64_t a) const {
    std::uint64_t s = a, t = a;
    for (std::uint32_t i = 1; i < n_; ++i) {
      t = frobenius_raw(t, 1);
      s = add_raw(s, t);
    }
    // the result lies in the prime subfield, i.e. in the constant digit
    return static_cast<std::uint32_t>(s);
  }

  // a -> a^(p^j); j reduced mod n.
  std::uint64_t frobenius_raw(std::uint64_t a, std::uint32_t j) const {
    j %= n_;
    if (a == 0 || j == 0) return a;
    if (has_tables()) {
      const std::uint64_t e = detail::powmod_u64(p_, j, order_ - 1);
      return pow_folded(a, e);
    }
    std::uint64_t r = a;
    for (std::uint32_t i = 0; i < j; ++i) r = pow_folded(r, p_);
    return r;
  }

  std::uint64_t one_raw() const { return 1; }

  std::uint64_t log_raw(std::uint64_t a) const {
    if (!has_tables()) throw std::logic_error("log table unavailable for this field size");
    if (a == 0) throw std::domain_error("log of zero");
    return log_[a];
  }

  std::span<const std::uint32_t> exp_table() const { return exp_; }
  std::span<const std::uint32_t> log_table() const { return log_; }

  std::string format_element(std::uint64_t v) const {
    std::ostringstream os;
    if (p_ == 2) {
      os << "0x" << std::hex << v;
    } else {
      os << '[';
      for (std::uint32_t i = 0; i < n_; ++i) {
        if (i) os << ',';
        os << v % p_;
        v /= p_;
      }
      os << ']';
    }
    return os.str();
  }

  std::uint64_t parse_element(const std::string& text) const;

  FieldCtx(const FieldCtx&) = delete;
  FieldCtx& operator=(const FieldCtx&) = delete;

 private:
  friend const FieldCtx& make_field(std::uint32_t, std::uint32_t,
                                    std::optional<std::vector<std::uint32_t>>,
                                    std::optional<std::uint64_t>);

  FieldCtx(std::uint32_t p, std::uint32_t n, std::vector<std::uint32_t> modulus,
           std::optional<std::uint64_t> subfield)
      : p_(p), n_(n), modulus_(std::move(modulus)), subfield_(subfield) {
    order_ = detail::ipow(p_, n_);
    pow_p_.resize(n_);
    for (std::uint32_t i = 0; i < n_; ++i) pow_p_[i] = detail::ipow(p_, i);
    if (p_ == 2) {
      mod_mask_ = 0;
      for (std::uint32_t i = 0; i <= n_; ++i)
        if (modulus_[i]) mod_mask_ |= 1ull << i;
    }
    if (subfield_) {
      const auto [sp, ss] = detail::prime_power_split(*subfield_);
      if (sp != p_ || n_ % ss != 0)
        throw std::invalid_argument("subfield order must be a power of p with exponent dividing n");
      subfield_degree_ = ss;
    }
    if (order_ <= kTableLimit) build_tables();
  }

  std::string format_modulus() const {
    std::ostringstream os;
    if (p_ == 2) {
      os << "0x" << std::hex << mod_mask_;
    } else {
      os << '[';
      for (std::uint32_t i = 0; i <= n_; ++i) {
        if (i) os << ',';
        os << modulus_[i];
      }
      os << ']';
    }
    return os.str();
  }

  void build_tables() {
    const std::uint64_t N = order_ - 1;
    const auto factors = detail::prime_factors(N);
    std::uint64_t g = 0;
    for (std::uint64_t cand = 2; cand < order_; ++cand) {
      bool primitive = true;
      for (std::uint64_t l : factors) {
        std::uint64_t r = one_raw(), base = cand, e = N / l;
        while (e) {
          if (e & 1) r = mul_generic(r, base);
          base = mul_generic(base, base);
          e >>= 1;
        }
        if (r == one_raw()) { primitive = false; break; }
      }
      if (primitive) { g = cand; break; }
    }
    if (!g && order_ == 2) g = 1;  // GF(2): trivial group
    exp_.resize(N);
    log_.assign(order_, 0);
    std::uint64_t acc = one_raw();
    for (std::uint64_t j = 0; j < N; ++j) {
      exp_[j] = static_cast<std::uint32_t>(acc);
      log_[acc] = static_cast<std::uint32_t>(j);
      acc = mul_generic(acc, g);
    }
  }

  std::uint32_t p_;
  std::uint32_t n_;
  std::vector<std::uint32_t> modulus_;  // length n+1, monic
  std::optional<std::uint64_t> subfield_;
  std::uint32_t subfield_degree_ = 0;
  std::uint64_t order_ = 0;
  std::uint64_t mod_mask_ = 0;
  std::vector<std::uint64_t> pow_p_;
  std::vector<std::uint32_t> exp_;  // exp_[j] = g^j, j in [0, order-2]
  std::vector<std::uint32_t> log_;  // log_[g^j] = j; log_[0] unused
};

// A field element: packed coefficient vector plus the context it lives in.
// Elements from different fields never combine silently.
class FieldElement {
 public:
  FieldElement() = default;
  FieldElement(const FieldCtx& ctx, std::uint64_t packed) : ctx_(&ctx), v_(packed) {
    if (packed >= ctx.order())
      throw std::invalid_argument("packed value out of field range");
  }

  std::uint64_t packed() const { return v_; }
  const FieldCtx& ctx() const {
    if (!ctx_) throw std::logic_error("default-constructed field element");
    return *ctx_;
  }
  bool is_zero() const { return v_ == 0; }

  friend bool operator==(const FieldElement& a, const FieldElement& b) {
    check_ctx(a, b);
    return a.v_ == b.v_;
  }
  friend bool operator!=(const FieldElement& a, const FieldElement& b) { return !(a == b); }

  friend FieldElement operator+(const FieldElement& a, const FieldElement& b) {
    check_ctx(a, b);
    return FieldElement(a.ctx(), a.ctx().add_raw(a.v_, b.v_));
  }
  friend FieldElement operator-(const FieldElement& a, const FieldElement& b) {
    check_ctx(a, b);
    return FieldElement(a.ctx(), a.ctx().sub_raw(a.v_, b.v_));
  }
  friend FieldElement operator*(const FieldElement& a, const FieldElement& b) {
    check_ctx(a, b);
    return FieldElement(a.ctx(), a.ctx().mul_raw(a.v_, b.v_));
  }
  friend FieldElement operator/(const FieldElement& a, const FieldElement& b) {
    check_ctx(a, b);
    return FieldElement(a.ctx(), a.ctx().mul_raw(a.v_, a.ctx().inv_raw(b.v_)));
  }

  std::string str() const { return ctx().format_element(v_); }

 private:
  static void check_ctx(const FieldElement& a, const FieldElement& b) {
    if (!a.ctx_ || !b.ctx_) throw std::logic_error("default-constructed field element");
    if (!a.ctx_->same_field(*b.ctx_))
      throw std::invalid_argument("field context mismatch: " + a.ctx_->descriptor() +
                                  " vs " + b.ctx_->descriptor());
  }

  const FieldCtx* ctx_ = nullptr;
  std::uint64_t v_ = 0;
};

inline FieldElement mul(const FieldElement& a, const FieldElement& b) { return a * b; }
inline FieldElement add(const FieldElement& a, const FieldElement& b) { return a + b; }
inline FieldElement sub(const FieldElement& a, const FieldElement& b) { return a - b; }

inline FieldElement pow(const FieldElement& a, std::int64_t e) {
  return FieldElement(a.ctx(), a.ctx().pow_raw(a.packed(), e));
}

inline FieldElement inv(const FieldElement& a) {
  return FieldElement(a.ctx(), a.ctx().inv_raw(a.packed()));
}

inline std::uint32_t trace(const FieldElement& a) { return a.ctx().trace_raw(a.packed()); }

inline FieldElement frobenius(const FieldElement& a, std::uint32_t j) {
  return FieldElement(a.ctx(), a.ctx().frobenius_raw(a.packed(), j));
}

// u^(q^(m/2)) for a context carrying subfield order q; the involution used
// throughout the even-extension families.
inline FieldElement bar(const FieldElement& a) {
  const FieldCtx& f = a.ctx();
  if (!f.subfield_order()) throw std::logic_error("bar requires a context with subfield order set");
  const auto [p, s] = detail::prime_power_split(*f.subfield_order());
  (void)p;
  const std::uint32_t m = f.degree() / s;
  if (m % 2) throw std::domain_error("bar requires even extension degree over the subfield");
  return frobenius(a, s * (m / 2));
}

// Roots of x^2 + ux + v over GF(2^n).  u = 0 gives the unique square root of
// v (squaring is bijective in characteristic 2); otherwise there are two
// roots when Tr(v/u^2) = 0 and none when the trace is 1.  Solved as a
// GF(2)-linear system for the map t -> t^2 + t, which covers every n (the
// half-trace shortcut only works for odd n).
inline std::vector<FieldElement> solve_affine_quadratic(const FieldElement& u,
                                                        const FieldElement& v) {
  const FieldCtx& f = u.ctx();
  if (!f.same_field(v.ctx()))
    throw std::invalid_argument("field context mismatch in solve_affine_quadratic");
  if (f.characteristic() != 2)
    throw std::domain_error("solve_affine_quadratic requires characteristic 2");
  const std::uint32_t n = f.degree();
  if (u.is_zero()) {
    // sqrt(v) = v^(2^(n-1))
    std::uint64_t r = v.packed();
    for (std::uint32_t i = 0; i + 1 < n; ++i) r = f.mul_raw(r, r);
    return {FieldElement(f, r)};
  }
  const std::uint64_t usq = f.mul_raw(u.packed(), u.packed());
  const std::uint64_t w = f.mul_raw(v.packed(), f.inv_raw(usq));
  // columns of the GF(2)-linear map t -> t^2 + t on the polynomial basis
  std::vector<std::uint64_t> col(n), sel(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint64_t e = 1ull << i;
    col[i] = f.mul_raw(e, e) ^ e;
    sel[i] = e;
  }
  std::uint64_t rhs = w, pick = 0;
  std::uint32_t used = 0;
  for (std::uint32_t bit = 0; bit < n && used < n; ++bit) {
    std::uint32_t piv = used;
    while (piv < n && !(col[piv] >> bit & 1)) ++piv;
    if (piv == n) continue;
    std::swap(col[used], col[piv]);
    std::swap(sel[used], sel[piv]);
    for (std::uint32_t j = 0; j < n; ++j) {
      if (j != used && (col[j] >> bit & 1)) {
        col[j] ^= col[used];
        sel[j] ^= sel[used];
      }
    }
    if (rhs >> bit & 1) {
      rhs ^= col[used];
      pick ^= sel[used];
    }
    ++used;
  }
  if (rhs != 0) return {};  // Tr(w) = 1, no roots
  const std::uint64_t r1 = f.mul_raw(u.packed(), pick);
  const std::uint64_t r2 = f.mul_raw(u.packed(), pick ^ 1);
  auto lo = std::min(r1, r2), hi = std::max(r1, r2);
  return {FieldElement(f, lo), FieldElement(f, hi)};
}

inline std::uint64_t FieldCtx::parse_element(const std::string& text) const {
  std::uint64_t v = 0;
  if (!text.empty() && text.front() == '[') {
    std::uint64_t scale = 1;
    std::size_t pos = 1;
    std::uint32_t count = 0;
    while (pos < text.size() && text[pos] != ']') {
      std::size_t next;
      const std::uint64_t d = std::stoull(text.substr(pos), &next);
      if (d >= p_) throw std::invalid_argument("coefficient out of range in " + text);
      v += d * scale;
      scale *= p_;
      pos += next;
      ++count;
      if (pos < text.size() && text[pos] == ',') ++pos;
    }
    if (count > n_) throw std::invalid_argument("too many coefficients in " + text);
  } else {
    v = std::stoull(text, nullptr, 0);  // 0x-prefixed hex or decimal
  }
  if (v >= order_) throw std::invalid_argument("element out of field range: " + text);
  return v;
}

namespace detail {

struct FieldKey {
  std::uint32_t p, n;
  std::vector<std::uint32_t> modulus;
  std::uint64_t q;  // 0 when unset
  auto operator<=>(const FieldKey&) const = default;
};

inline std::map<FieldKey, std::unique_ptr<FieldCtx>>& field_registry() {
  static std::map<FieldKey, std::unique_ptr<FieldCtx>> reg;
  return reg;
}

inline std::mutex& field_registry_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace detail

// Returns the interned context for GF(p^n).  An omitted modulus selects the
// table default: the lexicographically smallest irreducible (smallest
// non-leading coefficient vector read as a base-p integer).  Identical
// parameters always return the same object, so pointer identity implies
// field identity.
inline const FieldCtx& make_field(std::uint32_t p, std::uint32_t n,
                                  std::optional<std::vector<std::uint32_t>> modulus,
                                  std::optional<std::uint64_t> subfield_order) {
  if (!detail::is_prime(p)) throw std::invalid_argument("characteristic must be prime");
  if (n < 1 || n > 63) throw std::invalid_argument("extension degree out of range");
  long double size = 1;
  for (std::uint32_t i = 0; i < n; ++i) size *= p;
  if (size > static_cast<long double>(kMaxOrder))
    throw std::invalid_argument("field order exceeds supported packing range");

  std::vector<std::uint32_t> mod;
  if (modulus) {
    mod = *modulus;
    detail::ptrim(mod);
    if (detail::pdeg(mod) != static_cast<int>(n))
      throw std::invalid_argument("modulus degree must equal extension degree");
    if (mod[n] != 1) throw std::invalid_argument("modulus must be monic");
    for (auto c : mod)
      if (c >= p) throw std::invalid_argument("modulus coefficient out of range");
    if (!detail::is_irreducible(mod, p))
      throw std::invalid_argument("modulus is reducible over GF(" + std::to_string(p) + ")");
  } else {
    const std::uint64_t table_cap = p == 2 ? 32 : 24;
    if ((p == 2 && n > 32) || (p != 2 && size > static_cast<long double>(1ull << table_cap)))
      throw std::invalid_argument("no default modulus tabulated for this field size; pass one explicitly");
    mod = detail::smallest_irreducible_above(p, n, -1);
  }

  detail::FieldKey key{p, n, mod, subfield_order.value_or(0)};
  std::lock_guard<std::mutex> lock(detail::field_registry_mutex());
  auto& reg = detail::field_registry();
  auto it = reg.find(key);
  if (it == reg.end()) {
    auto ctx = std::unique_ptr<FieldCtx>(new FieldCtx(p, n, mod, subfield_order));
    it = reg.emplace(std::move(key), std::move(ctx)).first;
  }
  return *it->second;
}

// Field for GF(q^m) where q = p^s, with q recorded for the bar map.
inline const FieldCtx& make_field_qm(std::uint64_t q, std::uint32_t m,
                                     std::optional<std::vector<std::uint32_t>> modulus = std::nullopt) {
  const auto [p, s] = detail::prime_power_split(q);
  return make_field(p, s * m, std::move(modulus), q);
}

// Second-smallest (and beyond) moduli, for basis-independence experiments:
// the next irreducible strictly after `prev` in the default ordering.
inline std::vector<std::uint32_t> next_modulus(std::uint32_t p, std::uint32_t n,
                                               const std::vector<std::uint32_t>& prev) {
  std::uint64_t low = 0, scale = 1;
  for (std::uint32_t i = 0; i < n; ++i) {
    low += (i < prev.size() ? prev[i] : 0) * scale;
    scale *= p;
  }
  return detail::smallest_irreducible_above(p, n, static_cast<std::int64_t>(low));
}

// Parses "gf:p=2,n=7,mod=0x83" / "gf:p=3,n=2,mod=[1,0,1]"; mod and q optional.
inline const FieldCtx& parse_field_descriptor(const std::string& text) {
  std::string body = text;
  if (body.rfind("gf:", 0) == 0) body = body.substr(3);
  std::optional<std::uint32_t> p;
  std::optional<std::uint32_t> n;
  std::optional<std::vector<std::uint32_t>> mod;
  std::optional<std::uint64_t> q;
  std::size_t pos = 0;
  while (pos < body.size()) {
    const std::size_t eq = body.find('=', pos);
    if (eq == std::string::npos)
      throw std::invalid_argument("bad field descriptor: " + text);
    const std::string key = body.substr(pos, eq - pos);
    std::size_t end;
    if (eq + 1 < body.size() && body[eq + 1] == '[') {
      end = body.find(']', eq);
      if (end == std::string::npos) throw std::invalid_argument("bad field descriptor: " + text);
      ++end;
    } else {
      end = body.find(',', eq);
      if (end == std::string::npos) end = body.size();
    }
    const std::string val = body.substr(eq + 1, end - eq - 1);
    if (key == "p") {
      p = static_cast<std::uint32_t>(std::stoul(val));
    } else if (key == "n") {
      n = static_cast<std::uint32_t>(std::stoul(val));
    } else if (key == "q") {
      q = std::stoull(val);
    } else if (key == "mod") {
      std::vector<std::uint32_t> coeffs;
      if (!val.empty() && val.front() == '[') {
        std::size_t vp = 1;
        while (vp < val.size() && val[vp] != ']') {
          std::size_t next;
          coeffs.push_back(static_cast<std::uint32_t>(std::stoul(val.substr(vp), &next)));
          vp += next;
          if (vp < val.size() && val[vp] == ',') ++vp;
        }
      } else {
        std::uint64_t mask = std::stoull(val, nullptr, 0);
        while (mask) {
          coeffs.push_back(mask & 1);
          mask >>= 1;
        }
      }
      mod = std::move(coeffs);
    } else {
      throw std::invalid_argument("unknown field descriptor key '" + key + "' in " + text);
    }
    pos = end < body.size() && body[end] == ',' ? end + 1 : end;
  }
  if (!p || !n) throw std::invalid_argument("field descriptor needs p and n: " + text);
  return make_field(*p, *n, std::move(mod), q);
}

}  // namespace permutri
