#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "padiclf/rational.hpp"

namespace padiclf {

// Capped-precision element of Q_p or of the ramified quadratic extension
// Q_p(alpha) with alpha^2 = -p.
//
// A value is stored as a pair of scaled-integer components
//
//     x = c0 + c1 * alpha,      c_i = p^lo_i * u_i + O(p^hi_i)
//
// with 0 <= u_i < p^(hi_i - lo_i) and, for u_i != 0, p not dividing u_i (so
// lo_i is the exact valuation of the component).  u_i = 0 encodes the tracked
// zero "known to vanish mod p^hi_i".  Because v_p(c0) is an integer and
// v_p(c1 * alpha) lies in Z + 1/2, the two coordinates can never cancel
// against each other: nonzero-ness and valuation of the pair are exact.
// This is what makes "consistent with zero up to p^e" a first-class answer
// for the order-of-vanishing scan.
//
// Valuations and precisions are exposed as twice their value (integers for
// both ramification 1 and 2); mpq accessors give them in units of v_p.
class PadicNumber {
 public:
  struct Component {
    long lo = kInfPrec;   // valuation of the representative
    mpz_class u = 0;      // unit part, 0 <= u < p^(hi-lo), p ∤ u unless u = 0
    long hi = kInfPrec;   // absolute precision: value known mod p^hi

    bool is_zero_rep() const { return u == 0; }
  };

  PadicNumber() = default;

  static PadicNumber zero(long p, long abs_prec, int ram = 1) {
    PadicNumber x;
    x.p_ = p;
    x.ram_ = ram;
    x.c0_ = zero_component(abs_prec);
    x.c1_ = zero_component(ram == 2 ? abs_prec : kInfPrec);
    return x;
  }

  static PadicNumber from_integer(long p, const mpz_class& v, long abs_prec) {
    PadicNumber x;
    x.p_ = p;
    x.ram_ = 1;
    x.c0_ = make_component(p, 0, v, abs_prec);
    x.c1_ = zero_component(kInfPrec);
    return x;
  }

  static PadicNumber one(long p, long abs_prec) {
    return from_integer(p, 1, abs_prec);
  }

  static PadicNumber from_rational(long p, const mpq_class& v, long abs_prec) {
    PadicNumber x;
    x.p_ = p;
    x.ram_ = 1;
    x.c0_ = component_from_rational(p, v, abs_prec);
    x.c1_ = zero_component(kInfPrec);
    return x;
  }

  // The generator alpha of Q_p(alpha), alpha^2 = -p; its coordinate is exact
  // to abs_prec.
  static PadicNumber alpha_generator(long p, long abs_prec) {
    PadicNumber x;
    x.p_ = p;
    x.ram_ = 2;
    x.c0_ = zero_component(sat_add(abs_prec, 1));
    x.c1_ = make_component(p, 0, 1, abs_prec);
    return x;
  }

  // a + b*alpha with exact rational coordinates, each known mod p^abs_prec.
  static PadicNumber from_pair(long p, const mpq_class& a, const mpq_class& b,
                               long abs_prec) {
    PadicNumber x;
    x.p_ = p;
    x.ram_ = 2;
    x.c0_ = component_from_rational(p, a, abs_prec);
    x.c1_ = component_from_rational(p, b, abs_prec);
    return x;
  }

  long prime() const { return p_; }
  int ramification() const { return ram_; }

  bool is_zero() const { return c0_.is_zero_rep() && c1_.is_zero_rep(); }
  bool provably_nonzero() const { return !is_zero(); }

  // Absolute precision as twice its value (so it stays an integer for both
  // ramifications).
  long twice_abs_precision() const {
    long h0 = sat_add(c0_.hi, c0_.hi);
    if (ram_ == 1) return h0;
    return std::min(h0, sat_add(sat_add(c1_.hi, c1_.hi), 1));
  }
  mpq_class abs_precision() const {
    mpq_class r(twice_abs_precision(), 2);
    r.canonicalize();
    return r;
  }

  // Exact valuation when provably nonzero; otherwise the certified lower
  // bound (= the absolute precision of the tracked zero).
  long twice_valuation() const {
    long v0 = c0_.is_zero_rep() ? sat_add(c0_.hi, c0_.hi)
                                : sat_add(c0_.lo, c0_.lo);
    long v1 = c1_.is_zero_rep() ? sat_add(sat_add(c1_.hi, c1_.hi), 1)
                                : sat_add(sat_add(c1_.lo, c1_.lo), 1);
    if (ram_ == 1) return v0;
    return std::min(v0, v1);
  }
  mpq_class valuation() const {
    mpq_class r(twice_valuation(), 2);
    r.canonicalize();
    return r;
  }

  bool is_unit() const { return provably_nonzero() && twice_valuation() == 0; }

  PadicNumber operator-() const {
    PadicNumber r = *this;
    r.c0_ = neg_component(p_, c0_);
    r.c1_ = neg_component(p_, c1_);
    return r;
  }

  friend PadicNumber operator+(const PadicNumber& x, const PadicNumber& y) {
    auto [a, b] = align(x, y);
    PadicNumber r = a;
    r.c0_ = add_component(r.p_, a.c0_, b.c0_);
    r.c1_ = add_component(r.p_, a.c1_, b.c1_);
    return r;
  }

  friend PadicNumber operator-(const PadicNumber& x, const PadicNumber& y) {
    return x + (-y);
  }

  friend PadicNumber operator*(const PadicNumber& x, const PadicNumber& y) {
    auto [a, b] = align(x, y);
    PadicNumber r = a;
    if (r.ram_ == 1) {
      r.c0_ = mul_component(r.p_, a.c0_, b.c0_);
      return r;
    }
    // (a0 + a1 al)(b0 + b1 al) = a0 b0 - p a1 b1 + (a0 b1 + a1 b0) al
    Component cross = mul_component(r.p_, a.c1_, b.c1_);
    cross = shift_component(cross, 1);
    cross = neg_component(r.p_, cross);
    r.c0_ = add_component(r.p_, mul_component(r.p_, a.c0_, b.c0_), cross);
    r.c1_ = add_component(r.p_, mul_component(r.p_, a.c0_, b.c1_),
                          mul_component(r.p_, a.c1_, b.c0_));
    return r;
  }

  PadicNumber inverse() const {
    if (!provably_nonzero())
      throw std::domain_error("padics: inverse of a value consistent with zero");
    if (ram_ == 1) {
      PadicNumber r = *this;
      r.c0_ = inv_component(p_, c0_);
      return r;
    }
    // 1/x = conj(x)/N(x), conj(a + b al) = a - b al, N(x) = a^2 + p b^2.
    PadicNumber conj = *this;
    conj.c1_ = neg_component(p_, conj.c1_);
    Component nb = shift_component(mul_component(p_, c1_, c1_), 1);
    Component norm = add_component(p_, mul_component(p_, c0_, c0_), nb);
    if (norm.is_zero_rep())
      throw std::domain_error("padics: norm consistent with zero in inverse");
    Component ninv = inv_component(p_, norm);
    PadicNumber r = conj;
    r.c0_ = mul_component(p_, conj.c0_, ninv);
    r.c1_ = mul_component(p_, conj.c1_, ninv);
    return r;
  }

  friend PadicNumber operator/(const PadicNumber& x, const PadicNumber& y) {
    return x * y.inverse();
  }

  static long floor_div(long a, long b) {
    long q = a / b;
    return (a % b != 0 && (a < 0) != (b < 0)) ? q - 1 : q;
  }

  // Largest precision at which nonzero representatives are materialized.
  static long usable_prec(long twice_prec, long fallback = 64) {
    return twice_prec >= kInfPrec ? fallback
                                  : std::max(floor_div(twice_prec, 2) + 2, 2L);
  }

  PadicNumber pow(unsigned long e) const {
    if (e == 0) {
      return from_integer(p_, 1, usable_prec(twice_abs_precision(), 32));
    }
    PadicNumber base = *this;
    PadicNumber acc;
    bool have = false;
    while (e > 0) {
      if (e & 1) {
        acc = have ? acc * base : base;
        have = true;
      }
      e >>= 1;
      if (e) base = base * base;
    }
    return acc;
  }

  // Exact multiplication by a rational scalar.
  PadicNumber scale(const mpq_class& q) const {
    if (q == 0) return zero(p_, kInfPrec, ram_);
    PadicNumber r = *this;
    r.c0_ = scale_component(p_, c0_, q);
    r.c1_ = scale_component(p_, c1_, q);
    return r;
  }

  // Exact division by p^k (k may be negative: multiplication by p^-k).
  PadicNumber shift(long k) const {
    PadicNumber r = *this;
    r.c0_ = shift_component(c0_, k);
    if (ram_ == 2) r.c1_ = shift_component(c1_, k);
    return r;
  }

  // Caps the absolute precision at twice_prec/2 (no-op if already lower).
  PadicNumber truncate_twice(long twice_prec) const {
    if (twice_prec >= kInfPrec) return *this;
    PadicNumber r = *this;
    long h0 = floor_div(twice_prec + 1, 2);  // ceil(t/2): 2*h0 >= twice_prec
    r.c0_ = retrunc(p_, c0_, std::min(c0_.hi, h0));
    if (ram_ == 2) {
      long h1 = floor_div(twice_prec, 2);    // 2*h1 + 1 >= twice_prec
      r.c1_ = retrunc(p_, c1_, std::min(c1_.hi, h1));
    }
    return r;
  }

  // True when x - y is consistent with zero at the shared precision.
  friend bool equal_at_shared_precision(const PadicNumber& x,
                                        const PadicNumber& y) {
    return (x - y).is_zero();
  }

  // Rational representative of coordinate i (0: rational part, 1: alpha part).
  mpq_class coordinate(int i) const {
    const Component& c = (i == 0) ? c0_ : c1_;
    if (c.is_zero_rep()) return mpq_class(0);
    mpq_class r(c.u);
    if (c.lo >= 0)
      r *= p_power(p_, c.lo);
    else
      r /= p_power(p_, -c.lo);
    return r;
  }

  // Integer representative mod p^e for elements of Z_p (ram 1, val >= 0).
  mpz_class representative_mod(long e) const {
    if (ram_ != 1)
      throw std::domain_error("padics: representative_mod needs Q_p element");
    if (c0_.hi < e)
      throw std::domain_error("padics: representative_mod beyond precision");
    if (c0_.is_zero_rep()) return 0;
    if (c0_.lo < 0)
      throw std::domain_error("padics: representative_mod of non-integral value");
    mpz_class r = c0_.u * p_power(p_, c0_.lo) % p_power(p_, e);
    return r;
  }

  // pi-adic digit expansion (pi = p for Q_p, pi = alpha otherwise).  Each
  // coordinate is expanded in base -p when ramified, since alpha^2 = -p.
  struct DigitExpansion {
    long twice_start = 0;
    std::vector<long> digits;
    long twice_prec = 0;
  };

  DigitExpansion digits() const {
    DigitExpansion d;
    d.twice_prec = twice_abs_precision();
    if (is_zero()) {
      d.twice_start = d.twice_prec;
      return d;
    }
    long tv = twice_valuation();
    d.twice_start = tv;
    std::vector<long> even = coord_digits(p_, c0_, ram_ == 2);
    std::vector<long> odd = coord_digits(p_, c1_, ram_ == 2);
    long step = (ram_ == 2) ? 1 : 2;
    for (long t = tv; t < d.twice_prec; t += step) {
      bool even_slot = ((t % 2) + 2) % 2 == 0;
      if (even_slot) {
        long j = t / 2 - c0_.lo;
        d.digits.push_back((j >= 0 && j < (long)even.size()) ? even[j] : 0);
      } else {
        long j = (t - 1) / 2 - c1_.lo;
        d.digits.push_back((j >= 0 && j < (long)odd.size()) ? odd[j] : 0);
      }
    }
    return d;
  }

  std::string to_string() const {
    std::ostringstream os;
    DigitExpansion d = digits();
    // exponents: p-units for Q_p, integral pi-units for the ramified case
    const char* pi = (ram_ == 2) ? "pi" : "p";
    auto expo = [&](long twice) {
      if (twice >= kInfPrec) return std::string("inf");
      return ram_ == 2 ? std::to_string(twice) : half_str(twice);
    };
    if (is_zero()) {
      os << "O(" << pi << "^" << expo(d.twice_prec) << ")";
      return os.str();
    }
    os << pi << "^" << expo(d.twice_start) << "*(";
    for (size_t i = 0; i < d.digits.size(); ++i) {
      if (i) os << ",";
      os << d.digits[i];
    }
    os << ") + O(" << pi << "^" << expo(d.twice_prec) << ")";
    return os.str();
  }

 private:
  static std::string half_str(long twice) {
    if (twice >= kInfPrec) return "inf";
    if (twice % 2 == 0) return std::to_string(twice / 2);
    return std::to_string(twice) + "/2";
  }

  static Component zero_component(long hi) {
    Component c;
    c.lo = hi;
    c.u = 0;
    c.hi = hi;
    return c;
  }

  static Component make_component(long p, long lo, const mpz_class& u_raw,
                                  long hi) {
    if (u_raw == 0 || lo >= hi) return zero_component(std::min(hi, kInfPrec));
    if (hi >= kInfPrec)
      throw std::invalid_argument(
          "padics: nonzero values need finite absolute precision");
    mpz_class m = p_power(p, hi - lo);
    mpz_class u = u_raw % m;
    if (u < 0) u += m;
    if (u == 0) return zero_component(hi);
    long v = int_valuation(u, p);
    lo += v;
    u /= p_power(p, v);
    return Component{lo, u, hi};
  }

  static Component component_from_rational(long p, const mpq_class& v_in,
                                           long abs_prec) {
    mpq_class v = v_in;
    v.canonicalize();  // two-argument mpq_class construction can be unreduced
    if (v == 0) return zero_component(abs_prec);
    long val = rat_valuation(v, p);
    if (val >= abs_prec) return zero_component(abs_prec);
    mpq_class unit = v;
    if (val >= 0)
      unit /= p_power(p, val);
    else
      unit *= p_power(p, -val);
    mpz_class m = p_power(p, abs_prec - val);
    mpz_class num = unit.get_num() % m;
    if (num < 0) num += m;
    mpz_class u = num * mod_inverse(unit.get_den() % m, m) % m;
    return make_component(p, val, u, abs_prec);
  }

  static Component retrunc(long p, const Component& c, long hi) {
    if (c.is_zero_rep()) return zero_component(std::min(c.hi, hi));
    return make_component(p, c.lo, c.u, hi);
  }

  static Component neg_component(long p, const Component& c) {
    if (c.is_zero_rep()) return c;
    Component r = c;
    r.u = p_power(p, c.hi - c.lo) - c.u;
    return r;
  }

  static Component add_component(long p, const Component& a,
                                 const Component& b) {
    long hi = std::min(a.hi, b.hi);
    long la = a.is_zero_rep() ? a.hi : a.lo;
    long lb = b.is_zero_rep() ? b.hi : b.lo;
    long lo = std::min(la, lb);
    if (lo >= hi) return zero_component(hi);
    mpz_class u = 0;
    if (!a.is_zero_rep()) u += a.u * p_power(p, a.lo - lo);
    if (!b.is_zero_rep()) u += b.u * p_power(p, b.lo - lo);
    return make_component(p, lo, u, hi);
  }

  static Component mul_component(long p, const Component& a,
                                 const Component& b) {
    long la = a.is_zero_rep() ? a.hi : a.lo;
    long lb = b.is_zero_rep() ? b.hi : b.lo;
    long hi = std::min(sat_add(la, b.hi), sat_add(lb, a.hi));
    if (a.is_zero_rep() || b.is_zero_rep()) return zero_component(hi);
    long lo = sat_add(a.lo, b.lo);
    if (lo >= hi) return zero_component(hi);
    return make_component(p, lo, a.u * b.u, hi);
  }

  static Component inv_component(long p, const Component& c) {
    if (c.is_zero_rep())
      throw std::domain_error(
          "padics: inverse of a component consistent with zero");
    long rel = c.hi - c.lo;
    mpz_class m = p_power(p, rel);
    return make_component(p, -c.lo, mod_inverse(c.u, m), rel - c.lo);
  }

  static Component shift_component(const Component& c, long k) {
    Component r = c;
    r.lo = sat_add(r.lo, k);
    r.hi = sat_add(r.hi, k);
    return r;
  }

  static Component scale_component(long p, const Component& c,
                                   const mpq_class& q_in) {
    mpq_class q = q_in;
    q.canonicalize();
    long v = rat_valuation(q, p);
    if (c.is_zero_rep()) return zero_component(sat_add(c.hi, v));
    mpq_class unit = q;
    if (v >= 0)
      unit /= p_power(p, v);
    else
      unit *= p_power(p, -v);
    long lo = sat_add(c.lo, v), hi = sat_add(c.hi, v);
    mpz_class m = p_power(p, hi - lo);
    mpz_class num = unit.get_num() % m;
    if (num < 0) num += m;
    mpz_class u = c.u * num % m * mod_inverse(unit.get_den() % m, m) % m;
    return make_component(p, lo, u, hi);
  }

  static std::vector<long> coord_digits(long p, const Component& c,
                                        bool negative_base) {
    std::vector<long> out;
    if (c.is_zero_rep()) return out;
    mpz_class m = c.u;
    long count = c.hi - c.lo;
    for (long i = 0; i < count; ++i) {
      mpz_class r = m % p;
      if (r < 0) r += p;
      out.push_back(r.get_si());
      m = (m - r) / p;
      if (negative_base) m = -m;
    }
    return out;
  }

  static PadicNumber promote(const PadicNumber& x, int ram) {
    PadicNumber r = x;
    if (r.ram_ != ram) r.ram_ = 2;
    return r;
  }

  static std::pair<PadicNumber, PadicNumber> align(const PadicNumber& x,
                                                   const PadicNumber& y) {
    if (x.p_ != y.p_) throw std::invalid_argument("padics: mixed primes");
    int ram = std::max(x.ram_, y.ram_);
    return {promote(x, ram), promote(y, ram)};
  }

  long p_ = 0;
  int ram_ = 1;
  Component c0_ = zero_component(kInfPrec);
  Component c1_ = zero_component(kInfPrec);
};

// --- number-theoretic operations -------------------------------------------

// Teichmueller lift: the unique (p-1)-th root of unity congruent to a mod p,
// to absolute precision n, by iterating the p-power map to its fixed point.
inline PadicNumber teichmuller(const mpz_class& a, long p, long n) {
  if (p == 2) throw std::invalid_argument("padics: teichmuller requires p > 2");
  if (!is_prime(p)) throw std::invalid_argument("padics: p must be prime");
  if (n < 1) throw std::invalid_argument("padics: precision must be >= 1");
  mpz_class m = p_power(p, n);
  mpz_class x = a % m;
  if (x < 0) x += m;
  if (x % p == 0) throw std::domain_error("padics: teichmuller of a non-unit");
  for (long i = 0; i <= n + 1; ++i) {
    mpz_class y = pow_mod(x, p, m);
    if (y == x) break;
    x = y;
  }
  if (pow_mod(x, p, m) != x)
    throw std::logic_error("padics: teichmuller iteration did not stabilize");
  return PadicNumber::from_integer(p, x, n);
}

// <x> = x / omega(x) for a unit x in Z_p; the result is 1 mod p and
// omega(x)*<x> = x holds to working precision.
inline PadicNumber angle_part(const PadicNumber& x) {
  if (x.ramification() != 1 || !x.is_unit())
    throw std::domain_error("padics: angle_part requires a unit in Z_p");
  long n = x.twice_abs_precision() / 2;
  if (n >= kInfPrec)
    throw std::invalid_argument("padics: angle_part needs finite precision");
  mpz_class rep = x.representative_mod(n);
  PadicNumber w = teichmuller(rep, x.prime(), n);
  return x / w;
}

// v_p(n!) = (n - digit_sum_p(n)) / (p - 1); always an integer.
inline long factorial_valuation(const mpz_class& n, long p) {
  if (n < 0)
    throw std::invalid_argument("padics: factorial_valuation of n < 0");
  mpz_class num = n - digit_sum(n, p);
  mpz_class q = num / (p - 1);
  return q.get_si();
}

// <a>^(s-1) as the truncated binomial series sum_{k<terms} C(s-1,k) p^k at^k
// with at = (<a> - 1)/p.  The omitted tail has valuation at least
// terms*(p-2)/(p-1); valuations in Q_p are integers, so the result is
// certified mod p^ceil of that bound.
inline PadicNumber binomial_series_power(const PadicNumber& a,
                                         const PadicNumber& s_minus_1,
                                         long terms) {
  long p = a.prime();
  if (p < 3)
    throw std::invalid_argument("padics: binomial series requires p >= 3");
  if (terms < 1) throw std::invalid_argument("padics: terms must be >= 1");
  if (s_minus_1.prime() != p)
    throw std::invalid_argument("padics: mixed primes");
  if (s_minus_1.ramification() != 1 || s_minus_1.twice_valuation() < 0)
    throw std::domain_error("padics: exponent must lie in Z_p");
  PadicNumber ang = angle_part(a);
  long wp = std::max(ang.twice_abs_precision(),
                     s_minus_1.twice_abs_precision()) /
                2 +
            terms + 8;
  wp = std::min(wp, kInfPrec / 2);
  PadicNumber one = PadicNumber::one(p, wp);
  PadicNumber z = ang - one;  // p * atilde, valuation >= 1
  PadicNumber sum = one;
  PadicNumber binom = one;  // C(s-1, k) as k advances
  PadicNumber zpow = one;
  for (long k = 1; k < terms; ++k) {
    PadicNumber factor =
        (s_minus_1 - PadicNumber::from_integer(p, k - 1, wp))
            .scale(mpq_class(1, k));
    binom = binom * factor;
    zpow = zpow * z;
    sum = sum + binom * zpow;
  }
  long num = terms * (p - 2);
  long tail = num / (p - 1) + (num % (p - 1) ? 1 : 0);
  return sum.truncate_twice(std::min(sum.twice_abs_precision(), 2 * tail));
}

}  // namespace padiclf
