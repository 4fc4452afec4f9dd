#pragma once

#include <gmpxx.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace padiclf {

// Sentinel for "valuation of zero" / exact precision.  Large enough that
// saturated sums never overflow a long, small enough to add a few of them.
inline constexpr long kInfPrec = long(1) << 40;

inline long sat_add(long a, long b) {
  if (a >= kInfPrec || b >= kInfPrec) return kInfPrec;
  long s = a + b;
  return s >= kInfPrec ? kInfPrec : s;
}

inline mpz_class mpz_pow(const mpz_class& base, unsigned long e) {
  mpz_class r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

// p^e for e >= 0.
inline mpz_class p_power(long p, long e) {
  if (e < 0) throw std::invalid_argument("p_power: negative exponent");
  return mpz_pow(mpz_class(p), static_cast<unsigned long>(e));
}

// v_p(n), with kInfPrec for n = 0.
inline long int_valuation(const mpz_class& n, long p) {
  if (n == 0) return kInfPrec;
  mpz_class m = n, q, r;
  long v = 0;
  for (;;) {
    mpz_fdiv_qr_ui(q.get_mpz_t(), r.get_mpz_t(), m.get_mpz_t(),
                   static_cast<unsigned long>(p));
    if (r != 0) break;
    m = q;
    ++v;
  }
  return v;
}

inline long rat_valuation(const mpq_class& x, long p) {
  if (x == 0) return kInfPrec;
  return int_valuation(x.get_num(), p) - int_valuation(x.get_den(), p);
}

// Sum of base-p digits of n >= 0.
inline long digit_sum(const mpz_class& n, long p) {
  if (n < 0) throw std::invalid_argument("digit_sum: negative argument");
  mpz_class m = n, q, r;
  long s = 0;
  while (m != 0) {
    mpz_fdiv_qr_ui(q.get_mpz_t(), r.get_mpz_t(), m.get_mpz_t(),
                   static_cast<unsigned long>(p));
    s += r.get_si();
    m = q;
  }
  return s;
}

inline mpz_class mod_inverse(const mpz_class& a, const mpz_class& m) {
  mpz_class r;
  if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0)
    throw std::domain_error("mod_inverse: not invertible");
  return r;
}

inline mpz_class pow_mod(const mpz_class& b, const mpz_class& e,
                         const mpz_class& m) {
  mpz_class r;
  mpz_powm(r.get_mpz_t(), b.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
  return r;
}

inline bool is_prime(long n) {
  if (n < 2) return false;
  mpz_class z(n);
  return mpz_probab_prime_p(z.get_mpz_t(), 40) != 0;
}

inline mpz_class mpz_gcd2(const mpz_class& a, const mpz_class& b) {
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

inline long mpq_floor_long(const mpq_class& q) {
  mpz_class r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
  return r.get_si();
}

inline long mpq_ceil_long(const mpq_class& q) {
  mpz_class r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
  return r.get_si();
}

// Parses "a" or "a/b" into an exact rational.
inline mpq_class parse_rational(const std::string& s) {
  mpq_class q;
  if (q.set_str(s, 10) != 0)
    throw std::invalid_argument("parse_rational: bad input '" + s + "'");
  q.canonicalize();
  return q;
}

inline std::string rational_to_string(const mpq_class& q) {
  return q.get_str();
}

// Best rational approximation of x with denominator <= den_bound, via the
// continued fraction of x.  Used only to reconcile float oracles with exact
// lattice data.
inline mpq_class rational_reconstruct(double x, long den_bound) {
  mpz_class p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double y = x;
  for (int i = 0; i < 64; ++i) {
    double fl = std::floor(y);
    mpz_class a(fl);
    mpz_class p2 = a * p1 + p0, q2 = a * q1 + q0;
    if (q2 > den_bound) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    double frac = y - fl;
    if (frac < 1e-15) break;
    y = 1.0 / frac;
  }
  if (q1 == 0) return mpq_class(0);
  mpq_class r(p1, q1);
  r.canonicalize();
  return r;
}

}  // namespace padiclf
