#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <vector>

#include "padiclf/padic.hpp"

namespace padiclf {

// Dense polynomial over Q, used for the exact symbolic cross-checks of the
// combinatorial identities (falling factorials, shift expansions).
struct RationalPoly {
  std::vector<mpq_class> c;  // c[i] * X^i

  static RationalPoly zero() { return {}; }
  static RationalPoly constant(const mpq_class& v) {
    RationalPoly p;
    if (v != 0) p.c = {v};
    return p;
  }
  // X - r
  static RationalPoly linear_root(const mpq_class& r) {
    RationalPoly p;
    p.c = {-r, 1};
    return p;
  }

  long degree() const { return (long)c.size() - 1; }

  void trim() {
    while (!c.empty() && c.back() == 0) c.pop_back();
  }

  friend RationalPoly operator*(const RationalPoly& a, const RationalPoly& b) {
    if (a.c.empty() || b.c.empty()) return {};
    RationalPoly out;
    out.c.assign(a.c.size() + b.c.size() - 1, 0);
    for (size_t i = 0; i < a.c.size(); ++i)
      for (size_t j = 0; j < b.c.size(); ++j) out.c[i + j] += a.c[i] * b.c[j];
    return out;
  }

  friend RationalPoly operator+(const RationalPoly& a, const RationalPoly& b) {
    RationalPoly out;
    out.c.assign(std::max(a.c.size(), b.c.size()), 0);
    for (size_t i = 0; i < a.c.size(); ++i) out.c[i] += a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) out.c[i] += b.c[i];
    out.trim();
    return out;
  }

  RationalPoly derivative() const {
    RationalPoly out;
    if (c.size() <= 1) return out;
    out.c.resize(c.size() - 1);
    for (size_t i = 1; i < c.size(); ++i) out.c[i - 1] = c[i] * (long)i;
    return out;
  }

  RationalPoly nth_derivative(long n) const {
    RationalPoly p = *this;
    for (long i = 0; i < n; ++i) p = p.derivative();
    return p;
  }

  mpq_class eval(const mpq_class& x) const {
    mpq_class acc = 0;
    for (size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
    return acc;
  }

  PadicNumber eval(const PadicNumber& x, long work_prec) const {
    PadicNumber acc = PadicNumber::zero(x.prime(), work_prec);
    for (size_t i = c.size(); i-- > 0;)
      acc = acc * x + PadicNumber::from_rational(x.prime(), c[i], work_prec);
    return acc;
  }

  // coefficients of p(s0 + X) as a polynomial in X
  RationalPoly taylor_shift(const mpq_class& s0) const {
    RationalPoly out;
    out.c.assign(c.size(), 0);
    // Horner on p(s0 + X): process from the top coefficient down
    for (size_t i = c.size(); i-- > 0;) {
      // out = out * (s0 + X) + c[i]
      RationalPoly next;
      next.c.assign(out.c.size() + 1, 0);
      for (size_t j = 0; j < out.c.size(); ++j) {
        next.c[j] += out.c[j] * s0;
        next.c[j + 1] += out.c[j];
      }
      if (!next.c.empty()) next.c[0] += c[i];
      next.trim();
      out = next;
    }
    out.c.resize(c.size(), 0);
    return out;
  }
};

// f_n(s) = (s-1)(s-2)...(s-n) = n! C(s-1, n), as an exact polynomial.
inline RationalPoly falling_factorial_poly(long n) {
  RationalPoly p = RationalPoly::constant(1);
  for (long i = 1; i <= n; ++i) p = p * RationalPoly::linear_root(i);
  return p;
}

// Elementary symmetric polynomials e_0..e_max of the given values, by the
// usual one-root-at-a-time recurrence.
template <typename T>
std::vector<T> elementary_symmetric(const std::vector<T>& roots, long e_max,
                                    const T& one, const T& zero) {
  std::vector<T> e(e_max + 1, zero);
  e[0] = one;
  long used = 0;
  for (const T& r : roots) {
    ++used;
    for (long j = std::min(e_max, used); j >= 1; --j)
      e[j] = e[j] + r * e[j - 1];
  }
  return e;
}

}  // namespace padiclf
