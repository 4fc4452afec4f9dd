#pragma once

#include <gmpxx.h>

#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>
#include <vector>

#include "padiclf/rational.hpp"

namespace padiclf {

// Independent complex-analytic and finite-field oracles.  This is the only
// module that touches floating point; it never feeds the exact pipeline,
// only acceptance comparisons.

struct CurveData {
  long a1 = 0, a2 = 0, a3 = 0, a4 = 0, a6 = 0;
  long conductor = 0;  // user-asserted, cross-checked downstream

  mpz_class b2() const { return mpz_class(a1) * a1 + 4 * mpz_class(a2); }
  mpz_class b4() const { return 2 * mpz_class(a4) + mpz_class(a1) * a3; }
  mpz_class b6() const { return mpz_class(a3) * a3 + 4 * mpz_class(a6); }
  mpz_class b8() const {
    return mpz_class(a1) * a1 * a6 + 4 * mpz_class(a2) * a6 -
           mpz_class(a1) * a3 * a4 + mpz_class(a2) * a3 * a3 -
           mpz_class(a4) * a4;
  }
  mpz_class discriminant() const {
    mpz_class B2 = b2(), B4 = b4(), B6 = b6(), B8 = b8();
    return -B2 * B2 * B8 - 8 * B4 * B4 * B4 - 27 * B6 * B6 + 9 * B2 * B4 * B6;
  }

  void validate() const {
    if (discriminant() == 0)
      throw std::invalid_argument("numoracle: singular curve");
    if (conductor < 1)
      throw std::invalid_argument("numoracle: conductor must be positive");
  }
};

// a_q = q + 1 - #E(F_q) by direct enumeration; requires good reduction.
inline long curve_ap(const CurveData& e, long q) {
  if (!is_prime(q)) throw std::invalid_argument("numoracle: q must be prime");
  if (q >= 100000)
    throw std::invalid_argument("numoracle: enumeration is desk-scale, q < 10^5");
  mpz_class disc = e.discriminant();
  if (disc % q == 0)
    throw std::invalid_argument("numoracle: bad reduction prime");
  auto md = [&](long long x) {
    long long r = x % q;
    return r < 0 ? r + q : r;
  };
  long long count = 1;  // point at infinity
  if (q == 2) {
    for (long x = 0; x < 2; ++x)
      for (long y = 0; y < 2; ++y) {
        long long lhs = y * y + e.a1 * x * y + e.a3 * y;
        long long rhs =
            (long long)x * x * x + e.a2 * x * x + e.a4 * x + e.a6;
        if (md(lhs - rhs) == 0) ++count;
      }
  } else {
    // complete the square: (2y + a1 x + a3)^2 = 4 rhs + (a1 x + a3)^2
    std::vector<int> is_square(q, 0);
    for (long t = 0; t < q; ++t) is_square[(long)(((long long)t * t) % q)] = 1;
    for (long x = 0; x < q; ++x) {
      long long ax = md((long long)e.a1 * x + e.a3);
      long long rhs = md(md((long long)x * x) * x + (long long)e.a2 * x * x +
                         (long long)e.a4 * x + e.a6);
      long long d = md(4 * rhs + ax * ax);
      if (d == 0)
        count += 1;
      else if (is_square[(long)d])
        count += 2;
    }
  }
  long ap = q + 1 - (long)count;
  // Hasse: a_q^2 <= 4q; a violation means the enumeration is broken.
  if ((long long)ap * ap > 4 * (long long)q)
    throw std::logic_error("numoracle: Hasse bound violated by point count");
  return ap;
}

// For q | N: 0 for additive reduction, +1 split multiplicative, -1 nonsplit.
// Split test: tangent-cone discriminant at the node is a nonzero square.
inline long curve_ap_bad(const CurveData& e, long q) {
  if (e.conductor % (q * q) == 0) return 0;  // additive
  auto md = [&](long long x) {
    long long r = x % q;
    return r < 0 ? r + q : r;
  };
  // find the singular point of the reduction
  for (long x = 0; x < q; ++x) {
    for (long y = 0; y < q; ++y) {
      long long f = y * (long long)y + (long long)e.a1 * x * y +
                    (long long)e.a3 * y - ((long long)x * x * x +
                                           (long long)e.a2 * x * x +
                                           (long long)e.a4 * x + e.a6);
      long long fx = (long long)e.a1 * y - (3 * (long long)x * x +
                                            2 * (long long)e.a2 * x + e.a4);
      long long fy = 2 * (long long)y + (long long)e.a1 * x + e.a3;
      if (md(f) == 0 && md(fx) == 0 && md(fy) == 0) {
        // tangent cone v^2 + a1 u v - (3x + a2 + ...) u^2; its discriminant
        long long disc = md((long long)e.a1 * e.a1 + 4 * (3 * (long long)x +
                                                          e.a2));
        if (disc == 0) return 0;
        for (long t = 0; t < q; ++t)
          if (md((long long)t * t - disc) == 0) return 1;
        return -1;
      }
    }
  }
  throw std::logic_error("numoracle: no singular point found mod bad prime");
}

// a_n for n <= limit by multiplicativity from prime values.
inline std::vector<long> curve_an_table(const CurveData& e, long limit) {
  std::vector<long> a(limit + 1, 0);
  if (limit >= 1) a[1] = 1;
  std::vector<bool> sieve(limit + 1, true);
  for (long q = 2; q <= limit; ++q) {
    if (!sieve[q]) continue;
    for (long m = 2 * q; m <= limit; m += q) sieve[m] = false;
    long aq = (e.conductor % q == 0) ? curve_ap_bad(e, q) : curve_ap(e, q);
    // prime powers
    std::vector<long> apow;  // a_{q^j}
    apow.push_back(1);
    apow.push_back(aq);
    for (long long pw = (long long)q * q; pw <= limit; pw *= q) {
      long j = (long)apow.size() - 1;
      long next;
      if (e.conductor % q == 0)
        next = apow[j] * aq;
      else
        next = aq * apow[j] - q * apow[j - 1];
      apow.push_back(next);
    }
    // fill multiplicatively
    for (long long pw = q, j = 1; pw <= limit; pw *= q, ++j) {
      for (long n = 1; n * pw <= limit; ++n) {
        if (n % q == 0) continue;
        if (a[n] != 0 || n == 1) a[n * pw] = a[n] * apow[j];
      }
    }
  }
  return a;
}

// Result of the rapidly convergent exponential-sum evaluation of L(E,1).
struct LValueResult {
  double value = 0.0;
  double tail_bound = 0.0;
  int sign = 0;  // functional-equation sign used
};

// L(E,1) = (1 + sign) * sum_{n>=1} (a_n/n) exp(-2 pi n / sqrt(N)).
// The sign comes from the modular-symbol Fricke eigenvalue (sign = -w).
inline LValueResult l_value_numeric(const CurveData& e, long terms, int sign) {
  if (terms < 1000)
    throw std::invalid_argument("numoracle: need at least 1000 terms");
  e.validate();
  std::vector<long> an = curve_an_table(e, terms);
  double c = 2.0 * M_PI / std::sqrt((double)e.conductor);
  double sum = 0.0;
  for (long n = terms; n >= 1; --n)
    sum += (double)an[n] / (double)n * std::exp(-c * n);
  // |a_n| <= n crudely, so the tail is below a geometric series
  double r = std::exp(-c);
  double tail = std::pow(r, terms + 1) / (1.0 - r);
  LValueResult out;
  out.sign = sign;
  out.value = (1 + sign) * sum;
  out.tail_bound = 2.0 * tail;
  return out;
}

inline double agm(double a, double b, double tol = 1e-15) {
  if (a <= 0 || b <= 0)
    throw std::invalid_argument("numoracle: agm needs positive arguments");
  for (int i = 0; i < 200; ++i) {
    double a1 = 0.5 * (a + b);
    double b1 = std::sqrt(a * b);
    if (std::abs(a1 - b1) < tol * std::abs(a1)) return a1;
    a = a1;
    b = b1;
  }
  throw std::runtime_error("numoracle: AGM did not converge");
}

// Real period of the real locus, by AGM on the roots of
// 4x^3 + b2 x^2 + 2 b4 x + b6.
inline double real_period(const CurveData& e) {
  e.validate();
  double B2 = e.b2().get_d(), B4 = e.b4().get_d(), B6 = e.b6().get_d();
  // roots of g(x) = 4x^3 + B2 x^2 + 2 B4 x + B6 via the cubic formula on a
  // depressed cubic, done in complex arithmetic
  std::complex<double> a(4, 0), b(B2, 0), c(2 * B4, 0), d(B6, 0);
  std::complex<double> p = (3.0 * a * c - b * b) / (3.0 * a * a);
  std::complex<double> q =
      (2.0 * b * b * b - 9.0 * a * b * c + 27.0 * a * a * d) /
      (27.0 * a * a * a);
  std::complex<double> disc = q * q / 4.0 + p * p * p / 27.0;
  std::complex<double> u = std::pow(-q / 2.0 + std::sqrt(disc), 1.0 / 3.0);
  if (std::abs(u) < 1e-12) u = std::pow(-q / 2.0 - std::sqrt(disc), 1.0 / 3.0);
  std::complex<double> v = (std::abs(u) < 1e-12) ? 0.0 : -p / (3.0 * u);
  std::complex<double> w(-0.5, std::sqrt(3.0) / 2.0);
  std::vector<std::complex<double>> roots;
  for (int i = 0; i < 3; ++i) {
    std::complex<double> t = u * std::pow(w, i) + v / std::pow(w, i);
    roots.push_back(t - b / (3.0 * a));
  }
  // Newton-polish each root on g
  auto g = [&](std::complex<double> x) {
    return ((4.0 * x + B2) * x + 2 * B4) * x + B6;
  };
  auto gp = [&](std::complex<double> x) {
    return (12.0 * x + 2 * B2) * x + 2 * B4;
  };
  for (auto& r : roots)
    for (int it = 0; it < 60; ++it) r = r - g(r) / gp(r);

  mpz_class disc_e = e.discriminant();
  if (disc_e > 0) {
    // three real roots e1 > e2 > e3; E(R) has two components and the full
    // real period is 2*pi / agm(sqrt(e1-e3), sqrt(e1-e2))
    std::vector<double> re = {roots[0].real(), roots[1].real(),
                              roots[2].real()};
    std::sort(re.begin(), re.end());
    double e3 = re[0], e2 = re[1], e1 = re[2];
    return 2.0 * M_PI / agm(std::sqrt(e1 - e3), std::sqrt(e1 - e2));
  }
  // One real root e1 and a complex pair z, conj(z); E(R) is connected.
  // agm(sqrt(e1-z), sqrt(e1-zbar)) is real after one step:
  //   a1 = Re sqrt(e1-z),  b1 = sqrt|e1-z|,  Omega = pi / agm(a1, b1).
  int ir = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(roots[i].imag()) < std::abs(roots[ir].imag())) ir = i;
  std::complex<double> e1 = roots[ir];
  std::complex<double> z = roots[(ir + 1) % 3];
  std::complex<double> s = std::sqrt(e1 - z);
  double a1 = std::abs(s.real());
  double b1 = std::sqrt(std::abs(e1 - z));
  return M_PI / agm(a1, b1);
}

}  // namespace padiclf
