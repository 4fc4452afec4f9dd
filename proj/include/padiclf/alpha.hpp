#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <vector>

#include "padiclf/padic.hpp"
#include "padiclf/rational.hpp"

namespace padiclf {

// Defining data of the Hecke polynomial X^2 - ap X + p^(k-1).
struct HeckeContext {
  long p = 0;
  long ap = 0;
  long k = 2;

  bool operator==(const HeckeContext&) const = default;
  bool ordinary() const { return ap % p != 0; }
  mpz_class pk1() const { return p_power(p, k - 1); }
};

// Exact element a + b*alpha of Q[alpha]/(alpha^2 - ap*alpha + p^(k-1)).
// All measure values live here before any p-adic embedding, so the
// distribution axioms can be checked by exact equality.
class AlphaElement {
 public:
  AlphaElement() = default;
  AlphaElement(HeckeContext ctx, mpq_class a, mpq_class b)
      : ctx_(ctx), a_(std::move(a)), b_(std::move(b)) {
    a_.canonicalize();
    b_.canonicalize();
  }

  static AlphaElement from_rational(HeckeContext ctx, const mpq_class& a) {
    return AlphaElement(ctx, a, 0);
  }
  static AlphaElement alpha(HeckeContext ctx) {
    return AlphaElement(ctx, 0, 1);
  }
  static AlphaElement zero(HeckeContext ctx) {
    return AlphaElement(ctx, 0, 0);
  }

  const HeckeContext& context() const { return ctx_; }
  const mpq_class& ratpart() const { return a_; }
  const mpq_class& alphapart() const { return b_; }
  bool is_rational() const { return b_ == 0; }
  bool is_zero() const { return a_ == 0 && b_ == 0; }

  friend AlphaElement operator+(const AlphaElement& x, const AlphaElement& y) {
    x.require_same(y);
    return AlphaElement(x.ctx_, x.a_ + y.a_, x.b_ + y.b_);
  }
  friend AlphaElement operator-(const AlphaElement& x, const AlphaElement& y) {
    x.require_same(y);
    return AlphaElement(x.ctx_, x.a_ - y.a_, x.b_ - y.b_);
  }
  AlphaElement operator-() const { return AlphaElement(ctx_, -a_, -b_); }

  friend AlphaElement operator*(const AlphaElement& x, const AlphaElement& y) {
    x.require_same(y);
    // (a1 + b1 al)(a2 + b2 al), al^2 = ap*al - p^(k-1)
    mpq_class pk1(x.ctx_.pk1());
    mpq_class a = x.a_ * y.a_ - x.b_ * y.b_ * pk1;
    mpq_class b = x.a_ * y.b_ + x.b_ * y.a_ + x.b_ * y.b_ * x.ctx_.ap;
    return AlphaElement(x.ctx_, a, b);
  }

  AlphaElement conj() const {
    // conjugate root is ap - alpha
    return AlphaElement(ctx_, a_ + b_ * ctx_.ap, -b_);
  }

  mpq_class norm() const {
    // x * conj(x), rational
    mpq_class pk1(ctx_.pk1());
    return a_ * a_ + a_ * b_ * ctx_.ap + b_ * b_ * pk1;
  }

  AlphaElement inverse() const {
    mpq_class n = norm();
    if (n == 0) throw std::domain_error("padics: inverse of zero AlphaElement");
    AlphaElement c = conj();
    return AlphaElement(ctx_, c.a_ / n, c.b_ / n);
  }

  friend AlphaElement operator/(const AlphaElement& x, const AlphaElement& y) {
    return x * y.inverse();
  }

  AlphaElement pow(long e) const {
    if (e < 0) return inverse().pow(-e);
    AlphaElement acc = from_rational(ctx_, 1);
    AlphaElement base = *this;
    unsigned long n = static_cast<unsigned long>(e);
    while (n) {
      if (n & 1) acc = acc * base;
      n >>= 1;
      if (n) base = base * base;
    }
    return acc;
  }

  AlphaElement scale(const mpq_class& q) const {
    return AlphaElement(ctx_, a_ * q, b_ * q);
  }

  bool operator==(const AlphaElement& y) const {
    return ctx_ == y.ctx_ && a_ == y.a_ && b_ == y.b_;
  }

  // Embeds at a chosen p-adic root image of alpha.  The image must satisfy
  // the defining polynomial; this is the ring homomorphism a + b*alpha |->
  // a + b*root.
  PadicNumber embed(const PadicNumber& root) const {
    long prec = root.twice_abs_precision() / 2 + 4;
    PadicNumber av = PadicNumber::from_rational(ctx_.p, a_, prec);
    PadicNumber bv = PadicNumber::from_rational(ctx_.p, b_, prec);
    return av + bv * root;
  }

  // Exact p-adic valuation at the given embedding.  In the supersingular
  // a_p = 0 case the two coordinates have valuations of distinct parity and
  // the minimum is exact; in the ordinary case the valuation is found by
  // embedding at the unit root with escalating precision until it resolves.
  mpq_class padic_valuation_at_unit_root() const;
  // twice the valuation, as a saturated integer (kInfPrec for zero)
  long twice_padic_valuation_at_unit_root() const;

  mpq_class padic_valuation_supersingular() const {
    if (ctx_.ap % ctx_.p == 0 && ctx_.ap != 0)
      throw std::domain_error("padics: unsupported supersingular context");
    long va = rat_valuation(a_, ctx_.p);
    long vb = rat_valuation(b_, ctx_.p);
    long tva = sat_add(va, va);
    long tvb = sat_add(sat_add(vb, vb), ctx_.k - 1);
    long t = std::min(tva, tvb);
    mpq_class r(t, 2);
    r.canonicalize();
    return r;
  }

  std::string to_string() const {
    std::string s = a_.get_str();
    if (b_ != 0) s += " +alpha* " + b_.get_str();
    return s;
  }

 private:
  void require_same(const AlphaElement& y) const {
    if (!(ctx_ == y.ctx_))
      throw std::invalid_argument("padics: mixed AlphaElement contexts");
  }

  HeckeContext ctx_;
  mpq_class a_ = 0;
  mpq_class b_ = 0;
};

// --- Hecke polynomial roots --------------------------------------------------

struct HeckeRoot {
  PadicNumber root;
  bool admissible = false;
};

// Unit root of X^2 - ap X + p^(k-1) by Hensel lifting from the residue
// ap mod p, with the standard Newton step on a precision-doubling schedule.
inline PadicNumber hensel_unit_root(long ap, long k, long p, long prec) {
  mpz_class pk1 = p_power(p, k - 1);
  mpz_class x = mpz_class(ap) % p;
  if (x < 0) x += p;
  std::vector<long> schedule;
  for (long t = prec; t > 1; t = (t + 1) / 2) schedule.push_back(t);
  schedule.push_back(1);
  for (auto it = schedule.rbegin(); it != schedule.rend(); ++it) {
    mpz_class m = p_power(p, *it);
    // f(x) = x^2 - ap x + p^(k-1);  f'(x) = 2x - ap, a unit mod p
    mpz_class fx = (x * x - ap * x + pk1) % m;
    mpz_class fpx = (2 * x - ap) % m;
    if (fpx < 0) fpx += m;
    x = (x - fx * mod_inverse(fpx, m)) % m;
    if (x < 0) x += m;
  }
  mpz_class m = p_power(p, prec);
  mpz_class check = (x * x - ap * x + pk1) % m;
  if (check != 0)
    throw std::logic_error("padics: Hensel lift failed to converge");
  return PadicNumber::from_integer(p, x, prec);
}

// Roots of the Hecke polynomial at p with admissibility flags
// (admissible: p^(1-k) < |root| <= 1, i.e. 0 <= v(root) < k-1).
//
// Ordinary (p ∤ ap): the canonical unit root first, then p^(k-1)/alpha.
// Supersingular: only ap = 0, k = 2, p >= 5 is supported; the roots are
// +-alpha with alpha^2 = -p, both admissible.
inline std::vector<HeckeRoot> hecke_roots(long ap, long k, long p, long prec,
                                          long level = 0) {
  if (!is_prime(p) || p == 2)
    throw std::invalid_argument("padics: hecke_roots requires an odd prime");
  if (k < 2 || k % 2 != 0)
    throw std::invalid_argument("padics: weight must be even and >= 2");
  if (prec < 1) throw std::invalid_argument("padics: precision must be >= 1");
  if (level != 0 && level % p == 0)
    throw std::invalid_argument("padics: p divides the level");
  // Hasse-Deligne bound |ap| <= 2 p^((k-1)/2), validated as ap^2 <= 4 p^(k-1)
  mpz_class ap2 = mpz_class(ap) * ap;
  if (ap2 > 4 * p_power(p, k - 1))
    throw std::invalid_argument("padics: a_p violates the Hasse bound");

  std::vector<HeckeRoot> out;
  if (ap % p != 0) {
    PadicNumber alpha = hensel_unit_root(ap, k, p, prec);
    PadicNumber beta =
        PadicNumber::from_integer(p, 1, prec + 2 * (k - 1)).shift(k - 1) /
        alpha;
    out.push_back({alpha, true});
    out.push_back({beta, false});  // v = k-1 fails the strict lower bound
    return out;
  }
  if (ap != 0 || k != 2 || p < 5)
    throw std::domain_error(
        "padics: unsupported supersingular case (need a_p = 0, k = 2, p >= 5)");
  PadicNumber alpha = PadicNumber::alpha_generator(p, prec);
  out.push_back({alpha, true});
  out.push_back({-alpha, true});
  return out;
}

inline long AlphaElement::twice_padic_valuation_at_unit_root() const {
  if (is_zero()) return kInfPrec;
  if (!ctx_.ordinary()) {
    mpq_class v = padic_valuation_supersingular();
    mpq_class t = v * 2;
    return static_cast<long>(t.get_num().get_si());
  }
  // Escalate embedding precision until the valuation resolves below it.
  long va = rat_valuation(a_, ctx_.p);
  long vb = rat_valuation(b_, ctx_.p);
  long base = std::min(va == kInfPrec ? 0 : va, vb == kInfPrec ? 0 : vb);
  long guard = std::max(0L, -base) + 8;
  for (int tries = 0; tries < 24; ++tries) {
    PadicNumber root = hensel_unit_root(ctx_.ap, ctx_.k, ctx_.p, guard);
    PadicNumber em = embed(root);
    if (em.provably_nonzero()) return em.twice_valuation();
    guard *= 2;
  }
  throw std::logic_error("padics: valuation escalation did not resolve");
}

inline mpq_class AlphaElement::padic_valuation_at_unit_root() const {
  mpq_class r(twice_padic_valuation_at_unit_root(), 2);
  r.canonicalize();
  return r;
}

}  // namespace padiclf
