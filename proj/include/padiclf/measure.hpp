#pragma once

#include <gmpxx.h>

#include <cstdio>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "padiclf/alpha.hpp"
#include "padiclf/modsym.hpp"
#include "padiclf/padic.hpp"

namespace padiclf {

// The cyclotomic distribution mu_alpha on the compact-opens D(a, p^n),
// built from an eigensymbol:
//
//   mu(D(a, p^n)) = alpha^-n * (lambda(a/p^n) - alpha^-1 lambda(a/p^(n-1)))
//
// Values are stored exactly in Q(alpha), never as truncated p-adics, so the
// distribution axioms are checked by exact equality; the p-adic embedding
// happens only when integrating.

// Choice of admissible root: the unit root in the ordinary case, either
// square root of -p in the supersingular one.
struct AdmissibleRoot {
  HeckeContext ctx;
  std::string label;  // "unit" | "plus" | "minus"

  static AdmissibleRoot make(HeckeContext ctx, const std::string& label) {
    bool ord = ctx.ordinary();
    if (ord && label != "unit")
      throw std::invalid_argument(
          "measure: inadmissible root choice '" + label +
          "' (ordinary case admits only the unit root)");
    if (!ord && label != "plus" && label != "minus")
      throw std::invalid_argument(
          "measure: root label must be plus or minus in the supersingular case");
    if (!ord && (ctx.ap != 0 || ctx.k != 2 || ctx.p < 5))
      throw std::invalid_argument(
          "measure: unsupported supersingular context");
    return {ctx, label};
  }

  mpq_class valuation() const {  // v(alpha)
    if (ctx.ordinary()) return 0;
    mpq_class v(ctx.k - 1, 2);
    v.canonicalize();
    return v;
  }

  PadicNumber image(long prec) const {
    if (ctx.ordinary()) return hensel_unit_root(ctx.ap, ctx.k, ctx.p, prec);
    PadicNumber a = PadicNumber::alpha_generator(ctx.p, prec);
    return label == "plus" ? a : -a;
  }

  // Exact valuation of an AlphaElement at this embedding.
  mpq_class value_valuation(const AlphaElement& x) const {
    if (ctx.ordinary()) return x.padic_valuation_at_unit_root();
    return x.padic_valuation_supersingular();
  }
  long twice_value_valuation(const AlphaElement& x) const {
    if (x.is_zero()) return kInfPrec;
    if (ctx.ordinary()) return x.twice_padic_valuation_at_unit_root();
    mpq_class v = x.padic_valuation_supersingular() * 2;
    return (long)v.get_num().get_si();
  }
};

// Residue bookkeeping: units mod p^n are indexed by
// idx(a) = (a - 1) - (a - 1)/p, a bijection onto 0..phi(p^n)-1.
inline long unit_index(const mpz_class& a, long p) {
  mpz_class t = (a - 1) - (a - 1) / p;
  return t.get_si();
}
inline long unit_count(long p, long n) {
  mpz_class c = p_power(p, n) - p_power(p, n - 1);
  return c.get_si();
}

enum class MeasureSource { Native, External };

class MeasureTable {
 public:
  long level_N = 0;
  long weight_k = 2;
  long moment_j = 0;
  AdmissibleRoot root{{0, 0, 2}, "unit"};
  long n_max = 0;
  MeasureSource source = MeasureSource::Native;
  // levels[n-1][unit_index(a)] = mu(D(a, p^n))
  std::vector<std::vector<AlphaElement>> levels;
  // norm-bound constant: c0 = -min over level-1 cells of (v(value) + 2 v(alpha)),
  // i.e. the empirical bound on the lattice parts alpha^(n+1) mu(D(a,p^n)).
  mpq_class c0 = 0;
  // same maximum taken over every stored level; floors use this one, and
  // deeper_norm_violation records that level 1 underestimated it
  mpq_class c0_effective = 0;
  bool deeper_norm_violation = false;
  AlphaElement total_mass;

  long p() const { return root.ctx.p; }

  const AlphaElement& value(long n, const mpz_class& a) const {
    if (n < 1 || n > n_max)
      throw std::invalid_argument("measure: level out of range");
    return levels[n - 1][unit_index(a % p_power(p(), n), p())];
  }

  mpq_class alpha_valuation() const { return root.valuation(); }

  // Riemann error floor err(m) = m (1 - v(alpha)) - v(alpha) - c0.
  mpq_class riemann_error(long m) const {
    mpq_class va = alpha_valuation();
    return mpq_class(m) * (1 - va) - va - c0_effective;
  }

  void verify_additivity() const {
    for (long n = 1; n + 1 <= n_max; ++n) {
      mpz_class pn = p_power(p(), n);
      for (mpz_class a = 1; a < pn; ++a) {
        if (a % p() == 0) continue;
        AlphaElement sum = AlphaElement::zero(root.ctx);
        for (long b = 0; b < p(); ++b) sum = sum + value(n + 1, a + b * pn);
        if (!(sum == value(n, a))) {
          std::ostringstream os;
          os << "measure: additivity violated at level " << n << ", residue "
             << a.get_str();
          throw std::logic_error(os.str());
        }
      }
    }
  }

  void finalize_constants() {
    if (levels.empty() || levels[0].empty())
      throw std::invalid_argument("measure: no data");
    bool have1 = false, have_any = false;
    for (long n = 1; n <= n_max; ++n) {
      for (const auto& v : levels[n - 1]) {
        long tv = root.twice_value_valuation(v);
        if (tv >= kInfPrec) continue;
        mpq_class c =
            -(mpq_class(tv, 2) + mpq_class(n + 1) * alpha_valuation());
        c.canonicalize();
        if (n == 1 && (!have1 || c > c0)) {
          c0 = c;
          have1 = true;
        }
        if (!have_any || c > c0_effective) {
          c0_effective = c;
          have_any = true;
        }
      }
    }
    if (!have1) c0 = 0;
    if (!have_any) c0_effective = 0;
    deeper_norm_violation = have_any && c0_effective > c0;
    total_mass = AlphaElement::zero(root.ctx);
    for (const auto& v : levels[0]) total_mass = total_mass + v;
  }
};

inline MeasureTable build_measure(const EigenSymbol& symbol, long p,
                                  const AdmissibleRoot& root, long n_max,
                                  bool verify_streamed_extra_level = false) {
  if (!is_prime(p) || p < 3)
    throw std::invalid_argument("measure: p must be an odd prime");
  if (symbol.level() % p == 0)
    throw std::invalid_argument("measure: p divides N");
  if (root.ctx.p != p)
    throw std::invalid_argument("measure: root context is for a different p");
  if (n_max < 1) throw std::invalid_argument("measure: need n_max >= 1");
  // the root must come from this symbol's Hecke polynomial at p (vacuous for
  // the zero symbol, which yields the zero distribution for any root)
  bool zero_symbol = true;
  for (const auto& v : symbol.values())
    if (v != 0) zero_symbol = false;
  if (!zero_symbol) {
    mpq_class ap = recover_eigenvalue(symbol, p);
    if (ap != root.ctx.ap)
      throw std::invalid_argument(
          "measure: root context a_p does not match the symbol eigenvalue");
  }

  MeasureTable t;
  t.level_N = symbol.level();
  t.root = root;
  t.n_max = n_max;
  t.source = MeasureSource::Native;
  HeckeContext ctx = root.ctx;

  std::vector<AlphaElement> alpha_inv_pow(n_max + 3);
  AlphaElement ainv = AlphaElement::alpha(ctx).inverse();
  alpha_inv_pow[0] = AlphaElement::from_rational(ctx, 1);
  for (long i = 1; i <= n_max + 2; ++i)
    alpha_inv_pow[i] = alpha_inv_pow[i - 1] * ainv;

  auto cell = [&](long n, const mpz_class& a) {
    mpz_class pn = p_power(p, n);
    mpq_class rn(a, pn);
    rn.canonicalize();
    mpq_class rprev(a, pn / p);
    rprev.canonicalize();
    mpq_class lam_n = symbol.eval_path(rn);
    mpq_class lam_prev = symbol.eval_path(rprev);
    return alpha_inv_pow[n].scale(lam_n) - alpha_inv_pow[n + 1].scale(lam_prev);
  };

  t.levels.resize(n_max);
  for (long n = 1; n <= n_max; ++n) {
    mpz_class pn = p_power(p, n);
    t.levels[n - 1].resize(unit_count(p, n), AlphaElement::zero(ctx));
    for (mpz_class a = 1; a < pn; ++a) {
      if (a % p == 0) continue;
      t.levels[n - 1][unit_index(a, p)] = cell(n, a);
    }
  }
  t.verify_additivity();
  if (verify_streamed_extra_level) {
    // additivity between the deepest stored level and the next one, without
    // materializing it
    long n = n_max;
    mpz_class pn = p_power(p, n);
    for (mpz_class a = 1; a < pn; ++a) {
      if (a % p == 0) continue;
      AlphaElement sum = AlphaElement::zero(ctx);
      for (long b = 0; b < p; ++b) sum = sum + cell(n + 1, a + b * pn);
      if (!(sum == t.value(n, a)))
        throw std::logic_error(
            "measure: streamed additivity violated at the deepest level");
    }
  }
  t.finalize_constants();
  return t;
}

// A locally constant function given by one value per unit residue mod p^level.
struct LocallyConstantFunction {
  long level = 1;
  std::vector<PadicNumber> values;  // indexed by unit_index
};

struct IntegralResult {
  PadicNumber raw_sum;       // exact embedded Riemann sum
  mpq_class error_valuation; // certified floor for locally analytic f
  PadicNumber value() const {
    long t = mpq_floor_long(error_valuation * 2);
    return raw_sum.truncate_twice(std::min(raw_sum.twice_abs_precision(), t));
  }
};

// Riemann sum  sum_a f(a) mu(D(a, p^m))  at level m >= f.level, with the
// first-order Taylor error floor err(m) from the Divisibility property.
inline IntegralResult riemann_integral(const MeasureTable& t,
                                       const LocallyConstantFunction& f,
                                       long at_level = 0) {
  long m = at_level == 0 ? f.level : at_level;
  if (m > t.n_max || m < f.level)
    throw std::invalid_argument("measure: integration level out of range");
  long p = t.p();
  if ((long)f.values.size() != unit_count(p, f.level))
    throw std::invalid_argument("measure: function table has wrong size");
  long wp = 8;
  for (const auto& v : f.values)
    wp = std::max(wp, (long)std::min(v.twice_abs_precision() / 2 + 2,
                                     (long)kInfPrec / 4));
  // embed deep enough that the measure values' negative valuations do not eat
  // into the certified range
  mpq_class depth = t.c0_effective + mpq_class(m + 1) * t.alpha_valuation();
  long extra = 4 + std::max(0L, mpq_ceil_long(depth));
  PadicNumber root = t.root.image(wp + extra);
  mpz_class pf = p_power(p, f.level);
  mpz_class pm = p_power(p, m);
  PadicNumber acc = PadicNumber::zero(p, kInfPrec / 4);
  for (mpz_class a = 1; a < pm; ++a) {
    if (a % p == 0) continue;
    const PadicNumber& fv = f.values[unit_index(a % pf, p)];
    PadicNumber mv = t.value(m, a).embed(root);
    acc = acc + fv * mv;
  }
  return {acc, t.riemann_error(m)};
}

struct MomentVector {
  long level = 0;
  std::vector<PadicNumber> entries;  // m_k = int xtilde^k dmu, precision-capped
  std::vector<mpq_class> floors;     // certified error valuation per entry
};

// Certified floor for the level-m Riemann approximation of int xtilde^k dmu:
// the term of order j in the disc expansion contributes
// v >= v_p(C(k,j)) + j(m-1) - (m+1) v(alpha) - c0.
inline mpq_class moment_error_floor(const MeasureTable& t, long k, long m) {
  if (k == 0) return mpq_class(kInfPrec);  // the sum telescopes exactly
  long p = t.p();
  long best = kInfPrec;
  for (long j = 1; j <= k; ++j) {
    long vbin = factorial_valuation(k, p) - factorial_valuation(j, p) -
                factorial_valuation(k - j, p);
    long cand = vbin + j * (m - 1);
    best = std::min(best, cand);
  }
  return mpq_class(best) - mpq_class(m + 1) * t.alpha_valuation() -
         t.c0_effective;
}

inline MomentVector moments(const MeasureTable& t, long K, long m,
                            long work_prec = 0) {
  if (m < 1 || m > t.n_max)
    throw std::invalid_argument("measure: moment level out of range");
  if (K < 0) throw std::invalid_argument("measure: K must be >= 0");
  long p = t.p();
  long wp = work_prec > 0 ? work_prec : m + K + 16;
  PadicNumber root = t.root.image(wp + 4);
  mpz_class pm = p_power(p, m);

  MomentVector out;
  out.level = m;
  out.entries.assign(K + 1, PadicNumber::zero(p, kInfPrec / 4));
  for (mpz_class a = 1; a < pm; ++a) {
    if (a % p == 0) continue;
    PadicNumber av = PadicNumber::from_integer(p, a, wp);
    PadicNumber atil =
        (angle_part(av) - PadicNumber::one(p, wp)).shift(-1);
    PadicNumber mv = t.value(m, a).embed(root);
    PadicNumber pw = PadicNumber::one(p, wp);
    for (long k = 0; k <= K; ++k) {
      out.entries[k] = out.entries[k] + pw * mv;
      if (k < K) pw = pw * atil;
    }
  }
  out.floors.resize(K + 1);
  for (long k = 0; k <= K; ++k) {
    out.floors[k] = moment_error_floor(t, k, m);
    long tw = mpq_floor_long(out.floors[k] * 2);
    out.entries[k] = out.entries[k].truncate_twice(
        std::min(out.entries[k].twice_abs_precision(), tw));
  }
  return out;
}

// --- mod-p divisibility scan ----------------------------------------------------

struct ModPScanReport {
  bool found = false;
  long level = 0;
  mpz_class residue = 0;
  bool all_divisible = false;
  bool alpha_is_one_mod_p = false;
};

inline ModPScanReport mod_p_scan(const MeasureTable& t) {
  if (!t.root.ctx.ordinary())
    throw std::domain_error(
        "measure: mod-p scan needs a bounded (ordinary) measure");
  ModPScanReport rep;
  rep.alpha_is_one_mod_p = ((t.root.ctx.ap - 1) % t.p() == 0);
  for (long n = 1; n <= t.n_max && !rep.found; ++n) {
    mpz_class pn = p_power(t.p(), n);
    for (mpz_class a = 1; a < pn; ++a) {
      if (a % t.p() == 0) continue;
      const AlphaElement& v = t.value(n, a);
      long tv = t.root.twice_value_valuation(v);
      if (tv <= 0 && tv < kInfPrec) {
        rep.found = true;
        rep.level = n;
        rep.residue = a;
        break;
      }
    }
  }
  rep.all_divisible = !rep.found;
  return rep;
}

// --- external tables --------------------------------------------------------------

inline std::string export_measure_text(const MeasureTable& t) {
  std::ostringstream os;
  os << "PADICLF-MEASURE v1; N=" << t.level_N << "; k=" << t.weight_k
     << "; j=" << t.moment_j << "; p=" << t.p() << "; ap=" << t.root.ctx.ap
     << "; root=" << t.root.label << "; levels=" << t.n_max
     << "; c0=" << t.c0.get_str() << "\n";
  for (long n = 1; n <= t.n_max; ++n) {
    mpz_class pn = p_power(t.p(), n);
    for (mpz_class a = 1; a < pn; ++a) {
      if (a % t.p() == 0) continue;
      const AlphaElement& v = t.value(n, a);
      os << n << " " << a.get_str() << " " << v.ratpart().get_str();
      if (v.alphapart() != 0)
        os << " +alpha* " << v.alphapart().get_str();
      os << "\n";
    }
  }
  return os.str();
}

inline MeasureTable import_external_table(const std::string& text) {
  std::istringstream is(text);
  std::string header;
  if (!std::getline(is, header))
    throw std::runtime_error("measure: no data");
  long N = 0, k = 0, j = 0, p = 0, ap = 0, nlevels = 0;
  char rootbuf[16] = {0};
  char c0buf[64] = {0};
  int got = sscanf(header.c_str(),
                   "PADICLF-MEASURE v1; N=%ld; k=%ld; j=%ld; p=%ld; ap=%ld; "
                   "root=%15[a-z]; levels=%ld; c0=%63s",
                   &N, &k, &j, &p, &ap, rootbuf, &nlevels, c0buf);
  if (got != 8)
    throw std::runtime_error("measure: malformed header line");
  if (nlevels < 1) throw std::runtime_error("measure: no data");
  MeasureTable t;
  t.level_N = N;
  t.weight_k = k;
  t.moment_j = j;
  t.root = AdmissibleRoot::make(HeckeContext{p, ap, k}, rootbuf);
  t.n_max = nlevels;
  t.source = MeasureSource::External;
  t.levels.resize(nlevels);
  for (long n = 1; n <= nlevels; ++n)
    t.levels[n - 1].assign(unit_count(p, n),
                           AlphaElement::zero(t.root.ctx));
  std::vector<std::vector<bool>> seen(nlevels);
  for (long n = 1; n <= nlevels; ++n)
    seen[n - 1].assign(unit_count(p, n), false);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    long n;
    std::string astr, rat, plus, alphapart;
    if (!(ls >> n >> astr >> rat))
      throw std::runtime_error("measure: malformed value line '" + line + "'");
    mpq_class b = 0;
    if (ls >> plus) {
      if (plus != "+alpha*" || !(ls >> alphapart))
        throw std::runtime_error("measure: malformed value line '" + line +
                                 "'");
      b = parse_rational(alphapart);
    }
    if (n < 1 || n > nlevels)
      throw std::runtime_error("measure: level out of range in line '" + line +
                               "'");
    mpz_class a(astr);
    if (a < 1 || a >= p_power(p, n) || a % p == 0)
      throw std::runtime_error("measure: bad residue in line '" + line + "'");
    long idx = unit_index(a, p);
    t.levels[n - 1][idx] = AlphaElement(t.root.ctx, parse_rational(rat), b);
    seen[n - 1][idx] = true;
  }
  for (long n = 1; n <= nlevels; ++n)
    for (long i = 0; i < (long)seen[n - 1].size(); ++i)
      if (!seen[n - 1][i])
        throw std::runtime_error("measure: missing cell at level " +
                                 std::to_string(n));
  t.verify_additivity();
  t.finalize_constants();
  if (t.c0 != parse_rational(c0buf))
    throw std::runtime_error("measure: header c0 does not match the data");
  return t;
}

}  // namespace padiclf
