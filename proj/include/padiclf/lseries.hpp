#pragma once

#include <gmpxx.h>

#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "padiclf/measure.hpp"
#include "padiclf/modsym.hpp"
#include "padiclf/poly.hpp"

namespace padiclf {

// The cyclotomic p-adic L-function L_p(f, alpha)(s) = int <x>^(s-1) dmu_alpha
// over Z_p^*: point evaluation by Riemann sums, Taylor expansion around any
// p-adic integer center assembled from the moments
//
//   L_p(s) = sum_k (p^k/k!) q_k(s) m_k,   q_k(s) = (s-1)...(s-k),
//   c_j    = sum_{k>=j} (p^k/k!) e_{k-j}(s0-1,...,s0-k) m_k,
//
// order-of-vanishing scans with explicit zero-consistency ledgers, and the
// executable checks of the supporting combinatorics.

struct PadicPowerSeries {
  PadicNumber center;
  std::vector<PadicNumber> coeffs;
  // provenance of the computation
  long level_N = 0;
  long prime = 0;
  std::string root_label;
  long level_m = 0;
  long terms_K = 0;
  mpq_class c0_used = 0;       // norm constant the floors were charged with
  mpq_class alpha_valuation = 0;

  // Certified lower bound on v(c_j) for the *true* coefficients, including
  // those beyond the computed range; used to charge evaluation tails.
  mpq_class true_coeff_floor(long j) const {
    long p = prime;
    if (alpha_valuation == 0) {
      // ordinary: v(p^k/k!) >= ((p-2)k + sigma_k)/(p-1), v(m_k) >= -c0
      return mpq_class((p - 2) * j + (j > 0 ? 1 : 0), p - 1) - c0_used;
    }
    // supersingular: v(m_k) >= -(k - sigma_k)/(p-1) - 2 v(alpha) - c0
    return mpq_class((p - 3) * j + 2 * (j > 0 ? 1 : 0), p - 1) -
           2 * alpha_valuation - c0_used;
  }

  // Evaluates the truncated series at s with the omitted-tail charge; s must
  // lie in the closed disc |s - center| <= 1/p.
  PadicNumber evaluate(const PadicNumber& s) const {
    PadicNumber ds = s - center;
    if (!ds.is_zero() && ds.twice_valuation() < 2)
      throw std::domain_error("lseries: evaluation point outside D(center, p)");
    long p = prime;
    long wp = PadicNumber::usable_prec(ds.twice_abs_precision());
    for (const auto& c : coeffs)
      wp = std::max(wp, PadicNumber::usable_prec(c.twice_abs_precision()));
    PadicNumber acc = PadicNumber::zero(p, kInfPrec / 4);
    PadicNumber pw = PadicNumber::one(p, wp);
    for (size_t j = 0; j < coeffs.size(); ++j) {
      acc = acc + coeffs[j] * pw;
      pw = pw * ds;
    }
    // tail: coefficients j >= M each gain v(ds)^j >= j
    long m = (long)coeffs.size();
    mpq_class tail = true_coeff_floor(m) + m;
    long t = mpq_floor_long(tail * 2);
    return acc.truncate_twice(std::min(acc.twice_abs_precision(), t));
  }

  std::string export_text() const {
    std::ostringstream os;
    os << "PADICLF-SERIES v1; N=" << level_N << "; p=" << prime
       << "; alpha=" << root_label << "; center=" << center.to_string()
       << "; level=" << level_m << "; terms=" << terms_K << "\n";
    for (size_t j = 0; j < coeffs.size(); ++j) {
      auto d = coeffs[j].digits();
      os << j << " ";
      if (coeffs[j].is_zero())
        os << "zero -";
      else {
        os << half_string(d.twice_start) << " ";
        for (size_t i = 0; i < d.digits.size(); ++i)
          os << (i ? "," : "") << d.digits[i];
        if (d.digits.empty()) os << "-";
      }
      os << " " << half_string(d.twice_prec) << "\n";
    }
    return os.str();
  }

 private:
  static std::string half_string(long twice) {
    if (twice >= kInfPrec) return "inf";
    if (twice % 2 == 0) return std::to_string(twice / 2);
    return std::to_string(twice) + "/2";
  }
};

// --- point evaluation -------------------------------------------------------

// Default working precision for the series arithmetic at level m, K terms.
inline long lseries_work_prec(const MeasureTable& t, long m, long K) {
  long base = std::max(8L, mpq_ceil_long(t.riemann_error(m)));
  return base + factorial_valuation(K, t.p()) + K / (t.p() - 1) + 12;
}

// Riemann-sum evaluation of L_p at s: sum_a <a>^(s-1) mu(D(a, p^m)), the
// angle power truncated after `terms` binomial terms.  The certified floor
// combines the measure error err(m) with the series tail.
inline PadicNumber eval_at(const MeasureTable& t, const PadicNumber& s, long m,
                           long terms = 40, long work_prec = 0) {
  long p = t.p();
  if (p < 3) throw std::invalid_argument("lseries: need p >= 3");
  if (m < 1 || m > t.n_max)
    throw std::invalid_argument("lseries: level out of range");
  if (s.ramification() != 1 || (!s.is_zero() && s.twice_valuation() < 0))
    throw std::domain_error("lseries: s must be a p-adic integer");
  long wp = work_prec > 0 ? work_prec : lseries_work_prec(t, m, terms);
  PadicNumber sm1 = s - PadicNumber::one(p, wp);

  // binomial coefficients C(s-1, k), shared across residues
  std::vector<PadicNumber> binom(terms);
  binom[0] = PadicNumber::one(p, wp);
  for (long k = 1; k < terms; ++k)
    binom[k] = binom[k - 1] *
               (sm1 - PadicNumber::from_integer(p, k - 1, wp))
                   .scale(mpq_class(1, k));

  mpz_class pm = p_power(p, m);
  LocallyConstantFunction f{m, {}};
  f.values.assign(unit_count(p, m), PadicNumber::zero(p, wp));
  for (mpz_class a = 1; a < pm; ++a) {
    if (a % p == 0) continue;
    PadicNumber av = PadicNumber::from_integer(p, a, wp);
    PadicNumber z = angle_part(av) - PadicNumber::one(p, wp);  // p * atilde
    // Horner over the shared binomial coefficients
    PadicNumber acc = binom[terms - 1];
    for (long k = terms - 2; k >= 0; --k) acc = acc * z + binom[k];
    f.values[unit_index(a, p)] = acc;
  }
  IntegralResult integral = riemann_integral(t, f);
  // series tail: per-cell truncation error times the worst cell valuation
  long num = terms * (p - 2);
  mpq_class series_tail =
      mpq_class(num / (p - 1) + (num % (p - 1) ? 1 : 0)) -
      mpq_class(m + 1) * t.alpha_valuation() - t.c0_effective;
  mpq_class floor = std::min(integral.error_valuation, series_tail);
  long tfloor = mpq_floor_long(floor * 2);
  return integral.raw_sum.truncate_twice(
      std::min(integral.raw_sum.twice_abs_precision(), tfloor));
}

// --- Taylor expansion ---------------------------------------------------------

// Floor of the omitted tail sum_{k>=K} (p^k/k!) e_{k-j} m_k, for any j.
inline mpq_class taylor_tail_floor(const MeasureTable& t, long K) {
  long p = t.p();
  if (t.alpha_valuation() == 0)
    return mpq_class((p - 2) * K + 1, p - 1) - t.c0_effective;
  return mpq_class((p - 3) * K + 2, p - 1) - 2 * t.alpha_valuation() -
         t.c0_effective;
}

inline PadicPowerSeries taylor_expand(const MeasureTable& t,
                                      const PadicNumber& s0, long M, long m,
                                      long K, long work_prec = 0) {
  long p = t.p();
  if (p < 5)
    throw std::invalid_argument(
        "lseries: Taylor expansion needs p >= 5 (moment decay regime)");
  if (M < 1 || K < M)
    throw std::invalid_argument("lseries: need 1 <= M <= K");
  if (m < 1 || m > t.n_max)
    throw std::invalid_argument("lseries: level out of range");
  if (s0.ramification() != 1 || (!s0.is_zero() && s0.twice_valuation() < 0))
    throw std::domain_error("lseries: center must be a p-adic integer");
  mpq_class tail = taylor_tail_floor(t, K);
  if (tail <= 0 || t.riemann_error(m) <= 0) {
    std::ostringstream os;
    os << "lseries: precision exhausted (floors non-positive); suggest levels "
       << "m=" << (m + 2) << ", terms K=" << std::max(2 * K, K + 8)
       << ", coefficients M=" << M;
    throw std::runtime_error(os.str());
  }
  long wp = work_prec > 0 ? work_prec : lseries_work_prec(t, m, K);

  MomentVector mv = moments(t, K - 1, m, wp);

  // e_{k-j}(s0-1, ..., s0-k) built incrementally in k
  PadicNumber one = PadicNumber::one(p, wp);
  std::vector<std::vector<PadicNumber>> esym(K);  // esym[k][j] = e_j(first k)
  std::vector<PadicNumber> e(K, PadicNumber::zero(p, wp));
  e[0] = one;
  esym[0] = e;
  for (long k = 1; k < K; ++k) {
    PadicNumber root = s0 - PadicNumber::from_integer(p, k, wp);
    for (long j = std::min(k, K - 1); j >= 1; --j)
      e[j] = e[j] + root * e[j - 1];
    esym[k] = e;
  }

  PadicPowerSeries out;
  out.center = s0;
  out.level_N = t.level_N;
  out.prime = p;
  out.root_label = t.root.label;
  out.level_m = m;
  out.terms_K = K;
  out.c0_used = t.c0_effective;
  out.alpha_valuation = t.alpha_valuation();
  out.coeffs.assign(M, PadicNumber::zero(p, kInfPrec / 4));

  long ttail = mpq_floor_long(tail * 2);
  for (long j = 0; j < M; ++j) {
    PadicNumber acc = PadicNumber::zero(p, kInfPrec / 4);
    for (long k = j; k < K; ++k) {
      mpq_class factor(p_power(p, k));
      mpz_class kf;
      mpz_fac_ui(kf.get_mpz_t(), (unsigned long)k);
      factor /= mpq_class(kf);
      acc = acc + (esym[k][k - j] * mv.entries[k]).scale(factor);
    }
    out.coeffs[j] =
        acc.truncate_twice(std::min(acc.twice_abs_precision(), ttail));
    if (out.coeffs[j].twice_abs_precision() <= 0) {
      std::ostringstream os;
      os << "lseries: precision exhausted at coefficient " << j
         << "; suggest levels m=" << (m + 2)
         << ", terms K=" << std::max(2 * K, K + 8) << ", coefficients M=" << M;
      throw std::runtime_error(os.str());
    }
  }
  return out;
}

// Re-centers the truncated polynomial at a new center inside Z_p; the
// coefficient floors are charged with the omitted-tail contribution.
inline PadicPowerSeries recenter(const PadicPowerSeries& s,
                                 const PadicNumber& new_center) {
  long p = s.prime;
  PadicNumber h = new_center - s.center;
  if (!h.is_zero() && h.twice_valuation() < 0)
    throw std::domain_error("lseries: new center must stay in Z_p");
  long M = (long)s.coeffs.size();
  PadicPowerSeries out = s;
  out.center = new_center;
  mpq_class vh(h.is_zero() ? kInfPrec : h.twice_valuation(), 2);
  long wp = PadicNumber::usable_prec(h.twice_abs_precision());
  for (const auto& c : s.coeffs)
    wp = std::max(wp, PadicNumber::usable_prec(c.twice_abs_precision()));
  for (long i = 0; i < M; ++i) {
    PadicNumber acc = PadicNumber::zero(p, kInfPrec / 4);
    PadicNumber hp = PadicNumber::one(p, wp);
    for (long j = i; j < M; ++j) {
      // C(j, i) exactly
      mpz_class cji;
      mpz_bin_uiui(cji.get_mpz_t(), (unsigned long)j, (unsigned long)i);
      acc = acc + s.coeffs[j].scale(mpq_class(cji)) * hp;
      hp = hp * h;
    }
    // tail over j >= M: C(j,i) integral, h^(j-i)
    mpq_class tail = s.true_coeff_floor(M) + (mpq_class(M - i) * vh);
    long tw = mpq_floor_long(tail * 2);
    out.coeffs[i] =
        acc.truncate_twice(std::min(acc.twice_abs_precision(), tw));
  }
  return out;
}

// --- order of vanishing -------------------------------------------------------

struct CoefficientStatus {
  bool provably_nonzero = false;
  mpq_class valuation_or_bound;  // exact v if nonzero, else the zero bound
};

struct OrderReport {
  bool determined = false;
  long order = -1;
  std::optional<PadicNumber> leading_coeff;
  std::vector<CoefficientStatus> ledger;
};

inline OrderReport order_of_vanishing(const PadicPowerSeries& s) {
  if (s.coeffs.empty())
    throw std::invalid_argument("lseries: empty series");
  OrderReport rep;
  for (size_t j = 0; j < s.coeffs.size(); ++j) {
    const PadicNumber& c = s.coeffs[j];
    CoefficientStatus st;
    st.provably_nonzero = c.provably_nonzero();
    st.valuation_or_bound =
        st.provably_nonzero ? c.valuation() : c.abs_precision();
    rep.ledger.push_back(st);
    if (st.provably_nonzero && !rep.determined) {
      rep.determined = true;
      rep.order = (long)j;
      rep.leading_coeff = c;
    }
  }
  return rep;
}

// --- functional equation -------------------------------------------------------

struct FunctionalEquationSample {
  PadicNumber s;
  PadicNumber residual;
  mpq_class shared_floor;
  bool pass = false;
};

struct FunctionalEquationReport {
  int sign_used = 0;       // calibrated empirically at the first usable sample
  bool sign_calibrated = false;
  int fricke = 0;
  std::vector<FunctionalEquationSample> samples;
  bool all_pass = true;
};

// Checks L_p(s) = sign * <N>^(1-s) L_p(2-s) (weight 2) at the given samples.
// The k = 2 sign convention is calibrated once, at the first sample where
// both sides are provably nonzero, then held fixed.
inline FunctionalEquationReport functional_equation_check(
    const MeasureTable& t, const EigenSymbol& symbol,
    const std::vector<PadicNumber>& samples, long m, long terms = 40) {
  if (t.weight_k != 2)
    throw std::invalid_argument("lseries: functional equation check is k=2 only");
  long p = t.p();
  if (t.level_N % p == 0)
    throw std::invalid_argument("lseries: p divides N");
  FunctionalEquationReport rep;
  bool zero_symbol = true;
  for (const auto& v : symbol.values())
    if (v != 0) zero_symbol = false;
  rep.fricke = zero_symbol ? 0 : fricke_sign(symbol);
  long wp = lseries_work_prec(t, m, terms);
  PadicNumber two = PadicNumber::from_integer(p, 2, wp);
  PadicNumber nval = PadicNumber::from_integer(p, t.level_N, wp);
  for (const PadicNumber& s : samples) {
    PadicNumber lhs = eval_at(t, s, m, terms, wp);
    PadicNumber one_minus_s = PadicNumber::one(p, wp) - s;
    PadicNumber scale = binomial_series_power(nval, one_minus_s, terms);
    PadicNumber rhs = scale * eval_at(t, two - s, m, terms, wp);
    bool minus_fits = (lhs - rhs).is_zero();
    bool plus_fits = (lhs + rhs).is_zero();
    if (!rep.sign_calibrated && lhs.provably_nonzero() &&
        rhs.provably_nonzero()) {
      rep.sign_used = minus_fits ? +1 : (plus_fits ? -1 : +1);
      rep.sign_calibrated = true;
    } else if (rep.sign_calibrated) {
      // a sample that matches the opposite sign but not the calibrated one
      // signals a normalization bug rather than a precision shortfall
      bool cal_fits = rep.sign_used > 0 ? minus_fits : plus_fits;
      bool other_fits = rep.sign_used > 0 ? plus_fits : minus_fits;
      if (!cal_fits && other_fits && rhs.provably_nonzero())
        throw std::domain_error(
            "lseries: functional equation sign inconsistent across samples");
    }
    int sign = rep.sign_calibrated ? rep.sign_used : +1;
    PadicNumber resid = sign > 0 ? (lhs - rhs) : (lhs + rhs);
    FunctionalEquationSample sample;
    sample.s = s;
    sample.residual = resid;
    sample.shared_floor = resid.abs_precision();
    sample.pass = resid.is_zero();
    rep.all_pass = rep.all_pass && sample.pass;
    rep.samples.push_back(sample);
  }
  return rep;
}

// --- moment decay check ---------------------------------------------------------

struct DecayEntry {
  long k = 0;
  mpq_class lhs_valuation;  // v(p^((p-2)k+sigma_k)/(p-1) * m_k), certified
  mpq_class bound;          // ((p-3)k + sigma_k)/(p-1) - 2 v(alpha) - c0
  mpq_class margin;
  bool certified = false;   // margin established at the available precision
  bool pass = false;
};

// Empirical companion to the ledger: whether the margins are non-decreasing
// beyond k = p.  Reported, never asserted (the constant term c0 can
// legitimately break it).
inline bool decay_margins_nondecreasing_beyond_p(
    const std::vector<DecayEntry>& ledger, long p) {
  mpq_class prev;
  bool have = false;
  for (const auto& e : ledger) {
    if (e.k < p) continue;
    if (have && e.margin < prev) return false;
    prev = e.margin;
    have = true;
  }
  return true;
}

inline std::vector<DecayEntry> decay_check(const MomentVector& mv,
                                           const MeasureTable& t) {
  long p = t.p();
  if (p < 5) throw std::invalid_argument("lseries: decay check needs p >= 5");
  std::vector<DecayEntry> out;
  for (size_t k = 0; k < mv.entries.size(); ++k) {
    DecayEntry e;
    e.k = (long)k;
    long sigma = digit_sum(k, p);
    mpq_class scale(( (long)(p - 2) * (long)k + sigma), p - 1);
    scale.canonicalize();
    const PadicNumber& m_k = mv.entries[k];
    mpq_class vm = m_k.provably_nonzero() ? m_k.valuation()
                                          : m_k.abs_precision();
    e.lhs_valuation = scale + vm;
    e.bound = mpq_class((long)(p - 3) * (long)k + sigma, p - 1) -
              2 * t.alpha_valuation() - t.c0_effective;
    e.margin = e.lhs_valuation - e.bound;
    e.certified = m_k.provably_nonzero() || vm >= e.bound - scale;
    e.pass = e.certified && e.margin >= 0;
    out.push_back(e);
  }
  return out;
}

// --- combinatorial verifiers ------------------------------------------------------

// f_n^(j)(s) = j! e_{n-j}(s-1, ..., s-n), via the exact elementary-symmetric
// recurrence in capped p-adic arithmetic.
inline PadicNumber falling_factorial_derivative(long n, long j,
                                                const PadicNumber& s) {
  if (n < 0 || n > 30)
    throw std::invalid_argument("lseries: need 0 <= n <= 30");
  if (j < 0) throw std::invalid_argument("lseries: need j >= 0");
  long p = s.prime();
  long wp = s.twice_abs_precision() / 2;
  wp = std::min(wp, kInfPrec / 8) + 4;
  if (j > n) return PadicNumber::zero(p, wp);
  std::vector<PadicNumber> roots;
  for (long i = 1; i <= n; ++i)
    roots.push_back(s - PadicNumber::from_integer(p, i, wp));
  auto e = elementary_symmetric(roots, n, PadicNumber::one(p, wp),
                                PadicNumber::zero(p, wp));
  mpz_class jf;
  mpz_fac_ui(jf.get_mpz_t(), (unsigned long)j);
  return e[n - j].scale(mpq_class(jf));
}

// Lemma check: the h-linear coefficient of f_n^(j)(s + h) equals
// (j+1) j! e_{n-j-1}(s-1,...,s-n), i.e. c_1 = j+1.  The left side comes from
// exact symbolic differentiation and a Taylor shift; the right side from the
// symmetric-polynomial recurrence.  Everything is exact rational arithmetic.
inline bool verify_c1_lemma(long n, long j, const mpq_class& s, long t,
                            long p) {
  if (!(1 <= j && j < n && n <= 12))
    throw std::invalid_argument("lseries: need 1 <= j < n <= 12");
  if (t < 1) throw std::invalid_argument("lseries: need t >= 1");
  RationalPoly fn = falling_factorial_poly(n);
  RationalPoly fnj = fn.nth_derivative(j);
  RationalPoly shifted = fnj.taylor_shift(s);  // coefficients in h
  // right side via the independent symmetric-polynomial route
  std::vector<mpq_class> roots;
  for (long i = 1; i <= n; ++i) roots.push_back(s - i);
  auto e = elementary_symmetric(roots, n, mpq_class(1), mpq_class(0));
  mpz_class jf;
  mpz_fac_ui(jf.get_mpz_t(), (unsigned long)j);
  mpq_class expect = mpq_class(j + 1) * mpq_class(jf) * e[n - j - 1];
  if (shifted.c.size() < 2) return expect == 0;
  bool ok = shifted.c[1] == expect;
  // consistency of the full numeric expansion at h = p^t
  mpq_class h(p_power(p, t));
  mpq_class direct = fnj.eval(s + h);
  mpq_class viaexp = 0, hp = 1;
  for (size_t i = 0; i < shifted.c.size(); ++i) {
    viaexp += shifted.c[i] * hp;
    hp *= h;
  }
  return ok && direct == viaexp;
}

// --- truncated psi-matrix inversion ----------------------------------------------

struct PsiInversion {
  QMat mphi;      // entries e_{k_j - k_i}(s0-1, ..., s0-k_j)
  QMat inverse;
  bool product_is_identity = false;
};

// Builds the K x K truncation of the psi-matrix at s0, checks that
// every entry is p-integral (certified by the digit-sum valuation identity
// for binomial coefficients), inverts it exactly, and checks the product.
inline PsiInversion truncated_psi_inverse(long K,
                                          const std::vector<long>& k_indices,
                                          const mpq_class& s0, long p) {
  if (K < 1 || K > 16)
    throw std::invalid_argument("lseries: need 1 <= K <= 16");
  if ((long)k_indices.size() != K)
    throw std::invalid_argument("lseries: need K indices");
  for (long i = 1; i < K; ++i)
    if (k_indices[i] <= k_indices[i - 1])
      throw std::invalid_argument("lseries: indices must be strictly increasing");
  if (k_indices[0] < 1)
    throw std::invalid_argument("lseries: indices must be >= 1");
  if (rat_valuation(s0, p) < 0)
    throw std::invalid_argument("lseries: s0 must be a p-adic integer");

  // digit-sum identity behind the integrality claim:
  // sigma_{k_i} + sigma_{k_j - k_i - r} - sigma_{k_j - r} = (p-1) v_p C(k_j - r, k_i)
  for (long jj = 0; jj < K; ++jj)
    for (long ii = 0; ii < jj; ++ii) {
      long ki = k_indices[ii], kj = k_indices[jj];
      for (long r = 0; r <= kj - ki; ++r) {
        mpz_class binom;
        mpz_bin_uiui(binom.get_mpz_t(), (unsigned long)(kj - r),
                     (unsigned long)ki);
        long lhs = digit_sum(ki, p) + digit_sum(kj - ki - r, p) -
                   digit_sum(kj - r, p);
        if (lhs != (p - 1) * int_valuation(binom, p))
          throw std::logic_error("lseries: digit-sum identity failed");
      }
    }

  PsiInversion out;
  out.mphi = qmat(K, K);
  for (long jj = 0; jj < K; ++jj) {
    long kj = k_indices[jj];
    std::vector<mpq_class> roots;
    for (long i = 1; i <= kj; ++i) roots.push_back(s0 - i);
    auto e = elementary_symmetric(roots, kj, mpq_class(1), mpq_class(0));
    for (long ii = 0; ii < K; ++ii) {
      long ki = k_indices[ii];
      out.mphi[ii][jj] = (ki > kj) ? mpq_class(0) : e[kj - ki];
      if (rat_valuation(out.mphi[ii][jj], p) < 0) {
        std::ostringstream os;
        os << "lseries: non-integral psi-matrix entry at (" << ii << ", " << jj
           << ")";
        throw std::logic_error(os.str());
      }
    }
  }
  // unit upper-triangular inversion by back substitution
  out.inverse = q_identity(K);
  for (long jj = 0; jj < K; ++jj)
    for (long ii = jj - 1; ii >= 0; --ii) {
      mpq_class acc = 0;
      for (long l = ii + 1; l <= jj; ++l)
        acc += out.mphi[ii][l] * out.inverse[l][jj];
      out.inverse[ii][jj] = -acc;
    }
  for (long jj = 0; jj < K; ++jj)
    for (long ii = 0; ii < jj; ++ii)
      if (rat_valuation(out.inverse[ii][jj], p) < 0)
        throw std::logic_error("lseries: non-integral inverse entry");
  out.product_is_identity = q_is_identity(q_mul(out.mphi, out.inverse)) &&
                            q_is_identity(q_mul(out.inverse, out.mphi));
  return out;
}

}  // namespace padiclf
