#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "padiclf/lseries.hpp"
#include "padiclf/numoracle.hpp"

using namespace padiclf;

namespace {

EigenSymbol symbol_11a1() {
  SymbolSpace sp = build_space(11);
  return eigensymbol(sp, {{2, -2}, {3, -1}}, +1);
}

EigenSymbol symbol_37a1() {
  SymbolSpace sp = build_space(37);
  return eigensymbol(sp, {{2, -2}, {3, -3}}, +1);
}

MeasureTable table_11a1(long n_max = 5) {
  return build_measure(symbol_11a1(), 5,
                       AdmissibleRoot::make(HeckeContext{5, 1, 2}, "unit"),
                       n_max);
}

MeasureTable table_37a1(long n_max = 5) {
  return build_measure(symbol_37a1(), 5,
                       AdmissibleRoot::make(HeckeContext{5, -2, 2}, "unit"),
                       n_max);
}

PadicNumber s_int(long p, long v, long wp = 40) {
  return PadicNumber::from_integer(p, v, wp);
}

}  // namespace

TEST_CASE("eval_at s=1 interpolates the total mass") {
  EigenSymbol sym = symbol_11a1();
  MeasureTable t = table_11a1();
  PadicNumber l1 = eval_at(t, s_int(5, 1), 4);
  PadicNumber mass = t.total_mass.embed(t.root.image(30));
  CHECK((l1 - mass).is_zero());
  // mass = (1 - 1/alpha)^2 lambda(0) has valuation exactly 2 here
  CHECK(l1.provably_nonzero());
  CHECK(l1.twice_valuation() == 4);
}

TEST_CASE("eval_at on the zero table") {
  auto p1 = std::make_shared<P1Index>(11);
  std::vector<mpq_class> zeros(p1->size(), 0);
  EigenSymbol zsym(p1, +1, zeros, {});
  MeasureTable t = build_measure(
      zsym, 5, AdmissibleRoot::make(HeckeContext{5, 1, 2}, "unit"), 3);
  PadicNumber v = eval_at(t, s_int(5, 7), 3);
  CHECK(!v.provably_nonzero());
}

TEST_CASE("rank sensitivity: L_p(37a1)(1) is consistent with zero") {
  MeasureTable t = table_37a1();
  PadicNumber l1 = eval_at(t, s_int(5, 1), 5);
  CHECK(!l1.provably_nonzero());
  CHECK(l1.abs_precision() >= 4);  // zero-consistency floor of at least p^4
}

TEST_CASE("taylor c_0 agrees with eval_at; exact at the interpolation center") {
  MeasureTable t = table_11a1();
  PadicPowerSeries ser = taylor_expand(t, s_int(5, 1), 6, 5, 40);
  PadicNumber via_eval = eval_at(t, s_int(5, 1), 5);
  CHECK(equal_at_shared_precision(ser.coeffs[0], via_eval));
  // at s0 = 1 every k >= 1 term carries the factor (s0 - 1), so c_0 is the
  // zeroth moment on the nose
  PadicNumber mass = t.total_mass.embed(t.root.image(30));
  CHECK((ser.coeffs[0] - mass).is_zero());

  // a center away from 1
  PadicPowerSeries ser3 = taylor_expand(t, s_int(5, 3), 6, 5, 40);
  PadicNumber via_eval3 = eval_at(t, s_int(5, 3), 5);
  CHECK(equal_at_shared_precision(ser3.coeffs[0], via_eval3));
}

TEST_CASE("series derivative matches the finite-difference oracle") {
  MeasureTable t = table_11a1();
  PadicPowerSeries ser = taylor_expand(t, s_int(5, 1), 4, 5, 40);
  for (long texp = 2; texp <= 3; ++texp) {
    mpz_class pt = p_power(5, texp);
    PadicNumber sp = s_int(5, 1 + pt.get_si());
    PadicNumber fd =
        (eval_at(t, sp, 5) - eval_at(t, s_int(5, 1), 5)).shift(-texp);
    CHECK((fd - ser.coeffs[1]).is_zero());
  }
}

TEST_CASE("termwise differentiation of the angle power, per unit") {
  // F(s) = <a>^(s-1); F'(s) assembled from e_{k-1}(s-1..s-k)/k! (p atil)^k
  long p = 5, wp = 36;
  PadicNumber a = PadicNumber::from_integer(p, 7, wp);
  PadicNumber z = angle_part(a) - PadicNumber::one(p, wp);  // p * atil
  long K = 40;
  PadicNumber s = s_int(p, 3, wp);
  PadicNumber deriv = PadicNumber::zero(p, wp);
  PadicNumber zpow = PadicNumber::one(p, wp);
  // terms beyond k = 30 sit far above the comparison window
  for (long k = 1; k <= 30; ++k) {
    zpow = zpow * z;
    mpz_class kf;
    mpz_fac_ui(kf.get_mpz_t(), (unsigned long)k);
    PadicNumber fd1 = falling_factorial_derivative(k, 1, s);
    deriv = deriv + fd1.scale(mpq_class(1, kf)) * zpow;
  }
  for (long texp = 3; texp <= 6; ++texp) {
    mpz_class pt = p_power(p, texp);
    PadicNumber s2 = s + PadicNumber::from_integer(p, pt, wp);
    PadicNumber fd = (binomial_series_power(a, s2 - PadicNumber::one(p, wp), K) -
                      binomial_series_power(a, s - PadicNumber::one(p, wp), K))
                         .shift(-texp);
    PadicNumber diff = fd - deriv;
    // agreement to precision ~ t (the quotient's own certified precision
    // shrinks with t, so compare at a fixed window)
    CHECK(diff.truncate_twice(2 * texp).is_zero());
  }
}

TEST_CASE("re-centering matches direct expansion") {
  MeasureTable t = table_11a1();
  PadicPowerSeries at1 = taylor_expand(t, s_int(5, 1), 8, 5, 40);
  PadicPowerSeries at2 = taylor_expand(t, s_int(5, 2), 8, 5, 40);
  PadicPowerSeries moved = recenter(at1, s_int(5, 2));
  for (size_t j = 0; j < 3; ++j)
    CHECK((moved.coeffs[j] - at2.coeffs[j]).is_zero());
}

TEST_CASE("two-path consistency and level refinement") {
  MeasureTable t = table_11a1();
  PadicPowerSeries ser = taylor_expand(t, s_int(5, 1), 8, 5, 40);
  std::mt19937 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    long u = (long)(rng() % 3000);
    PadicNumber s = s_int(5, 1 + 5 * u);  // inside D(1, 5)
    PadicNumber via_series = ser.evaluate(s);
    PadicNumber direct = eval_at(t, s, 5);
    CHECK((via_series - direct).is_zero());
    // level refinement within err(m)
    PadicNumber coarse = eval_at(t, s, 4);
    CHECK((direct - coarse).is_zero());
  }
}

TEST_CASE("order of vanishing: rank 0, rank 1, synthetic") {
  MeasureTable t11 = table_11a1();
  PadicPowerSeries s11 = taylor_expand(t11, s_int(5, 1), 6, 5, 40);
  OrderReport r11 = order_of_vanishing(s11);
  CHECK(r11.determined);
  CHECK(r11.order == 0);
  CHECK(r11.leading_coeff->twice_valuation() == 4);  // unit * (1-1/alpha)^2 * 2

  MeasureTable t37 = table_37a1();
  PadicPowerSeries s37 = taylor_expand(t37, s_int(5, 1), 6, 5, 40);
  OrderReport r37 = order_of_vanishing(s37);
  CHECK(r37.determined);
  CHECK(r37.order == 1);  // regression: c_1 provably nonzero, established here
  CHECK(!r37.ledger[0].provably_nonzero);
  CHECK(r37.ledger[0].valuation_or_bound >= 4);
  CHECK(r37.ledger[1].provably_nonzero);

  PadicPowerSeries synth;
  synth.center = s_int(5, 1);
  synth.prime = 5;
  synth.coeffs = {PadicNumber::zero(5, 8),
                  PadicNumber::from_integer(5, 3, 8)};
  OrderReport rs = order_of_vanishing(synth);
  CHECK(rs.order == 1);
  CHECK(rs.ledger[0].valuation_or_bound == 8);

  PadicPowerSeries empty;
  CHECK_THROWS(order_of_vanishing(empty));

  // all-zero coefficients: undetermined, never "infinite order"
  PadicPowerSeries allz;
  allz.center = s_int(5, 1);
  allz.prime = 5;
  allz.coeffs = {PadicNumber::zero(5, 8), PadicNumber::zero(5, 8)};
  OrderReport rz = order_of_vanishing(allz);
  CHECK(!rz.determined);
  CHECK(rz.order == -1);
}

TEST_CASE("functional equation residuals") {
  EigenSymbol e11 = symbol_11a1();
  MeasureTable t11 = table_11a1();
  std::vector<PadicNumber> samples = {s_int(5, 1), s_int(5, 6), s_int(5, -4)};
  FunctionalEquationReport rep =
      functional_equation_check(t11, e11, samples, 5);
  CHECK(rep.all_pass);
  CHECK(rep.fricke == -1);
  CHECK(rep.sign_calibrated);
  CHECK(rep.sign_used == +1);  // rank 0 forces the plus sign at s = 1
  for (const auto& s : rep.samples) CHECK(s.shared_floor >= 4);

  EigenSymbol e37 = symbol_37a1();
  MeasureTable t37 = table_37a1();
  // calibrate away from the rank-1 zero at s = 1
  std::vector<PadicNumber> samples37 = {s_int(5, 6), s_int(5, -4),
                                        s_int(5, 1)};
  FunctionalEquationReport rep37 =
      functional_equation_check(t37, e37, samples37, 5);
  CHECK(rep37.all_pass);
  CHECK(rep37.fricke == +1);
  // regression established across fixtures: the k=2 measure-side sign is
  // minus the Fricke eigenvalue
  CHECK(rep37.sign_used == -rep37.fricke);
  CHECK(rep.sign_used == -rep.fricke);

  // an independent supersingular fixture: 14a1 has a_5 = 0
  {
    SymbolSpace sp14 = build_space(14);
    EigenSymbol e14 = eigensymbol(sp14, {{3, -2}, {5, 0}}, +1);
    MeasureTable t14 = build_measure(
        e14, 5, AdmissibleRoot::make(HeckeContext{5, 0, 2}, "plus"), 3);
    FunctionalEquationReport rep14 = functional_equation_check(
        t14, e14, {s_int(5, 6), s_int(5, -4)}, 3);
    CHECK(rep14.all_pass);
    CHECK(rep14.sign_used == -rep14.fricke);
  }

  // zero-set symmetry: L_p(11a1) nonzero at s0 and at 2 - s0
  PadicNumber l_at = eval_at(t11, s_int(5, 6), 5);
  PadicNumber l_sym = eval_at(t11, s_int(5, -4), 5);
  CHECK(l_at.provably_nonzero());
  CHECK(l_sym.provably_nonzero());

  // zero table: both sides vanish, every sample passes trivially
  auto p1 = std::make_shared<P1Index>(11);
  std::vector<mpq_class> zeros(p1->size(), 0);
  EigenSymbol zsym(p1, +1, zeros, {});
  MeasureTable zt = build_measure(
      zsym, 5, AdmissibleRoot::make(HeckeContext{5, 1, 2}, "unit"), 3);
  FunctionalEquationReport zrep =
      functional_equation_check(zt, zsym, samples, 3);
  CHECK(zrep.all_pass);
  CHECK(!zrep.sign_calibrated);
}

TEST_CASE("moment decay ledger") {
  MeasureTable t = table_11a1();
  MomentVector mv = moments(t, 20, 5);
  auto ledger = decay_check(mv, t);
  for (const auto& e : ledger) {
    CHECK(e.certified);
    CHECK(e.pass);
    CHECK(e.margin >= 0);
  }
  // synthetic violation: a fake moment with very negative valuation
  MomentVector bad = mv;
  bad.entries[3] = PadicNumber::from_rational(5, mpq_class(1, 3125), 10);
  auto bl = decay_check(bad, t);
  CHECK(!bl[3].pass);
  CHECK(bl[3].k == 3);
}

TEST_CASE("falling factorial derivatives against symbolic differentiation") {
  long p = 7, wp = 30;
  std::mt19937 rng(17);
  for (long n = 0; n <= 10; ++n) {
    RationalPoly fn = falling_factorial_poly(n);
    for (long j = 0; j <= n; ++j) {
      RationalPoly fnj = fn.nth_derivative(j);
      for (int trial = 0; trial < 5; ++trial) {
        long sv = (long)(rng() % 20001) - 10000;
        PadicNumber s = PadicNumber::from_integer(p, sv, wp);
        PadicNumber lib = falling_factorial_derivative(n, j, s);
        PadicNumber sym = fnj.eval(s, wp);
        CHECK((lib - sym).is_zero());
      }
    }
  }
  // top derivative is n!
  PadicNumber s = PadicNumber::from_integer(p, 123, wp);
  mpz_class f6;
  mpz_fac_ui(f6.get_mpz_t(), 6);
  CHECK((falling_factorial_derivative(6, 6, s) -
         PadicNumber::from_integer(p, f6, wp))
            .is_zero());
  // j = 0 at s = 1: f_n(1) = 0 for n >= 1
  for (long n = 1; n <= 8; ++n)
    CHECK(!falling_factorial_derivative(n, 0, PadicNumber::from_integer(p, 1, wp))
               .provably_nonzero());
  // j > n gives zero
  CHECK(!falling_factorial_derivative(4, 7, s).provably_nonzero());
}

TEST_CASE("shift identity f_n(s + p^t) = sum_j p^(jt) e_(n-j)") {
  // exact rational identity, n <= 8
  long p = 5;
  std::mt19937 rng(23);
  for (long n = 1; n <= 8; ++n) {
    for (long texp = 1; texp <= 3; ++texp) {
      mpq_class s((long)(rng() % 1001) - 500, 1 + (long)(rng() % 40));
      s.canonicalize();
      mpq_class h(p_power(p, texp));
      RationalPoly fn = falling_factorial_poly(n);
      mpq_class lhs = fn.eval(s + h);
      std::vector<mpq_class> roots;
      for (long i = 1; i <= n; ++i) roots.push_back(s - i);
      auto e = elementary_symmetric(roots, n, mpq_class(1), mpq_class(0));
      mpq_class rhs = 0, hp = 1;
      for (long j = 0; j <= n; ++j) {
        rhs += hp * e[n - j];
        hp *= h;
      }
      CHECK(lhs == rhs);
    }
  }
}

TEST_CASE("c1 lemma") {
  // smallest case by hand: f_2(s) = (s-1)(s-2), f_2'(s) = 2s - 3;
  // f_2'(s + h) = f_2'(s) + 2h, and (j+1) j! e_0 = 2: c_1 = 2
  CHECK(verify_c1_lemma(2, 1, mpq_class(7), 3, 5));
  std::mt19937 rng(29);
  mpq_class s((long)(rng() % 100000), 1);
  CHECK(verify_c1_lemma(5, 2, s, 3, 5));
  CHECK(verify_c1_lemma(8, 3, mpq_class(12345), 2, 5));
  for (long n = 2; n <= 8; ++n)
    for (long j = 1; j < n; ++j)
      CHECK(verify_c1_lemma(n, j, mpq_class((long)(rng() % 10000)), 2, 7));
  CHECK_THROWS(verify_c1_lemma(3, 3, mpq_class(1), 2, 5));
}

TEST_CASE("truncated psi inversion") {
  // K = 1
  PsiInversion one = truncated_psi_inverse(1, {1}, mpq_class(1), 5);
  CHECK(one.mphi[0][0] == 1);
  CHECK(one.inverse[0][0] == 1);
  CHECK(one.product_is_identity);

  // K = 4, indices 1..4, s0 = 1, p = 5: unit upper triangular; the (1,2)
  // entry of the inverse is minus the (1,2) entry of the matrix
  PsiInversion four = truncated_psi_inverse(4, {1, 2, 3, 4}, mpq_class(1), 5);
  CHECK(four.product_is_identity);
  for (int i = 0; i < 4; ++i) CHECK(four.mphi[i][i] == 1);
  CHECK(four.inverse[0][1] == -four.mphi[0][1]);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < i; ++j) CHECK(four.mphi[i][j] == 0);

  // K = 12 with random increasing indices <= 40
  std::mt19937 rng(31);
  std::vector<long> idx;
  long cur = 0;
  for (int i = 0; i < 12; ++i) {
    cur += 1 + (long)(rng() % 3);
    idx.push_back(cur);
  }
  CHECK(idx.back() <= 40);
  PsiInversion big = truncated_psi_inverse(12, idx, mpq_class(2), 5);
  CHECK(big.product_is_identity);
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 12; ++j) {
      CHECK(rat_valuation(big.mphi[i][j], 5) >= 0);
      CHECK(rat_valuation(big.inverse[i][j], 5) >= 0);
    }

  CHECK_THROWS(truncated_psi_inverse(2, {3, 2}, mpq_class(1), 5));
  CHECK_THROWS(truncated_psi_inverse(2, {1, 2}, mpq_class(1, 5), 5));
  CHECK_THROWS(truncated_psi_inverse(17, {}, mpq_class(1), 5));
}

TEST_CASE("precision exhausted error carries suggestions") {
  // a supersingular table at shallow level has err(m) <= 0: the expansion
  // must refuse with the suggested larger parameters rather than fabricate
  EigenSymbol sym = symbol_11a1();
  CurveData e{0, -1, 1, -10, -20, 11};
  long ssp = 0;
  for (long q = 5; q < 60 && !ssp; ++q)
    if (is_prime(q) && 11 % q != 0 && curve_ap(e, q) == 0) ssp = q;
  MeasureTable t = build_measure(
      sym, ssp, AdmissibleRoot::make(HeckeContext{ssp, 0, 2}, "plus"), 1);
  try {
    taylor_expand(t, PadicNumber::from_integer(ssp, 1, 30), 2, 1, 8);
    CHECK(false);
  } catch (const std::exception& ex) {
    CHECK(std::string(ex.what()).find("precision exhausted") !=
          std::string::npos);
    CHECK(std::string(ex.what()).find("m=3") != std::string::npos);
  }
  CHECK_THROWS(taylor_expand(table_11a1(3), s_int(5, 1), 4, 3, 2));
}

TEST_CASE("coefficient floors meet the documented combined bound") {
  MeasureTable t = table_11a1();
  PadicPowerSeries ser = taylor_expand(t, s_int(5, 1), 6, 5, 40);
  mpq_class err = t.riemann_error(5);
  mpq_class tail = taylor_tail_floor(t, 40);
  mpq_class combined = std::min(err, tail);
  for (const auto& c : ser.coeffs)
    CHECK(c.abs_precision() >= std::min(combined, mpq_class(4)));
  // evaluating at the center returns c_0 on the nose
  PadicNumber at_center = ser.evaluate(s_int(5, 1));
  CHECK((at_center - ser.coeffs[0]).is_zero());
}

TEST_CASE("series export format") {
  MeasureTable t = table_11a1(3);
  PadicPowerSeries ser = taylor_expand(t, s_int(5, 1), 3, 3, 20);
  std::string text = ser.export_text();
  CHECK(text.rfind("PADICLF-SERIES v1; N=11; p=5; alpha=unit;", 0) == 0);
  // one line per coefficient plus the header
  long lines = (long)std::count(text.begin(), text.end(), '\n');
  CHECK(lines == 4);
}
