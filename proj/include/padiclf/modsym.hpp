#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "padiclf/linalg.hpp"
#include "padiclf/rational.hpp"

namespace padiclf {

// Weight-2 modular symbols for Gamma_0(N) in the Manin-symbol presentation.
//
// A symbol is stored as a *functional*: one rational value per element of
// P^1(Z/NZ), subject to the two- and three-term Manin relations
//   phi(x) + phi(x sigma) = 0,   phi(x) + phi(x tau) + phi(x tau^2) = 0.
// The value of the functional on an arbitrary path {r1, r2} is computed by
// decomposing the path into unimodular steps (the Manin trick), so modular
// invariance is inherited from the relations.

// A point of P^1(Q): num/den in lowest terms, den >= 0, infinity = (1, 0).
struct CuspPoint {
  mpz_class num = 0;
  mpz_class den = 1;

  static CuspPoint infinity() { return {1, 0}; }
  static CuspPoint from_rational(const mpq_class& r) {
    return {r.get_num(), r.get_den()};
  }
  bool is_infinity() const { return den == 0; }

  void reduce() {
    if (den == 0) {
      num = 1;
      return;
    }
    if (den < 0) {
      num = -num;
      den = -den;
    }
    mpz_class g = mpz_gcd2(num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }
};

// Integer 2x2 matrix acting on P^1(Q) by fractional linear transformation.
struct Mat22 {
  mpz_class a, b, c, d;
  CuspPoint apply(const CuspPoint& x) const {
    CuspPoint y{a * x.num + b * x.den, c * x.num + d * x.den};
    y.reduce();
    return y;
  }
};

// Canonical index of P^1(Z/NZ) with SL_2(Z) lifts of the representatives.
class P1Index {
 public:
  explicit P1Index(long N) : N_(N) {
    if (N < 1 || N >= 10000)
      throw std::invalid_argument("modsym: level out of supported range");
    build();
  }

  long level() const { return N_; }
  long size() const { return (long)reps_.size(); }
  const std::vector<std::pair<long, long>>& representatives() const {
    return reps_;
  }
  // SL2 lift [[a,b],[c,d]] of representative i, bottom row reducing to it.
  const std::array<long, 4>& lift(long i) const { return lifts_[i]; }

  // Canonical representative of (c : d); requires gcd(c, d, N) = 1.
  std::pair<long, long> canonicalize(long c, long d) const {
    long n = N_;
    if (n == 1) return {0, 0};
    c %= n;
    if (c < 0) c += n;
    d %= n;
    if (d < 0) d += n;
    if (std::gcd(std::gcd(c, d), n) != 1)
      throw std::invalid_argument("modsym: pair not in P^1(Z/N)");
    if (c == 0) return {0, 1};
    long g = std::gcd(c, n);
    // scale by a unit to put g in the first slot
    long u = (c / g) % (n / g);
    long lam = inv_mod(u, n / g);
    while (std::gcd(lam, n) != 1) lam += n / g;
    long d0 = mul_mod(lam, d, n);
    // remaining stabilizer: units congruent to 1 mod n/g
    long best = -1;
    for (long t = 0; t < g; ++t) {
      long s = 1 + t * (n / g);
      if (std::gcd(s % n, n) != 1) continue;
      long cand = mul_mod(s % n, d0, n);
      if (best < 0 || cand < best) best = cand;
    }
    return {g % n, best};
  }

  long index(long c, long d) const {
    if (N_ <= kTableLimit) {
      long n = N_;
      c %= n;
      if (c < 0) c += n;
      d %= n;
      if (d < 0) d += n;
      long t = table_[c * N_ + d];
      if (t < 0) throw std::invalid_argument("modsym: pair not in P^1(Z/N)");
      return t;
    }
    auto key = canonicalize(c, d);
    auto it = lookup_.find(key);
    if (it == lookup_.end())
      throw std::logic_error("modsym: canonical representative missing");
    return it->second;
  }

  // The three involutions/rotations used by the relations, as index maps.
  long sigma(long i) const {
    auto [c, d] = reps_[i];
    return index(d, -c);
  }
  long tau(long i) const {
    auto [c, d] = reps_[i];
    return index(d, -c - d);
  }
  long eta(long i) const {
    auto [c, d] = reps_[i];
    return index(-c, d);
  }

 private:
  static long inv_mod(long a, long m) {
    if (m == 1) return 0;
    mpz_class r = mod_inverse(mpz_class(((a % m) + m) % m), mpz_class(m));
    return r.get_si();
  }
  static long mul_mod(long a, long b, long m) {
    return (long)(((long long)a * b) % m);
  }

  void build() {
    long n = N_;
    if (n == 1) {
      reps_.push_back({0, 0});
      lifts_.push_back({1, 0, 0, 1});
      lookup_[{0, 0}] = 0;
      table_.assign(1, 0);
      return;
    }
    std::map<std::pair<long, long>, long> seen;
    std::vector<long> divisors;
    for (long g = 1; g <= n; ++g)
      if (n % g == 0) divisors.push_back(g);
    for (long g : divisors) {
      for (long d = 0; d < n; ++d) {
        long c = g % n;
        if (std::gcd(std::gcd(c, d), n) != 1) continue;
        auto key = canonicalize(c, d);
        if (seen.count(key)) continue;
        seen[key] = (long)reps_.size();
        reps_.push_back(key);
      }
    }
    lookup_ = seen;
    // SL2 lifts
    for (auto [c, d] : reps_) {
      long cc = c, dd = d;
      if (cc == 0 && dd == 0) throw std::logic_error("modsym: bad rep");
      // adjust dd by multiples of N until gcd(cc, dd) = 1
      if (cc == 0) {
        cc = n;  // bottom row (N, 1) reduces to (0 : 1)
        dd = 1;
      }
      long k = 0;
      while (std::gcd(cc, dd + k * n) != 1) ++k;
      dd += k * n;
      // solve a*dd - b*cc = 1
      long long x = 0, y = 0;
      ext_gcd(dd, cc, x, y);  // x*dd + y*cc = 1
      lifts_.push_back({(long)x, (long)-y, cc, dd});
    }
    if (N_ <= kTableLimit) {
      table_.assign(N_ * N_, -1);
      for (long c = 0; c < N_; ++c)
        for (long d = 0; d < N_; ++d) {
          if (std::gcd(std::gcd(c, d), N_) != 1) continue;
          auto key = canonicalize(c, d);
          table_[c * N_ + d] = lookup_.at(key);
        }
    }
  }

  static void ext_gcd(long long a, long long b, long long& x, long long& y) {
    if (b == 0) {
      if (a != 1 && a != -1)
        throw std::logic_error("modsym: ext_gcd on non-coprime pair");
      x = a;
      y = 0;
      return;
    }
    long long x1, y1;
    ext_gcd(b, a % b, x1, y1);
    x = y1;
    y = x1 - (a / b) * y1;
  }

  static constexpr long kTableLimit = 2000;

  long N_;
  std::vector<std::pair<long, long>> reps_;
  std::vector<std::array<long, 4>> lifts_;
  std::map<std::pair<long, long>, long> lookup_;
  std::vector<long> table_;
};

enum class CFVariant { Floor, NearestInteger };

// Writes the modular symbol {oo, r} as a sum of Manin generators via the
// convergents of a continued fraction of r.  Works for any unimodular
// convergent chain; the per-step determinant (+-1) fixes the column sign.
inline void accumulate_infinity_path(const P1Index& p1, const CuspPoint& r,
                                     long mult, std::vector<mpz_class>& out,
                                     CFVariant variant = CFVariant::Floor) {
  if (r.is_infinity()) return;
  mpz_class x = r.num, y = r.den;  // y >= 1
  mpz_class pm1 = 1, qm1 = 0;      // previous convergent (starts at oo)
  mpz_class p0, q0;
  bool first = true;
  for (;;) {
    mpz_class a, rem;
    if (variant == CFVariant::Floor) {
      mpz_fdiv_qr(a.get_mpz_t(), rem.get_mpz_t(), x.get_mpz_t(),
                  y.get_mpz_t());
    } else {
      mpz_class twice = 2 * x, twoy = 2 * y;
      mpz_fdiv_q(a.get_mpz_t(), twice.get_mpz_t(), twoy.get_mpz_t());
      mpz_class r0 = x - a * y;
      if (2 * r0 > y) ++a;  // round to nearest, ties toward floor
      rem = x - a * y;
    }
    mpz_class pk, qk;
    if (first) {
      pk = a;
      qk = 1;
    } else {
      pk = a * p0 + pm1;
      qk = a * q0 + qm1;
    }
    // step {p_{k-1}/q_{k-1}, p_k/q_k}; det eps = pk*q_{k-1} - p_{k-1}*qk
    const mpz_class& pp = first ? pm1 : p0;
    const mpz_class& qq = first ? qm1 : q0;
    mpz_class eps = pk * qq - pp * qk;
    if (eps != 1 && eps != -1)
      throw std::logic_error("modsym: non-unimodular continued-fraction step");
    long N = p1.level();
    long qk_mod = (long)mpz_fdiv_ui(qk.get_mpz_t(), (unsigned long)N);
    long qq_mod = (long)mpz_fdiv_ui(qq.get_mpz_t(), (unsigned long)N);
    long dmod = (eps == 1) ? qq_mod : (N - qq_mod) % N;
    out[p1.index(qk_mod, dmod)] += mult;
    if (rem == 0) break;
    if (!first) {
      pm1 = p0;
      qm1 = q0;
    }
    p0 = pk;
    q0 = qk;
    first = false;
    x = y;
    y = rem;
    if (variant == CFVariant::NearestInteger && y < 0) {
      // keep the denominator positive; the determinant tracking absorbs signs
      x = -x;
      y = -y;
    }
  }
}

// Coefficient vector of the path {r1, r2} in the free module on generators.
inline std::vector<mpz_class> path_vector(const P1Index& p1,
                                          const CuspPoint& r1,
                                          const CuspPoint& r2,
                                          CFVariant variant = CFVariant::Floor) {
  std::vector<mpz_class> out(p1.size(), 0);
  accumulate_infinity_path(p1, r2, 1, out, variant);
  accumulate_infinity_path(p1, r1, -1, out, variant);
  return out;
}

// --- cusp classification ------------------------------------------------------

// Gamma_0(N)-equivalence of cusps p1/q1 ~ p2/q2 (lowest terms):
// s1 q2 == s2 q1 mod gcd(q1 q2, N), with p_i s_i == 1 mod q_i.
inline bool cusps_equivalent(long N, const CuspPoint& c1, const CuspPoint& c2) {
  auto s_of = [](const CuspPoint& c) -> mpz_class {
    if (c.den == 0) return 1;
    if (c.den == 1) return 0;
    mpz_class pm = c.num % c.den;
    if (pm < 0) pm += c.den;
    return mod_inverse(pm, c.den);
  };
  mpz_class s1 = s_of(c1), s2 = s_of(c2);
  mpz_class mod = mpz_gcd2(c1.den * c2.den, mpz_class(N));
  if (mod == 0) mod = N;
  mpz_class diff = s1 * c2.den - s2 * c1.den;
  return diff % mod == 0;
}

class CuspClasses {
 public:
  explicit CuspClasses(long N) : N_(N) {}

  long classify(CuspPoint c) {
    c.reduce();
    for (size_t i = 0; i < reps_.size(); ++i)
      if (cusps_equivalent(N_, reps_[i], c)) return (long)i;
    reps_.push_back(c);
    return (long)reps_.size() - 1;
  }

  long count() const { return (long)reps_.size(); }
  const std::vector<CuspPoint>& representatives() const { return reps_; }

 private:
  long N_;
  std::vector<CuspPoint> reps_;
};

// --- the space ---------------------------------------------------------------

struct SignSpace {
  ZMat basis;           // m x d saturated basis of the sign-subspace
  ZMat cuspidal;        // m x e saturated basis of the cuspidal part
  ZMat boundary;        // m x f basis of the boundary (Eisenstein-dual) part
};

struct SymbolSpace {
  std::shared_ptr<P1Index> p1;
  ZMat relation_rows;   // all Manin relation rows
  ZMat full_dual;       // m x dim saturated basis of ker(relations)
  SignSpace plus, minus;
  long cusp_count = 0;

  const SignSpace& sign_space(int sign) const {
    return sign > 0 ? plus : minus;
  }
  long level() const { return p1->level(); }
};

// Dual Hecke action: row i of the returned matrix is the coefficient vector
// w_i with (T_q phi)(x_i) = w_i . phi, built from the q+1 coset matrices.
inline ZMat hecke_row_vectors(const P1Index& p1, long q) {
  if (!is_prime(q)) throw std::invalid_argument("modsym: q must be prime");
  if (p1.level() % q == 0)
    throw std::invalid_argument("modsym: U_q for q | N is out of scope");
  long m = p1.size();
  ZMat rows = zmat(m, m);
  std::vector<Mat22> cosets;
  for (long b = 0; b < q; ++b)
    cosets.push_back({1, b, 0, q});
  cosets.push_back({q, 0, 0, 1});
  for (long i = 0; i < m; ++i) {
    const auto& L = p1.lift(i);
    CuspPoint from{L[1], L[3]}, to{L[0], L[2]};  // path {b/d, a/c}
    from.reduce();
    to.reduce();
    std::vector<mpz_class> acc(m, 0);
    for (const auto& M : cosets) {
      CuspPoint f2 = M.apply(from), t2 = M.apply(to);
      accumulate_infinity_path(p1, t2, 1, acc);
      accumulate_infinity_path(p1, f2, -1, acc);
    }
    rows[i] = acc;
  }
  return rows;
}

// Fricke involution W_N acting on functionals, as row vectors like above.
inline ZMat fricke_row_vectors(const P1Index& p1) {
  long m = p1.size();
  long N = p1.level();
  ZMat rows = zmat(m, m);
  Mat22 w{0, -1, N, 0};
  for (long i = 0; i < m; ++i) {
    const auto& L = p1.lift(i);
    CuspPoint from{L[1], L[3]}, to{L[0], L[2]};
    from.reduce();
    to.reduce();
    std::vector<mpz_class> acc(m, 0);
    accumulate_infinity_path(p1, w.apply(to), 1, acc);
    accumulate_infinity_path(p1, w.apply(from), -1, acc);
    rows[i] = acc;
  }
  return rows;
}

// Restriction of a functional-side operator (given by row vectors) to a
// lattice with basis columns B; returns the exact matrix A with op.B = B.A.
inline QMat restrict_operator(const ZMat& op_rows, const ZMat& basis) {
  size_t m = basis.size(), d = m ? basis[0].size() : 0;
  QMat y = qmat(m, d);
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = 0; j < d; ++j) {
      mpz_class acc = 0;
      for (size_t l = 0; l < m; ++l)
        if (op_rows[i][l] != 0 && basis[l][j] != 0)
          acc += op_rows[i][l] * basis[l][j];
      y[i][j] = mpq_class(acc);
    }
  }
  return q_solve(q_from_z(basis), y);
}

inline ZMat z_mul(const ZMat& a, const ZMat& b) {
  size_t r = a.size(), k = b.size(), c = k ? b[0].size() : 0;
  ZMat out = zmat(r, c);
  for (size_t i = 0; i < r; ++i)
    for (size_t l = 0; l < k; ++l) {
      if (a[i][l] == 0) continue;
      for (size_t j = 0; j < c; ++j) out[i][j] += a[i][l] * b[l][j];
    }
  return out;
}

inline SymbolSpace build_space(long N) {
  SymbolSpace sp;
  sp.p1 = std::make_shared<P1Index>(N);
  const P1Index& p1 = *sp.p1;
  long m = p1.size();

  // Manin relations (deduplicated by orbit representative).
  ZMat rel;
  std::vector<bool> done(m, false);
  for (long i = 0; i < m; ++i) {
    long j = p1.sigma(i);
    if (done[i] || done[j]) continue;
    ZVec row(m, 0);
    row[i] += 1;
    row[j] += 1;
    rel.push_back(row);
    done[i] = done[j] = true;
  }
  std::fill(done.begin(), done.end(), false);
  for (long i = 0; i < m; ++i) {
    long j = p1.tau(i), k = p1.tau(j);
    if (done[i] || done[j] || done[k]) continue;
    ZVec row(m, 0);
    row[i] += 1;
    row[j] += 1;
    row[k] += 1;
    rel.push_back(row);
    done[i] = done[j] = done[k] = true;
  }
  sp.relation_rows = rel;
  sp.full_dual = z_kernel(rel);

  // cusp classes and boundary functionals
  CuspClasses classes(N);
  std::vector<std::pair<long, long>> gen_cusps(m);  // (class of g.oo, of g.0)
  for (long i = 0; i < m; ++i) {
    const auto& L = p1.lift(i);
    CuspPoint to{L[0], L[2]}, from{L[1], L[3]};
    to.reduce();
    from.reduce();
    gen_cusps[i] = {classes.classify(to), classes.classify(from)};
  }
  sp.cusp_count = classes.count();

  for (int s = 0; s < 2; ++s) {
    int sign = s == 0 ? 1 : -1;
    SignSpace& out = s == 0 ? sp.plus : sp.minus;
    // sign rows phi(x eta) - sign*phi(x) = 0
    ZMat cond = rel;
    std::fill(done.begin(), done.end(), false);
    for (long i = 0; i < m; ++i) {
      long j = p1.eta(i);
      if (done[i] || done[j]) continue;
      ZVec row(m, 0);
      row[j] += 1;
      row[i] -= sign;
      bool nonzero = false;
      for (auto& v : row)
        if (v != 0) nonzero = true;
      if (nonzero) cond.push_back(row);
      done[i] = done[j] = true;
    }
    out.basis = z_kernel(cond);
    size_t d = out.basis.empty() ? 0 : out.basis[0].size();

    // boundary functionals projected to this sign, in basis coordinates
    QMat bnd;  // columns
    for (long cl = 0; cl < classes.count(); ++cl) {
      QVec psi(m, 0);
      for (long i = 0; i < m; ++i) {
        if (gen_cusps[i].first == cl) psi[i] += 1;
        if (gen_cusps[i].second == cl) psi[i] -= 1;
        // sign projection: psi + sign * psi o eta
      }
      QVec proj(m, 0);
      for (long i = 0; i < m; ++i) proj[i] = psi[i] + mpq_class(sign) * psi[p1.eta(i)];
      if (bnd.empty()) bnd = qmat(m, 0);
      for (long i = 0; i < m; ++i) bnd[i].push_back(proj[i]);
    }
    if (d == 0) {
      out.cuspidal = zmat(m, 0);
      out.boundary = zmat(m, 0);
      continue;
    }
    // coordinates of the boundary span inside the sign basis
    QMat coords = q_solve(q_from_z(out.basis), bnd);
    ZMat bcoords = z_saturate_columns(coords);
    out.boundary = z_mul(out.basis, bcoords);
    size_t f = bcoords.empty() ? 0 : bcoords[0].size();

    // Cuspidal part: the image of chi(T_q0), where chi is the characteristic
    // polynomial of T_q0 restricted to the boundary span.  chi(T_q0) kills
    // the boundary part (Cayley-Hamilton) and is invertible on the cuspidal
    // part: boundary eigenvalues have absolute value >= q0 - 1, cuspidal ones
    // at most 2 sqrt(q0), disjoint once q0 >= 7.
    long q0 = 7;
    while (N % q0 == 0 || !is_prime(q0)) ++q0;
    QMat t = restrict_operator(hecke_row_vectors(p1, q0), out.basis);
    QMat c;
    if (f == 0) {
      c = q_identity(d);
    } else {
      QMat tb = q_solve(q_from_z(bcoords), q_mul(t, q_from_z(bcoords)));
      QVec chi = charpoly(tb);
      c = qmat(d, d);  // chi(t) via Horner
      for (size_t i = 0; i < d; ++i) c[i][i] = chi.back();
      for (size_t k = chi.size() - 1; k-- > 0;) {
        c = q_mul(c, t);
        for (size_t i = 0; i < d; ++i) c[i][i] += chi[k];
      }
    }
    ZMat cusp_coords = z_saturate_columns(c);
    out.cuspidal = z_mul(out.basis, cusp_coords);
    if ((out.cuspidal.empty() ? 0 : out.cuspidal[0].size()) + f != d)
      throw std::logic_error("modsym: boundary/cuspidal split mismatch");
  }
  return sp;
}

// --- the eigensymbol -----------------------------------------------------------

class EigenSymbol {
 public:
  EigenSymbol() = default;
  EigenSymbol(std::shared_ptr<const P1Index> p1, int sign,
              std::vector<mpq_class> values, std::map<long, long> eigenvalues)
      : p1_(std::move(p1)),
        sign_(sign),
        values_(std::move(values)),
        eigenvalues_(std::move(eigenvalues)) {}

  long level() const { return p1_->level(); }
  int sign() const { return sign_; }
  const std::vector<mpq_class>& values() const { return values_; }
  const std::map<long, long>& eigenvalues() const { return eigenvalues_; }
  const P1Index& p1() const { return *p1_; }
  std::shared_ptr<const P1Index> p1_ptr() const { return p1_; }

  // phi({r, oo})
  mpq_class eval_path(const mpq_class& r,
                      CFVariant variant = CFVariant::Floor) const {
    CuspPoint c = CuspPoint::from_rational(r);
    c.reduce();
    if (fits_fast(c) && variant == CFVariant::Floor) return eval_fast(c);
    std::vector<mpz_class> v(p1_->size(), 0);
    accumulate_infinity_path(*p1_, c, -1, v, variant);  // {r, oo} = -{oo, r}
    mpq_class acc = 0;
    for (size_t i = 0; i < v.size(); ++i)
      if (v[i] != 0) acc += mpq_class(v[i]) * values_[i];
    return acc;
  }

  void set_eigenvalue(long q, long aq) { eigenvalues_[q] = aq; }

 private:
  bool fits_fast(const CuspPoint& c) const {
    return mpz_fits_slong_p(c.num.get_mpz_t()) &&
           mpz_fits_slong_p(c.den.get_mpz_t()) &&
           std::abs(c.num.get_si()) < (1LL << 31) &&
           c.den.get_si() < (1LL << 31);
  }

  // int64 continued-fraction loop; convergent denominators are bounded by
  // den < 2^31 so all products fit in __int128.
  mpq_class eval_fast(const CuspPoint& c) const {
    long long x = c.num.get_si(), y = c.den.get_si();
    long N = p1_->level();
    mpq_class acc = 0;
    long long pm1 = 1, qm1 = 0, p0 = 0, q0 = 0;
    bool first = true;
    for (;;) {
      long long a = x >= 0 ? x / y : -((-x + y - 1) / y);  // floor division
      long long rem = x - a * y;
      long long pk = first ? a : a * p0 + pm1;
      long long qk = first ? 1 : a * q0 + qm1;
      long long pp = first ? pm1 : p0, qq = first ? qm1 : q0;
      __int128 det = (__int128)pk * qq - (__int128)pp * qk;
      long qkm = (long)(qk % N);
      if (qkm < 0) qkm += N;
      long qqm = (long)(qq % N);
      if (qqm < 0) qqm += N;
      long dmod = (det == 1) ? qqm : (N - qqm) % N;
      acc -= values_[p1_->index(qkm, dmod)];  // minus: path {r, oo}
      if (rem == 0) break;
      if (!first) {
        pm1 = p0;
        qm1 = q0;
      }
      p0 = pk;
      q0 = qk;
      first = false;
      x = y;
      y = rem;
    }
    return acc;
  }

  std::shared_ptr<const P1Index> p1_;
  int sign_ = 1;
  std::vector<mpq_class> values_;
  std::map<long, long> eigenvalues_;
};

// Exact Hecke matrix on the cuspidal sign-subspace; integral because the
// basis generates a saturated Hecke-stable lattice.
inline QMat hecke_operator(const SymbolSpace& sp, long q, int sign) {
  const ZMat& basis = sp.sign_space(sign).cuspidal;
  QMat a = restrict_operator(hecke_row_vectors(*sp.p1, q), basis);
  for (const auto& row : a)
    for (const auto& v : row)
      if (v.get_den() != 1)
        throw std::logic_error("modsym: non-integral Hecke matrix entry");
  return a;
}

// Cuts the 1-dimensional rational eigenspace for the given eigenvalue system
// out of the cuspidal sign-subspace and returns the primitive
// integer-normalized generator (first nonzero value positive).
inline EigenSymbol eigensymbol(const SymbolSpace& sp,
                               const std::map<long, long>& eigenvalues,
                               int sign) {
  ZMat basis = sp.sign_space(sign).cuspidal;
  long m = sp.p1->size();
  for (auto [q, aq] : eigenvalues) {
    if (basis.empty() || basis[0].empty()) break;
    QMat a = restrict_operator(hecke_row_vectors(*sp.p1, q), basis);
    size_t d = a.size();
    ZMat rows = zmat(d, d);
    for (size_t i = 0; i < d; ++i)
      for (size_t j = 0; j < d; ++j) {
        mpq_class v = a[i][j] - (i == j ? mpq_class(aq) : mpq_class(0));
        if (v.get_den() != 1)
          throw std::logic_error("modsym: non-integral Hecke restriction");
        rows[i][j] = v.get_num();
      }
    ZMat ker = z_kernel(rows);
    basis = z_mul(basis, ker);
  }
  size_t dim = basis.empty() ? 0 : basis[0].size();
  if (dim == 0)
    throw std::domain_error("modsym: empty eigenspace for the given system");
  if (dim > 1)
    throw std::domain_error(
        "modsym: eigenspace is not 1-dimensional; supply more eigenvalues");
  std::vector<mpq_class> vals(m);
  mpz_class g = 0;
  for (long i = 0; i < m; ++i) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(),
                                       basis[i][0].get_mpz_t());
  if (g == 0) throw std::domain_error("modsym: zero eigenvector");
  int flip = 1;
  for (long i = 0; i < m; ++i) {
    if (basis[i][0] != 0) {
      flip = basis[i][0] > 0 ? 1 : -1;
      break;
    }
  }
  for (long i = 0; i < m; ++i)
    vals[i] = mpq_class(flip * basis[i][0] / g);
  return EigenSymbol(sp.p1, sign, vals, eigenvalues);
}

// Eigenvalue of T_q on an existing eigensymbol (exact; verifies the
// eigenvector property on every coordinate).
inline mpq_class recover_eigenvalue(const EigenSymbol& sym, long q) {
  const P1Index& p1 = sym.p1();
  ZMat rows = hecke_row_vectors(p1, q);
  long m = p1.size();
  std::vector<mpq_class> img(m, 0);
  for (long i = 0; i < m; ++i)
    for (long l = 0; l < m; ++l)
      if (rows[i][l] != 0 && sym.values()[l] != 0)
        img[i] += mpq_class(rows[i][l]) * sym.values()[l];
  long i0 = -1;
  for (long i = 0; i < m; ++i)
    if (sym.values()[i] != 0) {
      i0 = i;
      break;
    }
  if (i0 < 0) throw std::domain_error("modsym: zero symbol");
  mpq_class aq = img[i0] / sym.values()[i0];
  for (long i = 0; i < m; ++i)
    if (img[i] != aq * sym.values()[i])
      throw std::domain_error("modsym: symbol is not a T_q eigenvector");
  return aq;
}

// Fricke eigenvalue w with W_N(symbol) = w * symbol; +-1 for a newform
// eigensymbol, error otherwise.
inline int fricke_sign(const EigenSymbol& sym) {
  const P1Index& p1 = sym.p1();
  ZMat rows = fricke_row_vectors(p1);
  long m = p1.size();
  std::vector<mpq_class> img(m, 0);
  for (long i = 0; i < m; ++i)
    for (long l = 0; l < m; ++l)
      if (rows[i][l] != 0 && sym.values()[l] != 0)
        img[i] += mpq_class(rows[i][l]) * sym.values()[l];
  long i0 = -1;
  for (long i = 0; i < m; ++i)
    if (sym.values()[i] != 0) {
      i0 = i;
      break;
    }
  if (i0 < 0) throw std::domain_error("modsym: zero symbol");
  mpq_class w = img[i0] / sym.values()[i0];
  for (long i = 0; i < m; ++i)
    if (img[i] != w * sym.values()[i])
      throw std::domain_error(
          "modsym: not an eigenvector of the Fricke involution");
  if (w == 1) return 1;
  if (w == -1) return -1;
  throw std::domain_error("modsym: Fricke eigenvalue is not +-1");
}

// --- cache -------------------------------------------------------------------

inline std::string symbol_cache_text(const EigenSymbol& sym) {
  std::ostringstream os;
  os << "PADICLF-SYMCACHE v1\n";
  os << "N=" << sym.level() << " sign=" << sym.sign() << "\n";
  os << "p1size=" << sym.p1().size() << "\n";
  os << "p1";
  for (auto [c, d] : sym.p1().representatives()) os << " " << c << ":" << d;
  os << "\n";
  os << "eigenvalues";
  for (auto [q, a] : sym.eigenvalues()) os << " " << q << "=" << a;
  os << "\n";
  os << "values";
  for (const auto& v : sym.values()) os << " " << v.get_str();
  os << "\n";
  return os.str();
}

inline EigenSymbol symbol_from_cache_text(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != "PADICLF-SYMCACHE v1")
    throw std::runtime_error("modsym: cache version mismatch");
  long N = 0;
  int sign = 0;
  long m = 0;
  if (!std::getline(is, line) ||
      sscanf(line.c_str(), "N=%ld sign=%d", &N, &sign) != 2)
    throw std::runtime_error("modsym: malformed cache header");
  if (!std::getline(is, line) || sscanf(line.c_str(), "p1size=%ld", &m) != 1)
    throw std::runtime_error("modsym: malformed cache header");
  std::string p1line;
  if (!std::getline(is, p1line) || p1line.rfind("p1", 0) != 0)
    throw std::runtime_error("modsym: malformed cache P^1 table");
  if (!std::getline(is, line) || line.rfind("eigenvalues", 0) != 0)
    throw std::runtime_error("modsym: malformed cache eigenvalues");
  std::map<long, long> eigen;
  {
    std::istringstream ls(line.substr(11));
    std::string tok;
    while (ls >> tok) {
      auto eq = tok.find('=');
      if (eq == std::string::npos)
        throw std::runtime_error("modsym: malformed cache eigenvalues");
      eigen[std::stol(tok.substr(0, eq))] = std::stol(tok.substr(eq + 1));
    }
  }
  if (!std::getline(is, line) || line.rfind("values", 0) != 0)
    throw std::runtime_error("modsym: malformed cache values");
  std::vector<mpq_class> vals;
  {
    std::istringstream ls(line.substr(6));
    std::string tok;
    while (ls >> tok) vals.push_back(parse_rational(tok));
  }
  auto p1 = std::make_shared<P1Index>(N);
  if ((long)vals.size() != p1->size() || m != p1->size())
    throw std::runtime_error("modsym: cache size mismatch");
  {
    // the stored P^1 table must coincide with the deterministic rebuild
    std::istringstream ps(p1line.substr(2));
    std::string tok;
    long idx = 0;
    while (ps >> tok) {
      auto colon = tok.find(':');
      if (colon == std::string::npos || idx >= p1->size())
        throw std::runtime_error("modsym: malformed cache P^1 table");
      long c = std::stol(tok.substr(0, colon));
      long d = std::stol(tok.substr(colon + 1));
      if (p1->representatives()[idx] != std::make_pair(c, d))
        throw std::runtime_error("modsym: cache P^1 table mismatch");
      ++idx;
    }
    if (idx != p1->size())
      throw std::runtime_error("modsym: cache P^1 table truncated");
  }
  EigenSymbol sym(p1, sign, vals, eigen);
  // integrity: relations and eigen property must hold on load
  for (long i = 0; i < p1->size(); ++i) {
    mpq_class two_term = vals[i] + vals[p1->sigma(i)];
    if (two_term != 0)
      throw std::runtime_error("modsym: cache violates two-term relation");
    mpq_class three = vals[i] + vals[p1->tau(i)] + vals[p1->tau(p1->tau(i))];
    if (three != 0)
      throw std::runtime_error("modsym: cache violates three-term relation");
  }
  for (auto [q, aq] : eigen)
    if (recover_eigenvalue(sym, q) != aq)
      throw std::runtime_error("modsym: cache violates Hecke eigenvalue");
  return sym;
}

}  // namespace padiclf
