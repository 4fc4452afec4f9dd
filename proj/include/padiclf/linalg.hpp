#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <vector>

#include "padiclf/rational.hpp"

namespace padiclf {

// Dense exact matrices, sized for modular-symbol spaces at desk scale.
// Everything here is exact; no floating point.

using QVec = std::vector<mpq_class>;
using QMat = std::vector<QVec>;  // row-major
using ZVec = std::vector<mpz_class>;
using ZMat = std::vector<ZVec>;

inline QMat qmat(size_t r, size_t c) { return QMat(r, QVec(c, 0)); }
inline ZMat zmat(size_t r, size_t c) { return ZMat(r, ZVec(c, 0)); }

inline QMat q_identity(size_t n) {
  QMat m = qmat(n, n);
  for (size_t i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

inline QMat q_from_z(const ZMat& a) {
  QMat m(a.size(), QVec(a.empty() ? 0 : a[0].size()));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < a[i].size(); ++j) m[i][j] = mpq_class(a[i][j]);
  return m;
}

inline QMat q_mul(const QMat& a, const QMat& b) {
  size_t r = a.size(), k = b.size(), c = k ? b[0].size() : 0;
  QMat out = qmat(r, c);
  for (size_t i = 0; i < r; ++i)
    for (size_t l = 0; l < k; ++l) {
      if (a[i][l] == 0) continue;
      for (size_t j = 0; j < c; ++j) out[i][j] += a[i][l] * b[l][j];
    }
  return out;
}

inline QVec q_mul_vec(const QMat& a, const QVec& x) {
  QVec out(a.size(), 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < x.size(); ++j)
      if (a[i][j] != 0 && x[j] != 0) out[i] += a[i][j] * x[j];
  return out;
}

inline QMat q_transpose(const QMat& a) {
  size_t r = a.size(), c = r ? a[0].size() : 0;
  QMat out = qmat(c, r);
  for (size_t i = 0; i < r; ++i)
    for (size_t j = 0; j < c; ++j) out[j][i] = a[i][j];
  return out;
}

// In-place reduced row echelon form; returns the pivot columns.
inline std::vector<size_t> q_rref(QMat& m) {
  std::vector<size_t> pivots;
  size_t rows = m.size(), cols = rows ? m[0].size() : 0;
  size_t rank = 0;
  for (size_t col = 0; col < cols && rank < rows; ++col) {
    size_t sel = rank;
    while (sel < rows && m[sel][col] == 0) ++sel;
    if (sel == rows) continue;
    std::swap(m[sel], m[rank]);
    mpq_class inv = 1 / m[rank][col];
    for (size_t j = col; j < cols; ++j) m[rank][j] *= inv;
    for (size_t i = 0; i < rows; ++i) {
      if (i == rank || m[i][col] == 0) continue;
      mpq_class f = m[i][col];
      for (size_t j = col; j < cols; ++j) m[i][j] -= f * m[rank][j];
    }
    pivots.push_back(col);
    ++rank;
  }
  return pivots;
}

inline size_t q_rank(QMat m) { return q_rref(m).size(); }

// Kernel of a over Q: columns of the returned matrix form a basis of
// { x : a x = 0 }.
inline QMat q_kernel(QMat a) {
  size_t cols = a.empty() ? 0 : a[0].size();
  std::vector<size_t> pivots = q_rref(a);
  std::vector<bool> is_pivot(cols, false);
  for (size_t c : pivots) is_pivot[c] = true;
  QMat basis;  // one row per kernel vector; transposed on return
  for (size_t free_col = 0; free_col < cols; ++free_col) {
    if (is_pivot[free_col]) continue;
    QVec v(cols, 0);
    v[free_col] = 1;
    for (size_t r = 0; r < pivots.size(); ++r)
      v[pivots[r]] = -a[r][free_col];
    basis.push_back(v);
  }
  return q_transpose(basis);
}

// Solves a x = b exactly; throws if inconsistent.  b and the result are
// matrices (several right-hand sides at once).
inline QMat q_solve(const QMat& a, const QMat& b) {
  size_t rows = a.size(), cols = rows ? a[0].size() : 0,
         nrhs = b.empty() ? 0 : b[0].size();
  if (b.size() != rows) throw std::invalid_argument("linalg: shape mismatch");
  QMat m = qmat(rows, cols + nrhs);
  for (size_t i = 0; i < rows; ++i) {
    for (size_t j = 0; j < cols; ++j) m[i][j] = a[i][j];
    for (size_t j = 0; j < nrhs; ++j) m[i][cols + j] = b[i][j];
  }
  std::vector<size_t> pivots = q_rref(m);
  QMat x = qmat(cols, nrhs);
  for (size_t r = 0; r < pivots.size(); ++r) {
    if (pivots[r] >= cols)
      throw std::domain_error("linalg: inconsistent linear system");
    for (size_t j = 0; j < nrhs; ++j) x[pivots[r]][j] = m[r][cols + j];
  }
  // consistency check for rows beyond the pivot count
  for (size_t i = pivots.size(); i < rows; ++i)
    for (size_t j = 0; j < nrhs; ++j)
      if (m[i][cols + j] != 0)
        throw std::domain_error("linalg: inconsistent linear system");
  return x;
}

// Integer kernel via unimodular column reduction: returns a Z-basis (columns)
// of { x in Z^n : a x = 0 }.  The basis generates the full (saturated)
// kernel lattice, which is what keeps Hecke matrices integral and eigensymbol
// normalizations primitive.
inline ZMat z_kernel(const ZMat& a) {
  size_t rows = a.size(), cols = rows ? a[0].size() : 0;
  ZMat w = a;            // working copy, column ops applied
  ZMat u = zmat(cols, cols);  // tracking matrix, starts as identity
  for (size_t i = 0; i < cols; ++i) u[i][i] = 1;

  size_t fixed = 0;  // columns < fixed hold processed pivots
  for (size_t row = 0; row < rows && fixed < cols; ++row) {
    // Euclid on the row entries over the active columns until at most one
    // nonzero remains; it becomes the next pivot column.
    for (;;) {
      size_t jmin = cols;
      size_t nonzero = 0;
      for (size_t j = fixed; j < cols; ++j) {
        if (w[row][j] == 0) continue;
        ++nonzero;
        if (jmin == cols ||
            mpz_cmpabs(w[row][j].get_mpz_t(), w[row][jmin].get_mpz_t()) < 0)
          jmin = j;
      }
      if (nonzero == 0) break;  // row contributes no pivot
      if (nonzero == 1) {
        if (jmin != fixed) {
          for (size_t i = 0; i < rows; ++i) std::swap(w[i][jmin], w[i][fixed]);
          for (size_t i = 0; i < cols; ++i) std::swap(u[i][jmin], u[i][fixed]);
        }
        ++fixed;
        break;
      }
      for (size_t j = fixed; j < cols; ++j) {
        if (j == jmin || w[row][j] == 0) continue;
        mpz_class q = w[row][j] / w[row][jmin];  // truncated quotient
        if (q == 0) continue;
        for (size_t i = row; i < rows; ++i) w[i][j] -= q * w[i][jmin];
        for (size_t i = 0; i < cols; ++i) u[i][j] -= q * u[i][jmin];
      }
    }
  }
  // columns fixed..cols-1 of u span the kernel
  ZMat out = zmat(cols, cols - fixed);
  for (size_t i = 0; i < cols; ++i)
    for (size_t j = fixed; j < cols; ++j) out[i][j - fixed] = u[i][j];
  return out;
}

// Clears denominators and content: the columns of the result are primitive
// integer vectors spanning the same Q-space.
inline ZMat z_primitive_columns(const QMat& a) {
  size_t rows = a.size(), cols = rows ? a[0].size() : 0;
  ZMat out = zmat(rows, cols);
  for (size_t j = 0; j < cols; ++j) {
    mpz_class den = 1;
    for (size_t i = 0; i < rows; ++i)
      mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), a[i][j].get_den().get_mpz_t());
    mpz_class g = 0;
    for (size_t i = 0; i < rows; ++i) {
      mpq_class scaled = a[i][j] * den;
      out[i][j] = scaled.get_num();
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), out[i][j].get_mpz_t());
    }
    if (g > 1)
      for (size_t i = 0; i < rows; ++i) out[i][j] /= g;
  }
  return out;
}

// Saturation of the column space of a inside Z^n: a Z-basis of
// span_Q(columns) ∩ Z^n.  Found as the integer kernel of a matrix whose
// rational kernel is that span.
inline ZMat z_saturate_columns(const QMat& a) {
  size_t rows = a.size();
  if (rows == 0 || a[0].empty()) return zmat(rows, 0);
  QMat ann = q_kernel(q_transpose(a));  // columns y with a^T y = 0
  // rows of ann^T annihilate the column space of a
  ZMat g = z_primitive_columns(ann);
  // build integer matrix with rows = columns of g
  size_t nann = g.empty() ? 0 : g[0].size();
  ZMat cond = zmat(nann, rows);
  for (size_t i = 0; i < rows; ++i)
    for (size_t j = 0; j < nann; ++j) cond[j][i] = g[i][j];
  if (nann == 0) {
    // full space: identity basis
    ZMat id = zmat(rows, rows);
    for (size_t i = 0; i < rows; ++i) id[i][i] = 1;
    return id;
  }
  return z_kernel(cond);
}

// Characteristic polynomial coefficients c_0..c_n (monic, c_n = 1) by the
// Faddeev-LeVerrier recursion; exact.
inline QVec charpoly(const QMat& m) {
  size_t n = m.size();
  QVec c(n + 1, 0);
  c[n] = 1;
  if (n == 0) return c;
  QMat mk = m;
  for (size_t k = 1; k <= n; ++k) {
    if (k > 1) {
      for (size_t i = 0; i < n; ++i) mk[i][i] += c[n - k + 1];
      mk = q_mul(m, mk);
    }
    mpq_class tr = 0;
    for (size_t i = 0; i < n; ++i) tr += mk[i][i];
    c[n - k] = -tr / (long)k;
  }
  return c;
}

inline bool q_is_identity(const QMat& a) {
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < a[i].size(); ++j)
      if (a[i][j] != mpq_class(i == j ? 1 : 0)) return false;
  return true;
}

}  // namespace padiclf
