#pragma once

// Tiny fixed-capacity vector/matrix types for parameter dimensions d <= 3.
// The handful of dense operations needed (Cholesky, Jacobi eigenvalues,
// quadratic forms) are written out here rather than pulling in a matrix
// library for 3x3 work.

#include <array>
#include <cmath>
#include <cstddef>

namespace rwre {

struct SmallVec {
  int d = 0;
  std::array<double, 3> a{0.0, 0.0, 0.0};

  SmallVec() = default;
  explicit SmallVec(int dim) : d(dim) {}
  SmallVec(std::initializer_list<double> xs) {
    for (double x : xs) a[d++] = x;
  }

  double& operator[](int i) { return a[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return a[static_cast<std::size_t>(i)]; }

  double norm_inf() const {
    double m = 0.0;
    for (int i = 0; i < d; ++i) m = std::max(m, std::fabs(a[static_cast<std::size_t>(i)]));
    return m;
  }
  double norm2() const {
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += a[static_cast<std::size_t>(i)] * a[static_cast<std::size_t>(i)];
    return std::sqrt(s);
  }

  friend SmallVec operator+(SmallVec x, const SmallVec& y) {
    for (int i = 0; i < x.d; ++i) x[i] += y[i];
    return x;
  }
  friend SmallVec operator-(SmallVec x, const SmallVec& y) {
    for (int i = 0; i < x.d; ++i) x[i] -= y[i];
    return x;
  }
  friend SmallVec operator*(double c, SmallVec x) {
    for (int i = 0; i < x.d; ++i) x[i] *= c;
    return x;
  }
  friend bool operator==(const SmallVec& x, const SmallVec& y) {
    if (x.d != y.d) return false;
    for (int i = 0; i < x.d; ++i)
      if (x[i] != y[i]) return false;
    return true;
  }
};

inline double dot(const SmallVec& x, const SmallVec& y) {
  double s = 0.0;
  for (int i = 0; i < x.d; ++i) s += x[i] * y[i];
  return s;
}

// lexicographic order, used for deterministic tie-breaking
inline bool lex_less(const SmallVec& x, const SmallVec& y) {
  for (int i = 0; i < x.d; ++i) {
    if (x[i] < y[i]) return true;
    if (x[i] > y[i]) return false;
  }
  return false;
}

struct SmallMat {
  int d = 0;
  std::array<double, 9> a{};  // row-major d*d

  SmallMat() = default;
  explicit SmallMat(int dim) : d(dim) { a.fill(0.0); }

  double& at(int i, int j) { return a[static_cast<std::size_t>(i * d + j)]; }
  double at(int i, int j) const { return a[static_cast<std::size_t>(i * d + j)]; }

  void symmetrize() {
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) {
        const double m = 0.5 * (at(i, j) + at(j, i));
        at(i, j) = m;
        at(j, i) = m;
      }
  }

  friend SmallMat operator*(double c, SmallMat m) {
    for (auto& v : m.a) v *= c;
    return m;
  }
};

inline SmallVec matvec(const SmallMat& m, const SmallVec& x) {
  SmallVec y(m.d);
  for (int i = 0; i < m.d; ++i) {
    double s = 0.0;
    for (int j = 0; j < m.d; ++j) s += m.at(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

inline double quad_form(const SmallMat& m, const SmallVec& x) { return dot(x, matvec(m, x)); }

// In-place Cholesky attempt; returns false if the matrix is not positive
// definite. On success `lower` holds L with m = L L^T.
inline bool cholesky(const SmallMat& m, SmallMat& lower) {
  const int d = m.d;
  lower = SmallMat(d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = m.at(i, j);
      for (int k = 0; k < j; ++k) s -= lower.at(i, k) * lower.at(j, k);
      if (i == j) {
        if (s <= 0.0) return false;
        lower.at(i, i) = std::sqrt(s);
      } else {
        lower.at(i, j) = s / lower.at(j, j);
      }
    }
  }
  return true;
}

inline bool is_positive_definite(const SmallMat& m) {
  SmallMat l;
  return cholesky(m, l);
}

// Solve m x = b for symmetric positive definite m via Cholesky.
// Returns false when the factorization fails.
inline bool solve_spd(const SmallMat& m, const SmallVec& b, SmallVec& x) {
  SmallMat l;
  if (!cholesky(m, l)) return false;
  const int d = m.d;
  SmallVec y(d);
  for (int i = 0; i < d; ++i) {
    double s = b[i];
    for (int k = 0; k < i; ++k) s -= l.at(i, k) * y[k];
    y[i] = s / l.at(i, i);
  }
  x = SmallVec(d);
  for (int i = d - 1; i >= 0; --i) {
    double s = y[i];
    for (int k = i + 1; k < d; ++k) s -= l.at(k, i) * x[k];
    x[i] = s / l.at(i, i);
  }
  return true;
}

// Cyclic Jacobi eigen decomposition for symmetric m: m = V diag(w) V^T.
// Columns of V are the eigenvectors. Plenty for d <= 3.
inline void sym_eigen(const SmallMat& m, SmallVec& w, SmallMat& v) {
  const int d = m.d;
  SmallMat s = m;
  v = SmallMat(d);
  for (int i = 0; i < d; ++i) v.at(i, i) = 1.0;
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < d; ++p)
      for (int q = p + 1; q < d; ++q) off += s.at(p, q) * s.at(p, q);
    if (off < 1e-30) break;
    for (int p = 0; p < d; ++p)
      for (int q = p + 1; q < d; ++q) {
        if (std::fabs(s.at(p, q)) < 1e-300) continue;
        const double theta = (s.at(q, q) - s.at(p, p)) / (2.0 * s.at(p, q));
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (int k = 0; k < d; ++k) {
          const double skp = s.at(k, p), skq = s.at(k, q);
          s.at(k, p) = c * skp - sn * skq;
          s.at(k, q) = sn * skp + c * skq;
        }
        for (int k = 0; k < d; ++k) {
          const double spk = s.at(p, k), sqk = s.at(q, k);
          s.at(p, k) = c * spk - sn * sqk;
          s.at(q, k) = sn * spk + c * sqk;
        }
        for (int k = 0; k < d; ++k) {
          const double vkp = v.at(k, p), vkq = v.at(k, q);
          v.at(k, p) = c * vkp - sn * vkq;
          v.at(k, q) = sn * vkp + c * vkq;
        }
      }
  }
  w = SmallVec(d);
  for (int i = 0; i < d; ++i) w[i] = s.at(i, i);
}

// Symmetric square root of a positive semidefinite matrix (negative
// eigenvalues from roundoff are clamped to zero).
inline SmallMat sym_sqrt(const SmallMat& m) {
  SmallVec w;
  SmallMat v;
  sym_eigen(m, w, v);
  SmallMat r(m.d);
  for (int i = 0; i < m.d; ++i)
    for (int j = 0; j < m.d; ++j) {
      double s = 0.0;
      for (int k = 0; k < m.d; ++k)
        s += v.at(i, k) * std::sqrt(std::max(0.0, w[k])) * v.at(j, k);
      r.at(i, j) = s;
    }
  return r;
}

inline double det(const SmallMat& m) {
  if (m.d == 1) return m.at(0, 0);
  if (m.d == 2) return m.at(0, 0) * m.at(1, 1) - m.at(0, 1) * m.at(1, 0);
  return m.at(0, 0) * (m.at(1, 1) * m.at(2, 2) - m.at(1, 2) * m.at(2, 1)) -
         m.at(0, 1) * (m.at(1, 0) * m.at(2, 2) - m.at(1, 2) * m.at(2, 0)) +
         m.at(0, 2) * (m.at(1, 0) * m.at(2, 1) - m.at(1, 1) * m.at(2, 0));
}

}  // namespace rwre
