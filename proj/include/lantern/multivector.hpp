#pragma once
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace lantern::ga {

// Euclidean Clifford algebra G_n over an ordered orthonormal basis
// e1..en, with e_i e_j = -e_j e_i (i != j) and e_i^2 = 1.
//
// Storage is dense: coeffs[k] is the coefficient of the basis blade whose
// bitmask is k (bit i set <=> letter e_{i+1} present, letters ascending).
// The grade of blade k is popcount(k).

inline constexpr int kMaxDim = 8;

struct Multivector {
  int dim = 0;
  std::vector<double> coeffs;  // size 2^dim

  Multivector() = default;
  explicit Multivector(int n) : dim(n), coeffs(std::size_t(1) << check_dim(n), 0.0) {}

  static int check_dim(int n) {
    if (n < 1 || n > kMaxDim)
      throw std::invalid_argument("multivector dimension must be in [1, " +
                                  std::to_string(kMaxDim) + "], got " + std::to_string(n));
    return n;
  }

  static Multivector zero(int n) { return Multivector(n); }

  static Multivector scalar(int n, double value) {
    Multivector m(n);
    m.coeffs[0] = value;
    return m;
  }

  static Multivector unit(int n) { return scalar(n, 1.0); }

  // Single blade c * e_{letters of mask}.
  static Multivector blade(int n, unsigned mask, double c = 1.0) {
    Multivector m(n);
    if (mask >= m.coeffs.size()) throw std::invalid_argument("blade mask out of range");
    m.coeffs[mask] = c;
    return m;
  }

  // Basis letter e_i, 1-based.
  static Multivector basis(int n, int i) {
    if (i < 1 || i > n) throw std::invalid_argument("basis letter index out of range");
    return blade(n, 1u << (i - 1));
  }

  // Grade-1 element from components (x = sum_i comps[i] e_{i+1}).
  static Multivector vector(const std::vector<double>& comps) {
    Multivector m(int(comps.size()));
    for (std::size_t i = 0; i < comps.size(); ++i) m.coeffs[1u << i] = comps[i];
    return m;
  }

  double operator[](unsigned mask) const { return coeffs[mask]; }
  double& operator[](unsigned mask) { return coeffs[mask]; }

  // Component of a grade-1 element along e_i (1-based).
  double vec(int i) const { return coeffs[1u << (i - 1)]; }

  bool is_zero() const {
    for (double c : coeffs)
      if (c != 0.0) return false;
    return true;
  }

  bool has_grade_only(int g) const {
    for (unsigned k = 0; k < coeffs.size(); ++k)
      if (coeffs[k] != 0.0 && std::popcount(k) != g) return false;
    return true;
  }
};

inline void require_same_dim(const Multivector& a, const Multivector& b) {
  if (a.dim != b.dim)
    throw std::invalid_argument("dimension mismatch: " + std::to_string(a.dim) + " vs " +
                                std::to_string(b.dim));
}

inline Multivector operator+(const Multivector& a, const Multivector& b) {
  require_same_dim(a, b);
  Multivector r(a.dim);
  for (std::size_t k = 0; k < r.coeffs.size(); ++k) r.coeffs[k] = a.coeffs[k] + b.coeffs[k];
  return r;
}

inline Multivector operator-(const Multivector& a, const Multivector& b) {
  require_same_dim(a, b);
  Multivector r(a.dim);
  for (std::size_t k = 0; k < r.coeffs.size(); ++k) r.coeffs[k] = a.coeffs[k] - b.coeffs[k];
  return r;
}

inline Multivector operator-(const Multivector& a) {
  Multivector r(a.dim);
  for (std::size_t k = 0; k < r.coeffs.size(); ++k) r.coeffs[k] = -a.coeffs[k];
  return r;
}

inline Multivector operator*(double s, const Multivector& a) {
  Multivector r(a.dim);
  for (std::size_t k = 0; k < r.coeffs.size(); ++k) r.coeffs[k] = s * a.coeffs[k];
  return r;
}

inline Multivector operator*(const Multivector& a, double s) { return s * a; }
inline Multivector operator/(const Multivector& a, double s) { return (1.0 / s) * a; }

// Sign of the blade product e_A e_B: the parity of the swaps needed to sort
// the concatenated letter sequence; equal adjacent letters annihilate to 1.
inline int blade_product_sign(unsigned a, unsigned b) {
  int swaps = 0;
  unsigned rest = a >> 1;
  while (rest != 0) {
    swaps += std::popcount(rest & b);
    rest >>= 1;
  }
  return (swaps & 1) ? -1 : 1;
}

inline Multivector geometric_product(const Multivector& a, const Multivector& b) {
  require_same_dim(a, b);
  Multivector r(a.dim);
  const std::size_t size = r.coeffs.size();
  for (unsigned i = 0; i < size; ++i) {
    const double ai = a.coeffs[i];
    if (ai == 0.0) continue;
    for (unsigned j = 0; j < size; ++j) {
      const double bj = b.coeffs[j];
      if (bj == 0.0) continue;
      r.coeffs[i ^ j] += blade_product_sign(i, j) * ai * bj;
    }
  }
  return r;
}

// Grade-raising part: blades sharing a letter contribute nothing.
// On grade-1 x, y this equals (xy - yx)/2.
inline Multivector outer_product(const Multivector& a, const Multivector& b) {
  require_same_dim(a, b);
  Multivector r(a.dim);
  const std::size_t size = r.coeffs.size();
  for (unsigned i = 0; i < size; ++i) {
    const double ai = a.coeffs[i];
    if (ai == 0.0) continue;
    for (unsigned j = 0; j < size; ++j) {
      if ((i & j) != 0) continue;
      const double bj = b.coeffs[j];
      if (bj == 0.0) continue;
      r.coeffs[i | j] += blade_product_sign(i, j) * ai * bj;
    }
  }
  return r;
}

inline Multivector operator*(const Multivector& a, const Multivector& b) {
  return geometric_product(a, b);
}

inline Multivector operator^(const Multivector& a, const Multivector& b) {
  return outer_product(a, b);
}

// Euclidean structure of G_n: the basis blades are orthonormal, so the
// scalar product is the plain coefficient dot product. On grade-1 elements
// it equals (xy + yx)/2.
inline double scalar_product(const Multivector& a, const Multivector& b) {
  require_same_dim(a, b);
  double s = 0.0;
  for (std::size_t k = 0; k < a.coeffs.size(); ++k) s += a.coeffs[k] * b.coeffs[k];
  return s;
}

inline double norm(const Multivector& a) { return std::sqrt(scalar_product(a, a)); }

inline Multivector grade_project(const Multivector& a, int g) {
  Multivector r(a.dim);
  for (unsigned k = 0; k < a.coeffs.size(); ++k)
    if (std::popcount(k) == g) r.coeffs[k] = a.coeffs[k];
  return r;
}

// v^{-1} = v / |v|^2, defined for nonzero grade-1 elements.
inline Multivector vector_inverse(const Multivector& v) {
  if (!v.has_grade_only(1)) throw std::invalid_argument("vector_inverse: not a vector");
  const double n2 = scalar_product(v, v);
  if (n2 == 0.0) throw std::invalid_argument("vector_inverse: zero vector");
  return v / n2;
}

// Pseudo-unit I_n = e1 e2 ... en and its inverse (-1)^{n(n-1)/2} I_n.
inline Multivector pseudo_unit(int n) {
  return Multivector::blade(n, (1u << Multivector::check_dim(n)) - 1u);
}

inline Multivector pseudo_unit_inverse(int n) {
  const int sign = ((n * (n - 1) / 2) % 2 == 0) ? 1 : -1;
  return Multivector::blade(n, (1u << Multivector::check_dim(n)) - 1u, double(sign));
}

// (x ^ y) . I_2 for grade-1 x, y in G_2: the determinant of their components.
inline double det2(const Multivector& x, const Multivector& y) {
  if (x.dim != 2 || y.dim != 2) throw std::invalid_argument("det2 requires dimension 2");
  return x.coeffs[1] * y.coeffs[2] - x.coeffs[2] * y.coeffs[1];
}

// Isometric duality in G_3: x* = x I_3 maps vectors to bivectors,
// X# = -X I_3 maps back; cross(a, b) = (a ^ b)#.
inline Multivector dual3(const Multivector& x) {
  if (x.dim != 3) throw std::invalid_argument("dual3 requires dimension 3");
  if (!x.has_grade_only(1)) throw std::invalid_argument("dual3: not a vector");
  return geometric_product(x, pseudo_unit(3));
}

inline Multivector undual3(const Multivector& X) {
  if (X.dim != 3) throw std::invalid_argument("undual3 requires dimension 3");
  if (!X.has_grade_only(2)) throw std::invalid_argument("undual3: not a bivector");
  return -geometric_product(X, pseudo_unit(3));
}

inline Multivector cross(const Multivector& a, const Multivector& b) {
  return undual3(outer_product(a, b));
}

// Componentwise comparison with |delta| <= atol + rtol * |reference|.
inline bool approx_equal(const Multivector& a, const Multivector& b, double atol = 1e-12,
                         double rtol = 1e-9) {
  if (a.dim != b.dim) return false;
  for (std::size_t k = 0; k < a.coeffs.size(); ++k)
    if (std::abs(a.coeffs[k] - b.coeffs[k]) > atol + rtol * std::abs(b.coeffs[k])) return false;
  return true;
}

// Debug rendering as "c*e<letters>" terms, e.g. "6*e12"; the scalar term
// prints bare, the zero multivector prints "0".
inline std::string to_string(const Multivector& a) {
  std::string out;
  char buf[40];
  for (unsigned k = 0; k < a.coeffs.size(); ++k) {
    if (a.coeffs[k] == 0.0) continue;
    if (!out.empty()) out += " + ";
    std::snprintf(buf, sizeof(buf), "%.17g", a.coeffs[k]);
    out += buf;
    if (k != 0) {
      out += "*e";
      for (int i = 0; i < a.dim; ++i)
        if (k & (1u << i)) out += char('1' + i);
    }
  }
  return out.empty() ? "0" : out;
}

}  // namespace lantern::ga
