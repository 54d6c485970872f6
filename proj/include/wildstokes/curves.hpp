#pragma once

// curves.hpp
// The two explicit Painleve curve artifacts: the genus seven icosahedral
// plane curve and the elliptic model u^2 = s(8s^2 - 11s + 8), stored with
// exact rational coefficients and verified by exact identities.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "wildstokes/common.hpp"

namespace wildstokes::curves {

/// Exact rational on 64-bit integers with 128-bit intermediates; throws on
/// overflow (the artifacts have single-digit coefficients, overflow only
/// signals misuse).
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n) : num(n), den(1) {}
  Rational(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }

  void normalize() {
    if (den == 0) throw malformed_input_error("rational with zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    std::int64_t g = std::gcd(std::abs(num), den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  static std::int64_t checked(__int128 v) {
    if (v > INT64_MAX || v < INT64_MIN) throw error("rational overflow");
    return static_cast<std::int64_t>(v);
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    __int128 n = static_cast<__int128>(a.num) * b.den + static_cast<__int128>(b.num) * a.den;
    __int128 d = static_cast<__int128>(a.den) * b.den;
    __int128 g = gcd128(n < 0 ? -n : n, d);
    return Rational(checked(n / g), checked(d / g));
  }
  friend Rational operator-(const Rational& a, const Rational& b) { return a + Rational(-b.num, b.den); }
  friend Rational operator*(const Rational& a, const Rational& b) {
    __int128 n = static_cast<__int128>(a.num) * b.num;
    __int128 d = static_cast<__int128>(a.den) * b.den;
    __int128 g = gcd128(n < 0 ? -n : n, d);
    return Rational(checked(n / g), checked(d / g));
  }
  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  bool is_zero() const { return num == 0; }
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

private:
  static __int128 gcd128(__int128 a, __int128 b) {
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    return a == 0 ? 1 : a;
  }
};

/// Bivariate polynomial with exact rational coefficients in (p, q).
struct PlaneCurve {
  std::map<std::pair<int, int>, Rational> coefficients; // (deg_p, deg_q) -> coeff

  Rational coefficient(int dp, int dq) const {
    auto it = coefficients.find({dp, dq});
    return it == coefficients.end() ? Rational(0) : it->second;
  }

  void set(int dp, int dq, Rational c) {
    if (c.is_zero())
      coefficients.erase({dp, dq});
    else
      coefficients[{dp, dq}] = c;
  }

  Rational evaluate(const Rational& p, const Rational& q) const {
    Rational total(0);
    for (const auto& [deg, coeff] : coefficients) {
      Rational term = coeff;
      for (int k = 0; k < deg.first; ++k) term = term * p;
      for (int k = 0; k < deg.second; ++k) term = term * q;
      total = total + term;
    }
    return total;
  }

  Complex evaluate(Complex p, Complex q) const {
    Complex total(0, 0);
    for (const auto& [deg, coeff] : coefficients) {
      Complex term(coeff.to_double(), 0);
      for (int k = 0; k < deg.first; ++k) term *= p;
      for (int k = 0; k < deg.second; ++k) term *= q;
      total += term;
    }
    return total;
  }
};

/// u^2 = s f(s) with f a stored quadratic a s^2 + b s + c.
struct EllipticModel {
  Rational a, b, c;
};

// ---------------------------------------------------------------------------
// The stored artifacts
// ---------------------------------------------------------------------------

/// The genus seven icosahedral Painleve curve:
///   9 (p^6 q^2 + p^2 q^6) + 18 p^4 q^4 + 4 (p^6 + q^6) + 26 (p^4 q^2 + p^2 q^4)
///   + 8 (p^4 + q^4) + 57 p^2 q^2 + 20 (p^2 + q^2) + 16 = 0.
inline PlaneCurve genus_seven_curve() {
  PlaneCurve curve;
  curve.set(6, 2, Rational(9));
  curve.set(2, 6, Rational(9));
  curve.set(4, 4, Rational(18));
  curve.set(6, 0, Rational(4));
  curve.set(0, 6, Rational(4));
  curve.set(4, 2, Rational(26));
  curve.set(2, 4, Rational(26));
  curve.set(4, 0, Rational(8));
  curve.set(0, 4, Rational(8));
  curve.set(2, 2, Rational(57));
  curve.set(2, 0, Rational(20));
  curve.set(0, 2, Rational(20));
  curve.set(0, 0, Rational(16));
  return curve;
}

/// The coefficient groups of the display, in display order; guarded by a
/// checksum test against the stored curve.
inline std::vector<std::int64_t> genus_seven_coefficient_groups() {
  return {9, 18, 4, 26, 8, 57, 20, 16};
}

/// The elliptic model underlying the degree 18 solution: u^2 = s(8s^2 - 11s + 8).
inline EllipticModel dubrovin_mazzocco_elliptic() { return {Rational(8), Rational(-11), Rational(8)}; }

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

struct SymmetryReport {
  bool swap_symmetric = false;    // F(p,q) == F(q,p)
  bool parity_symmetric = false;  // F(-p,-q) == F(p,q)
  std::string offending_monomial; // first violated monomial, if any
  bool passed() const { return swap_symmetric && parity_symmetric; }
};

/// Exact symmetry identities of the stored polynomial.
inline SymmetryReport symmetry_check(const PlaneCurve& curve) {
  SymmetryReport report;
  report.swap_symmetric = true;
  report.parity_symmetric = true;
  for (const auto& [deg, coeff] : curve.coefficients) {
    if (curve.coefficient(deg.second, deg.first) != coeff) {
      report.swap_symmetric = false;
      if (report.offending_monomial.empty()) {
        std::ostringstream m;
        m << "p^" << deg.first << " q^" << deg.second;
        report.offending_monomial = m.str();
      }
    }
    // F(-p,-q) flips the sign of odd-total-degree monomials
    if ((deg.first + deg.second) % 2 != 0 && !coeff.is_zero()) {
      report.parity_symmetric = false;
      if (report.offending_monomial.empty()) {
        std::ostringstream m;
        m << "p^" << deg.first << " q^" << deg.second;
        report.offending_monomial = m.str();
      }
    }
  }
  return report;
}

/// Exact discriminant of the quadratic factor.
inline Rational quadratic_discriminant(const EllipticModel& e) {
  return e.b * e.b - Rational(4) * e.a * e.c;
}

/// Smooth iff s f(s) has three distinct roots: f(0) != 0 and disc(f) != 0
/// (degenerate quadratics handled by direct root inspection).
inline bool elliptic_smoothness(const EllipticModel& e) {
  if (e.c.is_zero()) return false; // f(0) = 0: double root at the origin
  if (e.a.is_zero()) return !e.b.is_zero(); // linear f: distinct iff a genuine root exists
  return !quadratic_discriminant(e).is_zero();
}

} // namespace wildstokes::curves
