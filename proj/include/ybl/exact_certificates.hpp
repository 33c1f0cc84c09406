#pragma once

#include <gmpxx.h>

#include <array>
#include <string>
#include <vector>

namespace ybl {

using Rational = mpq_class;

Rational rat(long num, long den = 1);
double to_double(const Rational& q);
// "num/den" (or "num" when den == 1)
std::string fraction_string(const Rational& q);
// Exact decimal expansion when the denominator is of the form 2^a 5^b,
// otherwise rounded to `digits` significant digits.
std::string decimal_string(const Rational& q, int digits = 40);

// c[0] + c[1] tau + c[2] tau^2
struct TauPoly {
  std::array<Rational, 3> c{};

  TauPoly() = default;
  explicit TauPoly(const Rational& c0, const Rational& c1 = 0, const Rational& c2 = 0) : c{c0, c1, c2} {}
  static TauPoly tau() { return TauPoly(0, 1); }

  int degree() const;
  Rational eval(const Rational& tau) const;
  double eval(double tau) const;
  std::string str() const;

  friend TauPoly operator+(const TauPoly& a, const TauPoly& b);
  friend TauPoly operator-(const TauPoly& a, const TauPoly& b);
  friend TauPoly operator*(const TauPoly& a, const TauPoly& b);  // throws if degree exceeds 2
  friend TauPoly operator*(const Rational& s, const TauPoly& a);
  friend bool operator==(const TauPoly& a, const TauPoly& b);
  friend bool operator!=(const TauPoly& a, const TauPoly& b) { return !(a == b); }
};

// Polynomial in s with coefficients in Q[tau]; c[k] multiplies s^k.
struct SPoly {
  std::vector<TauPoly> c;

  static SPoly monomial(const TauPoly& coef, int k);
  int degree() const;
  const TauPoly& coef(int k) const;
  SPoly derivative() const;
  TauPoly eval(const Rational& s) const;
  double eval(double tau, double s) const;
  // sum_k k c_k, i.e. the first derivative at s = 1 without forming the derivative
  TauPoly slope_at_one() const;
  SPoly trimmed() const;

  friend SPoly operator+(const SPoly& a, const SPoly& b);
  friend SPoly operator-(const SPoly& a, const SPoly& b);
  friend SPoly operator*(const SPoly& a, const SPoly& b);
  friend SPoly operator*(const Rational& k, const SPoly& a);
  friend bool operator==(const SPoly& a, const SPoly& b);
  friend bool operator!=(const SPoly& a, const SPoly& b) { return !(a == b); }
};

// f(s) = tau + 5 s - s^2 + s^3/20 and its derivative
SPoly f_poly();
SPoly f_prime_poly();

// (n+2) f^2 + 4 s f f' + 2 s^2 f'^2, built from f by polynomial arithmetic, and the
// closed-form coefficient list it must equal.
SPoly energy_bracket(int n);
SPoly energy_bracket_closed_form(int n);
// 2 f f' + s f'^2, built and closed form
SPoly hessian_bracket();
SPoly hessian_bracket_closed_form();
// f'(s)^2 (tau-free)
SPoly fprime_squared();

SPoly poly_I(int n);
SPoly poly_J(int n);
// I and J rebuilt from the brackets and exact moment ratios
SPoly poly_I_from_moments(int n);
SPoly poly_J_from_moments(int n);

struct DimensionCoefficients {
  int n = 0;
  Rational a, b, c, alpha, beta, gamma, delta;
};

DimensionCoefficients dimension_coefficients(int n);

struct BridgeResult {
  int n = 0;
  bool slope_identity = false;      // I'(1) == a tau^2 + b tau + c
  bool curvature_identity = false;  // I''(1) - I'(1) == alpha tau + beta
  bool j_identity = false;          // J(1) == gamma tau + delta
  bool slope_two_ways = false;      // sum k c_k == (dI/ds)(1)
  bool moment_route_I = false;
  bool moment_route_J = false;
  bool all() const {
    return slope_identity && curvature_identity && j_identity && slope_two_ways && moment_route_I && moment_route_J;
  }
};

BridgeResult bridge_identities(int n);

struct RationalInterval {
  Rational lo, hi;
  Rational width() const { return hi - lo; }
  Rational mid() const { return (lo + hi) / 2; }
};

RationalInterval eval(const TauPoly& p, const RationalInterval& tau);

struct Verdict {
  std::string name;
  bool pass = false;
  std::string relation;  // "<", ">", "<="
  Rational lhs, rhs;
};

struct TauCertificate {
  int n = 0;
  RationalInterval tau;
  int bisection_steps = 0;
  std::vector<Verdict> checks;
  RationalInterval slope_range;      // I'(1) over the tau interval
  RationalInterval curvature_range;  // I''(1)
  RationalInterval j_range;          // J(1)
  RationalInterval value_range;      // I(1)
  bool in_certified_range = false;

  bool pass() const;
  double tau_estimate() const;
  const Verdict* find(const std::string& name) const;
};

// Evaluates every check without throwing on a failed inequality.
TauCertificate evaluate_dimension(int n, int width_log2 = 64);
// Same, but requires 25 <= n <= 51 and throws certification_failed naming the
// first failed inequality.
TauCertificate certify_dimension(int n, int width_log2 = 64);
std::vector<TauCertificate> sweep(int n_min, int n_max);

// Floating tau for numeric modules (midpoint of the isolating interval)
double certified_tau(int n);

}  // namespace ybl
