#include "ybl/exact_certificates.hpp"

#include <algorithm>
#include <sstream>

#include "ybl/error.hpp"

namespace ybl {

Rational rat(long num, long den) {
  if (den == 0) fail(Errc::invalid_argument, "rational with zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

double to_double(const Rational& q) { return q.get_d(); }

std::string fraction_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

namespace {

mpz_class pow10(long e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, static_cast<unsigned long>(e));
  return r;
}

std::string place_point(const std::string& digits, long frac) {
  // digits is an unsigned integer string; insert a point `frac` places from the right
  if (frac <= 0) return digits + std::string(static_cast<std::size_t>(-frac), '0');
  std::string d = digits;
  if (static_cast<long>(d.size()) <= frac) d = std::string(static_cast<std::size_t>(frac - d.size() + 1), '0') + d;
  d.insert(d.size() - static_cast<std::size_t>(frac), ".");
  while (!d.empty() && d.back() == '0') d.pop_back();
  if (!d.empty() && d.back() == '.') d.pop_back();
  return d;
}

}  // namespace

std::string decimal_string(const Rational& q, int digits) {
  if (q == 0) return "0";
  const bool neg = q < 0;
  Rational a = abs(q);
  mpz_class den = a.get_den();
  long twos = 0, fives = 0;
  while (mpz_divisible_ui_p(den.get_mpz_t(), 2)) { den /= 2; ++twos; }
  while (mpz_divisible_ui_p(den.get_mpz_t(), 5)) { den /= 5; ++fives; }
  std::string out;
  if (den == 1) {
    const long k = std::max(twos, fives);
    mpz_class scaled = a.get_num() * pow10(k) / a.get_den();
    out = place_point(scaled.get_str(), k);
  } else {
    // find e with 10^e <= a < 10^(e+1)
    long e = static_cast<long>(mpz_sizeinbase(a.get_num().get_mpz_t(), 10)) -
             static_cast<long>(mpz_sizeinbase(a.get_den().get_mpz_t(), 10));
    auto ten_pow = [](long p) { return p >= 0 ? Rational(pow10(p)) : Rational(mpz_class(1), pow10(-p)); };
    while (ten_pow(e) > a) --e;
    while (ten_pow(e + 1) <= a) ++e;
    const long shift = digits - 1 - e;
    Rational scaled = a * ten_pow(shift);
    mpz_class N = (scaled.get_num() * 2 + scaled.get_den()) / (scaled.get_den() * 2);
    out = place_point(N.get_str(), shift);
  }
  return neg ? "-" + out : out;
}

// ---------------------------------------------------------------- TauPoly

int TauPoly::degree() const {
  for (int k = 2; k >= 0; --k)
    if (c[k] != 0) return k;
  return -1;
}

Rational TauPoly::eval(const Rational& t) const { return c[0] + t * (c[1] + t * c[2]); }

double TauPoly::eval(double t) const { return to_double(c[0]) + t * (to_double(c[1]) + t * to_double(c[2])); }

std::string TauPoly::str() const {
  std::ostringstream os;
  os << "(" << fraction_string(c[0]) << ") + (" << fraction_string(c[1]) << ")*tau + (" << fraction_string(c[2])
     << ")*tau^2";
  return os.str();
}

TauPoly operator+(const TauPoly& a, const TauPoly& b) {
  return TauPoly(a.c[0] + b.c[0], a.c[1] + b.c[1], a.c[2] + b.c[2]);
}

TauPoly operator-(const TauPoly& a, const TauPoly& b) {
  return TauPoly(a.c[0] - b.c[0], a.c[1] - b.c[1], a.c[2] - b.c[2]);
}

TauPoly operator*(const TauPoly& a, const TauPoly& b) {
  std::array<Rational, 5> r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i + j] += a.c[i] * b.c[j];
  if (r[3] != 0 || r[4] != 0) fail(Errc::invalid_argument, "tau-degree exceeds 2");
  return TauPoly(r[0], r[1], r[2]);
}

TauPoly operator*(const Rational& s, const TauPoly& a) { return TauPoly(s * a.c[0], s * a.c[1], s * a.c[2]); }

bool operator==(const TauPoly& a, const TauPoly& b) { return a.c == b.c; }

// ---------------------------------------------------------------- SPoly

SPoly SPoly::monomial(const TauPoly& coef, int k) {
  SPoly p;
  p.c.assign(static_cast<std::size_t>(k) + 1, TauPoly());
  p.c[k] = coef;
  return p;
}

int SPoly::degree() const {
  for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k)
    if (c[k].degree() >= 0) return k;
  return -1;
}

const TauPoly& SPoly::coef(int k) const {
  static const TauPoly zero;
  return k >= 0 && k < static_cast<int>(c.size()) ? c[k] : zero;
}

SPoly SPoly::derivative() const {
  SPoly d;
  for (std::size_t k = 1; k < c.size(); ++k) d.c.push_back(Rational(static_cast<long>(k)) * c[k]);
  return d;
}

TauPoly SPoly::eval(const Rational& s) const {
  TauPoly acc;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = s * acc + *it;
  return acc;
}

double SPoly::eval(double tau, double s) const {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * s + it->eval(tau);
  return acc;
}

TauPoly SPoly::slope_at_one() const {
  TauPoly acc;
  for (std::size_t k = 1; k < c.size(); ++k) acc = acc + Rational(static_cast<long>(k)) * c[k];
  return acc;
}

SPoly SPoly::trimmed() const {
  SPoly p = *this;
  while (!p.c.empty() && p.c.back().degree() < 0) p.c.pop_back();
  return p;
}

SPoly operator+(const SPoly& a, const SPoly& b) {
  SPoly r;
  r.c.resize(std::max(a.c.size(), b.c.size()));
  for (std::size_t k = 0; k < r.c.size(); ++k) r.c[k] = a.coef(static_cast<int>(k)) + b.coef(static_cast<int>(k));
  return r.trimmed();
}

SPoly operator-(const SPoly& a, const SPoly& b) {
  SPoly r;
  r.c.resize(std::max(a.c.size(), b.c.size()));
  for (std::size_t k = 0; k < r.c.size(); ++k) r.c[k] = a.coef(static_cast<int>(k)) - b.coef(static_cast<int>(k));
  return r.trimmed();
}

SPoly operator*(const SPoly& a, const SPoly& b) {
  if (a.c.empty() || b.c.empty()) return SPoly();
  SPoly r;
  r.c.resize(a.c.size() + b.c.size() - 1);
  for (std::size_t i = 0; i < a.c.size(); ++i)
    for (std::size_t j = 0; j < b.c.size(); ++j) r.c[i + j] = r.c[i + j] + a.c[i] * b.c[j];
  return r.trimmed();
}

SPoly operator*(const Rational& k, const SPoly& a) {
  SPoly r = a;
  for (auto& t : r.c) t = k * t;
  return r.trimmed();
}

bool operator==(const SPoly& a, const SPoly& b) {
  const SPoly x = a.trimmed(), y = b.trimmed();
  return x.c == y.c;
}

// ---------------------------------------------------------------- brackets

namespace {

TauPoly k(const Rational& q) { return TauPoly(q); }
TauPoly lin(const Rational& c0, const Rational& c1) { return TauPoly(c0, c1); }

SPoly from_list(std::vector<TauPoly> coefs) {
  SPoly p;
  p.c = std::move(coefs);
  return p.trimmed();
}

Rational Q(long v) { return Rational(v); }

void require_not_pole(int n, std::initializer_list<int> poles, const char* what) {
  for (int p : poles)
    if (n == p) fail(Errc::pole_dimension, std::string(what) + ": n = " + std::to_string(n) + " is a pole dimension");
  if (n < 5) fail(Errc::dimension_unsupported, std::string(what) + ": n must be at least 5");
}

}  // namespace

SPoly f_poly() { return from_list({TauPoly::tau(), k(5), k(-1), k(rat(1, 20))}); }

SPoly f_prime_poly() { return from_list({k(5), k(-2), k(rat(3, 20))}); }

SPoly energy_bracket(int n) {
  const SPoly f = f_poly(), fp = f_prime_poly();
  const SPoly s = SPoly::monomial(k(1), 1);
  return Q(n + 2) * (f * f) + Q(4) * (s * f * fp) + Q(2) * (s * s * fp * fp);
}

SPoly energy_bracket_closed_form(int n) {
  return from_list({TauPoly(0, 0, Q(n + 2)), lin(0, Q(10 * (n + 4))), lin(Q(25 * (n + 8)), Q(-2 * (n + 6))),
                    lin(Q(-10 * (n + 12)), rat(n + 8, 10)), k(rat(3 * n + 52, 2)), k(rat(-(n + 24), 10)),
                    k(rat(n + 32, 400))});
}

SPoly hessian_bracket() {
  const SPoly f = f_poly(), fp = f_prime_poly();
  const SPoly s = SPoly::monomial(k(1), 1);
  return Q(2) * (f * fp) + s * fp * fp;
}

SPoly hessian_bracket_closed_form() {
  return from_list({lin(0, 10), lin(75, -4), lin(-50, rat(3, 10)), k(rat(23, 2)), k(rat(-11, 10)), k(rat(3, 80))});
}

SPoly fprime_squared() {
  const SPoly fp = f_prime_poly();
  return fp * fp;
}

SPoly poly_I(int n) {
  require_not_pole(n, {12, 14, 16, 18}, "poly_I");
  const Rational A = rat(n - 12, n + 6);
  const Rational B = rat(n + 8, n - 14) ;
  const Rational C = B * rat(n + 10, n - 16);
  const Rational D = C * rat(n + 12, n - 18);
  return from_list({k(0), k(0), TauPoly(0, 0, A * rat(n - 10, n + 4) * Q(n - 8)), lin(0, Q(10) * A * Q(n - 10)),
                    lin(Q(25) * A * Q(n + 8), Q(-2 * (n - 12))), lin(Q(-10 * (n + 12)), rat(n + 8, 10)),
                    k(B * rat(3 * n + 52, 2)), k(-C * rat(n + 24, 10)), k(D * rat(n + 32, 400))});
}

SPoly poly_J(int n) {
  require_not_pole(n, {12, 14, 16}, "poly_J");
  const Rational A = rat(n - 10, n + 8);
  const Rational B = rat(n + 10, n - 12);
  const Rational C = B * rat(n + 12, n - 14);
  const Rational D = C * rat(n + 14, n - 16);
  return from_list({k(0), k(0), lin(0, Q(10) * A * rat(n - 8, n + 6)), lin(Q(75) * A, Q(-4) * A),
                    lin(-50, rat(3, 10)), k(rat(23, 2) * B), k(rat(-11, 10) * C), k(rat(3, 80) * D)});
}

namespace {

// moment(p, beta + 2) / moment(p, beta) = (beta + 1) / (2p - beta - 3)
Rational moment_ratio(long p, long beta_from, long beta_to) {
  Rational r = 1;
  if (beta_to >= beta_from) {
    for (long b = beta_from; b < beta_to; b += 2) r *= rat(b + 1, 2 * p - b - 3);
  } else {
    for (long b = beta_to; b < beta_from; b += 2) r /= rat(b + 1, 2 * p - b - 3);
  }
  return r;
}

}  // namespace

SPoly poly_I_from_moments(int n) {
  require_not_pole(n, {12, 14, 16, 18}, "poly_I_from_moments");
  const SPoly bracket = energy_bracket(n);
  SPoly out;
  out.c.assign(9, TauPoly());
  // bracket coefficient k sits at r^(n+1+2k) epsilon^(4+2k), weight (1+r^2)^(2-n)
  for (int j = 0; j <= bracket.degree(); ++j)
    out.c[j + 2] = moment_ratio(n - 2, n + 7, n + 1 + 2 * j) * bracket.coef(j);
  return out.trimmed();
}

SPoly poly_J_from_moments(int n) {
  require_not_pole(n, {12, 14, 16}, "poly_J_from_moments");
  const SPoly bracket = hessian_bracket();
  SPoly out;
  out.c.assign(8, TauPoly());
  for (int j = 0; j <= bracket.degree(); ++j) out.c[j + 2] = moment_ratio(n, n + 9, n + 5 + 2 * j) * bracket.coef(j);
  return out.trimmed();
}

DimensionCoefficients dimension_coefficients(int n) {
  require_not_pole(n, {12, 14, 16, 18}, "dimension_coefficients");
  const Rational A = rat(n - 12, n + 6);
  const Rational B = rat(n + 8, n - 14);
  const Rational C = B * rat(n + 10, n - 16);
  const Rational D = C * rat(n + 12, n - 18);
  const Rational G = rat(n - 10, n + 8);
  const Rational E = rat(n + 10, n - 12);
  const Rational F = E * rat(n + 12, n - 14);
  const Rational H = F * rat(n + 14, n - 16);
  DimensionCoefficients d;
  d.n = n;
  d.a = Q(2) * A * rat(n - 10, n + 4) * Q(n - 8);
  d.b = Q(30) * A * Q(n - 10) - Q(8 * (n - 12)) + rat(n + 8, 2);
  d.c = Q(100) * A * Q(n + 8) - Q(50 * (n + 12)) + Q(3) * B * Q(3 * n + 52) - Q(7) * C * rat(n + 24, 10) +
        D * rat(n + 32, 50);
  d.alpha = Q(30) * A * Q(n - 10) - Q(16 * (n - 12)) + rat(3 * (n + 8), 2);
  d.beta = Q(200) * A * Q(n + 8) - Q(150 * (n + 12)) + Q(12) * B * Q(3 * n + 52) - Q(35) * C * rat(n + 24, 10) +
           Q(3) * D * rat(n + 32, 25);
  d.gamma = Q(10) * G * rat(n - 8, n + 6) - rat(4 * (n - 10), n + 8) + rat(3, 10);
  d.delta = Q(75) * G - Q(50) + rat(23, 2) * E - rat(11, 10) * F + rat(3, 80) * H;
  return d;
}

BridgeResult bridge_identities(int n) {
  BridgeResult r;
  r.n = n;
  const SPoly I = poly_I(n), J = poly_J(n);
  const DimensionCoefficients d = dimension_coefficients(n);
  const SPoly dI = I.derivative();
  const TauPoly slope = dI.eval(1);
  const TauPoly curv = dI.derivative().eval(1);
  r.slope_identity = slope == TauPoly(d.c, d.b, d.a);
  r.curvature_identity = (curv - slope) == TauPoly(d.beta, d.alpha);
  r.j_identity = J.eval(1) == TauPoly(d.delta, d.gamma);
  r.slope_two_ways = I.slope_at_one() == slope;
  r.moment_route_I = poly_I_from_moments(n) == I;
  r.moment_route_J = poly_J_from_moments(n) == J;
  return r;
}

// ---------------------------------------------------------------- intervals

namespace {

RationalInterval scale(const Rational& s, const RationalInterval& x) {
  return s >= 0 ? RationalInterval{s * x.lo, s * x.hi} : RationalInterval{s * x.hi, s * x.lo};
}

RationalInterval add(const RationalInterval& x, const RationalInterval& y) { return {x.lo + y.lo, x.hi + y.hi}; }

RationalInterval square(const RationalInterval& x) {
  if (x.lo >= 0) return {x.lo * x.lo, x.hi * x.hi};
  if (x.hi <= 0) return {x.hi * x.hi, x.lo * x.lo};
  const Rational m = std::max(abs(x.lo), abs(x.hi));
  return {0, m * m};
}

}  // namespace

RationalInterval eval(const TauPoly& p, const RationalInterval& t) {
  RationalInterval r{p.c[0], p.c[0]};
  r = add(r, scale(p.c[1], t));
  r = add(r, scale(p.c[2], square(t)));
  return r;
}

// ---------------------------------------------------------------- certificates

bool TauCertificate::pass() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Verdict& v) { return v.pass; });
}

double TauCertificate::tau_estimate() const { return to_double(tau.mid()); }

const Verdict* TauCertificate::find(const std::string& name) const {
  for (const auto& v : checks)
    if (v.name == name) return &v;
  return nullptr;
}

namespace {

Verdict less(std::string name, const Rational& lhs, const Rational& rhs) {
  return Verdict{std::move(name), lhs < rhs, "<", lhs, rhs};
}

Verdict greater(std::string name, const Rational& lhs, const Rational& rhs) {
  return Verdict{std::move(name), lhs > rhs, ">", lhs, rhs};
}

}  // namespace

TauCertificate evaluate_dimension(int n, int width_log2) {
  if (n < 19) fail(Errc::dimension_unsupported, "evaluate_dimension: n must be at least 19");
  const DimensionCoefficients d = dimension_coefficients(n);
  const SPoly I = poly_I(n), J = poly_J(n);
  const TauPoly q(d.c, d.b, d.a);

  TauCertificate cert;
  cert.n = n;
  cert.in_certified_range = n >= 25 && n <= 51;
  auto& ch = cert.checks;
  ch.push_back(greater("a_n > 0", d.a, 0));
  ch.push_back(less("49 a_n - 7 b_n + c_n < 0", 49 * d.a - 7 * d.b + d.c, 0));
  ch.push_back(greater("7 alpha_n > beta_n", 7 * d.alpha, d.beta));
  ch.push_back(greater("beta_n > 0", d.beta, 0));
  ch.push_back(greater("7 gamma_n > delta_n", 7 * d.gamma, d.delta));
  ch.push_back(greater("delta_n > 0", d.delta, 0));

  const bool can_isolate = ch[0].pass && ch[1].pass;
  if (can_isolate) {
    // q -> +inf as tau -> -inf and q(-7) < 0: exactly one root below -7
    Rational lo = -8;
    for (int guard = 0; q.eval(lo) <= 0 && guard < 256; ++guard) lo *= 2;
    Rational hi = -7;
    Rational width_target(mpz_class(1), mpz_class(1) << width_log2);
    int steps = 0;
    while (hi - lo > width_target) {
      const Rational mid = (lo + hi) / 2;
      const Rational v = q.eval(mid);
      ++steps;
      if (v == 0) {
        lo = hi = mid;
        break;
      }
      (v > 0 ? lo : hi) = mid;
    }
    cert.tau = {lo, hi};
    cert.bisection_steps = steps;
  } else {
    cert.tau = {-7, -7};
  }
  const RationalInterval& T = cert.tau;
  cert.slope_range = eval(q, T);
  cert.curvature_range = eval(I.derivative().derivative().eval(1), T);
  cert.j_range = eval(J.eval(1), T);
  cert.value_range = eval(I.eval(1), T);

  const Rational qlo = q.eval(T.lo), qhi = q.eval(T.hi);
  ch.push_back(less("tau interval lies below -7", T.hi, -7));
  ch.push_back(Verdict{"slope quadratic changes sign across tau interval",
                       can_isolate && ((qlo > 0 && qhi < 0) || (T.lo == T.hi && qlo == 0)), ">", qlo, qhi});
  ch.push_back(Verdict{"tau interval width <= 2^-40", T.width() <= Rational(mpz_class(1), mpz_class(1) << 40), "<=",
                       T.width(), Rational(mpz_class(1), mpz_class(1) << 40)});
  ch.push_back(less("I''(1) < 0 via -7 alpha_n + beta_n", -7 * d.alpha + d.beta, 0));
  ch.push_back(less("I''(1) < 0 via interval evaluation", cert.curvature_range.hi, 0));
  ch.push_back(less("J(1) < 0 via -7 gamma_n + delta_n", -7 * d.gamma + d.delta, 0));
  ch.push_back(less("J(1) < 0 via interval evaluation", cert.j_range.hi, 0));
  ch.push_back(greater("I(1) > 0 via interval evaluation", cert.value_range.lo, 0));
  return cert;
}

TauCertificate certify_dimension(int n, int width_log2) {
  if (n < 25 || n > 51)
    fail(Errc::dimension_unsupported, "certify_dimension: n = " + std::to_string(n) + " outside 25..51");
  TauCertificate cert = evaluate_dimension(n, width_log2);
  for (const auto& v : cert.checks)
    if (!v.pass) fail(Errc::certification_failed, "n = " + std::to_string(n) + ": " + v.name + " fails");
  return cert;
}

std::vector<TauCertificate> sweep(int n_min, int n_max) {
  if (n_min > n_max)
    fail(Errc::empty_range, "sweep: empty range " + std::to_string(n_min) + ".." + std::to_string(n_max));
  if (n_min < 25 || n_max > 51) fail(Errc::dimension_unsupported, "sweep: range must lie within 25..51");
  std::vector<TauCertificate> out;
  for (int n = n_min; n <= n_max; ++n) out.push_back(certify_dimension(n));
  return out;
}

double certified_tau(int n) { return evaluate_dimension(n).tau_estimate(); }

}  // namespace ybl
