#include "ybl/radial_integrals.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "ybl/error.hpp"

namespace ybl {

bool moment_converges(double p, double beta) { return beta > -1.0 && 2.0 * p > beta + 1.0; }

RadialMoment radial_moment(double p, double beta) {
  RadialMoment m;
  m.p = p;
  m.beta = beta;
  m.convergent = moment_converges(p, beta);
  if (!m.convergent) {
    std::ostringstream os;
    os << "radial_moment: int (1+r^2)^(-" << p << ") r^" << beta << " diverges";
    fail(Errc::divergent, os.str());
  }
  const double a = 0.5 * (beta + 1.0);
  m.value = 0.5 * boost::math::beta(a, p - a);
  return m;
}

double moment_value(double p, double beta) { return radial_moment(p, beta).value; }

double scaled_moment(double p, double beta, double eps) {
  if (!(eps > 0.0)) fail(Errc::invalid_argument, "scaled_moment: eps must be positive");
  return std::pow(eps, beta + 1.0 - 2.0 * p) * moment_value(p, beta);
}

QuadratureResult integrate_half_line(const std::function<double(double)>& g, double scale, double tail_coef,
                                     double tail_power, double rel_tail, double magnitude_hint, double tail_from) {
  if (!(tail_power < -1.0)) fail(Errc::divergent, "integrate_half_line: tail exponent must be below -1");
  if (!(scale > 0.0)) fail(Errc::invalid_argument, "integrate_half_line: scale must be positive");
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  QuadratureResult out;
  double a = 0.0, b = scale, width = scale;
  for (int k = 0; k < 400; ++k) {
    double err = 0.0;
    out.value += GK::integrate(g, a, b, 10, 1e-14, &err);
    out.error += err;
    ++out.panels;
    if (b >= tail_from) {
      const double tail = tail_coef * std::pow(b, tail_power + 1.0) / (-tail_power - 1.0);
      if (tail <= rel_tail * std::max(std::fabs(out.value), magnitude_hint)) {
        out.tail_bound = tail;
        out.cutoff = b;
        out.error += tail;
        return out;
      }
    }
    a = b;
    width *= 2.0;
    b = a + width;
  }
  fail(Errc::divergent, "integrate_half_line: tail bound not reached");
}

double poly_radial_closed_form(const PolyRadial& q, double eps) {
  double s = 0.0;
  for (std::size_t k = 0; k < q.c.size(); ++k)
    if (q.c[k] != 0.0) s += q.c[k] * scaled_moment(q.p, q.beta + 2.0 * k, eps);
  return std::pow(eps, q.pre) * s;
}

QuadratureResult poly_radial_quadrature(const PolyRadial& q, double eps) {
  if (!(eps > 0.0)) fail(Errc::invalid_argument, "poly_radial_quadrature: eps must be positive");
  int top = -1;
  double csum = 0.0, magnitude = 0.0;
  for (std::size_t k = 0; k < q.c.size(); ++k) {
    if (q.c[k] == 0.0) continue;
    top = static_cast<int>(k);
    csum += std::fabs(q.c[k]);
    magnitude += std::fabs(q.c[k]) * scaled_moment(q.p, q.beta + 2.0 * k, eps);
  }
  if (top < 0) return {};
  const double lpre = q.pre * std::log(eps), e2 = eps * eps;
  auto g = [&](double r) {
    if (r <= 0.0) return 0.0;
    const double s = r * r;
    double poly = 0.0;
    for (int k = top; k >= 0; --k) poly = poly * s + q.c[k];
    return std::exp(lpre - q.p * std::log(e2 + s) + q.beta * std::log(r)) * poly;
  };
  // (eps^2 + r^2)^(-p) <= r^(-2p)
  const double coef = std::pow(eps, q.pre) * csum;
  return integrate_half_line(g, eps, coef, q.beta + 2.0 * top - 2.0 * q.p, 1e-14, std::pow(eps, q.pre) * magnitude);
}

std::vector<double> coefficients_at(const SPoly& p, double tau) {
  std::vector<double> c(p.c.size());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = p.c[k].eval(tau);
  return c;
}

namespace {

void require_printed_energy_expansion(int n) {
  if (energy_bracket(n) != energy_bracket_closed_form(n))
    fail(Errc::spec_invalid, "energy bracket differs from its printed expansion");
}

void require_printed_hessian_expansion() {
  static const bool ok = hessian_bracket() == hessian_bracket_closed_form();
  if (!ok) fail(Errc::spec_invalid, "Hessian bracket differs from its printed expansion");
}

void require_axis_dimension(int n) {
  // moment(n-2, n+7) needs 2(n-2) > n+8
  if (n <= 11) fail(Errc::divergent, "axis energy integral diverges for n <= 11");
}

double poly_eval(const std::vector<double>& c, double s) {
  double v = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) v = v * s + c[k];
  return v;
}

std::vector<double> poly_derivative(const std::vector<double>& c) {
  std::vector<double> d(c.size() > 1 ? c.size() - 1 : 1, 0.0);
  for (std::size_t k = 1; k < c.size(); ++k) d[k - 1] = k * c[k];
  return d;
}

}  // namespace

double axis_prefactor(int n, double S) {
  require_axis_dimension(n);
  return (n - 2.0) / (16.0 * n * (n - 1.0) * (n + 2.0)) * sphere_area(n) * S * moment_value(n - 2.0, n + 7.0);
}

double F_axis(int n, double tau, double S, double eps) {
  require_axis_dimension(n);
  require_printed_energy_expansion(n);
  if (!(eps > 0.0)) fail(Errc::invalid_argument, "F_axis: eps must be positive");
  return -axis_prefactor(n, S) * poly_I(n).eval(tau, eps * eps);
}

double F_axis(int n, double tau, const WeylForm& w, double eps) {
  return F_axis(n, tau, weyl_quartic_contractions(w).S, eps);
}

QuadratureResult F_axis_quadrature(int n, double tau, double S, double eps) {
  require_axis_dimension(n);
  PolyRadial q{n - 2.0, n + 1.0, n - 2.0, coefficients_at(energy_bracket(n), tau)};
  QuadratureResult r = poly_radial_quadrature(q, eps);
  const double c = -(n - 2.0) / (16.0 * n * (n - 1.0) * (n + 2.0)) * sphere_area(n) * S;
  r.value *= c;
  r.error *= std::fabs(c);
  r.tail_bound *= std::fabs(c);
  return r;
}

double dF_deps(int n, double tau, double S, double eps) {
  require_printed_energy_expansion(n);
  const auto c = coefficients_at(poly_I(n), tau);
  return -axis_prefactor(n, S) * 2.0 * eps * poly_eval(poly_derivative(c), eps * eps);
}

double d2F_deps2(int n, double tau, double S, double eps) {
  require_printed_energy_expansion(n);
  const auto c = coefficients_at(poly_I(n), tau);
  const auto d1 = poly_derivative(c), d2 = poly_derivative(d1);
  const double s = eps * eps;
  return -axis_prefactor(n, S) * (4.0 * s * poly_eval(d2, s) + 2.0 * poly_eval(d1, s));
}

SlopeBound certified_slope_bound(const TauCertificate& cert) {
  Rational lo = abs(cert.slope_range.lo), hi = abs(cert.slope_range.hi);
  SlopeBound b;
  b.bound_over_K = 2 * (lo > hi ? lo : hi);
  return b;
}

XiHessian hessian_xixi(int n, double tau, const QuarticContractions& qc, double eps) {
  if (n < 17) fail(Errc::divergent, "hessian_xixi: radial factors diverge for n < 17");
  if (!(eps > 0.0)) fail(Errc::invalid_argument, "hessian_xixi: eps must be positive");
  require_printed_hessian_expansion();
  XiHessian h;
  h.R1 = poly_radial_closed_form({double(n), n + 5.0, n - 2.0, coefficients_at(hessian_bracket(), tau)}, eps);
  h.R2 = poly_radial_closed_form({n - 1.0, n + 5.0, n - 2.0, coefficients_at(fprime_squared(), tau)}, eps);
  const double area = sphere_area(n), m2 = (n - 2.0) * (n - 2.0);
  const double c1 = 2.0 * m2 * area / (n * (n + 2.0) * (n + 4.0));
  const double c2 = m2 * area / (2.0 * n * (n + 2.0) * (n + 4.0));
  const double c3 = m2 * area / (4.0 * n * (n - 1.0) * (n + 2.0));
  h.A = -c1 * h.R1;
  h.B = qc.S * (-c2 * h.R1 + c3 * h.R2);
  h.H = h.A * qc.Q + h.B * Mat::Identity(n, n);
  Eigen::SelfAdjointEigenSolver<Mat> es(h.H, Eigen::EigenvaluesOnly);
  h.min_eigenvalue = es.eigenvalues().minCoeff();
  h.error_estimate = 64.0 * n * std::numeric_limits<double>::epsilon() * h.H.norm();
  return h;
}

XiHessian hessian_xixi(int n, double tau, const WeylForm& w, double eps) {
  return hessian_xixi(n, tau, weyl_quartic_contractions(w), eps);
}

Mat hessian_xixi_sphere_route(const SphereContext& c, double eps) {
  const int n = c.n;
  const SPoly f = f_poly(), fp = f_prime_poly(), s = SPoly::monomial(TauPoly(1), 1);
  const auto ff = coefficients_at(f * f, c.tau);
  const auto mix = coefficients_at(Rational(8) * f * fp + Rational(4) * s * fp * fp, c.tau);
  auto quad = [&](double p, double beta, const std::vector<double>& coef) {
    return poly_radial_quadrature({p, beta, n - 2.0, coef}, eps).value;
  };
  const double a_hh = quad(n, n + 3.0, ff);
  const double a_mix = quad(n, n + 5.0, mix);
  const double b_ff = quad(n - 1.0, n + 1.0, ff);
  const double b_mix = quad(n - 1.0, n + 3.0, mix);
  const double m2 = (n - 2.0) * (n - 2.0);
  Mat H = m2 * a_hh * c.dm.L - 0.25 * m2 * (a_hh * c.dm.D + a_mix * c.dm.E);
  H += (m2 / (8.0 * (n - 1.0))) * (c.dm.trD * b_ff + c.dm.trE * b_mix) * Mat::Identity(n, n);
  return H;
}

double total_derivative_residual(int n, double tau, double eps, double r) {
  // common factor (eps^2+r^2)^(-n) r^(n+1) removed
  const double s = r * r, q = eps * eps + s;
  const double f = eval_f(tau, s), fp = eval_f_prime(tau, s);
  const double lhs = q * ((n + 2.0) * f * f + 4.0 * s * f * fp);
  const double t2 = 2.0 * (n - 1.0) * s * f * f;
  // d/dr[q^(1-n) r^(n+2) f^2] / (q^(-n) r^(n+1))
  const double dterm = 2.0 * (1.0 - n) * s * f * f + (n + 2.0) * q * f * f + 4.0 * s * q * f * fp;
  const double scale = std::max({std::fabs(lhs), std::fabs(t2), std::fabs(dterm)});
  return scale > 0.0 ? std::fabs(lhs - t2 - dterm) / scale : 0.0;
}

IdentityCheck total_derivative_integrated(int n, double tau, double eps) {
  if (n < 17) fail(Errc::divergent, "total_derivative_integrated: moments diverge for n < 17");
  const SPoly f = f_poly(), fp = f_prime_poly();
  const double lhs = poly_radial_closed_form({n - 1.0, n + 1.0, n - 2.0, coefficients_at(energy_bracket(n), tau)}, eps);
  const double rhs =
      2.0 * (n - 1.0) * poly_radial_closed_form({double(n), n + 3.0, n - 2.0, coefficients_at(f * f, tau)}, eps) +
      2.0 * poly_radial_closed_form({n - 1.0, n + 5.0, n - 2.0, coefficients_at(fp * fp, tau)}, eps);
  return make_check(lhs, rhs);
}

AxisMinimum find_axis_minimum(int n, double tau, double S, double eps_min, double eps_max, int steps) {
  if (!(eps_min > 0.0 && eps_min < eps_max)) fail(Errc::invalid_argument, "find_axis_minimum: need 0 < eps_min < eps_max");
  if (steps < 3) fail(Errc::invalid_argument, "find_axis_minimum: need at least 3 grid points");
  const double K = axis_prefactor(n, S);
  const auto c = coefficients_at(poly_I(n), tau);
  auto F = [&](double e) { return -K * poly_eval(c, e * e); };
  const double h = (eps_max - eps_min) / (steps - 1);
  std::vector<double> v(steps);
  for (int i = 0; i < steps; ++i) v[i] = F(eps_min + i * h);
  AxisMinimum m;
  int global = 0, best = -1;
  for (int i = 1; i < steps; ++i)
    if (v[i] < v[global]) global = i;
  for (int i = 1; i + 1 < steps; ++i)
    if (v[i] < v[i - 1] && v[i] < v[i + 1] && (best < 0 || v[i] < v[best])) best = i;
  m.global_argmin = eps_min + global * h;
  m.global_value = v[global];
  m.interior = best >= 0;
  if (!m.interior) {
    m.grid_argmin = m.refined_argmin = m.global_argmin;
    m.value = m.global_value;
    return m;
  }
  m.grid_argmin = eps_min + best * h;
  double a = m.grid_argmin - h, b = m.grid_argmin + h;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - g * (b - a), x2 = a + g * (b - a), f1 = F(x1), f2 = F(x2);
  for (int it = 0; it < 200 && b - a > 1e-14; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = F(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = F(x2);
    }
  }
  m.refined_argmin = 0.5 * (a + b);
  m.value = F(m.refined_argmin);
  return m;
}

}  // namespace ybl
