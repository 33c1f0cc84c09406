#include "ybl/bubble_fields.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>

#include "ybl/error.hpp"
#include "ybl/radial_integrals.hpp"
#include "ybl/sphere_moments.hpp"

namespace ybl {

BubbleParams make_bubble(const Vec& xi, double eps) {
  if (!(eps > 0.0)) fail(Errc::invalid_argument, "bubble: eps must be positive");
  return {xi, eps};
}

bool DomainBox::contains(const BubbleParams& p) const {
  return p.xi.norm() < lambda && 0.5 * lambda < p.eps && p.eps < 2.0 * lambda;
}

double eval_u(const BubbleParams& p, const Vec& x) {
  const double q = p.eps * p.eps + (x - p.xi).squaredNorm();
  return std::pow(p.eps / q, 0.5 * (p.n() - 2));
}

BubbleJet bubble_jet(const BubbleParams& p, const Vec& x) {
  const int n = p.n();
  const Vec d = x - p.xi;
  const double q = p.eps * p.eps + d.squaredNorm();
  BubbleJet j;
  j.u = std::pow(p.eps / q, 0.5 * (n - 2));
  j.grad = (-(n - 2.0) * j.u / q) * d;
  j.hess = (n * (n - 2.0) * j.u / (q * q)) * (d * d.transpose());
  j.hess.diagonal().array() -= (n - 2.0) * j.u / q;
  return j;
}

double pde_residual(const BubbleParams& p, const Vec& x) {
  const int n = p.n();
  const BubbleJet j = bubble_jet(p, x);
  const double lap = j.hess.trace();
  const double src = n * (n - 2.0) * std::pow(j.u, (n + 2.0) / (n - 2.0));
  const double scale = std::max(std::fabs(lap), src);
  return scale > 0.0 ? std::fabs(lap + src) / scale : 0.0;
}

double bubble_mass(int n) {
  if (n < 3) fail(Errc::dimension_unsupported, "bubble_mass: n >= 3 required");
  return sphere_area(n) * 0.5 * boost::math::beta(0.5 * n, 0.5 * n);
}

double sphere_yamabe_constant(int n) { return 4.0 * n * (n - 1.0) * std::pow(bubble_mass(n), 2.0 / n); }

namespace {

// int_0^pi sin^(n-2)(t) g(t) dt on fixed Gauss-Legendre panels; the
// integrands here are analytic in t
template <class G>
double theta_integral(int n, const G& g) {
  using GL = boost::math::quadrature::gauss<double, 30>;
  constexpr int panels = 12;
  const double w = M_PI / panels;
  double s = 0.0;
  for (int k = 0; k < panels; ++k)
    s += GL::integrate([&](double t) { return std::pow(std::sin(t), n - 2) * g(t); }, k * w, (k + 1) * w);
  return s;
}

// int_{R^n} F(r, cos t, sin t) dx for integrands depending on x_1 and |x| only,
// with |F| <= tail_coef r^(-2n) beyond r = tail_from
template <class F>
double planar_integral(int n, double tail_coef, double tail_from, double magnitude, const F& fn) {
  const double outer = sphere_area(n - 1);
  auto radial = [&](double r) {
    if (r <= 0.0) return 0.0;
    return outer * std::pow(r, n - 1) * theta_integral(n, [&](double t) { return fn(r, std::cos(t), std::sin(t)); });
  };
  // |S^(n-1)| r^(n-1) tail_coef r^(-2n)
  return integrate_half_line(radial, 0.25, sphere_area(n) * tail_coef, -n - 1.0, 1e-13, magnitude, tail_from).value;
}

void require_offset(double a, double eps) {
  if (!(std::fabs(a) <= 0.5)) fail(Errc::invalid_argument, "bubble quadrature: need |a| <= 1/2");
  if (!(eps > 0.0)) fail(Errc::invalid_argument, "bubble quadrature: eps must be positive");
}

}  // namespace

double bubble_mass_quadrature(int n, double a, double eps) {
  if (n < 3) fail(Errc::dimension_unsupported, "bubble_mass_quadrature: n >= 3 required");
  require_offset(a, eps);
  // |x - a e1| >= 0.9 r beyond r = 10|a|, so u^(2n/(n-2)) <= (eps / 0.81)^n r^(-2n)
  const double from = std::max(1.0, 10.0 * std::fabs(a));
  const double coef = std::pow(eps / 0.81, n);
  return planar_integral(n, coef, from, bubble_mass(n), [&](double r, double c, double) {
    const double q = eps * eps + r * r - 2.0 * a * r * c + a * a;
    return std::pow(eps / q, n);
  });
}

double eval_phi(const BubbleParams& p, int k, const Vec& x) {
  const int n = p.n();
  if (k < 0 || k > n) fail(Errc::index_range, "eval_phi: k must lie in 0..n");
  const Vec d = x - p.xi;
  const double q = p.eps * p.eps + d.squaredNorm();
  const double base = std::pow(p.eps / q, 0.5 * (n + 2));
  if (k == 0) return base * (p.eps * p.eps - d.squaredNorm()) / q;
  return base * 2.0 * p.eps * d(k - 1) / q;
}

Mat phi_gram(int n, double a, double eps) {
  if (n < 3) fail(Errc::dimension_unsupported, "phi_gram: n >= 3 required");
  require_offset(a, eps);
  // |phi_j phi_k| <= (eps / q)^(n+2) <= (eps / 0.81)^(n+2) r^(-2n) beyond r = max(1, 10|a|)
  const double from = std::max(1.0, 10.0 * std::fabs(a));
  const double coef = std::pow(eps / 0.81, n + 2);
  auto parts = [&](double r, double c, double s, double& p0, double& p1, double& pt) {
    const double d1 = r * c - a, d2 = r * r - 2.0 * a * r * c + a * a;
    const double q = eps * eps + d2;
    const double base = std::pow(eps / q, 0.5 * (n + 2));
    p0 = base * (eps * eps - d2) / q;
    p1 = base * 2.0 * eps * d1 / q;
    pt = base * 2.0 * eps * r * s / q;  // transverse factor, times v_k
  };
  const double scale = bubble_mass(n) / (eps * eps);
  double g00 = planar_integral(n, coef, from, scale, [&](double r, double c, double s) {
    double p0, p1, pt;
    parts(r, c, s, p0, p1, pt);
    return p0 * p0;
  });
  double g11 = planar_integral(n, coef, from, scale, [&](double r, double c, double s) {
    double p0, p1, pt;
    parts(r, c, s, p0, p1, pt);
    return p1 * p1;
  });
  double g01 = planar_integral(n, coef, from, scale, [&](double r, double c, double s) {
    double p0, p1, pt;
    parts(r, c, s, p0, p1, pt);
    return p0 * p1;
  });
  // transverse directions: the average of v_k^2 over S^(n-2) is 1/(n-1)
  double gtt = planar_integral(n, coef, from, scale, [&](double r, double c, double s) {
    double p0, p1, pt;
    parts(r, c, s, p0, p1, pt);
    return pt * pt;
  }) / (n - 1.0);
  Mat g = Mat::Zero(n + 1, n + 1);
  g(0, 0) = g00;
  g(1, 1) = g11;
  g(0, 1) = g(1, 0) = g01;
  for (int k = 2; k <= n; ++k) g(k, k) = gtt;
  return g;
}

TracefreeResidual tracefree_pointwise_identity(const BubbleParams& p, const Vec& x) {
  const int n = p.n();
  const BubbleJet j = bubble_jet(p, x);
  const double c = (n - 2.0) / (4.0 * (n - 1.0));
  const Mat gg = j.grad * j.grad.transpose();
  const Mat hu2 = 2.0 * (gg + j.u * j.hess);
  TracefreeResidual t;
  t.residual = gg - c * hu2;
  t.residual.diagonal().array() -= (j.grad.squaredNorm() - c * hu2.trace()) / n;
  t.scale = std::max(gg.cwiseAbs().maxCoeff(), c * hu2.cwiseAbs().maxCoeff());
  return t;
}

}  // namespace ybl
