#pragma once

#include <functional>
#include <vector>

#include "ybl/exact_certificates.hpp"
#include "ybl/sphere_moments.hpp"
#include "ybl/weyl_algebra.hpp"

namespace ybl {

// int_0^inf (1 + r^2)^(-p) r^beta dr
struct RadialMoment {
  double p = 0.0, beta = 0.0, value = 0.0;
  bool convergent = false;
};

bool moment_converges(double p, double beta);
RadialMoment radial_moment(double p, double beta);  // divergent -> Errc::divergent
double moment_value(double p, double beta);
// int_0^inf (eps^2 + r^2)^(-p) r^beta dr = eps^(beta + 1 - 2p) moment(p, beta)
double scaled_moment(double p, double beta, double eps);

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;       // panel error estimate plus tail bound
  double tail_bound = 0.0;  // analytic bound on the discarded [cutoff, inf) piece
  double cutoff = 0.0;
  int panels = 0;
};

// Integral of g over [0, inf). For r >= tail_from the caller guarantees
// |g(r)| <= tail_coef * r^tail_power with tail_power < -1. Panels double in
// length from `scale`; the cutoff grows until the tail bound falls below
// rel_tail * max(|value|, magnitude_hint).
QuadratureResult integrate_half_line(const std::function<double(double)>& g, double scale, double tail_coef,
                                     double tail_power, double rel_tail = 1e-14, double magnitude_hint = 0.0,
                                     double tail_from = 1.0);

// Weighted polynomial radial integral
//   int_0^inf eps^pre (eps^2 + r^2)^(-p) r^beta sum_k c_k r^(2k) dr
struct PolyRadial {
  double p = 0.0, beta = 0.0, pre = 0.0;
  std::vector<double> c;
};
double poly_radial_closed_form(const PolyRadial& q, double eps);
QuadratureResult poly_radial_quadrature(const PolyRadial& q, double eps);

// Coefficients of an s-polynomial at a numeric tau.
std::vector<double> coefficients_at(const SPoly& p, double tau);

// Positive prefactor K with F(0, eps) = -K I(eps^2):
//   K = (n-2) / (16 n (n-1) (n+2)) |S^(n-1)| S moment(n-2, n+7)
double axis_prefactor(int n, double S);

double F_axis(int n, double tau, double S, double eps);
double F_axis(int n, double tau, const WeylForm& w, double eps);
// Direct radial quadrature of the energy bracket against (eps^2 + r^2)^(2-n).
QuadratureResult F_axis_quadrature(int n, double tau, double S, double eps);
double dF_deps(int n, double tau, double S, double eps);
double d2F_deps2(int n, double tau, double S, double eps);

// Rigorous bound on |dF/deps(0,1)| / K from the certified tau interval:
// 2 max |I'(1)| over the interval, as an exact rational.
struct SlopeBound {
  Rational bound_over_K;
  bool within(const Rational& tolerance_over_K) const { return bound_over_K <= tolerance_over_K; }
};
SlopeBound certified_slope_bound(const TauCertificate& cert);

// Hessian in xi at (0, eps): H = A Q + B Id.
struct XiHessian {
  Mat H;
  double A = 0.0, B = 0.0;
  double R1 = 0.0;  // int eps^(n-2) (eps^2+r^2)^(-n) r^(n+5) [2ff' + r^2 f'^2]
  double R2 = 0.0;  // int eps^(n-2) (eps^2+r^2)^(1-n) r^(n+5) f'^2
  double min_eigenvalue = 0.0;
  double error_estimate = 0.0;  // 64 n eps_mach ||H||_F
};
XiHessian hessian_xixi(int n, double tau, const QuarticContractions& qc, double eps);
XiHessian hessian_xixi(int n, double tau, const WeylForm& w, double eps);
// Same Hessian assembled from the sphere moments of H and its derivatives,
// with each radial factor integrated by quadrature.
Mat hessian_xixi_sphere_route(const SphereContext& c, double eps);

// Pointwise residual of
//   (eps^2+r^2)^(1-n) r^(n+1) [(n+2) f^2 + 4 r^2 f f']
//     - 2(n-1) (eps^2+r^2)^(-n) r^(n+3) f^2 - d/dr[(eps^2+r^2)^(1-n) r^(n+2) f^2]
// relative to the largest term.
double total_derivative_residual(int n, double tau, double eps, double r);
// Both sides of the integrated relation, each by closed-form moments.
IdentityCheck total_derivative_integrated(int n, double tau, double eps);

struct AxisMinimum {
  double grid_argmin = 0.0;     // lowest interior grid point that is a strict local minimum
  double refined_argmin = 0.0;  // golden-section refinement around it
  double value = 0.0;
  bool interior = false;        // false when no interior local minimum exists
  double global_argmin = 0.0;   // lowest grid point overall, possibly an endpoint
  double global_value = 0.0;
};
// Grid scan of F(0, .) on [eps_min, eps_max] followed by golden-section refinement.
AxisMinimum find_axis_minimum(int n, double tau, double S, double eps_min, double eps_max, int steps);

}  // namespace ybl
