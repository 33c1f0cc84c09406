#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ybl/bubble_fields.hpp"
#include "ybl/sphere_moments.hpp"
#include "ybl/weyl_algebra.hpp"

namespace ybl {

// mu <= 1, lambda <= rho <= 1
struct PerturbParams {
  double lambda = 1.0, mu = 1.0, rho = 1.0;
};
PerturbParams make_perturb(double lambda, double mu, double rho);

// Quintic smoothstep 1 -> 0 on [a, b]: value and first two derivatives.
struct Jet {
  double v = 0.0, d1 = 0.0, d2 = 0.0;
};
Jet smooth_drop(double t, double a, double b);

// phi(s) = chi(sqrt s) mu lambda^6 f(s / lambda^2), chi = 1 on [0, rho] and 0 beyond (1+rho)/2.
// Derivatives are in s.
Jet radial_profile(const TensorField& t, const PerturbParams& p, double s);

// h(x) = phi(|x|^2) H(x) with its first and second derivatives
struct HJet {
  Mat h;
  std::vector<Mat> dh;   // dh[q] = d_q h
  std::vector<Mat> ddh;  // ddh[p * n + q] = d_p d_q h; filled only when requested
};
Mat h_single(const TensorField& t, const PerturbParams& p, const Vec& x);
HJet h_single_jet(const TensorField& t, const PerturbParams& p, const Vec& x, bool second = true);

struct MetricAtPoint {
  Mat h, g, g_inv;
  Mat g_dev, g_inv_dev;  // g - Id and g_inv - Id, accurate relative to |h|
  Mat g_beyond;          // g - Id - h, accurate relative to |h|^2
};
// exp of a symmetric matrix by eigendecomposition; non-symmetric -> Errc::non_symmetric
MetricAtPoint matrix_exp(const Mat& h);

// Metric near a base point, as the deviation g(x0 + d) - Id for small
// displacements d; differences of g are taken on the deviation so rounding
// tracks the size of the perturbation.
using LocalMetric = std::function<Mat(const Vec& d)>;
using MetricField = std::function<LocalMetric(const Vec& x0)>;
// g is the full metric; the identity is subtracted here.
MetricField field_from_function(std::function<Mat(const Vec&)> g);
// log_form = true gives h itself instead of exp(h) - Id
MetricField single_bump_field(const TensorField& t, const PerturbParams& p, bool log_form = false);

// Scalar curvature from Christoffel symbols given g, first and second derivatives.
double scalar_curvature_from_jet(const Mat& g, const std::vector<Mat>& dg, const std::vector<Mat>& ddg);

struct CurvatureValue {
  double value = 0.0;
  double error = 0.0;  // Richardson error estimate
};
// Central differences at steps `step` and `step/2`, Richardson-combined.
// A stencil metric that is not symmetric positive definite -> Errc::non_spd.
// null_linear: a field k with d_i d_k k_ik - Delta tr k = 0 identically whose
// linearization matches the metric's (for g = exp(h), the field h). The same
// difference stencil applied to it is subtracted, which removes the truncation
// error that is first order in the perturbation.
CurvatureValue scalar_curvature(const MetricField& field, const Vec& x, double step,
                                const MetricField* null_linear = nullptr);

// The four-term second-order expansion of R_g and its divergence-free reduction.
struct ExpansionTerms {
  double second_div = 0.0;    // d_i d_k h_ik
  double div_product = 0.0;   // d_i (h_il d_k h_kl)
  double div_square = 0.0;    // (1/2) d_i h_il d_k h_kl
  double grad_square = 0.0;   // (1/4) sum (d_l h_ik)^2
  double full() const { return second_div - div_product + div_square - grad_square; }
  double reduced() const { return -grad_square; }
};
ExpansionTerms expansion_terms(const HJet& j);

struct CurvatureSample {
  Vec x;
  double R_numeric = 0.0, R_fd_error = 0.0;
  double R_expansion = 0.0, R_reduced = 0.0;
  double remainder = 0.0;       // |R_numeric - R_expansion|
  double bound = 0.0;           // |h|^2 |dd h| + |h| |d h|^2
  double growth = 0.0;          // mu^2 (lambda + |x|)^14
};
// Default step: 2.5e-3 (lambda + |x|).
CurvatureSample curvature_expansion_check(const TensorField& t, const PerturbParams& p, const Vec& x,
                                          double step = 0.0);

// Rescales w so that the largest sampled |h| over |x| <= rho is `target` at mu = 1.
WeylForm scale_for_metric(const WeylForm& w, double tau, double lambda, double rho, double target,
                          std::uint64_t seed);

// Error term E = Delta_g u - c_n R u + n(n-2) u^((n+2)/(n-2)) for the bubble u
// of `bubble`, with R the quadratic expansion -(1/4) sum (d_l h_ik)^2.
struct ErrorConfig {
  PerturbParams p;
  BubbleParams bubble;
};
// Pointwise, from matrix exponentials and central differences of g^-1.
double error_term_pointwise(const TensorField& t, const ErrorConfig& c, const Vec& x);
// The same quantity through the per-direction spectral evaluation used by the norm.
double error_term_on_ray(const TensorField& t, const ErrorConfig& c, const Vec& omega, double r);

struct NormEstimate {
  double norm = 0.0;       // ||E|| in L^(2n/(n+2))
  double std_error = 0.0;  // propagated from the direction sampling
  std::size_t directions = 0;
};
// One set of directions shared by every configuration.
std::vector<NormEstimate> error_term_norms(const TensorField& t, const std::vector<ErrorConfig>& configs,
                                           std::size_t directions, std::uint64_t seed);
NormEstimate error_term_norm(const TensorField& t, const ErrorConfig& c, std::size_t directions,
                             std::uint64_t seed);

// Exact degree-5 design on S^(n-1): +-e_i and (+-e_i +- e_j)/sqrt 2, normalized weights.
struct SphereDesign {
  std::vector<Vec> points;
  std::vector<double> weights;
};
SphereDesign degree5_design(int n);

// -(n-2)/(16(n-1)) int eps^(n-2) (eps^2+|x|^2)^(2-n) sum (d_l h_ik)^2 with
// lambda = mu = 1 and no cutoff, via the design and radial quadrature.
double dirichlet_term_quadrature(const TensorField& t, double eps);

// Glued construction: bumps eta(4N^2 |x - y_N|) 2^(-4N) f(2^N |x - y_N|^2) H(x - y_N), y_N = e_1 / N
struct GluedBumpSpec {
  int N0 = 20, N_max = 60;
  // eta is 1 on [0, 1] and 0 on [eta_end, inf); eta_end <= 2
  Rational eta_end = Rational(19, 10);
};
Jet eta(const GluedBumpSpec& s, double t);

struct DisjointnessRow {
  int N = 0;
  bool literal = false;  // 1/N - 1/(N+1) > 1/(2N^2) + 1/(2(N+1)^2)
  bool actual = false;   // 1/N - 1/(N+1) > (eta_end/4) (1/N^2 + 1/(N+1)^2)
  Rational gap, reach;
};
struct DisjointnessCertificate {
  std::vector<DisjointnessRow> rows;
  bool all_actual() const;
  bool all_literal() const;
  Rational outer_radius;  // max_N 1/N + eta_end / (4 N^2)
};
DisjointnessCertificate certify_disjointness(const GluedBumpSpec& s);

class GluedField {
 public:
  // Overlapping supports -> Errc::spec_invalid
  GluedField(GluedBumpSpec s, const TensorField& t);
  Mat h(const Vec& x) const;
  // Number of bumps whose support contains x
  int active_bumps(const Vec& x) const;
  // sup over r of eta(4N^2 r) 2^(-4N) |f(2^N r^2)| r^2; times max |H(omega)| this is the bump sup
  double radial_sup(int N) const;
  const GluedBumpSpec& spec() const { return s_; }

 private:
  GluedBumpSpec s_;
  const TensorField* t_;
};

}  // namespace ybl
