#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "ybl/weyl_algebra.hpp"

namespace ybl {

// |S^(n-1)| = 2 pi^(n/2) / Gamma(n/2)
double sphere_area(int n);

// Integral over the unit sphere S^(n-1) of prod_i x_i^(e_i).
double sphere_monomial_moment(int n, const std::vector<int>& exponents);
// Integral of x_i x_j x_k x_m (indices 0-based), via the three pairings.
double quartic_moment(int n, int i, int j, int k, int m);
// Integral of x_a x_b x_c x_d x_e x_f, via the fifteen pairings.
double sextic_moment(int n, int a, int b, int c, int d, int e, int f);

// Unit-sphere integrals of the polynomial integrands built from H, computed
// by exact pairing formulas.
//   G(a,b): sum_{ikl} (d_l H_ik)^2 = omega^T G omega
//   D(p,q) = int sum (d_l H_ik)^2 w_p w_q      E(p,q) = int sum H_ik^2 w_p w_q
//   L(p,q) = int sum_l H_pl H_ql               trD = int sum (dH)^2, trE = int |H|^2
struct DirectionalMoments {
  int n = 0;
  Mat G, D, E, L;
  double trD = 0.0, trE = 0.0;
};

DirectionalMoments directional_moments(const WeylForm& w);

struct IdentityCheck {
  double lhs = 0.0, rhs = 0.0, rel_err = 0.0;
};

// rel_err = |lhs - rhs| / max(|lhs|, |rhs|, floor); the floor keeps entries
// that vanish by cancellation from reporting rounding noise as O(1)
IdentityCheck make_check(double lhs, double rhs, double floor = 0.0);

struct SphereContext {
  int n = 0;
  double tau = 0.0;
  DirectionalMoments dm;
  QuarticContractions qc;
};

SphereContext sphere_context(const WeylForm& w, double tau);

// first: sum (d_l H_ik)^2 x_p x_q over the sphere of radius r; second: sum H_ik^2 x_p x_q
std::pair<IdentityCheck, IdentityCheck> identity1_check(const SphereContext& c, double r, int p, int q);
IdentityCheck identity2_check(const SphereContext& c, double r, int p, int q);
IdentityCheck identity3_check(const SphereContext& c, double r);
IdentityCheck hbar_pair_check(const SphereContext& c, double r, int p, int q);

// Contracting the weighted identity with delta_pq reproduces the unweighted one,
// checked as an exact identity of polynomials in s over Q[tau].
bool trace_consistency_exact(int n);
// Same contraction with f = 1: sum_p of the first weighted display equals r^2 times
// the unweighted one, as exact rationals in n.
bool trace_consistency_constant_f(int n);

// Rows of uniform points on S^(n-1) for one chunk of a sample stream;
// the stream is a function of (seed, chunk) only.
void sphere_directions(int n, std::uint64_t seed, std::size_t chunk, std::size_t rows, std::vector<double>& out);

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

// Uniform points on S^(n-1) from normalized Gaussian vectors; returns
// |S^(n-1)| * mean and its standard error. Deterministic for a fixed seed.
McEstimate mc_sphere_integral(const std::function<double(const double*)>& integrand, int n, std::size_t samples,
                              std::uint64_t seed);

struct SphereMcReport {
  std::vector<std::pair<int, int>> pairs;
  double r = 1.0;
  // per pair
  std::vector<McEstimate> identity1_grad, identity1_value, identity2, hbar_pair;
  McEstimate identity3;
};

// All sphere identities from one sample stream, sharing each H(omega) evaluation.
SphereMcReport mc_identities(const TensorField& t, const std::vector<std::pair<int, int>>& pairs, double r,
                             std::size_t samples, std::uint64_t seed);

}  // namespace ybl
