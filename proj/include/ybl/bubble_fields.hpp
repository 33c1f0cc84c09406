#pragma once

#include "ybl/weyl_algebra.hpp"

namespace ybl {

struct BubbleParams {
  Vec xi;
  double eps = 1.0;
  int n() const { return static_cast<int>(xi.size()); }
};
BubbleParams make_bubble(const Vec& xi, double eps);  // eps <= 0 -> invalid_argument

// {|xi| < lambda, lambda/2 < eps < 2 lambda}; lambda = 1 is the unscaled box
struct DomainBox {
  double lambda = 1.0;
  bool contains(const BubbleParams& p) const;
};

// u = (eps / (eps^2 + |x - xi|^2))^((n-2)/2) with closed-form derivatives
struct BubbleJet {
  double u = 0.0;
  Vec grad;
  Mat hess;
};
double eval_u(const BubbleParams& p, const Vec& x);
BubbleJet bubble_jet(const BubbleParams& p, const Vec& x);

// |Delta u + n(n-2) u^((n+2)/(n-2))| divided by the larger of the two terms
double pde_residual(const BubbleParams& p, const Vec& x);

// int u^(2n/(n-2)) = |S^(n-1)| B(n/2, n/2) / 2
double bubble_mass(int n);
// 4 n (n-1) mass^(2/n)
double sphere_yamabe_constant(int n);
// The same integral by (r, theta) quadrature about the origin with xi = a e_1, |a| <= 1/2.
double bubble_mass_quadrature(int n, double a, double eps);

// k = 0 is the scaling direction, k = 1..n the translations
double eval_phi(const BubbleParams& p, int k, const Vec& x);

// L^2 Gram matrix of phi_0..phi_n for xi = a e_1. Entries that are odd in a
// transverse coordinate vanish by exact sphere moments; the others come from
// (r, theta) quadrature about the origin.
Mat phi_gram(int n, double a, double eps);

// d_i u d_k u - c d_i d_k(u^2) - (1/n)(|du|^2 - c Delta(u^2)) delta_ik, c = (n-2)/(4(n-1))
struct TracefreeResidual {
  Mat residual;
  double scale = 0.0;  // largest entry of the terms being cancelled
};
TracefreeResidual tracefree_pointwise_identity(const BubbleParams& p, const Vec& x);

}  // namespace ybl
