#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>

#include "doctest.h"
#include "property.hpp"
#include "ybl/bubble_fields.hpp"
#include "ybl/error.hpp"
#include "ybl/sphere_moments.hpp"

using namespace ybl;

namespace {

struct Case {
  BubbleParams p;
  Vec x;
};

Case draw_case(prop::Rng& r) {
  const int n = prop::integer(r, 3, 51);
  Vec xi(n), x(n);
  for (int i = 0; i < n; ++i) {
    xi(i) = prop::uniform(r, -0.3, 0.3);
    x(i) = prop::uniform(r, -0.4, 0.4);
  }
  return {make_bubble(xi, prop::uniform(r, 0.3, 2.0)), x};
}

// int_0^inf (1+r^2)^(-p) r^beta g(r^2) dr through r = tan(theta)
template <class G>
double radial(double p, double beta, G g) {
  boost::math::quadrature::tanh_sinh<double> ts;
  return ts.integrate([&](double th) {
    const double t = std::tan(th);
    return std::pow(std::sin(th), beta) * std::pow(std::cos(th), 2 * p - 2 - beta) * g(t * t);
  }, 0.0, M_PI / 2);
}

}  // namespace

TEST_CASE("bubble parameters and the domain box") {
  CHECK_THROWS_AS(make_bubble(Vec::Zero(4), 0.0), Error);
  CHECK_THROWS_AS(make_bubble(Vec::Zero(4), -1.0), Error);
  const DomainBox unit{}, small{0.1};
  Vec xi = Vec::Zero(5);
  CHECK(unit.contains(make_bubble(xi, 1.0)));
  CHECK_FALSE(unit.contains(make_bubble(xi, 0.5)));
  CHECK_FALSE(unit.contains(make_bubble(xi, 2.0)));
  CHECK(unit.contains(make_bubble(xi, 1.999)));
  xi(2) = 0.99;
  CHECK(unit.contains(make_bubble(xi, 1.0)));
  xi(2) = 1.0;
  CHECK_FALSE(unit.contains(make_bubble(xi, 1.0)));
  CHECK(small.contains(make_bubble(0.05 * Vec::Ones(1), 0.1)));
  CHECK_FALSE(small.contains(make_bubble(0.05 * Vec::Ones(1), 0.25)));
}

TEST_CASE("bubble jet against finite differences") {
  prop::for_all("jet", 40, 41, draw_case, [](const Case& c) {
    const int n = c.p.n();
    const BubbleJet j = bubble_jet(c.p, c.x);
    if (std::fabs(j.u - eval_u(c.p, c.x)) > 1e-15 * j.u) return false;
    const double h = 1e-5;
    const double gs = j.grad.cwiseAbs().maxCoeff() + j.u, hs = j.hess.cwiseAbs().maxCoeff() + gs;
    for (int i = 0; i < n; ++i) {
      Vec xp = c.x, xm = c.x;
      xp(i) += h;
      xm(i) -= h;
      if (std::fabs((eval_u(c.p, xp) - eval_u(c.p, xm)) / (2 * h) - j.grad(i)) > 1e-7 * gs) return false;
      const Vec col = (bubble_jet(c.p, xp).grad - bubble_jet(c.p, xm).grad) / (2 * h);
      if ((col - j.hess.col(i)).cwiseAbs().maxCoeff() > 1e-7 * hs) return false;
    }
    return (j.hess - j.hess.transpose()).cwiseAbs().maxCoeff() <= 1e-15 * hs;
  });
}

TEST_CASE("the bubble solves the critical equation") {
  prop::for_all("pde", 80, 42, draw_case, [](const Case& c) { return pde_residual(c.p, c.x) < 1e-12; });
}

TEST_CASE("mass and sphere constant") {
  CHECK(bubble_mass(4) == doctest::Approx(M_PI * M_PI / 6).epsilon(1e-14));
  for (int n : {3, 4, 6, 25, 51}) {
    CAPTURE(n);
    // int (1+r^2)^-n r^(n-1) by quadrature
    const double m = sphere_area(n) * radial(n, n - 1.0, [](double) { return 1.0; });
    CHECK(bubble_mass(n) == doctest::Approx(m).epsilon(1e-12));
    CHECK(sphere_yamabe_constant(n) == doctest::Approx(n * (n - 1.0) * std::pow(sphere_area(n + 1), 2.0 / n)).epsilon(1e-13));
  }
  // translation and scale invariance of the mass
  for (auto [n, a, eps] : {std::tuple{6, 0.3, 0.7}, {25, -0.5, 1.3}, {51, 0.1, 1.0}})
    CHECK(bubble_mass_quadrature(n, a, eps) == doctest::Approx(bubble_mass(n)).epsilon(1e-10));
}

TEST_CASE("phi are parameter derivatives of u times u^(4/(n-2))") {
  prop::for_all("phi", 30, 43, draw_case, [](const Case& c) {
    const int n = c.p.n();
    const double w = std::pow(eval_u(c.p, c.x), 4.0 / (n - 2.0)), k = 2.0 * c.p.eps / (n - 2.0);
    const double h = 1e-6 * c.p.eps;
    BubbleParams a = c.p, b = c.p;
    a.eps += h;
    b.eps -= h;
    const double due = (eval_u(a, c.x) - eval_u(b, c.x)) / (2 * h);
    const double s = std::fabs(k * w * due) + std::fabs(eval_phi(c.p, 1, c.x)) + 1e-300;
    if (std::fabs(eval_phi(c.p, 0, c.x) + k * w * due) > 1e-7 * s) return false;
    for (int i = 1; i <= std::min(n, 4); ++i) {
      BubbleParams p = c.p, m = c.p;
      p.xi(i - 1) += h;
      m.xi(i - 1) -= h;
      const double dux = (eval_u(p, c.x) - eval_u(m, c.x)) / (2 * h);
      if (std::fabs(eval_phi(c.p, i, c.x) - k * w * dux) > 1e-7 * s) return false;
    }
    return true;
  });
  CHECK_THROWS_AS(eval_phi(make_bubble(Vec::Zero(3), 1.0), 4, Vec::Zero(3)), Error);
}

TEST_CASE("Gram matrix of phi") {
  for (int n : {6, 25}) {
    CAPTURE(n);
    const Mat g = phi_gram(n, 0.0, 1.0);
    // centred oracles by radial quadrature
    const double g00 = sphere_area(n) * radial(n + 4.0, n - 1.0, [](double s) { return (1 - s) * (1 - s); });
    const double g11 = sphere_area(n) / n * radial(n + 4.0, n + 1.0, [](double) { return 4.0; });
    CHECK(g(0, 0) == doctest::Approx(g00).epsilon(1e-10));
    CHECK(g(1, 1) == doctest::Approx(g11).epsilon(1e-10));
    CHECK(std::fabs(g(0, 1)) < 1e-12 * g(0, 0));
    for (int k = 2; k <= n; ++k) CHECK(g(k, k) == doctest::Approx(g(1, 1)).epsilon(1e-10));
    // the integrals do not depend on where the bubble sits, and scale as eps^-2
    const Mat moved = phi_gram(n, 0.4, 1.0);
    CHECK((moved - g).cwiseAbs().maxCoeff() < 1e-9 * g(0, 0));
    const Mat scaled = phi_gram(n, 0.2, 0.5);
    CHECK((scaled * 0.25 - g).cwiseAbs().maxCoeff() < 1e-9 * g(0, 0));
    CHECK((g - g.transpose()).norm() == 0.0);
  }
}

TEST_CASE("trace-free identity for the bubble") {
  prop::for_all("tracefree", 50, 44, draw_case, [](const Case& c) {
    const TracefreeResidual t = tracefree_pointwise_identity(c.p, c.x);
    return t.residual.cwiseAbs().maxCoeff() <= 1e-12 * t.scale && std::fabs(t.residual.trace()) <= 1e-12 * t.scale;
  });
}
