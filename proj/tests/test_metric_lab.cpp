#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>

#include "doctest.h"
#include "property.hpp"
#include "ybl/error.hpp"
#include "ybl/metric_lab.hpp"
#include "ybl/radial_integrals.hpp"

using namespace ybl;

namespace {

Vec random_point(int n, prop::Rng& r, double radius) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = prop::uniform(r, -1.0, 1.0);
  return radius * v / v.norm();
}

TensorField field(int n, std::uint64_t seed, double tau = -7.5) {
  return TensorField(std::make_shared<const WeylForm>(random_weyl(n, seed)), tau);
}

TensorField zero_field(int n) {
  const std::size_t P = n * (n - 1) / 2;
  return TensorField(std::make_shared<const WeylForm>(n, n, 1.0, 1, std::vector<std::int64_t>(P * (P + 1) / 2, 0)), -7.5);
}

}  // namespace

TEST_CASE("smooth drop: endpoints, derivatives, monotone") {
  const double a = 0.3, b = 0.8;
  CHECK(smooth_drop(0.1, a, b).v == 1.0);
  CHECK(smooth_drop(0.9, a, b).v == 0.0);
  for (double t : {a, b}) {
    CHECK(std::fabs(smooth_drop(t, a, b).d1) < 1e-14);
    CHECK(std::fabs(smooth_drop(t, a, b).d2) < 1e-12);
  }
  double prev = 1.0;
  for (int k = 1; k < 100; ++k) {
    const double t = a + (b - a) * k / 100.0, h = 1e-6;
    const Jet j = smooth_drop(t, a, b);
    CHECK(j.v <= prev);
    prev = j.v;
    CHECK(j.d1 == doctest::Approx((smooth_drop(t + h, a, b).v - smooth_drop(t - h, a, b).v) / (2 * h)).epsilon(1e-7));
    CHECK(j.d2 == doctest::Approx((smooth_drop(t + h, a, b).d1 - smooth_drop(t - h, a, b).d1) / (2 * h)).epsilon(1e-6));
  }
  CHECK(smooth_drop(0.55, a, b).v == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("radial profile") {
  const TensorField t = field(6, 1);
  const PerturbParams p = make_perturb(0.2, 0.5, 0.6);
  for (double s : {0.01, 0.1, 0.3}) CHECK(radial_profile(t, p, s).v == doctest::Approx(0.5 * std::pow(0.2, 6) * t.f(s / 0.04)).epsilon(1e-14));
  CHECK(radial_profile(t, p, 0.8 * 0.8 + 1e-9).v == 0.0);
  for (double s : {0.05, 0.4, 0.5, 0.6}) {
    const double h = 1e-7;
    const Jet j = radial_profile(t, p, s);
    CHECK(j.d1 == doctest::Approx((radial_profile(t, p, s + h).v - radial_profile(t, p, s - h).v) / (2 * h)).epsilon(1e-6));
    CHECK(j.d2 == doctest::Approx((radial_profile(t, p, s + h).d1 - radial_profile(t, p, s - h).d1) / (2 * h)).epsilon(1e-5));
  }
  CHECK_THROWS_AS(make_perturb(0.5, 1.5, 0.6), Error);
  CHECK_THROWS_AS(make_perturb(0.7, 0.5, 0.6), Error);
  CHECK_THROWS_AS(make_perturb(0.0, 0.5, 0.6), Error);
}

TEST_CASE("h: trace-free, annihilates x, divergence-free, jets match differences") {
  const int n = 7;
  const TensorField t = field(n, 3);
  const PerturbParams p = make_perturb(0.3, 0.8, 0.7);
  prop::for_all("h jet", 20, 51, [](prop::Rng& r) { return random_point(7, r, prop::uniform(r, 0.05, 1.0)); },
                [&](const Vec& x) {
    const HJet j = h_single_jet(t, p, x);
    const double s = j.h.cwiseAbs().maxCoeff() + 1e-300;
    double ds = 1e-300;
    for (const Mat& m : j.dh) ds = std::max(ds, m.cwiseAbs().maxCoeff());
    if ((j.h - h_single(t, p, x)).cwiseAbs().maxCoeff() > 1e-15 * s) return false;
    if (std::fabs(j.h.trace()) > 1e-13 * s || (j.h * x).cwiseAbs().maxCoeff() > 1e-13 * s) return false;
    Vec div = Vec::Zero(n);
    for (int i = 0; i < n; ++i) div += j.dh[i].row(i).transpose();
    if (div.cwiseAbs().maxCoeff() > 1e-12 * ds) return false;
    const double h = 1e-6;
    for (int q = 0; q < n; ++q) {
      Vec xp = x, xm = x;
      xp(q) += h;
      xm(q) -= h;
      if (((h_single(t, p, xp) - h_single(t, p, xm)) / (2 * h) - j.dh[q]).cwiseAbs().maxCoeff() > 1e-6 * ds) return false;
      const HJet a = h_single_jet(t, p, xp, false), b = h_single_jet(t, p, xm, false);
      for (int l = 0; l < n; ++l)
        if (((a.dh[l] - b.dh[l]) / (2 * h) - j.ddh[q * n + l]).cwiseAbs().maxCoeff() > 1e-5 * ds) return false;
    }
    return true;
  });
}

TEST_CASE("matrix exponential") {
  prop::for_all("expm", 30, 52, [](prop::Rng& r) {
    const int n = prop::integer(r, 2, 12);
    Mat a = Mat::Random(n, n) * prop::uniform(r, 1e-6, 0.5);
    a = 0.5 * (a + a.transpose()).eval();
    a -= (a.trace() / n) * Mat::Identity(n, n);
    return a;
  }, [](const Mat& h) {
    const int n = h.rows();
    const MetricAtPoint m = matrix_exp(h);
    const double hn = h.norm();
    const Mat I = Mat::Identity(n, n);
    bool ok = std::fabs(m.g.determinant() - 1.0) < 1e-13;
    ok = ok && (m.g * m.g_inv - I).cwiseAbs().maxCoeff() < 1e-14;
    ok = ok && (m.g_dev - (m.g - I)).cwiseAbs().maxCoeff() < 1e-15;
    ok = ok && (m.g_inv_dev - (m.g_inv - I)).cwiseAbs().maxCoeff() < 1e-15;
    // g - Id - h = h^2/2 + ..., bounded by |h|^2 e^|h| / 2
    ok = ok && m.g_beyond.norm() <= 0.5 * hn * hn * std::exp(hn) * (1 + 1e-12);
    ok = ok && (m.g_beyond - 0.5 * h * h).norm() <= hn * hn * hn * std::exp(hn) / 6 * (1 + 1e-12);
    // the series pieces keep relative accuracy for tiny h
    ok = ok && (m.g_dev - h - m.g_beyond).norm() <= 1e-15 * hn;
    return ok;
  });
  Mat ns = Mat::Zero(3, 3);
  ns(0, 1) = 0.1;
  CHECK_THROWS_AS(matrix_exp(ns), Error);
}

TEST_CASE("round sphere has R = n(n-1), flat space R = 0") {
  for (int n : {3, 4, 6}) {
    CAPTURE(n);
    const MetricField sphere = field_from_function([](const Vec& x) {
      const double c = 2.0 / (1.0 + x.squaredNorm());
      return Mat(c * c * Mat::Identity(x.size(), x.size()));
    });
    prop::Rng r(53);
    for (int k = 0; k < 3; ++k) {
      const Vec x = random_point(n, r, 0.2 + 0.3 * k);
      const CurvatureValue R = scalar_curvature(sphere, x, 1e-2);
      CHECK(R.value == doctest::Approx(n * (n - 1.0)).epsilon(1e-7));
    }
    const MetricField flat = field_from_function([](const Vec& x) { return Mat(Mat::Identity(x.size(), x.size())); });
    CHECK(std::fabs(scalar_curvature(flat, Vec::Constant(n, 0.3), 1e-2).value) < 1e-12);
  }
}

TEST_CASE("curvature from a jet against the conformal formula") {
  // g = e^(2w) Id with quadratic w: R = -e^(-2w) (2(n-1) Lap w + (n-2)(n-1) |grad w|^2)
  prop::for_all("conformal", 20, 54, [](prop::Rng& r) {
    const int n = prop::integer(r, 3, 9);
    Vec a(n), x(n);
    Mat B = Mat::Random(n, n) * 0.3;
    B = (B + B.transpose()).eval();
    for (int i = 0; i < n; ++i) {
      a(i) = prop::uniform(r, -0.5, 0.5);
      x(i) = prop::uniform(r, -0.5, 0.5);
    }
    return std::tuple{a, B, x};
  }, [](const std::tuple<Vec, Mat, Vec>& c) {
    const auto& [a, B, x] = c;
    const int n = a.size();
    const Vec gw = a + B * x;
    const double w = a.dot(x) + 0.5 * x.dot(B * x), e = std::exp(2 * w);
    const Mat g = e * Mat::Identity(n, n);
    std::vector<Mat> dg(n), ddg(n * n);
    for (int q = 0; q < n; ++q) dg[q] = 2 * gw(q) * g;
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) ddg[p * n + q] = (4 * gw(p) * gw(q) + 2 * B(p, q)) * g;
    const double want = -(2 * (n - 1) * B.trace() + (n - 2.0) * (n - 1) * gw.squaredNorm()) / e;
    return std::fabs(scalar_curvature_from_jet(g, dg, ddg) - want) <= 1e-12 * (1 + std::fabs(want));
  });
}

TEST_CASE("a stencil leaving the positive cone is rejected") {
  const MetricField bad = field_from_function([](const Vec& x) {
    Mat g = Mat::Identity(x.size(), x.size());
    g(0, 0) = x(0);
    return g;
  });
  try {
    scalar_curvature(bad, Vec::Constant(3, 0.001), 0.01);
    FAIL("expected non_spd");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::non_spd);
  }
}

TEST_CASE("expansion reduces to the gradient square and bounds the remainder") {
  const int n = 8;
  const double tau = -7.5;
  const auto w = std::make_shared<const WeylForm>(scale_for_metric(random_weyl(n, 5), tau, 0.1, 0.5, 0.2, 9));
  const TensorField t(w, tau);
  prop::Rng r(55);
  for (double mu : {0.1, 0.05}) {
    const PerturbParams p = make_perturb(0.1, mu, 0.5);
    for (int k = 0; k < 3; ++k) {
      const Vec x = random_point(n, r, 0.5 * (0.45 + 0.1 * k));
      const CurvatureSample s = curvature_expansion_check(t, p, x);
      CAPTURE(mu);
      CHECK(std::fabs(s.R_expansion - s.R_reduced) <= 1e-10 * std::fabs(s.R_reduced));
      CHECK(s.R_expansion < 0.0);
      CHECK(s.remainder <= s.bound + s.R_fd_error);
      CHECK(s.remainder <= 1e-2 * std::fabs(s.R_expansion));
      const ExpansionTerms e = expansion_terms(h_single_jet(t, p, x));
      CHECK(std::fabs(e.full() - e.reduced()) <= 1e-10 * e.grad_square);
    }
  }
}

TEST_CASE("the error term vanishes for a flat metric") {
  const int n = 6;
  const TensorField t = zero_field(n);
  Vec xi = Vec::Zero(n);
  xi(1) = 0.05;
  const ErrorConfig c{make_perturb(0.1, 1.0, 0.5), make_bubble(xi, 0.1)};
  prop::Rng r(56);
  for (int k = 0; k < 5; ++k) {
    const Vec x = random_point(n, r, 0.05 + 0.1 * k);
    const double u = eval_u(c.bubble, x);
    CHECK(std::fabs(error_term_pointwise(t, c, x)) <= 1e-6 * n * (n - 2) * std::pow(u, (n + 2.0) / (n - 2)));
    CHECK(std::fabs(error_term_on_ray(t, c, x / x.norm(), x.norm())) <= 1e-10 * n * (n - 2) * std::pow(u, (n + 2.0) / (n - 2)));
  }
}

TEST_CASE("the error term along rays matches the pointwise evaluation") {
  const int n = 25;
  const double tau = evaluate_dimension(n).tau_estimate();
  const auto w = std::make_shared<const WeylForm>(scale_for_metric(random_weyl(n, 8), tau, 0.05, 0.5, 0.2, 3));
  const TensorField t(w, tau);
  prop::for_all("ray", 8, 57, [](prop::Rng& r) {
    return std::pair{random_point(25, r, 1.0), prop::uniform(r, 0.01, 0.6)};
  }, [&](const std::pair<Vec, double>& c) {
    Vec xi = Vec::Zero(n);
    xi(0) = 0.025;
    const ErrorConfig cfg{make_perturb(0.05, 0.5, 0.5), make_bubble(xi, 0.05)};
    const double a = error_term_pointwise(t, cfg, c.second * c.first), b = error_term_on_ray(t, cfg, c.first, c.second);
    return std::fabs(a - b) <= 1e-6 * std::max(std::fabs(a), std::fabs(b));
  });
}

TEST_CASE("pointwise error term scales with lambda in the linear regime") {
  // x -> x/2, lambda -> lambda/2, eps -> eps/2 multiplies the part linear in h by 2^((n+2)/2 - 8)
  const int n = 25;
  const double tau = evaluate_dimension(n).tau_estimate();
  const TensorField t(std::make_shared<const WeylForm>(random_weyl(n, 4)), tau);
  prop::Rng r(58);
  for (int k = 0; k < 3; ++k) {
    const Vec x = random_point(n, r, 0.03 + 0.02 * k);
    auto E = [&](double s, double mu) {
      Vec xi = Vec::Zero(n);
      xi(0) = 0.5 * 0.05 * s;
      return error_term_pointwise(t, {make_perturb(0.05 * s, mu, 0.5), make_bubble(xi, 0.05 * s)}, s * x);
    };
    // the quadratic part is removed by combining mu and mu/2
    const double mu = 1e-3;
    const double lin1 = 2 * E(1.0, mu / 2) * 2 - E(1.0, mu);
    const double lin2 = 2 * E(0.5, mu / 2) * 2 - E(0.5, mu);
    CHECK(lin2 / lin1 == doctest::Approx(std::pow(2.0, (n + 2) / 2.0 - 8)).epsilon(1e-4));
  }
}

TEST_CASE("degree-5 design integrates low monomials exactly") {
  for (int n : {3, 6, 25}) {
    CAPTURE(n);
    const SphereDesign d = degree5_design(n);
    double wsum = 0.0;
    for (double w : d.weights) wsum += w;
    CHECK(std::fabs(wsum - 1.0) < 1e-13);
    const double A = sphere_area(n);
    prop::for_all("design", 60, 59 + n, [n](prop::Rng& r) {
      std::vector<int> e(n, 0);
      const int deg = prop::integer(r, 0, 5);
      for (int k = 0; k < deg; ++k) ++e[prop::integer(r, 0, std::min(n - 1, 3))];
      return e;
    }, [&](const std::vector<int>& e) {
      double s = 0.0;
      for (std::size_t p = 0; p < d.points.size(); ++p) {
        double m = d.weights[p];
        for (int i = 0; i < n; ++i) m *= std::pow(d.points[p](i), e[i]);
        s += m;
      }
      return std::fabs(s - sphere_monomial_moment(n, e) / A) < 1e-13;
    });
  }
}

TEST_CASE("Dirichlet term against directional moments and the axis energy") {
  const int n = 25;
  const double tau = evaluate_dimension(n).tau_estimate();
  const WeylForm w = random_weyl(n, 6);
  const TensorField t(std::make_shared<const WeylForm>(w), tau);
  const DirectionalMoments dm = directional_moments(w);
  for (double eps : {0.8, 1.3}) {
    // sum (d_l Hbar_ik)^2 = (4 r^2 f'^2 + 8 f f') |H|^2 + f^2 |dH|^2, then sphere moments
    boost::math::quadrature::exp_sinh<double> es;
    const double I = es.integrate([&](double r) {
      const double s = r * r, f = t.f(s), fp = t.f_prime(s);
      if (r == 0.0 || r > 1e8) return 0.0;
      const double ang = (4 * s * fp * fp + 8 * f * fp) * s * dm.trE + f * f * dm.trD;
      return std::exp((n - 2) * std::log(eps) + (2.0 - n) * std::log(eps * eps + s) + (n + 1) * std::log(r)) * ang;
    });
    const double want = -(n - 2.0) / (16.0 * (n - 1.0)) * I;
    CHECK(dirichlet_term_quadrature(t, eps) == doctest::Approx(want).epsilon(1e-9));
    CHECK(dirichlet_term_quadrature(t, eps) ==
          doctest::Approx(F_axis(n, tau, weyl_quartic_contractions(w).S, eps)).epsilon(1e-9));
  }
}

TEST_CASE("glued construction") {
  GluedBumpSpec s;
  const DisjointnessCertificate c = certify_disjointness(s);
  // one row per neighbouring pair
  CHECK(c.rows.size() == static_cast<std::size_t>(s.N_max - s.N0));
  CHECK(c.all_actual());
  // 1/(N(N+1)) < (1/N^2 + 1/(N+1)^2)/2 for every N
  CHECK_FALSE(c.all_literal());
  for (const auto& row : c.rows) CHECK_FALSE(row.literal);
  GluedBumpSpec wide = s;
  wide.eta_end = Rational(21, 10);
  const TensorField t = field(5, 10, -7.3);
  CHECK_THROWS_AS(GluedField(wide, t), Error);
  CHECK(eta(s, 0.5).v == 1.0);
  CHECK(eta(s, 1.9).v == 0.0);

  const GluedField g(s, t);
  prop::for_all("glued", 40, 60, [&](prop::Rng& r) {
    const int N = prop::integer(r, s.N0, s.N_max);
    Vec x = Vec::Zero(5);
    x(0) = 1.0 / N;
    return std::pair{N, Vec(x + random_point(5, r, prop::uniform(r, 0.0, 0.45 / (N * N))))};
  }, [&](const std::pair<int, Vec>& c) {
    const auto& [N, x] = c;
    if (g.active_bumps(x) != 1) return false;
    Vec y = Vec::Zero(5);
    y(0) = 1.0 / N;
    const Vec d = x - y;
    const double rr = d.norm();
    const Mat want = eta(s, 4.0 * N * N * rr).v * std::pow(2.0, -4 * N) * t.f(std::pow(2.0, N) * rr * rr) * t.H(d);
    return (g.h(x) - want).cwiseAbs().maxCoeff() <= 1e-14 * (want.cwiseAbs().maxCoeff() + 1e-300);
  });
  Vec far = Vec::Zero(5);
  far(1) = 0.5;
  CHECK(g.active_bumps(far) == 0);
  CHECK(g.h(far).norm() == 0.0);
  for (int N = s.N0; N < s.N_max; ++N) CHECK(g.radial_sup(N) > 0.0);
}
