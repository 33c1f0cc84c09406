#include <cmath>

#include "doctest.h"
#include "property.hpp"
#include "ybl/error.hpp"
#include "ybl/weyl_algebra.hpp"

using namespace ybl;

namespace {

struct FormCase {
  int n;
  std::uint64_t seed;
};

FormCase draw_form(prop::Rng& r) { return {prop::integer(r, 4, 9), r()}; }

Vec random_vec(int n, prop::Rng& r) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = prop::uniform(r, -1.0, 1.0);
  return v;
}

}  // namespace

TEST_CASE("random forms have the Weyl symmetries exactly") {
  prop::for_all("symmetries", 25, 1, draw_form, [](const FormCase& c) {
    const WeylForm w = random_weyl(c.n, c.seed);
    const SymmetryResiduals r = symmetry_residuals(w);
    return r.exact_zero() && r.nondegenerate;
  });
}

TEST_CASE("symmetries checked entrywise on the dense tensor") {
  const int n = 6;
  const WeylForm w = random_weyl(n, 77);
  const auto W = w.dense();
  auto at = [&](int i, int j, int k, int l) { return W[((i * n + j) * n + k) * n + l]; };
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          worst = std::max(worst, std::fabs(at(i, j, k, l) + at(j, i, k, l)));
          worst = std::max(worst, std::fabs(at(i, j, k, l) - at(k, l, i, j)));
          worst = std::max(worst, std::fabs(at(i, j, k, l) + at(i, k, l, j) + at(i, l, j, k)));
        }
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      double tr = 0.0;
      for (int j = 0; j < n; ++j) tr += at(i, j, k, j);
      worst = std::max(worst, std::fabs(tr));
    }
  CHECK(worst < 1e-13);
}

TEST_CASE("support restricts the nonzero block") {
  const WeylForm w = random_weyl(9, 4, 1.0, 5);
  CHECK(w.support() == 5);
  for (int i = 0; i < 9; ++i) CHECK(w(i, 6, 1, 2) == 0.0);
  CHECK(symmetry_residuals(w).exact_zero());
}

TEST_CASE("a zero raw tensor is degenerate") {
  const int m = 5, P = m * (m - 1) / 2;
  WeylForm out;
  CHECK_FALSE(weyl_from_raw(m, m, std::vector<std::int64_t>(P * P, 0), 1.0, out));
}

TEST_CASE("H is symmetric, trace-free, annihilates x and is divergence-free") {
  prop::for_all("H invariants", 40, 2, [](prop::Rng& r) {
    const FormCase c = draw_form(r);
    return std::pair{c, random_vec(c.n, r)};
  }, [](const std::pair<FormCase, Vec>& in) {
    const auto& [c, x] = in;
    const TensorField t(std::make_shared<const WeylForm>(random_weyl(c.n, c.seed)), -8.0);
    const Mat H = t.H(x);
    const double s = std::max(1.0, H.cwiseAbs().maxCoeff());
    return (H - H.transpose()).cwiseAbs().maxCoeff() < 1e-14 * s && std::fabs(H.trace()) < 1e-13 * s &&
           (H * x).cwiseAbs().maxCoeff() < 1e-13 * s && t.divergence(x).cwiseAbs().maxCoeff() < 1e-13 * s;
  });
}

TEST_CASE("divergence vanishes exactly at integer points") {
  const WeylForm w = random_weyl(7, 12);
  prop::for_all("exact divergence", 30, 8, [](prop::Rng& r) {
    std::vector<std::int64_t> x(7);
    for (auto& v : x) v = prop::integer(r, -9, 9);
    return x;
  }, [&](const std::vector<std::int64_t>& x) {
    for (auto v : divergence_numerators(w, x))
      if (v != 0) return false;
    return true;
  });
}

TEST_CASE("exact H agrees with the floating one") {
  const WeylForm w = random_weyl(6, 3);
  const TensorField t(std::make_shared<const WeylForm>(w), -8.0);
  std::vector<Rational> xq{rat(1, 2), rat(-3, 4), rat(2), rat(0), rat(5, 7), rat(-1, 3)};
  Vec x(6);
  for (int i = 0; i < 6; ++i) x(i) = to_double(xq[i]);
  const auto He = eval_H_exact(w, xq);
  const Mat H = t.H(x);
  for (int i = 0; i < 6; ++i)
    for (int k = 0; k < 6; ++k) CHECK(to_double(He[i * 6 + k]) == doctest::Approx(H(i, k)).epsilon(1e-13));
}

TEST_CASE("dH and ddH against central differences of H") {
  const int n = 7;
  const TensorField t(std::make_shared<const WeylForm>(random_weyl(n, 21)), -8.0);
  prop::Rng r(4);
  const Vec x = random_vec(n, r);
  const auto dH = t.dH(x);
  const double d = 1e-4;
  for (int l = 0; l < n; ++l) {
    Vec xp = x, xm = x;
    xp(l) += d;
    xm(l) -= d;
    // H is quadratic, so the central difference is exact up to rounding
    const Mat fd = (t.H(xp) - t.H(xm)) / (2 * d);
    CHECK((fd - dH[l]).cwiseAbs().maxCoeff() < 1e-9);
    for (int j = 0; j < n; ++j) {
      Vec yp = x, ym = x;
      yp(j) += d;
      ym(j) -= d;
      const auto dp = t.dH(yp), dm = t.dH(ym);
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) CHECK(std::fabs((dp[l](i, k) - dm[l](i, k)) / (2 * d) - t.ddH(i, k, j, l)) < 1e-8);
    }
  }
}

TEST_CASE("quartic contractions against brute-force sums") {
  const int n = 5;
  const WeylForm w = random_weyl(n, 9);
  const QuarticContractions qc = weyl_quartic_contractions(w);
  Mat Q = Mat::Zero(n, n);
  double S = 0.0;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) Q(p, q) += (w(i, p, k, l) + w(i, l, k, p)) * (w(i, q, k, l) + w(i, l, k, q));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) S += std::pow(w(i, j, k, l) + w(i, l, k, j), 2);
  CHECK((Q - qc.Q).norm() < 1e-12 * Q.norm());
  CHECK(qc.S == doctest::Approx(S).epsilon(1e-13));
  // Q is positive semidefinite with trace S
  CHECK(qc.Q.trace() == doctest::Approx(qc.S).epsilon(1e-13));
  CHECK(Eigen::SelfAdjointEigenSolver<Mat>(qc.Q).eigenvalues().minCoeff() > -1e-12 * qc.S);
  const ExactQuartic eq = exact_quartic_contractions(w);
  CHECK(static_cast<double>(eq.S) * w.unit() * w.unit() == doctest::Approx(qc.S).epsilon(1e-13));
  CHECK(eq.trace() == eq.S);
}

TEST_CASE("normalized form has S = 1") {
  prop::for_all("normalize", 10, 6, draw_form, [](const FormCase& c) {
    return std::fabs(weyl_quartic_contractions(normalized(random_weyl(c.n, c.seed))).S - 1.0) < 1e-13;
  });
}

TEST_CASE("json round trip of a form") {
  const WeylForm w = random_weyl(6, 31, 0.75);
  nlohmann::json j = w;
  const WeylForm back = weyl_from_json(nlohmann::json::parse(j.dump()));
  CHECK(back.n() == w.n());
  CHECK(back.scale() == w.scale());
  CHECK(back.canonical() == w.canonical());
}

TEST_CASE("f and its derivatives") {
  for (double s : {0.0, 0.3, 1.0, 2.5}) {
    CHECK(eval_f(-7.5, s) == doctest::Approx(-7.5 + 5 * s - s * s + s * s * s / 20));
    const double d = 1e-6;
    CHECK(eval_f_prime(-7.5, s) == doctest::Approx((eval_f(-7.5, s + d) - eval_f(-7.5, s - d)) / (2 * d)).epsilon(1e-8));
    CHECK(eval_f_second(s) == doctest::Approx((eval_f_prime(-7.5, s + d) - eval_f_prime(-7.5, s - d)) / (2 * d)).epsilon(1e-8));
  }
}

TEST_CASE("Hbar scaling") {
  const int n = 6;
  const TensorField t(std::make_shared<const WeylForm>(random_weyl(n, 2)), -7.2);
  prop::Rng r(1);
  const Vec x = random_vec(n, r);
  const double lam = 0.3, mu = 0.7;
  const Mat want = mu * std::pow(lam, 6) * t.f(x.squaredNorm() / (lam * lam)) * t.H(x);
  CHECK((t.Hbar(x, lam, mu) - want).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((t.Hbar(x) - t.f(x.squaredNorm()) * t.H(x)).cwiseAbs().maxCoeff() < 1e-14);
}
