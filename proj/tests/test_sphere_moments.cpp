#include <array>
#include <cmath>

#include "doctest.h"
#include "property.hpp"
#include "ybl/sphere_moments.hpp"

using namespace ybl;

namespace {

// 2 prod Gamma((e_i+1)/2) / Gamma((n + sum e)/2), zero for any odd exponent
double monomial_oracle(int n, const std::vector<int>& e) {
  double lg = 0.0;
  int tot = 0;
  for (int k = 0; k < n; ++k) {
    const int ek = k < static_cast<int>(e.size()) ? e[k] : 0;
    if (ek % 2) return 0.0;
    lg += std::lgamma(0.5 * (ek + 1));
    tot += ek;
  }
  return 2.0 * std::exp(lg - std::lgamma(0.5 * (n + tot)));
}

double moment_of(int n, std::initializer_list<int> idx) {
  std::vector<int> e(n, 0);
  for (int i : idx) ++e[i];
  return monomial_oracle(n, e);
}

}  // namespace

TEST_CASE("sphere area") {
  CHECK(sphere_area(2) == doctest::Approx(2 * M_PI).epsilon(1e-15));
  CHECK(sphere_area(3) == doctest::Approx(4 * M_PI).epsilon(1e-15));
  CHECK(sphere_area(4) == doctest::Approx(2 * M_PI * M_PI).epsilon(1e-15));
}

TEST_CASE("monomial moments against the Gamma-product formula") {
  prop::for_all("monomials", 200, 21, [](prop::Rng& r) {
    const int n = prop::integer(r, 2, 51);
    std::vector<int> e(n, 0);
    for (int k = 0; k < n; ++k)
      if (prop::integer(r, 0, 3) == 0) e[k] = prop::integer(r, 0, 6);
    return std::pair{n, e};
  }, [](const std::pair<int, std::vector<int>>& c) {
    const double a = sphere_monomial_moment(c.first, c.second), b = monomial_oracle(c.first, c.second);
    return b == 0.0 ? a == 0.0 : std::fabs(a / b - 1.0) < 1e-12;
  });
  // |S^(n-1)|/n for x_1^2
  CHECK(sphere_monomial_moment(7, {2}) == doctest::Approx(sphere_area(7) / 7).epsilon(1e-14));
}

TEST_CASE("quartic and sextic pairings match monomial moments") {
  const int n = 5;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int m = 0; m < n; ++m) CHECK(quartic_moment(n, i, j, k, m) == doctest::Approx(moment_of(n, {i, j, k, m})).epsilon(1e-13));
  prop::for_all("sextic", 300, 22, [](prop::Rng& r) {
    std::array<int, 6> a;
    for (auto& v : a) v = prop::integer(r, 0, 3);
    return a;
  }, [](const std::array<int, 6>& a) {
    const double s = sextic_moment(4, a[0], a[1], a[2], a[3], a[4], a[5]);
    const double o = moment_of(4, {a[0], a[1], a[2], a[3], a[4], a[5]});
    return std::fabs(s - o) <= 1e-13 * std::max(1.0, std::fabs(o));
  });
}

TEST_CASE("directional moments against brute-force pairing sums") {
  const int n = 4;
  const WeylForm w = random_weyl(n, 5);
  const DirectionalMoments dm = directional_moments(w);
  const TensorField t(std::make_shared<const WeylForm>(w), -7.0);
  // d_l H_ik = sum_q (W_ilkq + W_iqkl) x_q
  auto a = [&](int i, int k, int l, int q) { return t.at(i, l, k, q) + t.at(i, q, k, l); };
  double trD = 0.0, trE = 0.0;
  Mat D = Mat::Zero(n, n), E = Mat::Zero(n, n), L = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
          double grad = 0.0;
          for (int l = 0; l < n; ++l) grad += a(i, k, l, x) * a(i, k, l, y);
          trD += grad * moment_of(n, {x, y});
          for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q) D(p, q) += grad * moment_of(n, {x, y, p, q});
          for (int u = 0; u < n; ++u)
            for (int v = 0; v < n; ++v) {
              const double hh = t.at(i, x, k, y) * t.at(i, u, k, v);
              trE += hh * moment_of(n, {x, y, u, v});
              for (int p = 0; p < n; ++p)
                for (int q = 0; q < n; ++q) E(p, q) += hh * moment_of(n, {x, y, u, v, p, q});
            }
        }
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int l = 0; l < n; ++l)
        for (int x = 0; x < n; ++x)
          for (int y = 0; y < n; ++y)
            for (int u = 0; u < n; ++u)
              for (int v = 0; v < n; ++v) L(p, q) += t.at(p, x, l, y) * t.at(q, u, l, v) * moment_of(n, {x, y, u, v});
  CHECK(dm.trD == doctest::Approx(trD).epsilon(1e-12));
  CHECK(dm.trE == doctest::Approx(trE).epsilon(1e-12));
  CHECK((dm.D - D).norm() <= 1e-12 * D.norm());
  CHECK((dm.E - E).norm() <= 1e-12 * E.norm());
  CHECK((dm.L - L).norm() <= 1e-12 * L.norm());
  CHECK(dm.D.trace() == doctest::Approx(dm.trD).epsilon(1e-12));
  CHECK(dm.E.trace() == doctest::Approx(dm.trE).epsilon(1e-12));
}

TEST_CASE("weighted and unweighted identities at n = 6") {
  const SphereContext c = sphere_context(random_weyl(6, 8), -8.0);
  for (double r : {0.5, 1.0, 2.0}) {
    for (int p = 0; p < 6; ++p)
      for (int q = p; q < 6; ++q) {
        const auto a = identity1_check(c, r, p, q);
        CHECK(a.first.rel_err < 1e-11);
        CHECK(a.second.rel_err < 1e-11);
        CHECK(identity2_check(c, r, p, q).rel_err < 1e-11);
        CHECK(hbar_pair_check(c, r, p, q).rel_err < 1e-11);
      }
    CHECK(identity3_check(c, r).rel_err < 1e-11);
  }
}

TEST_CASE("identities hold for random forms and dimensions") {
  prop::for_all("identities", 12, 23, [](prop::Rng& r) {
    return std::tuple{prop::integer(r, 4, 12), r(), prop::uniform(r, 0.2, 3.0)};
  }, [](const std::tuple<int, std::uint64_t, double>& in) {
    const auto [n, seed, r] = in;
    const SphereContext c = sphere_context(random_weyl(n, seed), -7.5);
    const auto a = identity1_check(c, r, 0, n - 1);
    return a.first.rel_err < 1e-10 && a.second.rel_err < 1e-10 && identity2_check(c, r, 1, 1).rel_err < 1e-10 &&
           identity3_check(c, r).rel_err < 1e-10 && hbar_pair_check(c, r, 0, 0).rel_err < 1e-10;
  });
}

TEST_CASE("trace consistency") {
  for (int n : {6, 25, 37, 51}) {
    CAPTURE(n);
    CHECK(trace_consistency_exact(n));
    CHECK(trace_consistency_constant_f(n));
  }
}

TEST_CASE("direction streams are deterministic and unit length") {
  std::vector<double> a, b, c;
  sphere_directions(9, 42, 3, 64, a);
  sphere_directions(9, 42, 3, 64, b);
  sphere_directions(9, 42, 4, 64, c);
  CHECK(a == b);
  CHECK(a != c);
  REQUIRE(a.size() == 9 * 64);
  for (int row = 0; row < 64; ++row) {
    double s = 0.0;
    for (int k = 0; k < 9; ++k) s += a[row * 9 + k] * a[row * 9 + k];
    CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("Monte Carlo integrals within five standard errors") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const int n = 8;
    const McEstimate a = mc_sphere_integral([](const double* x) { return x[0] * x[0]; }, n, 200000, seed);
    CHECK(std::fabs(a.estimate - sphere_area(n) / n) <= 5 * a.std_error);
    const McEstimate b = mc_sphere_integral([](const double* x) { return x[0] * x[0] * x[0] * x[0]; }, n, 200000, seed);
    CHECK(std::fabs(b.estimate - 3 * sphere_area(n) / (n * (n + 2.0))) <= 5 * b.std_error);
    CHECK(a.samples == 200000);
  }
  const McEstimate x = mc_sphere_integral([](const double* v) { return v[1] * v[3]; }, 5, 50000, 9);
  const McEstimate y = mc_sphere_integral([](const double* v) { return v[1] * v[3]; }, 5, 50000, 9);
  CHECK(x.estimate == y.estimate);
}

TEST_CASE("sampled identities agree with exact moments") {
  const WeylForm w = random_weyl(6, 4);
  const TensorField t(std::make_shared<const WeylForm>(w), -8.0);
  const SphereContext c = sphere_context(w, -8.0);
  const std::vector<std::pair<int, int>> pairs{{0, 0}, {1, 4}};
  const SphereMcReport mc = mc_identities(t, pairs, 1.0, 200000, 77);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [p, q] = pairs[k];
    const auto a = identity1_check(c, 1.0, p, q);
    CHECK(std::fabs(mc.identity1_grad[k].estimate - a.first.rhs) <= 5 * mc.identity1_grad[k].std_error);
    CHECK(std::fabs(mc.identity1_value[k].estimate - a.second.rhs) <= 5 * mc.identity1_value[k].std_error);
    CHECK(std::fabs(mc.identity2[k].estimate - identity2_check(c, 1.0, p, q).rhs) <= 5 * mc.identity2[k].std_error);
    CHECK(std::fabs(mc.hbar_pair[k].estimate - hbar_pair_check(c, 1.0, p, q).rhs) <= 5 * mc.hbar_pair[k].std_error);
  }
  CHECK(std::fabs(mc.identity3.estimate - identity3_check(c, 1.0).rhs) <= 5 * mc.identity3.std_error);
}
