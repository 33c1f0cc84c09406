#include "ybl/weyl_algebra.hpp"

#include <cmath>
#include <random>
#include <string>

#include "ybl/error.hpp"

namespace ybl {

namespace {

inline std::size_t idx4(int n, int i, int j, int k, int l) {
  return ((static_cast<std::size_t>(i) * n + j) * n + k) * n + l;
}

inline std::size_t tri(int P, int a, int b) {
  // a <= b, upper-triangular row-major offset
  return static_cast<std::size_t>(a) * P - static_cast<std::size_t>(a) * (a - 1) / 2 + (b - a);
}

}  // namespace

WeylForm::WeylForm(int n, int support, double scale, std::int64_t den, std::vector<std::int64_t> canonical)
    : n_(n), m_(support), scale_(scale), den_(den), canon_(std::move(canonical)) {
  const std::size_t P = static_cast<std::size_t>(pair_count());
  if (canon_.size() != P * (P + 1) / 2) fail(Errc::invalid_argument, "WeylForm: canonical size mismatch");
}

int WeylForm::pair_index(int i, int j) const { return i * m_ - i * (i + 1) / 2 + (j - i - 1); }

std::int64_t WeylForm::numerator(int i, int j, int k, int l) const {
  if (i >= m_ || j >= m_ || k >= m_ || l >= m_ || i == j || k == l) return 0;
  int sign = 1;
  if (i > j) { std::swap(i, j); sign = -sign; }
  if (k > l) { std::swap(k, l); sign = -sign; }
  int a = pair_index(i, j), b = pair_index(k, l);
  if (a > b) std::swap(a, b);
  return sign * canon_[tri(pair_count(), a, b)];
}

Rational WeylForm::exact(int i, int j, int k, int l) const {
  return Rational(scale_) * Rational(mpz_class(std::to_string(numerator(i, j, k, l))), mpz_class(std::to_string(den_)));
}

std::vector<std::int64_t> WeylForm::dense_numerators() const {
  std::vector<std::int64_t> d(static_cast<std::size_t>(n_) * n_ * n_ * n_, 0);
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < m_; ++j)
      for (int k = 0; k < m_; ++k)
        for (int l = 0; l < m_; ++l) d[idx4(n_, i, j, k, l)] = numerator(i, j, k, l);
  return d;
}

std::vector<double> WeylForm::dense() const {
  const auto num = dense_numerators();
  const double u = unit();
  std::vector<double> d(num.size());
  for (std::size_t t = 0; t < num.size(); ++t) d[t] = u * static_cast<double>(num[t]);
  return d;
}

WeylForm WeylForm::rescaled(double scale) const { return WeylForm(n_, m_, scale, den_, canon_); }

std::vector<std::int64_t> project_to_weyl(int m, const std::vector<std::int64_t>& raw) {
  const int P = m * (m - 1) / 2;
  if (raw.size() != static_cast<std::size_t>(P) * P) fail(Errc::invalid_argument, "project_to_weyl: raw size");
  auto pidx = [m](int i, int j) { return i * m - i * (i + 1) / 2 + (j - i - 1); };
  const std::size_t N4 = static_cast<std::size_t>(m) * m * m * m;
  std::vector<std::int64_t> R(N4, 0);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = k + 1; l < m; ++l) {
          const std::int64_t v = raw[static_cast<std::size_t>(pidx(i, j)) * P + pidx(k, l)];
          R[idx4(m, i, j, k, l)] = v;
          R[idx4(m, j, i, k, l)] = -v;
          R[idx4(m, i, j, l, k)] = -v;
          R[idx4(m, j, i, l, k)] = v;
        }
  // 3 R - b(R), b the cyclic sum over the last three slots
  std::vector<std::int64_t> B(N4);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l)
          B[idx4(m, i, j, k, l)] = 2 * R[idx4(m, i, j, k, l)] - R[idx4(m, i, k, l, j)] - R[idx4(m, i, l, j, k)];
  std::vector<std::int64_t> ric(static_cast<std::size_t>(m) * m, 0);
  std::int64_t scal = 0;
  for (int j = 0; j < m; ++j)
    for (int l = 0; l < m; ++l) {
      std::int64_t s = 0;
      for (int i = 0; i < m; ++i) s += B[idx4(m, i, j, i, l)];
      ric[static_cast<std::size_t>(j) * m + l] = s;
    }
  for (int j = 0; j < m; ++j) scal += ric[static_cast<std::size_t>(j) * m + j];
  const std::int64_t c1 = 2 * static_cast<std::int64_t>(m - 1) * (m - 2);
  const std::int64_t c2 = 2 * static_cast<std::int64_t>(m - 1);
  auto Ric = [&](int a, int b) { return ric[static_cast<std::size_t>(a) * m + b]; };
  auto d = [](int a, int b) -> std::int64_t { return a == b ? 1 : 0; };
  std::vector<std::int64_t> W(N4);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) {
          const std::int64_t kn_ric = Ric(i, k) * d(j, l) + Ric(j, l) * d(i, k) - Ric(i, l) * d(j, k) - Ric(j, k) * d(i, l);
          const std::int64_t kn_g = 2 * (d(i, k) * d(j, l) - d(i, l) * d(j, k));
          W[idx4(m, i, j, k, l)] = c1 * B[idx4(m, i, j, k, l)] - c2 * kn_ric + scal * kn_g;
        }
  return W;
}

namespace {

__int128 s_numerator(int m, const std::vector<std::int64_t>& W) {
  __int128 S = 0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) {
          const __int128 v = static_cast<__int128>(W[idx4(m, i, j, k, l)]) + W[idx4(m, i, l, k, j)];
          S += v * v;
        }
  return S;
}

std::int64_t absmax(std::int64_t a, std::int64_t b) { return std::max(a, b < 0 ? -b : b); }

}  // namespace

SymmetryResiduals symmetry_residuals(int m, const std::vector<std::int64_t>& W) {
  SymmetryResiduals r;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) {
          const std::int64_t w = W[idx4(m, i, j, k, l)];
          r.antisymmetry = absmax(r.antisymmetry, w + W[idx4(m, j, i, k, l)]);
          r.antisymmetry = absmax(r.antisymmetry, w + W[idx4(m, i, j, l, k)]);
          r.pair_symmetry = absmax(r.pair_symmetry, w - W[idx4(m, k, l, i, j)]);
          r.bianchi = absmax(r.bianchi, w + W[idx4(m, i, k, l, j)] + W[idx4(m, i, l, j, k)]);
        }
  for (int j = 0; j < m; ++j)
    for (int l = 0; l < m; ++l) {
      std::int64_t s = 0;
      for (int i = 0; i < m; ++i) s += W[idx4(m, i, j, i, l)];
      r.trace = absmax(r.trace, s);
    }
  r.nondegenerate = s_numerator(m, W) > 0;
  return r;
}

SymmetryResiduals symmetry_residuals(const WeylForm& w) { return symmetry_residuals(w.n(), w.dense_numerators()); }

bool weyl_from_raw(int n, int support, const std::vector<std::int64_t>& raw, double scale, WeylForm& out) {
  const int m = support;
  if (n < 4 || m < 4 || m > n) fail(Errc::dimension_unsupported, "weyl_from_raw: need 4 <= support <= n");
  const auto W = project_to_weyl(m, raw);
  if (s_numerator(m, W) == 0) return false;
  const int P = m * (m - 1) / 2;
  std::vector<std::int64_t> canon(static_cast<std::size_t>(P) * (P + 1) / 2);
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) pairs.emplace_back(i, j);
  for (int a = 0; a < P; ++a)
    for (int b = a; b < P; ++b)
      canon[tri(P, a, b)] = W[idx4(m, pairs[a].first, pairs[a].second, pairs[b].first, pairs[b].second)];
  const std::int64_t den = 3 * (std::int64_t{1} << kRawBits) * 2 * static_cast<std::int64_t>(m - 1) * (m - 2);
  out = WeylForm(n, m, scale, den, std::move(canon));
  return true;
}

WeylForm random_weyl(int n, std::uint64_t seed, double scale, int support) {
  if (n < 4) fail(Errc::dimension_unsupported, "random_weyl: n = " + std::to_string(n) + " < 4");
  const int m = support == 0 ? n : support;
  if (m < 4 || m > n) fail(Errc::dimension_unsupported, "random_weyl: support must satisfy 4 <= support <= n");
  if (!(scale > 0.0) || !std::isfinite(scale)) fail(Errc::invalid_argument, "random_weyl: scale must be positive");
  const int P = m * (m - 1) / 2;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> dist(-(std::int64_t{1} << kRawBits), std::int64_t{1} << kRawBits);
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::vector<std::int64_t> raw(static_cast<std::size_t>(P) * P);
    for (int a = 0; a < P; ++a)
      for (int b = a; b < P; ++b) {
        const std::int64_t v = dist(rng);
        raw[static_cast<std::size_t>(a) * P + b] = v;
        raw[static_cast<std::size_t>(b) * P + a] = v;
      }
    WeylForm w;
    if (weyl_from_raw(n, m, raw, scale, w)) return w;
  }
  fail(Errc::invalid_argument, "random_weyl: could not draw a non-degenerate form");
}

QuarticContractions weyl_quartic_contractions(const WeylForm& w) {
  const int n = w.n();
  const auto W = w.dense();
  const std::size_t n3 = static_cast<std::size_t>(n) * n * n;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> A(n, static_cast<Eigen::Index>(n3));
  for (int p = 0; p < n; ++p)
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          A(p, (static_cast<Eigen::Index>(i) * n + k) * n + l) = W[idx4(n, i, p, k, l)] + W[idx4(n, i, l, k, p)];
  QuarticContractions out;
  out.Q = A * A.transpose();
  double S = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double v = W[idx4(n, i, j, k, l)] + W[idx4(n, i, l, k, j)];
          S += v * v;
        }
  out.S = S;
  return out;
}

__int128 ExactQuartic::trace() const {
  const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(Q.size()))));
  __int128 t = 0;
  for (int p = 0; p < n; ++p) t += Q[static_cast<std::size_t>(p) * n + p];
  return t;
}

ExactQuartic exact_quartic_contractions(const WeylForm& w) {
  const int n = w.n();
  const auto N = w.dense_numerators();
  const std::size_t n3 = static_cast<std::size_t>(n) * n * n;
  std::vector<std::int64_t> A(static_cast<std::size_t>(n) * n3);
  for (int p = 0; p < n; ++p)
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          A[p * n3 + (static_cast<std::size_t>(i) * n + k) * n + l] = N[idx4(n, i, p, k, l)] + N[idx4(n, i, l, k, p)];
  ExactQuartic out;
  out.Q.assign(static_cast<std::size_t>(n) * n, 0);
  for (int p = 0; p < n; ++p)
    for (int q = p; q < n; ++q) {
      __int128 s = 0;
      const std::int64_t* a = &A[p * n3];
      const std::int64_t* b = &A[q * n3];
      for (std::size_t t = 0; t < n3; ++t) s += static_cast<__int128>(a[t]) * b[t];
      out.Q[static_cast<std::size_t>(p) * n + q] = s;
      out.Q[static_cast<std::size_t>(q) * n + p] = s;
    }
  __int128 S = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const __int128 v = static_cast<__int128>(N[idx4(n, i, j, k, l)]) + N[idx4(n, i, l, k, j)];
          S += v * v;
        }
  out.S = S;
  return out;
}

WeylForm normalized(const WeylForm& w) {
  const double s_unit = static_cast<double>(s_numerator(w.n(), w.dense_numerators()));  // S = s_unit * unit^2
  return w.rescaled(static_cast<double>(w.den()) / std::sqrt(s_unit));
}

double eval_f(double tau, double s) { return tau + s * (5.0 + s * (-1.0 + s / 20.0)); }
double eval_f_prime(double, double s) { return 5.0 + s * (-2.0 + 3.0 * s / 20.0); }
double eval_f_second(double s) { return -2.0 + 3.0 * s / 10.0; }

TensorField::TensorField(std::shared_ptr<const WeylForm> w, double tau)
    : w_(std::move(w)), dense_(std::make_shared<const std::vector<double>>(w_->dense())), n_(w_->n()), tau_(tau) {}

Mat TensorField::H(const Vec& x) const {
  const int n = n_;
  Mat h(n, n);
  const double* W = dense_->data();
  for (int i = 0; i < n; ++i)
    for (int k = i; k < n; ++k) {
      double s = 0.0;
      for (int p = 0; p < n; ++p) {
        if (x[p] == 0.0) continue;
        const double* row = W + idx4(n, i, p, k, 0);
        double t = 0.0;
        for (int q = 0; q < n; ++q) t += row[q] * x[q];
        s += x[p] * t;
      }
      h(i, k) = s;
      h(k, i) = s;
    }
  return h;
}

std::vector<Mat> TensorField::dH(const Vec& x) const {
  const int n = n_;
  std::vector<Mat> d(n, Mat::Zero(n, n));
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int k = i; k < n; ++k) {
        double s = 0.0;
        for (int q = 0; q < n; ++q) s += (at(i, l, k, q) + at(i, q, k, l)) * x[q];
        d[l](i, k) = s;
        d[l](k, i) = s;
      }
  return d;
}

Vec TensorField::divergence(const Vec& x) const {
  const int n = n_;
  Vec v = Vec::Zero(n);
  for (int k = 0; k < n; ++k) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int q = 0; q < n; ++q) s += (at(i, i, k, q) + at(i, q, k, i)) * x[q];
    v[k] = s;
  }
  return v;
}

Mat TensorField::Hbar(const Vec& x) const { return f(x.squaredNorm()) * H(x); }

Mat TensorField::Hbar(const Vec& x, double lambda, double mu) const {
  if (!(lambda > 0.0)) fail(Errc::invalid_argument, "Hbar: lambda must be positive");
  const double l2 = lambda * lambda;
  return (mu * l2 * l2 * l2 * f(x.squaredNorm() / l2)) * H(x);
}

Mat eval_H(const TensorField& t, const Vec& x) { return t.H(x); }
Mat eval_Hbar(const TensorField& t, const Vec& x, double lambda, double mu) { return t.Hbar(x, lambda, mu); }

std::vector<Rational> eval_H_exact(const WeylForm& w, const std::vector<Rational>& x) {
  const int n = w.n();
  std::vector<Rational> h(static_cast<std::size_t>(n) * n);
  const Rational unit = Rational(w.scale()) / Rational(mpz_class(std::to_string(w.den())));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      Rational s = 0;
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
          const std::int64_t num = w.numerator(i, p, k, q);
          if (num != 0) s += Rational(mpz_class(std::to_string(num))) * x[p] * x[q];
        }
      h[static_cast<std::size_t>(i) * n + k] = s * unit;
    }
  return h;
}

std::vector<std::int64_t> divergence_numerators(const WeylForm& w, const std::vector<std::int64_t>& x) {
  const int n = w.n();
  std::vector<std::int64_t> v(n, 0);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int q = 0; q < n; ++q) v[k] += (w.numerator(i, i, k, q) + w.numerator(i, q, k, i)) * x[q];
  return v;
}

void to_json(nlohmann::json& j, const WeylForm& w) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", w.scale());
  nlohmann::json entries = nlohmann::json::array();
  const int m = w.support();
  for (int i = 0; i < m; ++i)
    for (int jj = i + 1; jj < m; ++jj)
      for (int k = i; k < m; ++k)
        for (int l = k + 1; l < m; ++l) {
          if (k == i && l < jj) continue;
          const std::int64_t num = w.numerator(i, jj, k, l);
          if (num == 0) continue;
          entries.push_back({i, jj, k, l, decimal_string(w.exact(i, jj, k, l), 20), std::to_string(num)});
        }
  j = nlohmann::json{{"n", w.n()}, {"support", w.support()}, {"scale", buf},
                     {"den", std::to_string(w.den())}, {"entries", entries}};
}

WeylForm weyl_from_json(const nlohmann::json& j) {
  const int n = j.at("n").get<int>();
  const int m = j.at("support").get<int>();
  const double scale = std::stod(j.at("scale").get<std::string>());
  const std::int64_t den = std::stoll(j.at("den").get<std::string>());
  const int P = m * (m - 1) / 2;
  std::vector<std::int64_t> canon(static_cast<std::size_t>(P) * (P + 1) / 2, 0);
  auto pidx = [m](int a, int b) { return a * m - a * (a + 1) / 2 + (b - a - 1); };
  for (const auto& e : j.at("entries")) {
    const int a = pidx(e[0].get<int>(), e[1].get<int>());
    const int b = pidx(e[2].get<int>(), e[3].get<int>());
    canon[tri(P, std::min(a, b), std::max(a, b))] = std::stoll(e[5].get<std::string>());
  }
  return WeylForm(n, m, scale, den, std::move(canon));
}

}  // namespace ybl
