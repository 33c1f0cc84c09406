#include "ybl/metric_lab.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <random>

#include "ybl/error.hpp"
#include "ybl/radial_integrals.hpp"

namespace ybl {

PerturbParams make_perturb(double lambda, double mu, double rho) {
  if (!(lambda > 0.0)) fail(Errc::invalid_argument, "perturbation: lambda must be positive");
  if (!(mu > 0.0 && mu <= 1.0)) fail(Errc::invalid_argument, "perturbation: need 0 < mu <= 1");
  if (!(lambda <= rho && rho <= 1.0)) fail(Errc::invalid_argument, "perturbation: need lambda <= rho <= 1");
  return {lambda, mu, rho};
}

Jet smooth_drop(double t, double a, double b) {
  if (!(b > a)) return {t <= a ? 1.0 : 0.0, 0.0, 0.0};
  const double w = b - a, u = (t - a) / w;
  if (u <= 0.0) return {1.0, 0.0, 0.0};
  if (u >= 1.0) return {0.0, 0.0, 0.0};
  const double s = u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
  const double s1 = 30.0 * u * u * (1.0 - u) * (1.0 - u);
  const double s2 = 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u);
  return {1.0 - s, -s1 / w, -s2 / (w * w)};
}

Jet radial_profile(const TensorField& t, const PerturbParams& p, double s) {
  const double r = std::sqrt(s);
  const Jet chi = smooth_drop(r, p.rho, 0.5 * (1.0 + p.rho));
  Jet c{chi.v, 0.0, 0.0};
  if (chi.d1 != 0.0 || chi.d2 != 0.0) {
    c.d1 = chi.d1 / (2.0 * r);
    c.d2 = (chi.d2 - chi.d1 / r) / (4.0 * s);
  }
  const double l2 = p.lambda * p.lambda, sigma = s / l2;
  const double amp = p.mu * l2 * l2 * l2;
  const Jet F{amp * t.f(sigma), amp / l2 * t.f_prime(sigma), amp / (l2 * l2) * eval_f_second(sigma)};
  return {c.v * F.v, c.d1 * F.v + c.v * F.d1, c.d2 * F.v + 2.0 * c.d1 * F.d1 + c.v * F.d2};
}

Mat h_single(const TensorField& t, const PerturbParams& p, const Vec& x) {
  return radial_profile(t, p, x.squaredNorm()).v * t.H(x);
}

HJet h_single_jet(const TensorField& t, const PerturbParams& p, const Vec& x, bool second) {
  const int n = t.n();
  const Jet phi = radial_profile(t, p, x.squaredNorm());
  const Mat H = t.H(x);
  const std::vector<Mat> dH = t.dH(x);
  HJet j;
  j.h = phi.v * H;
  j.dh.resize(n);
  for (int q = 0; q < n; ++q) j.dh[q] = (2.0 * x(q) * phi.d1) * H + phi.v * dH[q];
  if (!second) return j;
  j.ddh.assign(static_cast<std::size_t>(n) * n, Mat());
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      Mat m(n, n);
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) m(i, k) = phi.v * t.ddH(i, k, a, b);
      m += (4.0 * x(a) * x(b) * phi.d2 + (a == b ? 2.0 * phi.d1 : 0.0)) * H;
      m += (2.0 * x(a) * phi.d1) * dH[b] + (2.0 * x(b) * phi.d1) * dH[a];
      j.ddh[static_cast<std::size_t>(a) * n + b] = m;
      j.ddh[static_cast<std::size_t>(b) * n + a] = m;
    }
  return j;
}

namespace {

// e^x - 1 - x without cancellation for small x
double exp_tail(double x) {
  if (std::fabs(x) >= 0.5) return std::expm1(x) - x;
  double term = 0.5 * x * x, sum = term;
  for (int k = 3; k < 30 && std::fabs(term) > 1e-17 * std::fabs(sum); ++k) {
    term *= x / k;
    sum += term;
  }
  return sum;
}

}  // namespace

MetricAtPoint matrix_exp(const Mat& h) {
  if (h.rows() != h.cols()) fail(Errc::non_symmetric, "matrix_exp: matrix is not square");
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if ((h - h.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    fail(Errc::non_symmetric, "matrix_exp: matrix is not symmetric");
  if (!h.allFinite()) fail(Errc::non_finite, "matrix_exp: non-finite entry");
  const Mat hs = 0.5 * (h + h.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(hs);
  const Mat& Q = es.eigenvectors();
  const Vec& l = es.eigenvalues();
  MetricAtPoint m;
  m.h = h;
  // h itself is taken entrywise; only the part beyond linear goes through the
  // eigenvectors, so rounding scales with |h|^2 there
  Vec up(l.size()), dn(l.size());
  for (Eigen::Index a = 0; a < l.size(); ++a) {
    up(a) = exp_tail(l(a));
    dn(a) = exp_tail(-l(a));
  }
  const Eigen::Index n = h.rows();
  m.g_beyond = Q * up.asDiagonal() * Q.transpose();
  m.g_dev = hs + m.g_beyond;
  m.g_inv_dev = Q * dn.asDiagonal() * Q.transpose() - hs;
  m.g = Mat::Identity(n, n) + m.g_dev;
  m.g_inv = Mat::Identity(n, n) + m.g_inv_dev;
  return m;
}

MetricField field_from_function(std::function<Mat(const Vec&)> g) {
  return [g](const Vec& x0) -> LocalMetric {
    return [g, x0](const Vec& d) {
      Mat m = g(x0 + d);
      m.diagonal().array() -= 1.0;
      return m;
    };
  };
}

MetricField single_bump_field(const TensorField& t, const PerturbParams& p, bool log_form) {
  return [&t, p, log_form](const Vec& x0) -> LocalMetric {
    auto H0 = std::make_shared<Mat>(t.H(x0));
    auto dH0 = std::make_shared<std::vector<Mat>>(t.dH(x0));
    return [&t, p, log_form, x0, H0, dH0](const Vec& d) -> Mat {
      const int n = t.n();
      std::vector<int> nz;
      for (int q = 0; q < n; ++q)
        if (d(q) != 0.0) nz.push_back(q);
      // H is quadratic: H(x0 + d) = H(x0) + sum_q d_q d_q H(x0) + H(d)
      Mat H = *H0;
      for (int q : nz) H += d(q) * (*dH0)[q];
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
          double s = 0.0;
          for (int a : nz)
            for (int b : nz) s += t.at(i, a, k, b) * d(a) * d(b);
          H(i, k) += s;
        }
      const Vec x = x0 + d;
      const Mat h = radial_profile(t, p, x.squaredNorm()).v * H;
      if (log_form) return h;
      return matrix_exp(h).g_dev;
    };
  };
}

double scalar_curvature_from_jet(const Mat& g, const std::vector<Mat>& dg, const std::vector<Mat>& ddg) {
  const int n = static_cast<int>(g.rows());
  const Mat gi = g.ldlt().solve(Mat::Identity(n, n));
  auto idx3 = [n](int a, int b, int c) { return (static_cast<std::size_t>(a) * n + b) * n + c; };
  // second-derivative part: g^ij g^kl (d_i d_k g_jl - d_i d_j g_kl)
  double second = 0.0;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const Mat& dd = ddg[static_cast<std::size_t>(i) * n + k];
      second += gi.row(i).dot(dd * gi.col(k));
      second -= gi(i, k) * (gi.cwiseProduct(dd)).sum();
    }
  // Christoffel symbols of the first and second kind
  std::vector<double> G1(static_cast<std::size_t>(n) * n * n), G2(G1.size());
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) G1[idx3(l, i, j)] = 0.5 * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += gi(k, l) * G1[idx3(l, i, j)];
        G2[idx3(k, i, j)] = s;
      }
  std::vector<Mat> dgi(n);
  for (int m = 0; m < n; ++m) dgi[m] = -gi * dg[m] * gi;
  double P1 = 0.0, P2 = 0.0, Q1 = 0.0, Q2 = 0.0;
  for (int l = 0; l < n; ++l) {
    double v = 0.0, c = 0.0, a = 0.0, b = 0.0;
    for (int k = 0; k < n; ++k) {
      v += dgi[k](k, l);
      c += G2[idx3(k, k, l)];
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        a += gi(i, j) * G1[idx3(l, i, j)];
        b += gi(i, j) * G2[idx3(l, i, j)];
      }
    P1 += v * a;
    Q1 += c * b;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double p2 = 0.0, q2 = 0.0;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          p2 += dgi[j](k, l) * G1[idx3(l, i, k)];
          q2 += G2[idx3(k, j, l)] * G2[idx3(l, i, k)];
        }
      P2 += gi(i, j) * p2;
      Q2 += gi(i, j) * q2;
    }
  return second + P1 - P2 + Q1 - Q2;
}

namespace {

// deviation g - Id at a stencil point, after checking that g is SPD
Mat checked_deviation(const LocalMetric& local, const Vec& d) {
  Mat k = local(d);
  const Eigen::Index n = k.rows();
  Eigen::LLT<Mat> llt(Mat::Identity(n, n) + k);
  if (llt.info() != Eigen::Success || !k.allFinite() || (k - k.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    fail(Errc::non_spd, "scalar_curvature: stencil metric is not symmetric positive definite");
  return k;
}

struct StencilJet {
  Mat k0;
  std::vector<Mat> dg, ddg;
};

// central differences of the deviation on the 1 + 2n + 4 C(n,2) point stencil
StencilJet stencil_jet(const LocalMetric& local, int n, double dlt, bool check_spd) {
  auto sample = [&](const Vec& d) { return check_spd ? checked_deviation(local, d) : Mat(local(d)); };
  Vec d = Vec::Zero(n);
  StencilJet j;
  j.k0 = sample(d);
  j.dg.resize(n);
  j.ddg.resize(static_cast<std::size_t>(n) * n);
  for (int m = 0; m < n; ++m) {
    d(m) = dlt;
    const Mat gp = sample(d);
    d(m) = -dlt;
    const Mat gm = sample(d);
    d(m) = 0.0;
    j.dg[m] = (gp - gm) / (2.0 * dlt);
    j.ddg[static_cast<std::size_t>(m) * n + m] = (gp - 2.0 * j.k0 + gm) / (dlt * dlt);
  }
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      Mat acc = Mat::Zero(n, n);
      for (int sa : {1, -1})
        for (int sb : {1, -1}) {
          d(a) = sa * dlt;
          d(b) = sb * dlt;
          acc += (sa * sb) * sample(d);
        }
      d(a) = d(b) = 0.0;
      acc /= 4.0 * dlt * dlt;
      j.ddg[static_cast<std::size_t>(a) * n + b] = acc;
      j.ddg[static_cast<std::size_t>(b) * n + a] = acc;
    }
  return j;
}

// d_i d_k k_ik - Delta tr k, the curvature of Id + k to first order in k
double linear_curvature(const std::vector<Mat>& ddk, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) s += ddk[static_cast<std::size_t>(i) * n + k](i, k);
  for (int m = 0; m < n; ++m) s -= ddk[static_cast<std::size_t>(m) * n + m].trace();
  return s;
}

double curvature_at_step(const LocalMetric& local, const LocalMetric* linear, int n, double dlt) {
  const StencilJet j = stencil_jet(local, n, dlt, true);
  double r = scalar_curvature_from_jet(Mat::Identity(n, n) + j.k0, j.dg, j.ddg);
  if (linear) r -= linear_curvature(stencil_jet(*linear, n, dlt, false).ddg, n);
  return r;
}

}  // namespace

CurvatureValue scalar_curvature(const MetricField& field, const Vec& x, double step, const MetricField* null_linear) {
  if (!(step > 0.0)) fail(Errc::invalid_argument, "scalar_curvature: step must be positive");
  const LocalMetric local = field(x);
  LocalMetric lin;
  if (null_linear) lin = (*null_linear)(x);
  const int n = static_cast<int>(x.size());
  const double coarse = curvature_at_step(local, null_linear ? &lin : nullptr, n, step);
  const double fine = curvature_at_step(local, null_linear ? &lin : nullptr, n, 0.5 * step);
  return {(4.0 * fine - coarse) / 3.0, std::fabs(fine - coarse) / 3.0};
}

ExpansionTerms expansion_terms(const HJet& j) {
  const int n = static_cast<int>(j.h.rows());
  if (j.ddh.size() != static_cast<std::size_t>(n) * n) fail(Errc::invalid_argument, "expansion_terms: second derivatives missing");
  Vec v = Vec::Zero(n);
  Mat dv = Mat::Zero(n, n);  // dv(p, l) = d_p v_l
  for (int i = 0; i < n; ++i) v += j.dh[i].row(i).transpose();
  for (int p = 0; p < n; ++p)
    for (int i = 0; i < n; ++i) dv.row(p) += j.ddh[static_cast<std::size_t>(p) * n + i].row(i);
  ExpansionTerms e;
  e.second_div = dv.trace();
  e.div_product = v.squaredNorm() + j.h.cwiseProduct(dv).sum();
  e.div_square = 0.5 * v.squaredNorm();
  for (int l = 0; l < n; ++l) e.grad_square += 0.25 * j.dh[l].squaredNorm();
  return e;
}

CurvatureSample curvature_expansion_check(const TensorField& t, const PerturbParams& p, const Vec& x, double step) {
  if (step <= 0.0) step = 2.5e-3 * (p.lambda + x.norm());
  CurvatureSample s;
  s.x = x;
  const MetricField log_field = single_bump_field(t, p, true);
  const CurvatureValue R = scalar_curvature(single_bump_field(t, p), x, step, &log_field);
  const HJet j = h_single_jet(t, p, x, true);
  const ExpansionTerms e = expansion_terms(j);
  s.R_numeric = R.value;
  s.R_fd_error = R.error;
  s.R_expansion = e.full();
  s.R_reduced = e.reduced();
  s.remainder = std::fabs(s.R_numeric - s.R_expansion);
  double d1 = 0.0, d2 = 0.0;
  for (const Mat& m : j.dh) d1 += m.squaredNorm();
  for (const Mat& m : j.ddh) d2 += m.squaredNorm();
  const double h0 = j.h.norm();
  s.bound = h0 * h0 * std::sqrt(d2) + h0 * d1;
  s.growth = p.mu * p.mu * std::pow(p.lambda + x.norm(), 14);
  return s;
}

WeylForm scale_for_metric(const WeylForm& w, double tau, double lambda, double rho, double target,
                          std::uint64_t seed) {
  auto wp = std::make_shared<const WeylForm>(w);
  TensorField t(wp, tau);
  const PerturbParams p = make_perturb(lambda, 1.0, rho);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  double peak = 0.0;
  for (int s = 0; s < 256; ++s) {
    Vec om(w.n());
    for (int i = 0; i < w.n(); ++i) om(i) = normal(rng);
    om.normalize();
    const Mat H = t.H(om);
    for (int k = 1; k <= 16; ++k) {
      const double r = rho * k / 16.0;
      peak = std::max(peak, std::fabs(radial_profile(t, p, r * r).v) * r * r * H.norm());
    }
  }
  if (!(peak > 0.0)) fail(Errc::invalid_argument, "scale_for_metric: form vanishes on the samples");
  return w.rescaled(w.scale() * target / peak);
}

SphereDesign degree5_design(int n) {
  if (n < 2) fail(Errc::dimension_unsupported, "degree5_design: n >= 2 required");
  SphereDesign d;
  const double w_axis = (4.0 - n) / (2.0 * n * (n + 2.0)), w_diag = 1.0 / (n * (n + 2.0));
  for (int i = 0; i < n; ++i)
    for (int s : {1, -1}) {
      Vec v = Vec::Zero(n);
      v(i) = s;
      d.points.push_back(v);
      d.weights.push_back(w_axis);
    }
  const double c = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int si : {1, -1})
        for (int sj : {1, -1}) {
          Vec v = Vec::Zero(n);
          v(i) = si * c;
          v(j) = sj * c;
          d.points.push_back(v);
          d.weights.push_back(w_diag);
        }
  return d;
}

double dirichlet_term_quadrature(const TensorField& t, double eps) {
  const int n = t.n();
  if (n < 19) fail(Errc::divergent, "dirichlet_term_quadrature: integral diverges for n < 19");
  if (!(eps > 0.0)) fail(Errc::invalid_argument, "dirichlet_term_quadrature: eps must be positive");
  const SphereDesign d = degree5_design(n);
  const double area = sphere_area(n);
  double A = 0.0, B = 0.0;  // sphere integrals of |H|^2 and sum_l |d_l H|^2
  for (std::size_t k = 0; k < d.points.size(); ++k) {
    A += d.weights[k] * t.H(d.points[k]).squaredNorm();
    double g = 0.0;
    for (const Mat& m : t.dH(d.points[k])) g += m.squaredNorm();
    B += d.weights[k] * g;
  }
  A *= area;
  B *= area;
  const double tau = t.tau();
  auto g = [&](double r) {
    if (r <= 0.0) return 0.0;
    const double s = r * r;
    const double alpha = 2.0 * r * s * t.f_prime(s), beta = r * t.f(s);
    const double w = std::exp((n - 2.0) * std::log(eps) + (2.0 - n) * std::log(eps * eps + s) + (n - 1.0) * std::log(r));
    return w * ((alpha * alpha + 4.0 * alpha * beta) * A + beta * beta * B);
  };
  // |f(s)| <= c0 s^3 and |f'(s)| <= c1 s^2 for s >= 1
  const double c0 = std::fabs(tau) + 5.0 + 1.0 + 0.05, c1 = 5.0 + 2.0 + 0.15;
  const double coef = std::pow(eps, n - 2.0) * ((4.0 * c1 * c1 + 8.0 * c1 * c0) * std::fabs(A) + c0 * c0 * std::fabs(B));
  const QuadratureResult q = integrate_half_line(g, eps, coef, 17.0 - n, 1e-14);
  return -(n - 2.0) / (16.0 * (n - 1.0)) * q.value;
}

Jet eta(const GluedBumpSpec& s, double t) { return smooth_drop(t, 1.0, s.eta_end.get_d()); }

bool DisjointnessCertificate::all_actual() const {
  for (const auto& r : rows)
    if (!r.actual) return false;
  return !rows.empty();
}

bool DisjointnessCertificate::all_literal() const {
  for (const auto& r : rows)
    if (!r.literal) return false;
  return !rows.empty();
}

DisjointnessCertificate certify_disjointness(const GluedBumpSpec& s) {
  if (s.N0 < 1 || s.N_max <= s.N0) fail(Errc::spec_invalid, "glued spec: need 1 <= N0 < N_max");
  if (s.eta_end <= 1 || s.eta_end > 2) fail(Errc::spec_invalid, "glued spec: need 1 < eta_end <= 2");
  DisjointnessCertificate c;
  for (int N = s.N0; N < s.N_max; ++N) {
    DisjointnessRow r;
    r.N = N;
    const Rational a(1, N), b(1, N + 1);
    r.gap = a - b;
    const Rational lit = a * a / 2 + b * b / 2;
    r.reach = s.eta_end / 4 * (a * a + b * b);
    r.literal = r.gap > lit;
    r.actual = r.gap > r.reach;
    c.rows.push_back(r);
  }
  c.outer_radius = Rational(1, s.N0) + s.eta_end / (4 * Rational(s.N0) * s.N0);
  return c;
}

GluedField::GluedField(GluedBumpSpec s, const TensorField& t) : s_(std::move(s)), t_(&t) {
  if (!certify_disjointness(s_).all_actual()) fail(Errc::spec_invalid, "glued spec: bump supports overlap");
}

Mat GluedField::h(const Vec& x) const {
  const int n = t_->n();
  Mat out = Mat::Zero(n, n);
  const double end = s_.eta_end.get_d();
  for (int N = s_.N0; N <= s_.N_max; ++N) {
    Vec d = x;
    d(0) -= 1.0 / N;
    const double r2 = d.squaredNorm(), tt = 4.0 * N * N * std::sqrt(r2);
    if (tt >= end) continue;
    out += eta(s_, tt).v * std::ldexp(t_->f(std::ldexp(r2, N)), -4 * N) * t_->H(d);
  }
  return out;
}

int GluedField::active_bumps(const Vec& x) const {
  int c = 0;
  const double end = s_.eta_end.get_d();
  for (int N = s_.N0; N <= s_.N_max; ++N) {
    Vec d = x;
    d(0) -= 1.0 / N;
    if (4.0 * N * N * d.norm() < end) ++c;
  }
  return c;
}

double GluedField::radial_sup(int N) const {
  const double end = s_.eta_end.get_d() / (4.0 * N * N);
  auto g = [&](double r) {
    return eta(s_, 4.0 * N * N * r).v * std::ldexp(std::fabs(t_->f(std::ldexp(r * r, N))), -4 * N) * r * r;
  };
  const int grid = 4000;
  int best = 0;
  double bv = 0.0;
  for (int k = 0; k <= grid; ++k) {
    const double v = g(end * k / grid);
    if (v > bv) {
      bv = v;
      best = k;
    }
  }
  double a = end * std::max(best - 1, 0) / grid, b = end * std::min(best + 1, grid) / grid;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 100; ++it) {
    const double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    if (g(x1) > g(x2))
      b = x2;
    else
      a = x1;
  }
  return std::max(bv, g(0.5 * (a + b)));
}

}  // namespace ybl
