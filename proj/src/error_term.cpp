#include <boost/math/quadrature/gauss.hpp>
#include <cmath>

#include "ybl/error.hpp"
#include "ybl/kernels.hpp"
#include "ybl/metric_lab.hpp"
#include "ybl/parallel.hpp"

namespace ybl {

namespace {

constexpr int kTerms = 18;               // series terms for the exponential
constexpr double kSeriesRadius = 0.25;   // series used while |t lambda| stays below this
constexpr std::size_t kChunk = 128;

double c_n(int n) { return (n - 2.0) / (4.0 * (n - 1.0)); }

// Per-direction spectral data along the ray x = r omega, where
// h(r omega) = t(r) H(omega) with t = r^2 phi(r^2).
struct DirectionData {
  Vec omega, lam, w1;
  Mat Q, Z;  // Z_ab = sum_i Q_ia (Q^T d_i H(omega) Q)_ab
  double hsq = 0.0, gradsq = 0.0, lam_max = 0.0;
  std::vector<double> P, A, s1;  // power sums, sum lam^k w1^2, divided-difference moments with w1
  std::vector<Vec> lam_pow;      // lam^j, j < kTerms
};

// M[q][(i n + c) n + d] = W_cidq + W_cqdi, so that omega^T M = d_i H_cd(omega)
std::vector<double> derivative_map(const TensorField& t) {
  const int n = t.n();
  const std::size_t n3 = static_cast<std::size_t>(n) * n * n;
  std::vector<double> M(static_cast<std::size_t>(n) * n3);
  for (int q = 0; q < n; ++q)
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d)
          M[q * n3 + (static_cast<std::size_t>(i) * n + c) * n + d] = t.at(c, i, d, q) + t.at(c, q, d, i);
  return M;
}

// sum_{j + l = k - 1} lam^j . Z (lam^l o y), k = 1..kTerms
std::vector<double> dd_moments(const DirectionData& dd, const Vec& y) {
  std::vector<Vec> zy(kTerms);
  for (int l = 0; l < kTerms; ++l) zy[l] = dd.Z * dd.lam_pow[l].cwiseProduct(y);
  std::vector<double> s(kTerms + 1, 0.0);
  for (int k = 1; k <= kTerms; ++k)
    for (int j = 0; j < k; ++j) s[k] += dd.lam_pow[j].dot(zy[k - 1 - j]);
  return s;
}

void setup_direction(int n, const double* omega, const double* D, DirectionData& dd) {
  const std::size_t n2 = static_cast<std::size_t>(n) * n;
  dd.omega = Eigen::Map<const Vec>(omega, n);
  Mat H = Mat::Zero(n, n);
  dd.gradsq = 0.0;
  for (int i = 0; i < n; ++i) {
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> Di(D + i * n2, n, n);
    H += 0.5 * omega[i] * Di;
    dd.gradsq += Di.squaredNorm();
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (H + H.transpose()));
  dd.Q = es.eigenvectors();
  dd.lam = es.eigenvalues();
  dd.hsq = dd.lam.squaredNorm();
  dd.lam_max = dd.lam.cwiseAbs().maxCoeff();
  dd.w1 = dd.Q.transpose() * dd.omega;
  // T_(ic),b = sum_d D_i,cd Q_db ; Z = P^T T with P_(ic),a = Q_ia Q_ca
  std::vector<double> Qr(n2), T(n2 * n), Pt(n * n2), Z(n2);
  for (int c = 0; c < n; ++c)
    for (int b = 0; b < n; ++b) Qr[c * n + b] = dd.Q(c, b);
  simd::gemm(n2, n, n, D, n, Qr.data(), n, T.data(), n);
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < n; ++c) Pt[a * n2 + i * n + c] = dd.Q(i, a) * dd.Q(c, a);
  simd::gemm(n, n, n2, Pt.data(), n2, T.data(), n, Z.data(), n);
  dd.Z = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(Z.data(), n, n);
  dd.lam_pow.assign(kTerms, Vec::Ones(n));
  for (int j = 1; j < kTerms; ++j) dd.lam_pow[j] = dd.lam_pow[j - 1].cwiseProduct(dd.lam);
  dd.P.assign(kTerms + 1, 0.0);
  dd.A.assign(kTerms + 1, 0.0);
  Vec pw = dd.lam;
  const Vec w1sq = dd.w1.cwiseAbs2();
  for (int k = 1; k <= kTerms; ++k) {
    dd.P[k] = pw.sum();
    dd.A[k] = pw.dot(w1sq);
    pw = pw.cwiseProduct(dd.lam);
  }
  dd.s1 = dd_moments(dd, dd.w1);
}

struct ConfigState {
  Vec w2;  // Q^T xi
  std::vector<double> B, C, s2;
  double omega_xi = 0.0, xi_sq = 0.0;
};

ConfigState config_state(const DirectionData& dd, const ErrorConfig& c) {
  ConfigState s;
  s.w2 = dd.Q.transpose() * c.bubble.xi;
  s.omega_xi = dd.omega.dot(c.bubble.xi);
  s.xi_sq = c.bubble.xi.squaredNorm();
  s.B.assign(kTerms + 1, 0.0);
  s.C.assign(kTerms + 1, 0.0);
  const Vec w12 = dd.w1.cwiseProduct(s.w2), w22 = s.w2.cwiseAbs2();
  Vec pw = dd.lam;
  for (int k = 1; k <= kTerms; ++k) {
    s.B[k] = pw.dot(w12);
    s.C[k] = pw.dot(w22);
    pw = pw.cwiseProduct(dd.lam);
  }
  s.s2 = dd_moments(dd, s.w2);
  return s;
}

double eval_E(const TensorField& t, const ErrorConfig& c, const DirectionData& dd, const ConfigState& cs, double r) {
  const int n = t.n();
  const double s = r * r;
  const Jet phi = radial_profile(t, c.p, s);
  if (phi.v == 0.0 && phi.d1 == 0.0) return 0.0;
  const double tt = s * phi.v, alpha = 2.0 * r * s * phi.d1, beta = r * phi.v;
  const double eps = c.bubble.eps;
  const double q = eps * eps + s - 2.0 * r * cs.omega_xi + cs.xi_sq;
  const double u = std::pow(eps / q, 0.5 * (n - 2));
  double trace = 0.0, trace2 = 0.0, div = 0.0;
  if (std::fabs(tt) * dd.lam_max <= kSeriesRadius) {
    double e = 1.0, tp = 1.0;  // e = (-tt)^k / k!, tp = tt^(k-1)
    double fact = 1.0;
    for (int k = 1; k <= kTerms; ++k) {
      fact *= k;
      e *= -tt / k;
      trace += e * dd.P[k];
      trace2 += e * (s * dd.A[k] - 2.0 * r * cs.B[k] + cs.C[k]);
      div += ((k % 2) ? -1.0 : 1.0) * tp / fact * (r * dd.s1[k] - cs.s2[k]);
      tp *= tt;
    }
  } else {
    const Vec y = r * dd.w1 - cs.w2;  // Q^T (x - xi)
    const Vec x = tt * dd.lam;
    Vec em1(n), ex(n);
    for (int a = 0; a < n; ++a) {
      em1(a) = std::expm1(-x(a));
      ex(a) = std::exp(-x(a));
    }
    trace = em1.sum();
    trace2 = em1.dot(y.cwiseAbs2());
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const double dx = x(a) - x(b);
        // divided difference of exp(-.) at (x_a, x_b)
        const double phi_ab = dx != 0.0 ? ex(b) * std::expm1(-dx) / dx : -ex(b);
        div += phi_ab * dd.Z(a, b) * y(b);
      }
  }
  const double nn2 = n * (n - 2.0);
  const double rterm = 0.25 * ((alpha * alpha + 4.0 * alpha * beta) * dd.hsq + beta * beta * dd.gradsq);
  return -(n - 2.0) * u / q * trace + nn2 * u / (q * q) * trace2 - (n - 2.0) * u * beta / q * div +
         c_n(n) * u * rterm;
}

void require_config(const TensorField& t, const ErrorConfig& c) {
  if (c.bubble.n() != t.n()) fail(Errc::invalid_argument, "error term: bubble dimension differs from the form");
  if (!(c.bubble.eps > 0.0)) fail(Errc::invalid_argument, "error term: eps must be positive");
  make_perturb(c.p.lambda, c.p.mu, c.p.rho);
}

struct Nodes {
  std::vector<double> r, w;
};

Nodes radial_nodes(const ErrorConfig& c) {
  using GL = boost::math::quadrature::gauss<double, 20>;
  std::vector<double> cuts{0.0};
  const double outer = 0.5 * (1.0 + c.p.rho);
  for (double b = c.bubble.eps / 8.0; b < c.p.rho; b *= 2.0) cuts.push_back(b);
  cuts.push_back(c.p.rho);
  if (outer > c.p.rho) {
    cuts.push_back(0.5 * (c.p.rho + outer));
    cuts.push_back(outer);
  }
  Nodes nd;
  const auto& xs = GL::abscissa();
  const auto& ws = GL::weights();
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k], b = cuts[k + 1], m = 0.5 * (a + b), h = 0.5 * (b - a);
    for (std::size_t j = 0; j < xs.size(); ++j) {
      if (xs[j] == 0.0) {
        nd.r.push_back(m);
        nd.w.push_back(h * ws[j]);
        continue;
      }
      for (int sg : {-1, 1}) {
        nd.r.push_back(m + sg * h * xs[j]);
        nd.w.push_back(h * ws[j]);
      }
    }
  }
  return nd;
}

struct Welford {
  double count = 0.0, mean = 0.0, m2 = 0.0;
  void add(double v) {
    count += 1.0;
    const double d = v - mean;
    mean += d / count;
    m2 += d * (v - mean);
  }
  void merge(const Welford& o) {
    if (o.count == 0.0) return;
    const double tot = count + o.count, d = o.mean - mean;
    mean += d * o.count / tot;
    m2 += o.m2 + d * d * count * o.count / tot;
    count = tot;
  }
};

}  // namespace

double error_term_pointwise(const TensorField& t, const ErrorConfig& c, const Vec& x) {
  require_config(t, c);
  const int n = t.n();
  const HJet j = h_single_jet(t, c.p, x, false);
  double grad_sq = 0.0;
  for (const Mat& m : j.dh) grad_sq += m.squaredNorm();
  const MetricAtPoint m = matrix_exp(j.h);
  const double dlt = 1e-5 * (c.p.lambda + x.norm());
  Vec div = Vec::Zero(n);
  for (int i = 0; i < n; ++i) {
    Vec xp = x, xm = x;
    xp(i) += dlt;
    xm(i) -= dlt;
    const Mat diff = matrix_exp(h_single(t, c.p, xp)).g_inv_dev - matrix_exp(h_single(t, c.p, xm)).g_inv_dev;
    div += diff.row(i).transpose() / (2.0 * dlt);
  }
  const BubbleJet b = bubble_jet(c.bubble, x);
  return m.g_inv_dev.cwiseProduct(b.hess).sum() + div.dot(b.grad) + c_n(n) * 0.25 * grad_sq * b.u;
}

double error_term_on_ray(const TensorField& t, const ErrorConfig& c, const Vec& omega, double r) {
  require_config(t, c);
  const int n = t.n();
  const std::vector<double> M = derivative_map(t);
  const std::size_t n3 = static_cast<std::size_t>(n) * n * n;
  std::vector<double> D(n3);
  simd::gemm(1, n3, n, omega.data(), n, M.data(), n3, D.data(), n3);
  DirectionData dd;
  setup_direction(n, omega.data(), D.data(), dd);
  return eval_E(t, c, dd, config_state(dd, c), r);
}

std::vector<NormEstimate> error_term_norms(const TensorField& t, const std::vector<ErrorConfig>& configs,
                                           std::size_t directions, std::uint64_t seed) {
  if (directions < 2) fail(Errc::invalid_argument, "error_term_norms: need at least two directions");
  for (const auto& c : configs) require_config(t, c);
  const int n = t.n();
  const std::size_t n3 = static_cast<std::size_t>(n) * n * n;
  const std::vector<double> M = derivative_map(t);
  std::vector<Nodes> nodes;
  for (const auto& c : configs) nodes.push_back(radial_nodes(c));
  const double pexp = 2.0 * n / (n + 2.0);
  const std::size_t chunks = (directions + kChunk - 1) / kChunk;
  std::vector<std::vector<Welford>> parts(chunks, std::vector<Welford>(configs.size()));
  parallel_for(chunks, [&](std::size_t ch) {
    const std::size_t rows = std::min(kChunk, directions - ch * kChunk);
    std::vector<double> om, D(rows * n3);
    sphere_directions(n, seed, ch, rows, om);
    simd::gemm(rows, n3, n, om.data(), n, M.data(), n3, D.data(), n3);
    DirectionData dd;
    for (std::size_t row = 0; row < rows; ++row) {
      setup_direction(n, om.data() + row * n, D.data() + row * n3, dd);
      for (std::size_t k = 0; k < configs.size(); ++k) {
        const ConfigState cs = config_state(dd, configs[k]);
        double acc = 0.0;
        for (std::size_t j = 0; j < nodes[k].r.size(); ++j) {
          const double r = nodes[k].r[j];
          const double e = eval_E(t, configs[k], dd, cs, r);
          if (e != 0.0) acc += nodes[k].w[j] * std::pow(std::fabs(e), pexp) * std::pow(r, n - 1);
        }
        if (!std::isfinite(acc)) fail(Errc::non_finite, "error_term_norms: non-finite radial integral");
        parts[ch][k].add(acc);
      }
    }
  });
  const double area = sphere_area(n);
  std::vector<NormEstimate> out(configs.size());
  for (std::size_t k = 0; k < configs.size(); ++k) {
    Welford w;
    for (const auto& p : parts) w.merge(p[k]);
    const double total = area * w.mean;
    const double se = area * std::sqrt(w.m2 / (w.count - 1.0) / w.count);
    out[k].directions = directions;
    out[k].norm = std::pow(total, 1.0 / pexp);
    out[k].std_error = total > 0.0 ? out[k].norm / pexp * se / total : 0.0;
  }
  return out;
}

NormEstimate error_term_norm(const TensorField& t, const ErrorConfig& c, std::size_t directions, std::uint64_t seed) {
  return error_term_norms(t, {c}, directions, seed).front();
}

}  // namespace ybl
