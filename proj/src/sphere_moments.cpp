#include "ybl/sphere_moments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <sstream>

#include "ybl/error.hpp"
#include "ybl/kernels.hpp"
#include "ybl/parallel.hpp"

namespace ybl {

double sphere_area(int n) {
  if (n < 1) fail(Errc::dimension_unsupported, "sphere_area: n must be positive");
  return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
}

double sphere_monomial_moment(int n, const std::vector<int>& e) {
  int total = 0;
  double num = 1.0;
  for (int a : e) {
    if (a < 0) fail(Errc::invalid_argument, "sphere_monomial_moment: negative exponent");
    if (a % 2) return 0.0;
    for (int j = a - 1; j > 1; j -= 2) num *= j;
    total += a;
  }
  double den = 1.0;
  for (int j = 0; j < total / 2; ++j) den *= n + 2 * j;
  return sphere_area(n) * num / den;
}

double quartic_moment(int n, int i, int j, int k, int m) {
  const int c = (i == j && k == m) + (i == k && j == m) + (i == m && j == k);
  return sphere_area(n) * c / (static_cast<double>(n) * (n + 2));
}

namespace {

// the 15 perfect matchings of six slots
const std::array<std::array<int, 6>, 15>& matchings6() {
  static const auto table = [] {
    std::array<std::array<int, 6>, 15> t{};
    int idx = 0;
    for (int b = 1; b < 6; ++b) {
      std::array<int, 4> rest{};
      int r = 0;
      for (int s = 1; s < 6; ++s)
        if (s != b) rest[r++] = s;
      const int pairs[3][4] = {{rest[0], rest[1], rest[2], rest[3]},
                               {rest[0], rest[2], rest[1], rest[3]},
                               {rest[0], rest[3], rest[1], rest[2]}};
      for (const auto& p : pairs) t[idx++] = {0, b, p[0], p[1], p[2], p[3]};
    }
    return t;
  }();
  return table;
}

}  // namespace

double sextic_moment(int n, int a, int b, int c, int d, int e, int f) {
  const int v[6] = {a, b, c, d, e, f};
  int count = 0;
  for (const auto& m : matchings6())
    if (v[m[0]] == v[m[1]] && v[m[2]] == v[m[3]] && v[m[4]] == v[m[5]]) ++count;
  return sphere_area(n) * count / (static_cast<double>(n) * (n + 2) * (n + 4));
}

DirectionalMoments directional_moments(const WeylForm& w) {
  const int n = w.n(), m = w.support();
  const double u = w.unit();
  const std::size_t m2 = static_cast<std::size_t>(m) * m;
  std::vector<double> W(m2 * m2);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l)
          W[((static_cast<std::size_t>(i) * m + j) * m + k) * m + l] = u * static_cast<double>(w.numerator(i, j, k, l));
  auto at = [&](int i, int j, int k, int l) { return W[((static_cast<std::size_t>(i) * m + j) * m + k) * m + l]; };

  const double area = sphere_area(n);
  DirectionalMoments dm;
  dm.n = n;

  // G = C^T C, C_{(ikl),a} = W_ilka + W_iakl
  Mat C(static_cast<Eigen::Index>(m2 * m), m);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < m; ++k)
      for (int l = 0; l < m; ++l)
        for (int a = 0; a < m; ++a)
          C((static_cast<Eigen::Index>(i) * m + k) * m + l, a) = at(i, l, k, a) + at(i, a, k, l);
  Mat Gm = C.transpose() * C;
  dm.G = Mat::Zero(n, n);
  dm.G.topLeftCorner(m, m) = Gm;
  const double trG = Gm.trace();
  dm.D = (area / (static_cast<double>(n) * (n + 2))) * (2.0 * dm.G + trG * Mat::Identity(n, n));
  dm.trD = area * trG / n;

  // K_{(ab),(cd)} = sum_{ik} W_iakb W_ickd
  std::vector<double> M(m2 * m2), Mt(m2 * m2), K(m2 * m2);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < m; ++k)
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
          const std::size_t row = static_cast<std::size_t>(i) * m + k, col = static_cast<std::size_t>(a) * m + b;
          M[row * m2 + col] = at(i, a, k, b);
          Mt[col * m2 + row] = at(i, a, k, b);
        }
  simd::gemm(m2, m2, m2, Mt.data(), m2, M.data(), m2, K.data(), m2);
  auto Kat = [&](int a, int b, int c, int d) {
    return K[(static_cast<std::size_t>(a) * m + b) * m2 + static_cast<std::size_t>(c) * m + d];
  };
  double T0 = 0.0;
  for (int a = 0; a < m; ++a)
    for (int c = 0; c < m; ++c) T0 += Kat(a, a, c, c) + Kat(a, c, a, c) + Kat(a, c, c, a);
  Mat Em = Mat::Zero(m, m);
  int slot[4];
  for (int sp = 0; sp < 4; ++sp)
    for (int sq = 0; sq < 4; ++sq) {
      if (sp == sq) continue;
      int o1 = -1, o2 = -1;
      for (int s = 0; s < 4; ++s)
        if (s != sp && s != sq) (o1 < 0 ? o1 : o2) = s;
      for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q) {
          double s = 0.0;
          for (int c = 0; c < m; ++c) {
            slot[sp] = p;
            slot[sq] = q;
            slot[o1] = c;
            slot[o2] = c;
            s += Kat(slot[0], slot[1], slot[2], slot[3]);
          }
          Em(p, q) += s;
        }
    }
  const double c6 = area / (static_cast<double>(n) * (n + 2) * (n + 4));
  dm.E = Mat::Zero(n, n);
  dm.E.topLeftCorner(m, m) = c6 * Em;
  dm.E += (c6 * T0) * Mat::Identity(n, n);
  dm.trE = area * T0 / (static_cast<double>(n) * (n + 2));

  // L_pq = sum_l sum W_palb W_qcld int w_a w_b w_c w_d
  const double c4 = area / (static_cast<double>(n) * (n + 2));
  dm.L = Mat::Zero(n, n);
  for (int p = 0; p < m; ++p)
    for (int q = p; q < m; ++q) {
      double s = 0.0;
      for (int l = 0; l < m; ++l) {
        double ta = 0.0, tc = 0.0;
        for (int a = 0; a < m; ++a) {
          ta += at(p, a, l, a);
          tc += at(q, a, l, a);
        }
        s += ta * tc;
        for (int a = 0; a < m; ++a)
          for (int b = 0; b < m; ++b) s += at(p, a, l, b) * (at(q, a, l, b) + at(q, b, l, a));
      }
      dm.L(p, q) = dm.L(q, p) = c4 * s;
    }
  return dm;
}

IdentityCheck make_check(double lhs, double rhs, double floor) {
  IdentityCheck c{lhs, rhs, 0.0};
  const double scale = std::max({std::fabs(lhs), std::fabs(rhs), floor});
  c.rel_err = scale > 0.0 ? std::fabs(lhs - rhs) / scale : 0.0;
  return c;
}

SphereContext sphere_context(const WeylForm& w, double tau) {
  SphereContext c;
  c.n = w.n();
  c.tau = tau;
  c.dm = directional_moments(w);
  c.qc = weyl_quartic_contractions(w);
  return c;
}

std::pair<IdentityCheck, IdentityCheck> identity1_check(const SphereContext& c, double r, int p, int q) {
  const int n = c.n;
  const double area = sphere_area(n), d = p == q ? 1.0 : 0.0;
  const double nn = static_cast<double>(n) * (n + 2);
  const double r3 = std::pow(r, n + 3), r5 = std::pow(r, n + 5);
  const double rhs1 = (2.0 / nn) * area * c.qc.Q(p, q) * r3 + (1.0 / nn) * area * c.qc.S * d * r3;
  const double rhs2 = (2.0 / (nn * (n + 4))) * area * c.qc.Q(p, q) * r5 + (1.0 / (2.0 * nn * (n + 4))) * area * c.qc.S * d * r5;
  const double f1 = area * c.qc.S * r3 / nn, f2 = area * c.qc.S * r5 / (nn * (n + 4));
  return {make_check(c.dm.D(p, q) * r3, rhs1, f1), make_check(c.dm.E(p, q) * r5, rhs2, f2)};
}

IdentityCheck identity2_check(const SphereContext& c, double r, int p, int q) {
  const int n = c.n;
  const double s = r * r, f = eval_f(c.tau, s), fp = eval_f_prime(c.tau, s);
  const double area = sphere_area(n), d = p == q ? 1.0 : 0.0;
  const double nn4 = static_cast<double>(n) * (n + 2) * (n + 4);
  const double r3 = std::pow(r, n + 3), r5 = std::pow(r, n + 5);
  const double lhs = r3 * f * f * c.dm.D(p, q) + r5 * (8.0 * f * fp + 4.0 * s * fp * fp) * c.dm.E(p, q);
  const double rhs = (2.0 / nn4) * area * c.qc.Q(p, q) * r3 * ((n + 4) * f * f + 8.0 * s * f * fp + 4.0 * s * s * fp * fp) +
                     (1.0 / nn4) * area * c.qc.S * d * r3 * ((n + 4) * f * f + 4.0 * s * f * fp + 2.0 * s * s * fp * fp);
  const double floor = area * c.qc.S * r3 * ((n + 4) * f * f + 8.0 * s * std::fabs(f * fp) + 4.0 * s * s * fp * fp) / nn4;
  return make_check(lhs, rhs, floor);
}

IdentityCheck identity3_check(const SphereContext& c, double r) {
  const int n = c.n;
  const double s = r * r, f = eval_f(c.tau, s), fp = eval_f_prime(c.tau, s);
  const double r1 = std::pow(r, n + 1), r3 = std::pow(r, n + 3);
  const double lhs = r1 * f * f * c.dm.trD + r3 * (8.0 * f * fp + 4.0 * s * fp * fp) * c.dm.trE;
  const double rhs = sphere_area(n) * c.qc.S / (static_cast<double>(n) * (n + 2)) * r1 *
                     ((n + 2) * f * f + 4.0 * s * f * fp + 2.0 * s * s * fp * fp);
  return make_check(lhs, rhs);
}

IdentityCheck hbar_pair_check(const SphereContext& c, double r, int p, int q) {
  const int n = c.n;
  const double f = eval_f(c.tau, r * r), r3 = std::pow(r, n + 3);
  const double lhs = r3 * f * f * c.dm.L(p, q);
  const double rhs = sphere_area(n) * c.qc.Q(p, q) * r3 * f * f / (2.0 * n * (n + 2));
  return make_check(lhs, rhs, sphere_area(n) * c.qc.S * r3 * f * f / (2.0 * n * n * (n + 2)));
}

bool trace_consistency_exact(int n) {
  const SPoly f = f_poly(), fp = f_prime_poly();
  const SPoly s = SPoly::monomial(TauPoly(1), 1);
  const SPoly ff = f * f, sffp = s * f * fp, ssfpfp = s * s * fp * fp;
  const Rational nn4 = Rational(n) * (n + 2) * (n + 4);
  const SPoly q_bracket = Rational(n + 4) * ff + Rational(8) * sffp + Rational(4) * ssfpfp;
  const SPoly d_bracket = Rational(n + 4) * ff + Rational(4) * sffp + Rational(2) * ssfpfp;
  // trace Q = S and sum_p delta_pp = n
  const SPoly traced = (Rational(2) / nn4) * q_bracket + (Rational(n) / nn4) * d_bracket;
  const SPoly unweighted = (Rational(1) / (Rational(n) * (n + 2))) *
                           (Rational(n + 2) * ff + Rational(4) * sffp + Rational(2) * ssfpfp);
  return traced == unweighted;
}

bool trace_consistency_constant_f(int n) {
  const Rational nn = Rational(n) * (n + 2);
  const Rational traced = Rational(2) / nn + Rational(n) / nn;
  const Rational unweighted = Rational(n + 2) / nn;
  return traced == unweighted;
}

namespace {

void draw_directions(int n, std::uint64_t seed, std::size_t chunk, std::size_t rows, std::vector<double>& buf,
                     std::vector<double>& norms) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  buf.resize(rows * static_cast<std::size_t>(n));
  norms.resize(rows);
  for (auto& v : buf) v = normal(rng);
  simd::normalize_rows(buf.data(), rows, static_cast<std::size_t>(n), norms.data());
}

constexpr std::size_t kChunk = 2048;

struct Moments {
  double count = 0.0, mean = 0.0, m2 = 0.0;
  void merge(const Moments& o) {
    if (o.count == 0.0) return;
    const double tot = count + o.count, delta = o.mean - mean;
    mean += delta * o.count / tot;
    m2 += o.m2 + delta * delta * count * o.count / tot;
    count = tot;
  }
  static Moments of(const double* v, std::size_t len, std::size_t stride) {
    Moments m;
    m.count = static_cast<double>(len);
    double s = 0.0;
    for (std::size_t i = 0; i < len; ++i) s += v[i * stride];
    m.mean = s / m.count;
    for (std::size_t i = 0; i < len; ++i) {
      const double d = v[i * stride] - m.mean;
      m.m2 += d * d;
    }
    return m;
  }
  McEstimate estimate(double area) const {
    McEstimate e;
    e.samples = static_cast<std::size_t>(count);
    e.estimate = area * mean;
    e.std_error = count > 1.0 ? area * std::sqrt(m2 / (count - 1.0) / count) : 0.0;
    return e;
  }
};

std::size_t chunk_count(std::size_t samples) { return (samples + kChunk - 1) / kChunk; }

}  // namespace

void sphere_directions(int n, std::uint64_t seed, std::size_t chunk, std::size_t rows, std::vector<double>& out) {
  std::vector<double> norms;
  draw_directions(n, seed, chunk, rows, out, norms);
}

McEstimate mc_sphere_integral(const std::function<double(const double*)>& integrand, int n, std::size_t samples,
                              std::uint64_t seed) {
  if (samples < 1000) fail(Errc::invalid_argument, "mc_sphere_integral: need at least 1000 samples");
  const std::size_t chunks = chunk_count(samples);
  std::vector<Moments> parts(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t rows = std::min(kChunk, samples - c * kChunk);
    std::vector<double> pts, norms, vals(rows);
    draw_directions(n, seed, c, rows, pts, norms);
    for (std::size_t s = 0; s < rows; ++s) {
      const double* x = pts.data() + s * n;
      const double v = integrand(x);
      if (!std::isfinite(v)) {
        std::ostringstream os;
        os << "mc_sphere_integral: non-finite integrand at (";
        for (int i = 0; i < n; ++i) os << (i ? ", " : "") << x[i];
        os << ")";
        fail(Errc::non_finite, os.str());
      }
      vals[s] = v;
    }
    parts[c] = Moments::of(vals.data(), rows, 1);
  });
  Moments total;
  for (const auto& p : parts) total.merge(p);
  return total.estimate(sphere_area(n));
}

SphereMcReport mc_identities(const TensorField& t, const std::vector<std::pair<int, int>>& pairs, double r,
                             std::size_t samples, std::uint64_t seed) {
  if (samples < 1000) fail(Errc::invalid_argument, "mc_identities: need at least 1000 samples");
  const WeylForm& w = t.weyl();
  const int n = w.n(), m = w.support();
  const std::size_t np = static_cast<std::size_t>(m) * (m + 1) / 2;
  std::vector<int> hidx(static_cast<std::size_t>(m) * m);
  {
    int c = 0;
    for (int i = 0; i < m; ++i)
      for (int k = i; k < m; ++k) {
        hidx[static_cast<std::size_t>(i) * m + k] = c;
        hidx[static_cast<std::size_t>(k) * m + i] = c;
        ++c;
      }
  }
  // reduced pair-space map: H_(ik) = sum_(a<=b) z_(ab) Mred[(ab), (ik)]
  std::vector<double> Mred(np * np), wsq(np);
  {
    std::size_t row = 0;
    for (int a = 0; a < m; ++a)
      for (int b = a; b < m; ++b, ++row)
        for (int i = 0; i < m; ++i)
          for (int k = i; k < m; ++k)
            Mred[row * np + hidx[static_cast<std::size_t>(i) * m + k]] =
                t.at(i, a, k, b) + (a != b ? t.at(i, b, k, a) : 0.0);
    for (int i = 0; i < m; ++i)
      for (int k = i; k < m; ++k) wsq[hidx[static_cast<std::size_t>(i) * m + k]] = i == k ? 1.0 : 2.0;
  }
  const DirectionalMoments dm = directional_moments(w);
  std::vector<double> G(static_cast<std::size_t>(m) * m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) G[static_cast<std::size_t>(a) * m + b] = dm.G(a, b);

  const double s = r * r, f = t.f(s), fp = t.f_prime(s);
  const double r1 = std::pow(r, n + 1), r3 = std::pow(r, n + 3), r5 = std::pow(r, n + 5);
  const double mix = 8.0 * f * fp + 4.0 * s * fp * fp;
  const std::size_t P = pairs.size();
  const std::size_t targets = 4 * P + 1;

  const std::size_t chunks = chunk_count(samples);
  std::vector<std::vector<Moments>> parts(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t rows = std::min(kChunk, samples - c * kChunk);
    std::vector<double> pts, norms;
    draw_directions(n, seed, c, rows, pts, norms);
    std::vector<double> om(rows * m), Z(rows * np), Hv(rows * np), Y(rows * m), grad(rows), hsq(rows);
    for (std::size_t q = 0; q < rows; ++q) {
      const double* x = pts.data() + q * n;
      for (int a = 0; a < m; ++a) om[q * m + a] = x[a];
      std::size_t col = 0;
      for (int a = 0; a < m; ++a)
        for (int b = a; b < m; ++b) Z[q * np + col++] = x[a] * x[b];
    }
    simd::gemm(rows, np, np, Z.data(), np, Mred.data(), np, Hv.data(), np);
    simd::gemm(rows, m, m, om.data(), m, G.data(), m, Y.data(), m);
    simd::row_dots(om.data(), Y.data(), rows, m, grad.data());
    simd::row_wsq(Hv.data(), wsq.data(), rows, np, hsq.data());
    std::vector<double> vals(rows * targets);
    for (std::size_t q = 0; q < rows; ++q) {
      const double* x = pts.data() + q * n;
      const double* hv = Hv.data() + q * np;
      double* out = vals.data() + q * targets;
      for (std::size_t k = 0; k < P; ++k) {
        const int pp = pairs[k].first, qq = pairs[k].second;
        const double wpq = x[pp] * x[qq];
        out[k] = grad[q] * wpq * r3;
        out[P + k] = hsq[q] * wpq * r5;
        out[2 * P + k] = (f * f * grad[q] * r3 + mix * hsq[q] * r5) * wpq;
        double hh = 0.0;
        if (pp < m && qq < m)
          for (int l = 0; l < m; ++l)
            hh += hv[hidx[static_cast<std::size_t>(pp) * m + l]] * hv[hidx[static_cast<std::size_t>(qq) * m + l]];
        out[3 * P + k] = f * f * r3 * hh;
      }
      out[4 * P] = f * f * grad[q] * r1 + mix * hsq[q] * r3;
    }
    parts[c].resize(targets);
    for (std::size_t k = 0; k < targets; ++k) parts[c][k] = Moments::of(vals.data() + k, rows, targets);
  });
  std::vector<Moments> total(targets);
  for (const auto& p : parts)
    for (std::size_t k = 0; k < targets; ++k) total[k].merge(p[k]);
  const double area = sphere_area(n);
  SphereMcReport rep;
  rep.pairs = pairs;
  rep.r = r;
  for (std::size_t k = 0; k < P; ++k) {
    rep.identity1_grad.push_back(total[k].estimate(area));
    rep.identity1_value.push_back(total[P + k].estimate(area));
    rep.identity2.push_back(total[2 * P + k].estimate(area));
    rep.hbar_pair.push_back(total[3 * P + k].estimate(area));
  }
  rep.identity3 = total[4 * P].estimate(area);
  return rep;
}

}  // namespace ybl
