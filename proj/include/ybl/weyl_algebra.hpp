#pragma once

#include <Eigen/Dense>
#include "json.hpp"

#include <cstdint>
#include <memory>
#include <vector>

#include "ybl/exact_certificates.hpp"

namespace ybl {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Rank-4 form with the algebraic symmetries of a Weyl tensor. Entries are
// scale * num / den with integer numerators; only representatives with
// i < j, k < l, (i,j) <= (k,l) are stored. Indices >= support are zero.
class WeylForm {
 public:
  WeylForm() = default;
  WeylForm(int n, int support, double scale, std::int64_t den, std::vector<std::int64_t> canonical);

  int n() const { return n_; }
  int support() const { return m_; }
  double scale() const { return scale_; }
  std::int64_t den() const { return den_; }
  const std::vector<std::int64_t>& canonical() const { return canon_; }

  std::int64_t numerator(int i, int j, int k, int l) const;
  double operator()(int i, int j, int k, int l) const { return unit() * static_cast<double>(numerator(i, j, k, l)); }
  Rational exact(int i, int j, int k, int l) const;
  double unit() const { return scale_ / static_cast<double>(den_); }

  // row-major n^4 arrays, index ((i n + j) n + k) n + l
  std::vector<double> dense() const;
  std::vector<std::int64_t> dense_numerators() const;

  WeylForm rescaled(double scale) const;

 private:
  int pair_count() const { return m_ * (m_ - 1) / 2; }
  int pair_index(int i, int j) const;

  int n_ = 0, m_ = 0;
  double scale_ = 1.0;
  std::int64_t den_ = 1;
  std::vector<std::int64_t> canon_;
};

constexpr int kRawBits = 20;

// Weyl projection of a raw pair-symmetric tensor on R^m. raw holds a symmetric
// P x P matrix (P = m(m-1)/2) over pairs i<j in lexicographic order. Returns
// the dense m^4 integer tensor 6(m-1)(m-2) times the projection.
std::vector<std::int64_t> project_to_weyl(int m, const std::vector<std::int64_t>& raw);

struct SymmetryResiduals {
  std::int64_t antisymmetry = 0;
  std::int64_t pair_symmetry = 0;
  std::int64_t bianchi = 0;
  std::int64_t trace = 0;
  bool nondegenerate = false;
  bool exact_zero() const { return antisymmetry == 0 && pair_symmetry == 0 && bianchi == 0 && trace == 0; }
};

// Max absolute integer residual of each invariant over a dense m^4 tensor.
SymmetryResiduals symmetry_residuals(int m, const std::vector<std::int64_t>& dense);
SymmetryResiduals symmetry_residuals(const WeylForm& w);

// Returns false (and leaves out untouched) when the projection is degenerate.
bool weyl_from_raw(int n, int support, const std::vector<std::int64_t>& raw, double scale, WeylForm& out);

// Uniform dyadic raw entries on [-scale, scale], Weyl projection, resampled if
// degenerate. support = 0 means support = n.
WeylForm random_weyl(int n, std::uint64_t seed, double scale = 1.0, int support = 0);
// Rescaled so that sum (W_ijkl + W_ilkj)^2 = 1.
WeylForm normalized(const WeylForm& w);

struct QuarticContractions {
  Mat Q;
  double S = 0.0;
};

QuarticContractions weyl_quartic_contractions(const WeylForm& w);

// Integer numerators of Q and S (true value = numerator * unit()^2).
struct ExactQuartic {
  std::vector<__int128> Q;  // n x n row-major
  __int128 S = 0;
  __int128 trace() const;
};

ExactQuartic exact_quartic_contractions(const WeylForm& w);

double eval_f(double tau, double s);
double eval_f_prime(double tau, double s);
double eval_f_second(double s);

// W together with tau; caches the dense entries for evaluation.
class TensorField {
 public:
  TensorField(std::shared_ptr<const WeylForm> w, double tau);

  const WeylForm& weyl() const { return *w_; }
  std::shared_ptr<const WeylForm> weyl_ptr() const { return w_; }
  int n() const { return n_; }
  double tau() const { return tau_; }
  const std::vector<double>& dense() const { return *dense_; }
  double at(int i, int j, int k, int l) const { return (*dense_)[((static_cast<std::size_t>(i) * n_ + j) * n_ + k) * n_ + l]; }

  // H_ik(x) = sum W_ipkq x_p x_q
  Mat H(const Vec& x) const;
  // d[l](i,k) = d_l H_ik(x) = sum_q (W_ilkq + W_iqkl) x_q
  std::vector<Mat> dH(const Vec& x) const;
  // d_j d_l H_ik = W_ijkl + W_ilkj (constant)
  double ddH(int i, int k, int j, int l) const { return at(i, j, k, l) + at(i, l, k, j); }
  // sum_i d_i H_ik(x)
  Vec divergence(const Vec& x) const;

  double f(double s) const { return eval_f(tau_, s); }
  double f_prime(double s) const { return eval_f_prime(tau_, s); }

  // f(|x|^2) H(x)
  Mat Hbar(const Vec& x) const;
  // mu lambda^6 f(|x|^2 / lambda^2) H(x)
  Mat Hbar(const Vec& x, double lambda, double mu) const;

 private:
  std::shared_ptr<const WeylForm> w_;
  std::shared_ptr<const std::vector<double>> dense_;
  int n_ = 0;
  double tau_ = 0.0;
};

Mat eval_H(const TensorField& t, const Vec& x);
Mat eval_Hbar(const TensorField& t, const Vec& x, double lambda, double mu);

// Exact H(x) for rational x; row-major n x n.
std::vector<Rational> eval_H_exact(const WeylForm& w, const std::vector<Rational>& x);
// Exact divergence numerators for integer x: sum_i d_i H_ik, scaled by 1/unit().
std::vector<std::int64_t> divergence_numerators(const WeylForm& w, const std::vector<std::int64_t>& x);

void to_json(nlohmann::json& j, const WeylForm& w);
WeylForm weyl_from_json(const nlohmann::json& j);

}  // namespace ybl
