#include "mobsim/gp.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mobsim {

double matern52(const std::vector<double>& a, const std::vector<double>& b,
                const std::vector<double>& ell) {
  double r2 = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    double d = (a[i] - b[i]) / ell[i];
    r2 += d * d;
  }
  double r = std::sqrt(r2);
  double s = std::sqrt(5.0) * r;
  return (1.0 + s + 5.0 * r2 / 3.0) * std::exp(-s);
}

GaussianProcess::GaussianProcess(int dim) : dim_(dim) {
  if (dim < 1) throw std::invalid_argument("GaussianProcess: dimension < 1");
  ell_.assign(static_cast<size_t>(dim), 0.5);
}

void GaussianProcess::add(const std::vector<double>& x, double f) {
  if (static_cast<int>(x.size()) != dim_)
    throw std::invalid_argument("GaussianProcess::add: dimension mismatch");
  x_.push_back(x);
  f_.push_back(f);
  dirty_ = true;
  if (++adds_since_fit_ >= 10) {
    fit_lengthscales();
    adds_since_fit_ = 0;
  }
}

void GaussianProcess::set_lengthscales(std::vector<double> ell) {
  if (static_cast<int>(ell.size()) != dim_)
    throw std::invalid_argument("GaussianProcess: length-scale dimension mismatch");
  for (double l : ell)
    if (!(l > 0.0)) throw std::invalid_argument("GaussianProcess: length-scale <= 0");
  ell_ = std::move(ell);
  dirty_ = true;
}

void GaussianProcess::set_jitter(double jitter) {
  if (jitter < 0.0) throw std::invalid_argument("GaussianProcess: negative jitter");
  jitter_ = jitter;
  dirty_ = true;
}

void GaussianProcess::set_standardize(bool on) {
  standardize_ = on;
  dirty_ = true;
}

void GaussianProcess::refactor() const {
  const int n = static_cast<int>(f_.size());
  f_mean_ = 0.0;
  f_scale_ = 1.0;
  if (standardize_ && n > 0) {
    for (double f : f_) f_mean_ += f;
    f_mean_ /= n;
    if (n > 1) {
      double var = 0.0;
      for (double f : f_) var += (f - f_mean_) * (f - f_mean_);
      var /= n;
      if (var > 1e-16) f_scale_ = std::sqrt(var);
    }
  }

  Eigen::MatrixXd K(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      double k = matern52(x_[static_cast<size_t>(i)], x_[static_cast<size_t>(j)], ell_);
      K(i, j) = k;
      K(j, i) = k;
    }
  K.diagonal().array() += jitter_;

  Eigen::LLT<Eigen::MatrixXd> llt(K);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error(
        "GaussianProcess: covariance not positive definite; increase jitter");

  Eigen::VectorXd z(n);
  for (int i = 0; i < n; ++i)
    z(i) = (f_[static_cast<size_t>(i)] - f_mean_) / f_scale_;
  Eigen::VectorXd a = llt.solve(z);

  chol_.assign(static_cast<size_t>(n) * n, 0.0);
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      chol_.data(), n, n) = llt.matrixL();
  alpha_.assign(a.data(), a.data() + n);
  dirty_ = false;
}

std::pair<double, double> GaussianProcess::posterior(const std::vector<double>& x) const {
  const int n = static_cast<int>(f_.size());
  if (n == 0) return {0.0, 1.0};
  if (dirty_) refactor();

  Eigen::VectorXd k(n);
  for (int i = 0; i < n; ++i) k(i) = matern52(x, x_[static_cast<size_t>(i)], ell_);

  double mu = 0.0;
  for (int i = 0; i < n; ++i) mu += k(i) * alpha_[static_cast<size_t>(i)];

  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      L(chol_.data(), n, n);
  Eigen::VectorXd v =
      L.triangularView<Eigen::Lower>().solve(k);
  double var = 1.0 - v.squaredNorm();
  double sigma = std::sqrt(std::max(var, 0.0));
  return {f_mean_ + f_scale_ * mu, f_scale_ * sigma};
}

double GaussianProcess::log_marginal_likelihood() const {
  const int n = static_cast<int>(f_.size());
  if (n == 0) return 0.0;
  if (dirty_) refactor();

  double quad = 0.0;
  for (int i = 0; i < n; ++i) {
    double z = (f_[static_cast<size_t>(i)] - f_mean_) / f_scale_;
    quad += z * alpha_[static_cast<size_t>(i)];
  }
  double logdet = 0.0;
  for (int i = 0; i < n; ++i)
    logdet += std::log(chol_[static_cast<size_t>(i) * n + i]);
  return -0.5 * quad - logdet - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

void GaussianProcess::fit_lengthscales() {
  if (f_.size() < 3) return;
  static constexpr double kGrid[] = {0.1, 0.2, 0.35, 0.5, 0.7, 1.0, 1.5, 2.0};

  for (int d = 0; d < dim_; ++d) {
    double best_l = ell_[static_cast<size_t>(d)];
    dirty_ = true;
    double best_lml = log_marginal_likelihood();
    for (double l : kGrid) {
      ell_[static_cast<size_t>(d)] = l;
      dirty_ = true;
      double lml;
      try {
        lml = log_marginal_likelihood();
      } catch (const std::runtime_error&) {
        continue;
      }
      if (lml > best_lml + 1e-12) {
        best_lml = lml;
        best_l = l;
      }
    }
    ell_[static_cast<size_t>(d)] = best_l;
    dirty_ = true;
  }
}

}  // namespace mobsim
