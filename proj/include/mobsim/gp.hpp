#pragma once

#include <vector>

namespace mobsim {

// Matern-5/2 correlation with per-dimension length-scales:
// (1 + sqrt(5) r + 5 r^2 / 3) exp(-sqrt(5) r), r = ||(a - b) / ell||.
double matern52(const std::vector<double>& a, const std::vector<double>& b,
                const std::vector<double>& ell);

// Zero-mean, unit-variance GP prior over [0,1]^D with a Matern-5/2
// kernel. Targets are standardized internally before fitting (toggle for
// oracle comparisons); posteriors are reported on the original scale.
class GaussianProcess {
 public:
  explicit GaussianProcess(int dim);

  void add(const std::vector<double>& x, double f);
  int size() const { return static_cast<int>(f_.size()); }
  int dim() const { return dim_; }

  // (mu, sigma); sigma clamped at 0 against round-off.
  std::pair<double, double> posterior(const std::vector<double>& x) const;

  double log_marginal_likelihood() const;
  // One coordinate-wise sweep over a coarse length-scale grid.
  void fit_lengthscales();

  void set_lengthscales(std::vector<double> ell);
  const std::vector<double>& lengthscales() const { return ell_; }
  void set_jitter(double jitter);
  double jitter() const { return jitter_; }
  void set_standardize(bool on);

  const std::vector<std::vector<double>>& points() const { return x_; }
  const std::vector<double>& targets() const { return f_; }

 private:
  void refactor() const;

  int dim_;
  std::vector<std::vector<double>> x_;
  std::vector<double> f_;
  std::vector<double> ell_;
  double jitter_ = 1e-8;
  bool standardize_ = true;
  int adds_since_fit_ = 0;

  // Factorization cache, rebuilt lazily.
  mutable bool dirty_ = true;
  mutable std::vector<double> chol_;   // row-major lower Cholesky factor
  mutable std::vector<double> alpha_;  // K^{ -1} z
  mutable double f_mean_ = 0.0;
  mutable double f_scale_ = 1.0;
};

}  // namespace mobsim
