// Small dense nonlinear least squares: damped Gauss-Newton with Marquardt
// diagonal scaling. Parameters should be of order one; callers rescale.
#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cmath>

namespace freqent {

struct LsqOptions {
  int max_iterations = 200;
  double param_tolerance = 1e-10;  // relative step size
  double initial_damping = 1e-3;
};

template <int N>
struct LsqResult {
  Eigen::Matrix<double, N, 1> params;
  double cost = 0.0;  // 0.5 * sum r^2
  int iterations = 0;
  bool converged = false;
  bool singular = false;
};

// `model(params, residuals, jacobian)` fills residuals (m) and the m x N
// Jacobian d residual / d params.
template <int N, typename Model>
LsqResult<N> damped_gauss_newton(Model&& model, Eigen::Matrix<double, N, 1> x,
                                 const LsqOptions& opt = {}) {
  using Vec = Eigen::Matrix<double, N, 1>;
  using Mat = Eigen::Matrix<double, N, N>;
  Eigen::VectorXd r, r_try;
  Eigen::Matrix<double, Eigen::Dynamic, N> jac, jac_try;

  LsqResult<N> out;
  model(x, r, jac);
  double cost = 0.5 * r.squaredNorm();
  double lambda = opt.initial_damping;

  for (int it = 1; it <= opt.max_iterations; ++it) {
    out.iterations = it;
    const Mat h = jac.transpose() * jac;
    const Vec g = jac.transpose() * r;
    const Vec diag = h.diagonal();
    if ((diag.array() <= 0.0).any() || !diag.allFinite()) {
      out.singular = true;
      break;
    }

    bool accepted = false;
    Vec step = Vec::Zero();
    while (lambda < 1e16) {
      Mat damped = h;
      damped.diagonal() += lambda * diag;
      Eigen::LDLT<Mat> ldlt(damped);
      step = ldlt.solve(-g);
      if (ldlt.info() != Eigen::Success || !step.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      const Vec x_try = x + step;
      model(x_try, r_try, jac_try);
      const double cost_try = 0.5 * r_try.squaredNorm();
      if (std::isfinite(cost_try) && cost_try <= cost) {
        x = x_try;
        r.swap(r_try);
        jac.swap(jac_try);
        cost = cost_try;
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
        break;
      }
      lambda *= 4.0;
    }

    // Without an acceptable step the damping saturated: we sit at a
    // numerical minimum.
    if (!accepted) {
      out.converged = true;
      break;
    }
    const double rel = (step.array().abs() / (x.array().abs() + opt.param_tolerance)).maxCoeff();
    if (rel <= opt.param_tolerance || cost == 0.0) {
      out.converged = true;
      break;
    }
  }
  out.params = x;
  out.cost = cost;
  return out;
}

}  // namespace freqent
