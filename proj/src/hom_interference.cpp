#include "freqent/hom_interference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "freqent/errors.hpp"

namespace freqent {

namespace {

constexpr double kQuadratureTol = 1e-9;
constexpr double kWindowSigmas = 8.0;

void check_tau_c(double tau_c) {
  if (!(tau_c > 0.0) || !std::isfinite(tau_c))
    throw Error(ErrorKind::InvalidArgument, "tau_c must be positive");
}

// Re int a(-x) b(x) cos(2 x tau) dx for real Gaussian amplitudes, integrated
// in the dimensionless variable u = x * tau_c.
double exchange_overlap(const GaussianAmplitude& a, const GaussianAmplitude& b,
                        double tau) {
  const double scale = std::min(a.tau_c, b.tau_c);
  // a(-x) is centred at -a.center; with equal widths the product is a
  // Gaussian centred halfway between.
  const double center = 0.5 * (b.center - a.center) * scale;
  const double half =
      kWindowSigmas * std::max(a.intensity_sigma(), b.intensity_sigma()) * scale;
  auto integrand = [&](double u) {
    const double x = u / scale;
    return a(-x) * b(x) * std::cos(2.0 * x * tau) / scale;
  };
  double error = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, center - half, center + half, 20, kQuadratureTol, &error);
  if (!std::isfinite(value) || error > kQuadratureTol)
    throw Error(ErrorKind::NumericalFailure, "HOM overlap quadrature did not converge");
  return value;
}

}  // namespace

void HomConfig::validate() const {
  check_tau_c(tau_c);
  if (l < 0) throw Error(ErrorKind::InvalidArgument, "l must be >= 0");
  if (!std::isfinite(omega_rot))
    throw Error(ErrorKind::InvalidArgument, "rotation rate must be finite");
  for (double t : tau_grid)
    if (!std::isfinite(t)) throw Error(ErrorKind::InvalidArgument, "delay must be finite");
}

double GaussianAmplitude::operator()(double x) const {
  const double norm = std::pow(2.0 * tau_c * tau_c / std::numbers::pi, 0.25);
  const double d = x - center;
  return norm * std::exp(-tau_c * tau_c * d * d);
}

BranchSpectra BranchSpectra::shifted(double tau_c, int l, double omega_rot) {
  const double d = l * omega_rot;
  return {{-d, tau_c}, {d, tau_c}};
}

double coincidence_plain(double tau, double tau_c) {
  check_tau_c(tau_c);
  return 0.5 - 0.5 * std::exp(-tau * tau / (2.0 * tau_c * tau_c));
}

double coincidence_rde(double tau, double tau_c, int l, double omega_rot) {
  check_tau_c(tau_c);
  if (l < 0) throw Error(ErrorKind::InvalidArgument, "l must be >= 0");
  return 0.5 - 0.5 * std::cos(2.0 * l * omega_rot * tau) *
                   std::exp(-tau * tau / (2.0 * tau_c * tau_c));
}

double coincidence_numeric(double tau, const BranchSpectra& spectra) {
  check_tau_c(spectra.lower.tau_c);
  check_tau_c(spectra.upper.tau_c);
  const double t12 = exchange_overlap(spectra.lower, spectra.upper, tau);
  const double t21 = exchange_overlap(spectra.upper, spectra.lower, tau);
  return 0.5 - 0.25 * (t12 + t21);
}

HomTrace hom_trace(const HomConfig& cfg, HomMethod method) {
  cfg.validate();
  HomTrace trace;
  trace.samples.reserve(cfg.tau_grid.size());
  const auto spectra = BranchSpectra::shifted(cfg.tau_c, cfg.l, cfg.omega_rot);
  for (double tau : cfg.tau_grid) {
    const double p = method == HomMethod::Closed
                         ? coincidence_rde(tau, cfg.tau_c, cfg.l, cfg.omega_rot)
                         : coincidence_numeric(tau, spectra);
    trace.samples.push_back({tau, p});
    if (std::abs(tau) >= 0.5 * cfg.tau_c) trace.beyond_validity_window = true;
  }
  return trace;
}

Observability observability(int l, double omega_rot, double tau_c) {
  check_tau_c(tau_c);
  const double fwhm = 2.0 * std::sqrt(2.0 * std::numbers::ln2) / tau_c;
  return {2.0 * l * omega_rot > fwhm, fwhm};
}

double visibility(const HomTrace& trace) {
  const auto& s = trace.samples;
  if (s.size() < 2) throw Error(ErrorKind::InvalidInput, "trace needs at least two samples");
  const auto [lo_it, hi_it] = std::minmax_element(
      s.begin(), s.end(), [](const HomSample& a, const HomSample& b) { return a.tau < b.tau; });
  const double t_lo = lo_it->tau;
  const double t_hi = hi_it->tau;
  const double edge = 0.05 * (t_hi - t_lo);

  double baseline = -std::numeric_limits<double>::infinity();
  double p_min = std::numeric_limits<double>::infinity();
  for (const auto& x : s) {
    p_min = std::min(p_min, x.p);
    if (x.tau <= t_lo + edge || x.tau >= t_hi - edge) baseline = std::max(baseline, x.p);
  }
  if (!(baseline > 0.0)) throw Error(ErrorKind::InvalidInput, "trace baseline is zero");
  return std::clamp((baseline - p_min) / baseline, 0.0, 1.0);
}

double RestrictedDensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> solver(rho, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

RestrictedDensityMatrix restricted_density_matrix(double visibility,
                                                  double population_imbalance) {
  if (!(visibility >= 0.0 && visibility <= 1.0))
    throw Error(ErrorKind::InvalidArgument, "visibility must lie in [0, 1]");
  if (!(population_imbalance >= -1.0 && population_imbalance <= 1.0))
    throw Error(ErrorKind::InvalidArgument, "population imbalance must lie in [-1, 1]");
  const double r11 = 0.5 * (1.0 + population_imbalance);
  const double r22 = 0.5 * (1.0 - population_imbalance);
  const double coherence = visibility * std::sqrt(r11 * r22);
  RestrictedDensityMatrix out;
  out.rho << r11, coherence, coherence, r22;
  return out;
}

}  // namespace freqent
