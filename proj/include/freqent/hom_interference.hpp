// Hong-Ou-Mandel coincidence probability for the polarization-entangled pair
// (Gaussian dip) and for the rotationally shifted pair (beating dip), plus an
// independent quadrature route through the spectral overlap integral.
#pragma once

#include <Eigen/Core>
#include <vector>

namespace freqent {

enum class HomMethod { Closed, Numeric };

struct HomConfig {
  double tau_c = 1e-12;     // s
  int l = 0;
  double omega_rot = 0.0;   // rad/s
  std::vector<double> tau_grid;  // s

  void validate() const;
};

struct HomSample {
  double tau;
  double p;
};

struct HomTrace {
  std::vector<HomSample> samples;
  // True when the grid leaves |tau| < tau_c / 2, where the beating closed form
  // is nominally derived. Values there are still computed.
  bool beyond_validity_window = false;
};

// Normalized single-photon spectral amplitude along the antidiagonal,
// phi(x) = (2 tau_c^2 / pi)^(1/4) exp(-tau_c^2 (x - center)^2), x in rad/s.
struct GaussianAmplitude {
  double center = 0.0;
  double tau_c = 1e-12;

  double operator()(double x) const;
  double intensity_sigma() const { return 1.0 / (2.0 * tau_c); }
};

// The two rotational-Doppler branch amplitudes, centred at -l Omega and
// +l Omega.
struct BranchSpectra {
  GaussianAmplitude lower;
  GaussianAmplitude upper;

  static BranchSpectra shifted(double tau_c, int l, double omega_rot);
};

double coincidence_plain(double tau, double tau_c);
double coincidence_rde(double tau, double tau_c, int l, double omega_rot);

// Adaptive Gauss-Kronrod evaluation of
//   P = 1/2 - 1/4 Re[ int f_lo*(-x) f_up(x) e^{2ix tau} dx
//                    + int f_up*(-x) f_lo(x) e^{2ix tau} dx ]
// over +-8 spectral standard deviations. Throws Error(NumericalFailure)
// when the error estimate exceeds 1e-9.
double coincidence_numeric(double tau, const BranchSpectra& spectra);

HomTrace hom_trace(const HomConfig& cfg, HomMethod method);

struct Observability {
  bool visible;
  double delta_omega_fwhm;  // rad/s
};

// Delta omega_FWHM = 2 sqrt(2 ln 2) / tau_c; visible when 2 l Omega exceeds it.
Observability observability(int l, double omega_rot, double tau_c);

// (baseline - p_min) / baseline with the baseline taken as the largest p in
// the outer 5% of the delay range at each end, clipped to [0, 1].
double visibility(const HomTrace& trace);

// 2x2 density matrix in the {|w1>_a|w2>_b, |w2>_a|w1>_b} basis.
struct RestrictedDensityMatrix {
  Eigen::Matrix2cd rho;

  double trace() const { return rho.trace().real(); }
  double min_eigenvalue() const;
};

RestrictedDensityMatrix restricted_density_matrix(double visibility,
                                                  double population_imbalance);

}  // namespace freqent
