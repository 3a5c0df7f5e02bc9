// Joint spectral amplitude F = Phi * rho with a Gaussian phase-matching
// function and a Gaussian pump, evaluated on detunings nu_k = w_k - w_bar
// (rad/s) from the degenerate per-photon center.
#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace freqent {

struct PumpSpectrum {
  double center = 0.0;  // rad/s; only used for reporting, values act on detunings
  double sigma = 1e12;  // rad/s
};

// Phi(nu1, nu2) = exp[-gamma (A nu1 + B nu2)^2] with A = -B.
class PhaseMatchGaussian {
 public:
  PhaseMatchGaussian(double gamma, double a_coef);

  // gamma = 0.1, A = -B = 0.7 / (sigma sqrt(2 gamma)).
  static PhaseMatchGaussian reference(double sigma);

  double gamma() const noexcept { return gamma_; }
  double a_coef() const noexcept { return a_; }
  double b_coef() const noexcept { return -a_; }

  double operator()(double nu1, double nu2) const;

 private:
  double gamma_;
  double a_;
};

struct RdeShift {
  int l = 0;
  double omega_rot = 0.0;  // rad/s

  double detuning() const noexcept { return l * omega_rot; }
};

struct JsaGrid {
  std::vector<double> axis1;   // rad/s
  std::vector<double> axis2;   // rad/s
  std::vector<double> values;  // row-major, values[i * axis2.size() + j]

  double at(std::size_t i, std::size_t j) const { return values[i * axis2.size() + j]; }
};

struct JsaPeak {
  double nu1;
  double nu2;
  double value;
};

double jsa_value(double nu1, double nu2, const PumpSpectrum& pump,
                 const PhaseMatchGaussian& pm);

// n x n grid over [-half_width, half_width]^2, normalized to a maximum of 1.
// With a shift, each point holds the larger of the two rotational-Doppler
// branch magnitudes Phi(nu1 +- l Omega, nu2 -+ l Omega) rho(nu1 + nu2).
JsaGrid jsa_grid(const PumpSpectrum& pump, const PhaseMatchGaussian& pm,
                 std::optional<RdeShift> shift, double half_width, int n);

// Local maxima above half the global maximum, largest first. Touching points
// of equal height count as one peak located at their centroid.
std::vector<JsaPeak> peak_locations(const JsaGrid& grid);

// Envelope width tau_c (s) of the HOM dip implied by the antidiagonal cut of
// Phi: tau_c = 2 sqrt(gamma) |A|.
double effective_coherence_time(const PhaseMatchGaussian& pm);

}  // namespace freqent
