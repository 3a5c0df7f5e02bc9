// Inverse problem: recover the beat frequency 2 l Omega, the envelope width
// tau_c and the dip visibility from a measured or synthesized HOM trace.
//
// Only the product 2 l Omega is identifiable; splitting it into l and Omega
// needs l from elsewhere.
#pragma once

#include <cstdint>
#include <vector>

#include "freqent/hom_interference.hpp"

namespace freqent {

inline constexpr int kMinFitSamples = 32;
// Visibilities below this leave tau_c and the beat unidentifiable.
inline constexpr double kMinVisibility = 1e-3;

struct NoisyTrace {
  std::vector<HomSample> samples;  // p may leave [0, 1] under noise
  double noise_sigma = 0.0;
  std::uint64_t rng_seed = 0;

  // Throws Error(InvalidInput) unless delays strictly increase and there are
  // at least kMinFitSamples samples.
  void validate() const;
};

struct EnvelopeFit {
  double tau_c = 0.0;  // s
  double visibility = 0.0;
  bool converged = false;
  int iterations = 0;
};

struct BeatEstimate {
  double beat = 0.0;  // rad/s, zero when below resolution
  bool below_resolution = false;
};

struct EstimateResult {
  double beat = 0.0;       // rad/s, estimate of 2 l Omega
  double tau_c_hat = 0.0;  // s
  double visibility_hat = 0.0;
  double rms_residual = 0.0;
  bool converged = false;
  int iterations = 0;
  bool below_resolution = false;
};

// Beats are resolvable when two full periods fit inside the +-2 tau_c
// envelope support, i.e. beat * tau_c >= pi.
bool beat_resolvable(double beat, double tau_c);

// Closed-form beating trace plus seeded additive Gaussian noise.
NoisyTrace synthesize_trace(const HomConfig& cfg, double noise_sigma, std::uint64_t seed);

// Fits 1/2 - (V/2) exp(-tau^2 / (2 tau_c^2)) to the lower envelope of the
// trace (per-lobe extrema of |p - 1/2| reflected below 1/2).
EnvelopeFit fit_envelope(const NoisyTrace& trace);

// Dominant angular frequency of (1/2 - p) exp(tau^2 / (2 tau_c^2)) from a
// Hann-windowed discrete Fourier scan, refined by quadratic interpolation of
// the spectral peak.
BeatEstimate extract_beat(const NoisyTrace& trace);
BeatEstimate extract_beat(const NoisyTrace& trace, double tau_c_hat);

// Envelope and beat initialization followed by a joint fit of
// 1/2 - (V/2) cos(beta tau) exp(-tau^2 / (2 tau_c^2)).
EstimateResult estimate(const NoisyTrace& trace);

}  // namespace freqent
