// Two-photon hybrid state algebra: polarization / SAM / OAM / frequency labels
// and the fixed optical elements of the generation pipeline
// (SPDC -> QWP -> rotating q-plate -> QWP^-1 + polarizer -> delay + BS).
#pragma once

#include <complex>
#include <string>
#include <vector>

namespace freqent {

enum class Pol { None, H, V };
enum class Sam { None, Plus, Minus };
enum class Mode { Source, A, B };

// Detunings closer than this (rad/s) are treated as the same frequency label.
inline constexpr double kDetuningTolerance = 1e-6;

struct PhotonLabel {
  Pol pol = Pol::None;
  Sam sam = Sam::None;
  int oam = 0;            // topological charge
  double detuning = 0.0;  // rad/s, offset from the degenerate center frequency
  Mode mode = Mode::Source;

  bool same_as(const PhotonLabel& other) const noexcept;
};

struct ProductTerm {
  std::complex<double> amplitude;
  PhotonLabel photon1;
  PhotonLabel photon2;
};

class TwoPhotonState {
 public:
  // Merges duplicate label pairs, drops vanishing terms and normalizes.
  // Throws Error(EmptyState) when nothing survives.
  TwoPhotonState(std::vector<ProductTerm> terms, double center_frequency);

  const std::vector<ProductTerm>& terms() const noexcept { return terms_; }
  double center_frequency() const noexcept { return center_frequency_; }
  double norm_squared() const noexcept;

  // Swaps photon1 and photon2 in every term.
  TwoPhotonState exchanged() const;

  std::string describe() const;

 private:
  std::vector<ProductTerm> terms_;
  double center_frequency_;
};

enum class QwpDirection { Forward, Inverse };

// (1/sqrt2)(|H>|V> + |V>|H>)|w>
TwoPhotonState new_spdc_state(double center_frequency);

// Forward: H -> sigma+, V -> sigma-. Inverse undoes it.
TwoPhotonState apply_qwp(const TwoPhotonState& state,
                         QwpDirection direction = QwpDirection::Forward);

// Rotating q-plate imparting OAM magnitude l while spinning at omega_rot:
// (sigma+, m, nu) -> (sigma-, m + l, nu + l*Omega)
// (sigma-, m, nu) -> (sigma+, m - l, nu - l*Omega)
TwoPhotonState apply_rotating_qplate(const TwoPhotonState& state, int l,
                                     double omega_rot);

// Removes the polarization labels and renormalizes.
TwoPhotonState apply_polarizer_projection(const TwoPhotonState& state);

// Post-selected coincidence branch after delaying by tau and a balanced beam
// splitter. photon1 leaves through port a, photon2 through port b, and each
// term picks up exp(i * w_a * tau) with w_a the absolute frequency at port a.
TwoPhotonState apply_delay_and_beamsplitter(const TwoPhotonState& state,
                                            double tau);

// Returns {psi_p, psi_s, psi_h, psi_o}.
std::vector<TwoPhotonState> run_pipeline(int l, double omega_rot,
                                         double center_frequency);

// <s1|s2> with identical label pairs treated as orthonormal basis vectors.
std::complex<double> state_overlap(const TwoPhotonState& s1,
                                   const TwoPhotonState& s2);

std::string to_string(const PhotonLabel& label);

}  // namespace freqent
