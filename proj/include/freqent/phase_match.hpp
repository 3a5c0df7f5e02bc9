// Type-II (e -> o + e) SPDC emission geometry in a negative uniaxial crystal.
//
// Conventions:
//  * wavelengths in micrometres, frequencies in THz (ordinary, not angular),
//    angles in degrees unless a name says otherwise;
//  * the optic axis lies in the emission plane, tilted by the cut angle from
//    the pump direction; the o-photon leaves on the optic-axis side of the
//    pump and its e-partner on the opposite side, so the e-photon propagates
//    at (cut + theta) to the axis;
//  * outside angles follow Snell refraction at an exit face normal to the pump.
#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace freqent {

inline constexpr double kSpeedOfLightUmThz = 299.792458;  // um * THz
inline constexpr double kMinWavelengthUm = 0.3;
inline constexpr double kMaxWavelengthUm = 1.5;

// n^2 = a + b / (lambda^2 - c) - d * lambda^2, lambda in um.
struct SellmeierCoefficients {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;

  double index(double lambda_um) const;
};

struct SellmeierSet {
  SellmeierCoefficients ordinary;
  SellmeierCoefficients extraordinary;  // principal index n_e
  std::string source;
};

// beta-BBO dispersion of Eimerl et al., J. Appl. Phys. 62, 1968 (1987).
SellmeierSet bbo_eimerl();

struct CrystalConfig {
  double cut_angle_deg = 45.0;
  double pump_frequency_thz = 740.88;
  SellmeierSet sellmeier = bbo_eimerl();

  void validate() const;
};

enum class Ray { Ordinary, Extraordinary };

struct EmissionSample {
  double frequency_thz;
  double outside_angle_deg;
};

struct EmissionCurve {
  Ray ray = Ray::Ordinary;
  std::vector<EmissionSample> samples;
  int omitted = 0;  // sampled frequencies without a physical solution
};

struct IntersectionResult {
  bool exists = false;
  double frequency_thz = 0.0;
  double outside_angle_deg = 0.0;
  double residual_deg = 0.0;
};

// One solved emission pair. `ray` names the polarization of the signal photon
// whose outside angle is reported.
struct EmissionPoint {
  double signal_frequency_thz;
  double idler_frequency_thz;
  double signal_internal_rad;  // measured from the pump axis
  double idler_internal_rad;
  double outside_angle_deg;
  double longitudinal_residual;  // relative to |k_p|
  double transverse_residual;    // relative to |k_p|
};

double n_ordinary(double lambda_um, const SellmeierSet& s);
double n_extraordinary_principal(double lambda_um, const SellmeierSet& s);
// Index of an extraordinary wave travelling at theta_rad to the optic axis.
double n_extraordinary(double lambda_um, double theta_rad, const SellmeierSet& s);

// nullopt when momentum conservation has no real solution in the bracketing
// window, the wavelengths leave the dispersion window, or the photon is
// trapped by total internal reflection.
std::optional<EmissionPoint> solve_emission(const CrystalConfig& cfg,
                                            double signal_frequency_thz, Ray ray);

// Returns {ordinary curve, extraordinary curve}.
std::pair<EmissionCurve, EmissionCurve> emission_curves(const CrystalConfig& cfg,
                                                        double freq_lo_thz,
                                                        double freq_hi_thz,
                                                        int n_points);

IntersectionResult find_intersection(const EmissionCurve& o_curve,
                                     const EmissionCurve& e_curve);

// Relative error of the rotational-Doppler frequency tag, df / (2 l f_rot).
double bandwidth_error(double delta_f_thz, int l, double f_rot_thz);

}  // namespace freqent
