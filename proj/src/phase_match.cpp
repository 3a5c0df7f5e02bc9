#include "freqent/phase_match.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "freqent/errors.hpp"

namespace freqent {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kSignalBracketRad = 10.0 * kDeg;
constexpr double kAngleTolRad = 1e-10;
constexpr double kIdlerBracketRad = 0.5;
constexpr double kIntersectionTolDeg = 1e-6;

void check_wavelength(double lambda_um) {
  if (!(lambda_um >= kMinWavelengthUm && lambda_um <= kMaxWavelengthUm))
    throw Error(ErrorKind::OutOfRange, "wavelength outside the dispersion window");
}

double wavenumber(double freq_thz, double index) {
  return 2.0 * std::numbers::pi * freq_thz * index / kSpeedOfLightUmThz;
}

double extraordinary_index(double n_o, double n_e, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  if (s == 0.0) return n_o;
  return 1.0 / std::sqrt(c * c / (n_o * n_o) + s * s / (n_e * n_e));
}

// Refractive indices for one photon, with the extraordinary one still
// depending on the internal emission angle.
struct PhotonIndex {
  double n_o;
  double n_e;
  bool extraordinary;
  double axis_offset;  // cut angle in radians; e-photons propagate at cut + theta

  double at(double theta) const {
    return extraordinary ? extraordinary_index(n_o, n_e, axis_offset + theta) : n_o;
  }
};

template <typename Fn>
double bisect(Fn&& f, double lo, double hi, double tol) {
  double f_lo = f(lo);
  for (int i = 0; i < 200 && hi - lo > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = f(mid);
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Four-point Lagrange interpolation through samples[first .. first+3] (or
// fewer when the curve is short).
double interpolate(const std::vector<EmissionSample>& s, std::size_t first,
                   std::size_t count, double f) {
  double sum = 0.0;
  for (std::size_t i = first; i < first + count; ++i) {
    double w = 1.0;
    for (std::size_t j = first; j < first + count; ++j)
      if (j != i)
        w *= (f - s[j].frequency_thz) / (s[i].frequency_thz - s[j].frequency_thz);
    sum += w * s[i].outside_angle_deg;
  }
  return sum;
}

}  // namespace

double SellmeierCoefficients::index(double lambda_um) const {
  const double l2 = lambda_um * lambda_um;
  return std::sqrt(a + b / (l2 - c) - d * l2);
}

SellmeierSet bbo_eimerl() {
  return {{2.7359, 0.01878, 0.01822, 0.01354},
          {2.3753, 0.01224, 0.01667, 0.01516},
          "beta-BBO, Eimerl et al., J. Appl. Phys. 62, 1968 (1987)"};
}

void CrystalConfig::validate() const {
  if (!(cut_angle_deg > 0.0 && cut_angle_deg < 90.0))
    throw Error(ErrorKind::InvalidArgument, "cut angle must lie in (0, 90) degrees");
  if (!(pump_frequency_thz > 0.0) || !std::isfinite(pump_frequency_thz))
    throw Error(ErrorKind::InvalidArgument, "pump frequency must be positive");
}

double n_ordinary(double lambda_um, const SellmeierSet& s) {
  check_wavelength(lambda_um);
  return s.ordinary.index(lambda_um);
}

double n_extraordinary_principal(double lambda_um, const SellmeierSet& s) {
  check_wavelength(lambda_um);
  return s.extraordinary.index(lambda_um);
}

double n_extraordinary(double lambda_um, double theta_rad, const SellmeierSet& s) {
  if (!(theta_rad >= 0.0 && theta_rad <= std::numbers::pi / 2))
    throw Error(ErrorKind::InvalidArgument, "propagation angle outside [0, pi/2]");
  return extraordinary_index(n_ordinary(lambda_um, s),
                             n_extraordinary_principal(lambda_um, s), theta_rad);
}

std::optional<EmissionPoint> solve_emission(const CrystalConfig& cfg,
                                            double signal_frequency_thz, Ray ray) {
  cfg.validate();
  const double fp = cfg.pump_frequency_thz;
  const double fs = signal_frequency_thz;
  const double fi = fp - fs;
  if (!(fs > 0.0 && fi > 0.0)) return std::nullopt;

  const double lp = kSpeedOfLightUmThz / fp;
  const double ls = kSpeedOfLightUmThz / fs;
  const double li = kSpeedOfLightUmThz / fi;
  for (double l : {lp, ls, li})
    if (!(l >= kMinWavelengthUm && l <= kMaxWavelengthUm)) return std::nullopt;

  const auto& sm = cfg.sellmeier;
  const double cut = cfg.cut_angle_deg * kDeg;
  const double kp = wavenumber(
      fp, extraordinary_index(sm.ordinary.index(lp), sm.extraordinary.index(lp), cut));

  const bool signal_e = ray == Ray::Extraordinary;
  const PhotonIndex signal{sm.ordinary.index(ls), sm.extraordinary.index(ls), signal_e, cut};
  const PhotonIndex idler{sm.ordinary.index(li), sm.extraordinary.index(li), !signal_e, cut};

  auto k_signal = [&](double t) { return wavenumber(fs, signal.at(t)); };
  auto k_idler = [&](double t) { return wavenumber(fi, idler.at(t)); };

  // Transverse momentum fixes the idler angle for a given signal angle;
  // k_i(t) sin t is monotone on the bracket.
  auto idler_angle = [&](double ts) {
    const double target = k_signal(ts) * std::sin(ts);
    if (target == 0.0) return 0.0;
    auto g = [&](double ti) { return k_idler(ti) * std::sin(ti) - target; };
    if (g(kIdlerBracketRad) < 0.0) return std::numeric_limits<double>::quiet_NaN();
    return bisect(g, 0.0, kIdlerBracketRad, 1e-15);
  };
  auto mismatch = [&](double ts) {
    const double ti = idler_angle(ts);
    return k_signal(ts) * std::cos(ts) + k_idler(ti) * std::cos(ti) - kp;
  };

  const double f_lo = mismatch(0.0);
  const double f_hi = mismatch(kSignalBracketRad);
  if (!std::isfinite(f_lo) || !std::isfinite(f_hi)) return std::nullopt;
  if ((f_lo < 0.0) == (f_hi < 0.0) && f_lo != 0.0) return std::nullopt;

  const double ts = f_lo == 0.0 ? 0.0 : bisect(mismatch, 0.0, kSignalBracketRad, kAngleTolRad);
  const double ti = idler_angle(ts);
  if (!std::isfinite(ti)) return std::nullopt;

  const double sin_out = signal.at(ts) * std::sin(ts);
  if (sin_out > 1.0) return std::nullopt;

  EmissionPoint p{};
  p.signal_frequency_thz = fs;
  p.idler_frequency_thz = fi;
  p.signal_internal_rad = ts;
  p.idler_internal_rad = ti;
  p.outside_angle_deg = std::asin(sin_out) / kDeg;
  p.longitudinal_residual = std::abs(mismatch(ts)) / kp;
  p.transverse_residual =
      std::abs(k_signal(ts) * std::sin(ts) - k_idler(ti) * std::sin(ti)) / kp;
  return p;
}

std::pair<EmissionCurve, EmissionCurve> emission_curves(const CrystalConfig& cfg,
                                                        double freq_lo_thz,
                                                        double freq_hi_thz,
                                                        int n_points) {
  cfg.validate();
  const double fp = cfg.pump_frequency_thz;
  if (n_points < 2)
    throw Error(ErrorKind::InvalidArgument, "need at least two frequency samples");
  if (!(freq_lo_thz < freq_hi_thz) || freq_lo_thz < fp / 4.0 ||
      freq_hi_thz > 3.0 * fp / 4.0)
    throw Error(ErrorKind::InvalidArgument,
                "frequency window must be increasing and inside [pump/4, 3 pump/4]");

  EmissionCurve o_curve{Ray::Ordinary, {}, 0};
  EmissionCurve e_curve{Ray::Extraordinary, {}, 0};
  for (EmissionCurve* curve : {&o_curve, &e_curve}) {
    curve->samples.reserve(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i) {
      const double f =
          freq_lo_thz + (freq_hi_thz - freq_lo_thz) * i / static_cast<double>(n_points - 1);
      if (auto p = solve_emission(cfg, f, curve->ray))
        curve->samples.push_back({f, p->outside_angle_deg});
      else
        ++curve->omitted;
    }
  }
  if (o_curve.samples.empty() && e_curve.samples.empty())
    throw Error(ErrorKind::NoSolution, "no emission point solvable in the window");
  return {std::move(o_curve), std::move(e_curve)};
}

IntersectionResult find_intersection(const EmissionCurve& o_curve,
                                     const EmissionCurve& e_curve) {
  // Pair up the samples taken at the same frequency.
  std::vector<EmissionSample> o, e;
  std::size_t j = 0;
  for (const auto& so : o_curve.samples) {
    while (j < e_curve.samples.size() &&
           e_curve.samples[j].frequency_thz < so.frequency_thz - 1e-9)
      ++j;
    if (j < e_curve.samples.size() &&
        std::abs(e_curve.samples[j].frequency_thz - so.frequency_thz) <= 1e-9) {
      o.push_back(so);
      e.push_back(e_curve.samples[j]);
    }
  }

  IntersectionResult result;
  for (std::size_t i = 0; i + 1 < o.size(); ++i) {
    const double d0 = o[i].outside_angle_deg - e[i].outside_angle_deg;
    const double d1 = o[i + 1].outside_angle_deg - e[i + 1].outside_angle_deg;
    if (d0 == 0.0) {
      return {true, o[i].frequency_thz, o[i].outside_angle_deg, 0.0};
    }
    if ((d0 < 0.0) == (d1 < 0.0)) continue;

    const std::size_t count = std::min<std::size_t>(4, o.size());
    const std::size_t first = std::clamp<std::ptrdiff_t>(
        static_cast<std::ptrdiff_t>(i) - 1, 0,
        static_cast<std::ptrdiff_t>(o.size() - count));
    auto diff = [&](double f) {
      return interpolate(o, first, count, f) - interpolate(e, first, count, f);
    };
    double lo = o[i].frequency_thz;
    double hi = o[i + 1].frequency_thz;
    double f_lo = d0;
    double mid = 0.5 * (lo + hi);
    double d_mid = diff(mid);
    for (int it = 0; it < 200 && std::abs(d_mid) >= kIntersectionTolDeg; ++it) {
      if ((d_mid < 0.0) == (f_lo < 0.0)) {
        lo = mid;
        f_lo = d_mid;
      } else {
        hi = mid;
      }
      mid = 0.5 * (lo + hi);
      d_mid = diff(mid);
    }
    result.exists = true;
    result.frequency_thz = mid;
    result.outside_angle_deg = interpolate(o, first, count, mid);
    result.residual_deg = std::abs(d_mid);
    return result;
  }
  return result;
}

double bandwidth_error(double delta_f_thz, int l, double f_rot_thz) {
  if (l < 1) throw Error(ErrorKind::InvalidArgument, "topological charge must be >= 1");
  if (!(f_rot_thz > 0.0))
    throw Error(ErrorKind::InvalidArgument, "rotation frequency must be positive");
  if (!(delta_f_thz >= 0.0))
    throw Error(ErrorKind::InvalidArgument, "bandwidth must be non-negative");
  return delta_f_thz / (2.0 * l * f_rot_thz);
}

}  // namespace freqent
