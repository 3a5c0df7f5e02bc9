#include "freqent/rotation_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "freqent/errors.hpp"
#include "freqent/least_squares.hpp"

namespace freqent {

namespace {

constexpr double kPi = std::numbers::pi;
// Fraction of the peak |p - 1/2| a lobe must reach to count as a sign flip.
constexpr double kFlipFraction = 0.25;
// Without oscillation the envelope is sampled in this many windows.
constexpr int kDefaultWindows = 32;
// The beat scan uses delays within this many tau_c of the dip center.
constexpr double kBeatSupport = 2.5;

double median(std::vector<double> v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

struct EnvelopePoint {
  double tau;
  double depth;  // |p - 1/2| at the lobe extremum
};

// One extremum of |p - 1/2| per lobe. Lobes are delimited by hysteresis sign
// flips of p - 1/2; stretches without flips are cut into lobe-sized windows.
std::vector<EnvelopePoint> envelope_points(const std::vector<HomSample>& s) {
  const std::size_t n = s.size();
  std::vector<double> depth(n);
  double peak = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    depth[k] = std::abs(s[k].p - 0.5);
    peak = std::max(peak, depth[k]);
  }
  const double threshold = kFlipFraction * peak;

  std::vector<std::size_t> flips;
  int state = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double d = s[k].p - 0.5;
    const int now = d > threshold ? 1 : (d < -threshold ? -1 : state);
    if (now != state) {
      if (state != 0) flips.push_back(k);
      state = now;
    }
  }

  const double span = s.back().tau - s.front().tau;
  double width = span / kDefaultWindows;
  if (flips.size() >= 2) {
    std::vector<double> gaps;
    for (std::size_t i = 0; i + 1 < flips.size(); ++i)
      gaps.push_back(s[flips[i + 1]].tau - s[flips[i]].tau);
    width = median(std::move(gaps));
  }

  std::vector<std::size_t> bounds{0};
  bounds.insert(bounds.end(), flips.begin(), flips.end());
  bounds.push_back(n);

  std::vector<EnvelopePoint> points;
  auto take_max = [&](std::size_t a, std::size_t b) {
    if (a >= b) return;
    std::size_t best = a;
    for (std::size_t k = a; k < b; ++k)
      if (depth[k] > depth[best]) best = k;
    points.push_back({s[best].tau, depth[best]});
  };
  for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
    const std::size_t a = bounds[i];
    const std::size_t b = bounds[i + 1];
    const double length = s[b - 1].tau - s[a].tau;
    if (length <= 1.5 * width) {
      take_max(a, b);
      continue;
    }
    const int chunks = static_cast<int>(std::ceil(length / width));
    const double step = length / chunks;
    std::size_t start = a;
    for (int c = 1; c <= chunks; ++c) {
      const double edge = s[a].tau + c * step;
      std::size_t end = start;
      while (end < b && (s[end].tau < edge || c == chunks)) ++end;
      take_max(start, end);
      start = end;
    }
  }
  return points;
}

double rms_about_half(const std::vector<HomSample>& s) {
  double sum = 0.0;
  for (const auto& x : s) sum += (x.p - 0.5) * (x.p - 0.5);
  return std::sqrt(sum / static_cast<double>(s.size()));
}

// Scaled joint model: t = tau / tau_scale, params (V, b = beta * tau_scale,
// c = tau_c / tau_scale).
struct BeatingModel {
  const std::vector<HomSample>* samples;
  double tau_scale;

  template <typename Jac>
  void operator()(const Eigen::Vector3d& x, Eigen::VectorXd& r, Jac& jac) const {
    const auto& s = *samples;
    r.resize(static_cast<Eigen::Index>(s.size()));
    jac.resize(static_cast<Eigen::Index>(s.size()), 3);
    const double v = x[0], b = x[1], c = x[2];
    for (std::size_t k = 0; k < s.size(); ++k) {
      const auto i = static_cast<Eigen::Index>(k);
      const double t = s[k].tau / tau_scale;
      const double env = std::exp(-t * t / (2.0 * c * c));
      const double cs = std::cos(b * t);
      r[i] = s[k].p - 0.5 + 0.5 * v * cs * env;
      jac(i, 0) = 0.5 * cs * env;
      jac(i, 1) = -0.5 * v * t * std::sin(b * t) * env;
      jac(i, 2) = 0.5 * v * cs * env * t * t / (c * c * c);
    }
  }
};

// Same model with the beat pinned to zero.
struct DipModel {
  const std::vector<double>* taus;
  const std::vector<double>* values;  // p or reflected envelope
  double tau_scale;

  template <typename Jac>
  void operator()(const Eigen::Vector2d& x, Eigen::VectorXd& r, Jac& jac) const {
    const auto m = taus->size();
    r.resize(static_cast<Eigen::Index>(m));
    jac.resize(static_cast<Eigen::Index>(m), 2);
    const double v = x[0], c = x[1];
    for (std::size_t k = 0; k < m; ++k) {
      const auto i = static_cast<Eigen::Index>(k);
      const double t = (*taus)[k] / tau_scale;
      const double env = std::exp(-t * t / (2.0 * c * c));
      r[i] = (*values)[k] - 0.5 + 0.5 * v * env;
      jac(i, 0) = 0.5 * env;
      jac(i, 1) = 0.5 * v * env * t * t / (c * c * c);
    }
  }
};

double beating_cost(const std::vector<HomSample>& s, double tau_scale, double v, double b,
                    double c) {
  double sum = 0.0;
  for (const auto& x : s) {
    const double t = x.tau / tau_scale;
    const double r = x.p - 0.5 + 0.5 * v * std::cos(b * t) * std::exp(-t * t / (2.0 * c * c));
    sum += r * r;
  }
  return sum;
}

}  // namespace

void NoisyTrace::validate() const {
  if (samples.size() < static_cast<std::size_t>(kMinFitSamples))
    throw Error(ErrorKind::InvalidInput, "trace needs at least 32 samples");
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (!std::isfinite(samples[k].tau) || !std::isfinite(samples[k].p))
      throw Error(ErrorKind::InvalidInput, "trace values must be finite");
    if (k > 0 && !(samples[k].tau > samples[k - 1].tau))
      throw Error(ErrorKind::InvalidInput, "trace delays must strictly increase");
  }
}

bool beat_resolvable(double beat, double tau_c) { return beat * tau_c >= kPi; }

NoisyTrace synthesize_trace(const HomConfig& cfg, double noise_sigma, std::uint64_t seed) {
  cfg.validate();
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma))
    throw Error(ErrorKind::InvalidArgument, "noise sigma must be >= 0");
  NoisyTrace out;
  out.noise_sigma = noise_sigma;
  out.rng_seed = seed;
  out.samples.reserve(cfg.tau_grid.size());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, noise_sigma > 0.0 ? noise_sigma : 1.0);
  for (double tau : cfg.tau_grid) {
    double p = coincidence_rde(tau, cfg.tau_c, cfg.l, cfg.omega_rot);
    if (noise_sigma > 0.0) p += noise(rng);
    out.samples.push_back({tau, p});
  }
  return out;
}

EnvelopeFit fit_envelope(const NoisyTrace& trace) {
  trace.validate();
  const auto points = envelope_points(trace.samples);

  EnvelopeFit fit;
  double peak = 0.0, w_sum = 0.0, w_tau2 = 0.0;
  std::vector<double> taus, values;
  for (const auto& pt : points) {
    peak = std::max(peak, pt.depth);
    w_sum += pt.depth;
    w_tau2 += pt.depth * pt.tau * pt.tau;
    taus.push_back(pt.tau);
    values.push_back(0.5 - pt.depth);
  }
  fit.visibility = 2.0 * peak;
  if (peak < 0.5 * kMinVisibility || points.size() < 3) return fit;

  double tau0 = std::sqrt(w_tau2 / w_sum);
  if (!(tau0 > 0.0)) tau0 = 0.25 * (trace.samples.back().tau - trace.samples.front().tau);

  const DipModel model{&taus, &values, tau0};
  const auto lsq = damped_gauss_newton<2>(model, Eigen::Vector2d(2.0 * peak, 1.0));
  fit.visibility = lsq.params[0];
  fit.tau_c = std::abs(lsq.params[1]) * tau0;
  fit.iterations = lsq.iterations;
  fit.converged = lsq.converged && !lsq.singular && fit.visibility >= kMinVisibility &&
                  fit.tau_c > 0.0;
  return fit;
}

BeatEstimate extract_beat(const NoisyTrace& trace) {
  const auto env = fit_envelope(trace);
  if (!env.converged) return {0.0, true};
  return extract_beat(trace, env.tau_c);
}

BeatEstimate extract_beat(const NoisyTrace& trace, double tau_c_hat) {
  trace.validate();
  if (!(tau_c_hat > 0.0) || !std::isfinite(tau_c_hat)) return {0.0, true};
  const auto& s = trace.samples;

  const double half = std::min(kBeatSupport * tau_c_hat,
                               std::max(std::abs(s.front().tau), std::abs(s.back().tau)));
  std::vector<double> taus, weights;
  std::vector<double> spacings;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (std::abs(s[k].tau) > half) continue;
    const double prev = k > 0 ? s[k - 1].tau : s[k].tau;
    const double next = k + 1 < s.size() ? s[k + 1].tau : s[k].tau;
    const double dt = 0.5 * (next - prev);
    const double hann = 0.5 * (1.0 + std::cos(kPi * s[k].tau / half));
    const double y = (0.5 - s[k].p) * std::exp(s[k].tau * s[k].tau / (2.0 * tau_c_hat * tau_c_hat));
    taus.push_back(s[k].tau);
    weights.push_back(hann * y * dt);
    if (k > 0) spacings.push_back(s[k].tau - s[k - 1].tau);
  }
  if (taus.size() < 8 || spacings.empty()) return {0.0, true};

  auto magnitude = [&](double beta) {
    std::complex<double> sum{};
    for (std::size_t k = 0; k < taus.size(); ++k)
      sum += weights[k] * std::polar(1.0, -beta * taus[k]);
    return std::abs(sum);
  };
  // Vertex of the parabola through three equally spaced samples.
  auto vertex = [](double y0, double y1, double y2) {
    const double denom = y0 - 2.0 * y1 + y2;
    return denom < 0.0 ? 0.5 * (y0 - y2) / denom : 0.0;
  };

  const double nyquist = kPi / median(spacings);
  const double coarse = kPi / (4.0 * half);
  const int bins = static_cast<int>(std::ceil(nyquist / coarse));
  int best = 0;
  double best_mag = -1.0;
  std::vector<double> mags(static_cast<std::size_t>(bins) + 1);
  for (int j = 0; j <= bins; ++j) {
    mags[static_cast<std::size_t>(j)] = magnitude(j * coarse);
    if (mags[static_cast<std::size_t>(j)] > best_mag) {
      best_mag = mags[static_cast<std::size_t>(j)];
      best = j;
    }
  }
  if (best == 0) return {0.0, true};

  double beta = coarse * (best + (best < bins ? vertex(mags[best - 1], mags[best], mags[best + 1]) : 0.0));
  const double fine = coarse / 32.0;
  double fine_best = beta;
  double fine_mag = magnitude(beta);
  for (int j = -32; j <= 32; ++j) {
    const double b = beta + j * fine;
    const double m = magnitude(b);
    if (m > fine_mag) {
      fine_mag = m;
      fine_best = b;
    }
  }
  beta = fine_best +
         fine * vertex(magnitude(fine_best - fine), fine_mag, magnitude(fine_best + fine));

  if (!beat_resolvable(beta, tau_c_hat)) return {0.0, true};
  return {beta, false};
}

EstimateResult estimate(const NoisyTrace& trace) {
  trace.validate();
  const auto& s = trace.samples;
  EstimateResult out;

  const auto env = fit_envelope(trace);
  if (!env.converged) {
    out.visibility_hat = env.visibility;
    out.rms_residual = rms_about_half(s);
    out.iterations = env.iterations;
    out.below_resolution = true;
    return out;
  }

  const double scale = env.tau_c;
  const auto beat = extract_beat(trace, env.tau_c);
  double b0 = beat.beat * scale;
  if (beat.below_resolution) {
    // Coarse scan of the scaled beat with the envelope held fixed.
    double best = beating_cost(s, scale, env.visibility, 0.0, 1.0);
    for (int j = 1; j <= 400; ++j) {
      const double b = j * 4.0 * kPi / 400.0;
      const double c = beating_cost(s, scale, env.visibility, b, 1.0);
      if (c < best) {
        best = c;
        b0 = b;
      }
    }
  }

  const auto m = static_cast<double>(s.size());
  if (b0 == 0.0) {
    std::vector<double> taus, values;
    for (const auto& x : s) {
      taus.push_back(x.tau);
      values.push_back(x.p);
    }
    const auto lsq = damped_gauss_newton<2>(DipModel{&taus, &values, scale},
                                            Eigen::Vector2d(env.visibility, 1.0));
    out.visibility_hat = lsq.params[0];
    out.tau_c_hat = std::abs(lsq.params[1]) * scale;
    out.rms_residual = std::sqrt(2.0 * lsq.cost / m);
    out.iterations = lsq.iterations;
    out.converged = lsq.converged && !lsq.singular && out.visibility_hat >= kMinVisibility;
    out.below_resolution = true;
    return out;
  }

  const auto lsq = damped_gauss_newton<3>(BeatingModel{&s, scale},
                                          Eigen::Vector3d(env.visibility, b0, 1.0));
  out.visibility_hat = lsq.params[0];
  out.beat = std::abs(lsq.params[1]) / scale;
  out.tau_c_hat = std::abs(lsq.params[2]) * scale;
  out.rms_residual = std::sqrt(2.0 * lsq.cost / m);
  out.iterations = lsq.iterations;
  out.converged = lsq.converged && !lsq.singular && out.visibility_hat >= kMinVisibility;
  out.below_resolution = !beat_resolvable(out.beat, out.tau_c_hat);
  return out;
}

}  // namespace freqent
