#include "freqent/joint_spectrum.hpp"

#include <algorithm>
#include <cmath>

#include "freqent/errors.hpp"

namespace freqent {

PhaseMatchGaussian::PhaseMatchGaussian(double gamma, double a_coef)
    : gamma_(gamma), a_(a_coef) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw Error(ErrorKind::InvalidArgument, "gamma must be positive");
  if (!std::isfinite(a_coef))
    throw Error(ErrorKind::InvalidArgument, "phase-matching coefficient must be finite");
}

PhaseMatchGaussian PhaseMatchGaussian::reference(double sigma) {
  constexpr double gamma = 0.1;
  return {gamma, 0.7 / (sigma * std::sqrt(2.0 * gamma))};
}

double PhaseMatchGaussian::operator()(double nu1, double nu2) const {
  const double arg = a_ * nu1 + b_coef() * nu2;
  return std::exp(-gamma_ * arg * arg);
}

double jsa_value(double nu1, double nu2, const PumpSpectrum& pump,
                 const PhaseMatchGaussian& pm) {
  const double sum = nu1 + nu2;
  return pm(nu1, nu2) * std::exp(-sum * sum / (2.0 * pump.sigma * pump.sigma));
}

JsaGrid jsa_grid(const PumpSpectrum& pump, const PhaseMatchGaussian& pm,
                 std::optional<RdeShift> shift, double half_width, int n) {
  if (n < 16) throw Error(ErrorKind::InvalidArgument, "grid needs n >= 16");
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw Error(ErrorKind::InvalidArgument, "grid half width must be positive");
  if (!(pump.sigma > 0.0))
    throw Error(ErrorKind::InvalidArgument, "pump sigma must be positive");
  if (shift && shift->l < 0)
    throw Error(ErrorKind::InvalidArgument, "shift l must be >= 0");

  JsaGrid grid;
  const auto count = static_cast<std::size_t>(n);
  grid.axis1.resize(count);
  for (std::size_t i = 0; i < count; ++i)
    grid.axis1[i] = -half_width + 2.0 * half_width * i / static_cast<double>(n - 1);
  grid.axis2 = grid.axis1;
  grid.values.resize(count * count);

  const double d = shift ? shift->detuning() : 0.0;
  double peak = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < count; ++j) {
      const double nu1 = grid.axis1[i];
      const double nu2 = grid.axis2[j];
      double v;
      if (shift) {
        const double sum = nu1 + nu2;
        const double rho = std::exp(-sum * sum / (2.0 * pump.sigma * pump.sigma));
        v = std::max(pm(nu1 + d, nu2 - d), pm(nu1 - d, nu2 + d)) * rho;
      } else {
        v = jsa_value(nu1, nu2, pump, pm);
      }
      grid.values[i * count + j] = v;
      peak = std::max(peak, v);
    }
  }
  if (peak > 0.0)
    for (double& v : grid.values) v /= peak;
  return grid;
}

std::vector<JsaPeak> peak_locations(const JsaGrid& grid) {
  std::vector<JsaPeak> peaks;
  const std::size_t n1 = grid.axis1.size();
  const std::size_t n2 = grid.axis2.size();
  if (n1 == 0 || n2 == 0) return peaks;
  const double global = *std::max_element(grid.values.begin(), grid.values.end());
  if (!(global > 0.0)) return peaks;

  auto neighbours = [&](std::size_t i, std::size_t j, auto&& fn) {
    for (int di = -1; di <= 1; ++di)
      for (int dj = -1; dj <= 1; ++dj) {
        if (di == 0 && dj == 0) continue;
        const auto ii = static_cast<std::ptrdiff_t>(i) + di;
        const auto jj = static_cast<std::ptrdiff_t>(j) + dj;
        if (ii < 0 || jj < 0 || ii >= static_cast<std::ptrdiff_t>(n1) ||
            jj >= static_cast<std::ptrdiff_t>(n2))
          continue;
        fn(static_cast<std::size_t>(ii), static_cast<std::size_t>(jj));
      }
  };

  // Candidates are points no lower than any neighbour. Symmetric grids put
  // exact ties next to each other, so touching candidates form one peak.
  std::vector<char> candidate(n1 * n2, 0);
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n2; ++j) {
      const double v = grid.at(i, j);
      if (!(v > 0.5 * global)) continue;
      bool top = true;
      neighbours(i, j, [&](std::size_t ii, std::size_t jj) {
        if (grid.at(ii, jj) > v) top = false;
      });
      candidate[i * n2 + j] = top;
    }

  std::vector<char> seen(n1 * n2, 0);
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  for (std::size_t start = 0; start < n1 * n2; ++start) {
    if (!candidate[start] || seen[start]) continue;
    double sum1 = 0.0, sum2 = 0.0, best = 0.0;
    int members = 0;
    bool strict = true;
    stack.assign(1, {start / n2, start % n2});
    seen[start] = 1;
    while (!stack.empty()) {
      const auto [i, j] = stack.back();
      stack.pop_back();
      const double v = grid.at(i, j);
      sum1 += grid.axis1[i];
      sum2 += grid.axis2[j];
      best = std::max(best, v);
      ++members;
      neighbours(i, j, [&](std::size_t ii, std::size_t jj) {
        const std::size_t k = ii * n2 + jj;
        if (candidate[k] && !seen[k]) {
          seen[k] = 1;
          stack.push_back({ii, jj});
        } else if (!candidate[k] && grid.at(ii, jj) >= v) {
          strict = false;  // plateau leaks into a non-maximal region
        }
      });
    }
    if (strict) peaks.push_back({sum1 / members, sum2 / members, best});
  }
  std::stable_sort(peaks.begin(), peaks.end(),
                   [](const JsaPeak& a, const JsaPeak& b) { return a.value > b.value; });
  return peaks;
}

double effective_coherence_time(const PhaseMatchGaussian& pm) {
  return 2.0 * std::sqrt(pm.gamma()) * std::abs(pm.a_coef());
}

}  // namespace freqent
