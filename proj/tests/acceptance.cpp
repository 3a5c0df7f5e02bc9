// Acceptance checks, one PASS/FAIL line per criterion. Exits nonzero on any
// failure.
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "commands.hpp"
#include "csv.hpp"
#include "freqent/errors.hpp"
#include "freqent/hom_interference.hpp"
#include "freqent/hybrid_state.hpp"
#include "freqent/joint_spectrum.hpp"
#include "freqent/phase_match.hpp"
#include "freqent/rotation_estimator.hpp"
#include "support/gen.hpp"

using namespace freqent;
using freqent::testing::Gen;
using freqent::testing::linspace;

namespace {

constexpr double kPs = 1e-12;
constexpr double kTrad = 1e12;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

using Check = std::function<Outcome()>;

Outcome dip_floor() {
  Outcome o;
  const double floor = coincidence_plain(0.0, kPs);
  const double far = coincidence_plain(10.0 * kPs, kPs);
  o.require(floor == 0.0, fmt::format("P(0) = {:g}", floor));
  o.require(std::abs(far - 0.5) < 1e-10, fmt::format("P(10 tau_c) = {:.15g}", far));
  if (o.pass) o.detail = fmt::format("P(0) = 0, |P(10 tau_c) - 1/2| = {:.1e}", std::abs(far - 0.5));
  return o;
}

Outcome one_ps_point() {
  Outcome o;
  const double p = coincidence_plain(kPs, kPs);
  o.require(std::abs(p - 0.19673) <= 1e-5, fmt::format("P(1 ps) = {:.8f}", p));
  if (o.pass) o.detail = fmt::format("P(1 ps, 1 ps) = {:.8f}", p);
  return o;
}

Outcome oracle_equivalence() {
  Outcome o;
  const std::pair<int, double> sets[] = {{2, 0.0}, {2, 2 * kTrad}, {2, 4 * kTrad}, {10, 0.4 * kTrad}};
  double worst = 0.0;
  for (const auto& [l, omega] : sets) {
    HomConfig cfg{kPs, l, omega, linspace(-3 * kPs, 3 * kPs, 601)};
    const auto closed = hom_trace(cfg, HomMethod::Closed);
    const auto numeric = hom_trace(cfg, HomMethod::Numeric);
    double d = 0.0;
    for (std::size_t i = 0; i < closed.samples.size(); ++i)
      d = std::max(d, std::abs(closed.samples[i].p - numeric.samples[i].p));
    o.require(d < 1e-6, fmt::format("(l={}, Omega={:g}) max diff {:.2e}", l, omega, d));
    worst = std::max(worst, d);
  }
  if (o.pass) o.detail = fmt::format("max |numeric - closed| = {:.2e} over 4 x 601 delays", worst);
  return o;
}

int extrema_within(const HomTrace& t, double limit) {
  int n = 0;
  for (std::size_t i = 1; i + 1 < t.samples.size(); ++i) {
    if (std::abs(t.samples[i].tau) > limit) continue;
    const double a = t.samples[i - 1].p, b = t.samples[i].p, c = t.samples[i + 1].p;
    if ((b > a && b > c) || (b < a && b < c)) ++n;
  }
  return n;
}

Outcome beat_structure() {
  Outcome o;
  const auto grid = linspace(-3 * kPs, 3 * kPs, 1201);
  int counts[2];
  double beats[2];
  const double omegas[2] = {2 * kTrad, 4 * kTrad};
  for (int k = 0; k < 2; ++k) {
    const HomConfig cfg{kPs, 2, omegas[k], grid};
    counts[k] = extrema_within(hom_trace(cfg, HomMethod::Closed), 2 * kPs);
    beats[k] = estimate(synthesize_trace(cfg, 0.0, 0)).beat;
    const double want = 4.0 * omegas[k];
    o.require(std::abs(beats[k] - want) <= 0.005 * want,
              fmt::format("beat {:.6e} vs {:.6e}", beats[k], want));
  }
  o.require(counts[1] > counts[0], fmt::format("extrema {} (4 Trad/s) vs {} (2 Trad/s)", counts[1], counts[0]));
  if (o.pass)
    o.detail = fmt::format("extrema in |tau| <= 2 ps: {} vs {}; beats {:.6e}, {:.6e} rad/s", counts[1],
                           counts[0], beats[0], beats[1]);
  return o;
}

Outcome observability_condition() {
  Outcome o;
  Gen g(5);
  int mismatches = 0;
  for (int i = 0; i < 10000; ++i) {
    const int l = g.integer(0, 20);
    const double tau_c = g.log_uniform(1e-13, 1e-5);
    const double omega = g.uniform(0.0, 3.0) / tau_c;
    const bool expected = 2.0 * l * omega > 2.0 * std::sqrt(2.0 * std::numbers::ln2) / tau_c;
    if (observability(l, omega, tau_c).visible != expected) ++mismatches;
  }
  o.require(mismatches == 0, fmt::format("{} mismatches in 10000 cases", mismatches));
  const double ps = observability(1, 0.0, kPs).delta_omega_fwhm;
  const double us = observability(1, 0.0, 1e-6).delta_omega_fwhm;
  o.require(std::abs(ps / 2.355e12 - 1.0) < 0.005, fmt::format("FWHM(1 ps) = {:.6e}", ps));
  o.require(std::abs(us / 2.36e6 - 1.0) < 0.005, fmt::format("FWHM(1 us) = {:.6e}", us));
  if (o.pass)
    o.detail = fmt::format("10000 random cases agree; FWHM(1 ps) = {:.4e}, FWHM(1 us) = {:.4e} rad/s", ps, us);
  return o;
}

Outcome jsa_geometry() {
  Outcome o;
  const PumpSpectrum pump{0.0, kTrad};
  const auto pm = PhaseMatchGaussian::reference(kTrad);
  const auto plain = jsa_grid(pump, pm, std::nullopt, 6 * kTrad, 256);
  const double cell = plain.axis1[1] - plain.axis1[0];
  const auto p0 = peak_locations(plain);
  o.require(p0.size() == 1, fmt::format("{} peaks unshifted", p0.size()));
  if (p0.size() == 1)
    o.require(std::abs(p0[0].nu1) <= cell && std::abs(p0[0].nu2) <= cell, "unshifted peak off origin");
  for (double omega : {1 * kTrad, 2 * kTrad}) {
    const double d = 2 * omega;
    const auto peaks = peak_locations(jsa_grid(pump, pm, RdeShift{2, omega}, 6 * kTrad, 256));
    o.require(peaks.size() == 2, fmt::format("{} peaks at Omega = {:g}", peaks.size(), omega));
    if (peaks.size() != 2) continue;
    for (const auto& p : peaks) {
      const double s = p.nu1 < 0 ? -1.0 : 1.0;
      o.require(std::abs(p.nu1 - s * d) <= cell && std::abs(p.nu2 + s * d) <= cell,
                fmt::format("peak ({:.4e}, {:.4e}) at Omega = {:g}", p.nu1, p.nu2, omega));
      o.require(std::abs(p.nu1 + p.nu2) <= cell, "peak off the antidiagonal");
    }
    o.require((peaks[0].nu1 < 0) != (peaks[1].nu1 < 0), "peaks on the same side");
  }
  if (o.pass) o.detail = fmt::format("1 peak unshifted, 2 peaks at (-+l Omega, +-l Omega), cell {:.3e}", cell);
  return o;
}

Outcome phase_matching() {
  Outcome o;
  auto crossing = [](double cut, int points) {
    CrystalConfig cfg;
    cfg.cut_angle_deg = cut;
    const auto [oc, ec] = emission_curves(cfg, 300.0, 440.0, points);
    return find_intersection(oc, ec);
  };
  o.require(!crossing(40.0, 1401).exists, "cut 40 intersects");
  std::string found;
  for (const auto& [cut, target] : {std::pair{45.0, 370.44}, std::pair{50.0, 370.32}}) {
    const auto coarse = crossing(cut, 1401);
    const auto fine = crossing(cut, 2801);
    o.require(coarse.exists && fine.exists, fmt::format("cut {:g} has no intersection", cut));
    if (!coarse.exists || !fine.exists) continue;
    o.require(std::abs(coarse.frequency_thz - target) <= 2.0,
              fmt::format("cut {:g} at {:.4f} THz", cut, coarse.frequency_thz));
    const double shift = std::abs(coarse.frequency_thz - fine.frequency_thz);
    o.require(shift < 0.01, fmt::format("cut {:g} moves {:.2e} THz on refinement", cut, shift));
    found += fmt::format("{}cut {:g}: {:.4f} THz (refined shift {:.1e})", found.empty() ? "" : ", ", cut,
                         coarse.frequency_thz, shift);
  }
  if (o.pass) o.detail = "cut 40: none, " + found;
  return o;
}

Outcome bandwidth() {
  Outcome o;
  const double e = bandwidth_error(0.08, 2, 1.0);
  o.require(e == 0.02, fmt::format("{:.17g}", e));
  if (o.pass) o.detail = "bandwidth_error(0.08 THz, 2, 1 THz) = 0.02";
  return o;
}

Outcome estimator_round_trip() {
  Outcome o;
  const HomConfig cfg{kPs, 2, 2 * kTrad, linspace(-3 * kPs, 3 * kPs, 1201)};
  const double beat = 8 * kTrad;
  const auto r = estimate(synthesize_trace(cfg, 0.0, 0));
  o.require(r.converged, "noiseless fit did not converge");
  o.require(std::abs(r.beat - beat) <= 0.005 * beat, fmt::format("beat {:.6e}", r.beat));
  o.require(std::abs(r.tau_c_hat - kPs) <= 0.01 * kPs, fmt::format("tau_c {:.6e}", r.tau_c_hat));
  o.require(std::abs(r.visibility_hat - 1.0) <= 0.01, fmt::format("V {:.6f}", r.visibility_hat));
  int good = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto n = estimate(synthesize_trace(cfg, 0.01, seed));
    if (std::abs(n.beat - beat) <= 0.05 * beat) ++good;
  }
  o.require(good >= 9, fmt::format("{} of 10 noisy seeds within 5%", good));
  if (o.pass)
    o.detail = fmt::format("noiseless beat {:.6e}, tau_c {:.6e}, V {:.6f}; noisy {}/10 within 5%", r.beat,
                           r.tau_c_hat, r.visibility_hat, good);
  return o;
}

Outcome state_algebra() {
  Outcome o;
  Gen g(10);
  constexpr int kCases = 2000;
  int failures = 0;
  for (int i = 0; i < kCases; ++i) {
    const int l = g.integer(1, 30);
    const double omega = g.log_uniform(1.0, 1e13);
    const double center = 2.0 * std::numbers::pi * g.uniform(100e12, 1000e12);
    const auto stages = run_pipeline(l, omega, center);
    bool ok = true;
    for (const auto& s : stages) ok = ok && std::abs(s.norm_squared() - 1.0) < 1e-12;
    const auto& psi_p = stages[0];
    const auto round = apply_qwp(apply_qwp(psi_p), QwpDirection::Inverse);
    ok = ok && std::abs(state_overlap(psi_p, round) - std::complex<double>(1.0, 0.0)) < 1e-12;
    for (const auto& t : stages[3].terms())
      for (const auto* p : {&t.photon1, &t.photon2})
        ok = ok && std::abs(p->oam) == l && std::abs(p->detuning - p->oam * omega) <= 1e-14 * l * omega;
    const auto doubled = run_pipeline(2 * l, omega / 2.0, center)[3];
    ok = ok && doubled.terms().size() == stages[3].terms().size();
    for (std::size_t k = 0; ok && k < doubled.terms().size(); ++k)
      ok = std::abs(doubled.terms()[k].photon1.detuning - stages[3].terms()[k].photon1.detuning) <=
           1e-14 * l * omega;
    const double tau = g.uniform(-3.0, 3.0) * kPs;
    ok = ok && std::abs(coincidence_rde(tau, kPs, l, omega) - coincidence_rde(tau, kPs, 2 * l, omega / 2.0)) < 1e-12;
    if (!ok) ++failures;
  }
  o.require(failures == 0, fmt::format("{} of {} cases failed", failures, kCases));
  if (o.pass)
    o.detail = fmt::format("{} randomized cases: norm, QWP round trip, OAM-frequency lock, (l, Omega) ~ (2l, Omega/2)",
                           kCases);
  return o;
}

std::string without_timestamp(const std::string& text) {
  const std::string stamp = "# " + std::string(cli::kTimestampKey) + "=";
  std::istringstream is(text);
  std::string line, kept;
  while (std::getline(is, line))
    if (line.rfind(stamp, 0) != 0) kept += line + "\n";
  return kept;
}

Outcome golden_figures() {
  Outcome o;
  const std::filesystem::path dir = FREQENT_GOLDEN_DIR;
  const auto first = cli::figure_documents(false);
  const auto second = cli::figure_documents(false);
  int checked = 0;
  for (const char* stem : {"fig3a", "fig3b", "fig4a", "fig4b", "fig4c", "fig4d", "fig5a", "fig5b"}) {
    std::string runs[2];
    for (int k = 0; k < 2; ++k) {
      const auto& docs = k == 0 ? first : second;
      for (const auto& f : docs)
        if (f.stem == stem) {
          std::ostringstream os;
          cli::write_csv(os, cli::stamped(f.csv, cli::timestamp_now()));
          runs[k] = without_timestamp(os.str());
        }
    }
    std::ifstream in(dir / (std::string(stem) + ".csv"), std::ios::binary);
    const std::string golden{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    o.require(!runs[0].empty() && runs[0] == runs[1], fmt::format("{} differs between runs", stem));
    o.require(!golden.empty() && runs[0] == without_timestamp(golden), fmt::format("{} differs from golden", stem));
    ++checked;
  }
  if (o.pass) o.detail = fmt::format("{} figures byte-identical to golden over two runs", checked);
  return o;
}

}  // namespace

int main() {
  const std::pair<const char*, Check> criteria[] = {
      {"dip floor and asymptote", dip_floor},
      {"P_c at 1 ps", one_ps_point},
      {"numeric and closed-form HOM agree", oracle_equivalence},
      {"beat structure of the rotating traces", beat_structure},
      {"observability condition", observability_condition},
      {"JSA peak geometry", jsa_geometry},
      {"phase-matching intersections", phase_matching},
      {"bandwidth error", bandwidth},
      {"estimator round trip", estimator_round_trip},
      {"state algebra properties", state_algebra},
      {"figure regression fixtures", golden_figures},
  };
  int failures = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::cout << fmt::format("{} [{:2}] {}: {} ({:.2f} s)\n", o.pass ? "PASS" : "FAIL", index, name, o.detail, secs);
  }
  std::cout << fmt::format("{} of {} criteria passed\n", index - failures, index);
  return failures == 0 ? 0 : 1;
}
