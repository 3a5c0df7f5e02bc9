#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "freqent/errors.hpp"
#include "freqent/hybrid_state.hpp"
#include "freqent/joint_spectrum.hpp"
#include "freqent/numfmt.hpp"
#include "svg.hpp"

namespace freqent::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> symmetric_grid(double span, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[i] = span * (2.0 * i - (n - 1)) / (n - 1);
  return out;
}

std::string coefficients_text(const SellmeierCoefficients& c) {
  return fmt::format("{} {} {} {}", format_number(c.a), format_number(c.b), format_number(c.c),
                     format_number(c.d));
}

std::string method_name(HomMethod m) { return m == HomMethod::Closed ? "closed" : "numeric"; }

double column_value(const std::optional<double>& v) { return v ? *v : kNaN; }

std::vector<double> column(const CsvDocument& doc, std::size_t k, double scale = 1.0) {
  std::vector<double> out;
  out.reserve(doc.rows.size());
  for (const auto& row : doc.rows) out.push_back(column_value(row[k]) * scale);
  return out;
}

std::string json_number(double x) { return std::isfinite(x) ? format_number(x) : "null"; }

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') {
      out += '\\';
      out += c;
    } else if (static_cast<unsigned char>(c) < 0x20) {
      out += fmt::format("\\u{:04x}", static_cast<unsigned>(c));
    } else {
      out += c;
    }
  }
  return out + "\"";
}

void section(std::ostringstream& os, const std::string& title, const TwoPhotonState& s) {
  os << title << "\n" << s.describe();
}

// Multi-trace HOM figure: one tau_s column and one p column per config.
CsvDocument hom_family(const std::string& figure, const std::vector<HomParams>& family) {
  CsvDocument doc;
  doc.add_meta("command", "figures");
  doc.add_meta("figure", figure);
  doc.add_meta("method", "closed");
  doc.columns.push_back("tau_s");
  std::vector<HomOutput> traces;
  for (std::size_t k = 0; k < family.size(); ++k) {
    const auto& p = family[k];
    const std::string key = "p" + std::to_string(k + 1);
    doc.add_meta(key + ".tau_c", p.tau_c);
    doc.add_meta(key + ".l", std::to_string(p.l));
    doc.add_meta(key + ".omega_rot", p.omega_rot);
    doc.columns.push_back(key);
    traces.push_back(hom_document(p));
  }
  doc.add_meta("points", std::to_string(family.front().points));
  doc.add_meta("tau_span", family.front().tau_span);
  const auto& first = traces.front().trace.samples;
  for (std::size_t i = 0; i < first.size(); ++i) {
    auto& row = doc.rows.emplace_back();
    row.push_back(first[i].tau);
    for (const auto& t : traces) row.push_back(t.trace.samples[i].p);
  }
  return doc;
}

std::string family_svg(const CsvDocument& doc, const std::vector<std::string>& names,
                       double time_scale, const std::string& time_unit,
                       const std::string& title) {
  const auto tau = column(doc, 0, time_scale);
  std::vector<Series> series;
  for (std::size_t k = 1; k < doc.columns.size(); ++k)
    series.push_back({names[k - 1], tau, column(doc, k)});
  return svg_line_plot(series, {title, "tau (" + time_unit + ")", "P_c"});
}

CsvDocument phasematch_family(const std::vector<double>& cuts) {
  CsvDocument doc;
  doc.add_meta("command", "figures");
  doc.add_meta("figure", "fig2");
  doc.columns.push_back("freq_thz");
  std::vector<CsvDocument> curves;
  for (double cut : cuts) {
    PhaseMatchParams p;
    p.cut_angle_deg = cut;
    curves.push_back(phasematch_document(p));
    const auto& c = curves.back();
    const std::string tag = fmt::format("cut{:g}", cut);
    for (const auto& [k, v] : c.metadata)
      if (k != "command") doc.add_meta(tag + "." + k, v);
    doc.columns.push_back("angle_o_deg_" + tag);
    doc.columns.push_back("angle_e_deg_" + tag);
  }
  for (std::size_t i = 0; i < curves.front().rows.size(); ++i) {
    auto& row = doc.rows.emplace_back();
    row.push_back(curves.front().rows[i][0]);
    for (const auto& c : curves) {
      row.push_back(c.rows[i][1]);
      row.push_back(c.rows[i][2]);
    }
  }
  return doc;
}

}  // namespace

std::string timestamp_now() {
  std::time_t t = 0;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
    t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm utc{};
  gmtime_r(&t, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

CsvDocument stamped(CsvDocument doc, const std::string& timestamp) {
  std::vector<std::pair<std::string, std::string>> meta;
  meta.emplace_back("tool", fmt::format("{} {}", kToolName, kToolVersion));
  meta.emplace_back(std::string(kTimestampKey), timestamp);
  meta.insert(meta.end(), doc.metadata.begin(), doc.metadata.end());
  doc.metadata = std::move(meta);
  return doc;
}

std::string pipeline_report(const PipelineParams& p, const std::string& timestamp) {
  if (p.tau && !std::isfinite(*p.tau)) throw Error(ErrorKind::InvalidArgument, "tau must be finite");
  const auto stages = run_pipeline(p.l, p.omega_rot, p.center_frequency);

  std::ostringstream os;
  os << "# tool=" << kToolName << " " << kToolVersion << "\n"
     << "# " << kTimestampKey << "=" << timestamp << "\n"
     << "# command=pipeline\n"
     << "# l=" << p.l << "\n"
     << "# omega_rot=" << format_number(p.omega_rot) << "\n"
     << "# center_frequency=" << format_number(p.center_frequency) << "\n";
  if (p.tau) os << "# tau=" << format_number(*p.tau) << "\n";
  os << "# labels: |polarization, spin, l=OAM charge, nu=detuning (rad/s)>\n";
  section(os, "[1] SPDC source (psi_p)", stages[0]);
  section(os, "[2] after QWP (psi_s)", stages[1]);
  section(os, "[3] after rotating q-plate (psi_h)", stages[2]);
  section(os, "[4] after inverse QWP and polarizer (psi_o)", stages[3]);
  if (p.tau) section(os, "[5] after delay and beam splitter, coincidence branch",
                     apply_delay_and_beamsplitter(stages[3], *p.tau));
  return os.str();
}

JsaOutput jsa_document(const JsaParams& p, bool with_svg) {
  if (p.grid > 4096) throw Error(ErrorKind::InvalidArgument, "grid must be in [16, 4096]");
  if (!(p.sigma > 0.0) || !std::isfinite(p.sigma))
    throw Error(ErrorKind::InvalidArgument, "sigma must be positive");
  if (p.rde_l < 0) throw Error(ErrorKind::InvalidArgument, "rde-l must be >= 0");
  if (!std::isfinite(p.rde_omega)) throw Error(ErrorKind::InvalidArgument, "rde-omega must be finite");
  if (!(p.gamma > 0.0)) throw Error(ErrorKind::InvalidArgument, "gamma must be positive");
  const double a = p.a_coef.value_or(0.7 / (p.sigma * std::sqrt(2.0 * p.gamma)));
  const PhaseMatchGaussian pm(p.gamma, a);
  const PumpSpectrum pump{0.0, p.sigma};
  std::optional<RdeShift> shift;
  if (p.rde_l > 0) shift = RdeShift{p.rde_l, p.rde_omega};
  const auto grid = jsa_grid(pump, pm, shift, p.half_width, p.grid);
  const auto peaks = peak_locations(grid);

  JsaOutput out;
  auto& doc = out.csv;
  doc.add_meta("command", "jsa");
  doc.add_meta("sigma", p.sigma);
  doc.add_meta("gamma", p.gamma);
  doc.add_meta("a_coef", pm.a_coef());
  doc.add_meta("b_coef", pm.b_coef());
  doc.add_meta("rde_l", std::to_string(p.rde_l));
  doc.add_meta("rde_omega", p.rde_omega);
  doc.add_meta("half_width", p.half_width);
  doc.add_meta("grid", std::to_string(p.grid));
  doc.add_meta("tau_c_effective", effective_coherence_time(pm));
  doc.add_meta("peaks", std::to_string(peaks.size()));
  for (std::size_t k = 0; k < peaks.size(); ++k)
    doc.add_meta(fmt::format("peak{}", k + 1),
                 format_number(peaks[k].nu1) + " " + format_number(peaks[k].nu2));
  doc.columns = {"nu1", "nu2", "amplitude"};
  doc.rows.reserve(grid.values.size());
  for (std::size_t i = 0; i < grid.axis1.size(); ++i)
    for (std::size_t j = 0; j < grid.axis2.size(); ++j)
      doc.rows.push_back({grid.axis1[i], grid.axis2[j], grid.at(i, j)});

  if (with_svg) {
    std::vector<double> x1, x2;
    for (double v : grid.axis1) x1.push_back(v * 1e-12);
    for (double v : grid.axis2) x2.push_back(v * 1e-12);
    const std::string title =
        p.rde_l > 0 ? fmt::format("|JSA|, l = {}, Omega = {:g} rad/s", p.rde_l, p.rde_omega)
                    : std::string("|JSA|");
    out.svg = svg_heatmap(x1, x2, grid.values, {title, "nu1 (Trad/s)", "nu2 (Trad/s)"});
  }
  return out;
}

HomOutput hom_document(const HomParams& p) {
  if (p.points < 2) throw Error(ErrorKind::InvalidArgument, "points must be >= 2");
  if (!(p.tau_span > 0.0) || !std::isfinite(p.tau_span))
    throw Error(ErrorKind::InvalidArgument, "tau-span must be positive");
  if (p.noise > 0.0 && p.method == HomMethod::Numeric)
    throw Error(ErrorKind::InvalidArgument, "noise is only available with the closed method");

  const HomConfig cfg{p.tau_c, p.l, p.omega_rot, symmetric_grid(p.tau_span, p.points)};
  HomOutput out;
  bool beyond = false;
  if (p.method == HomMethod::Closed) {
    out.trace = synthesize_trace(cfg, p.noise, p.seed);
    for (double t : cfg.tau_grid) beyond = beyond || std::abs(t) >= 0.5 * p.tau_c;
  } else {
    auto trace = hom_trace(cfg, HomMethod::Numeric);
    beyond = trace.beyond_validity_window;
    out.trace.samples = std::move(trace.samples);
  }
  const auto obs = observability(p.l, p.omega_rot, p.tau_c);

  auto& doc = out.csv;
  doc.add_meta("command", "hom");
  doc.add_meta("tau_c", p.tau_c);
  doc.add_meta("l", std::to_string(p.l));
  doc.add_meta("omega_rot", p.omega_rot);
  doc.add_meta("method", method_name(p.method));
  doc.add_meta("points", std::to_string(p.points));
  doc.add_meta("tau_span", p.tau_span);
  doc.add_meta("noise_sigma", p.noise);
  doc.add_meta("seed", std::to_string(p.seed));
  doc.add_meta("delta_omega_fwhm", obs.delta_omega_fwhm);
  doc.add_meta("beats_observable", obs.visible ? "yes" : "no");
  doc.add_meta("validity_window", beyond ? "exceeded" : "inside");
  doc.columns = {"tau_s", "p"};
  for (const auto& s : out.trace.samples) doc.rows.push_back({s.tau, s.p});
  return out;
}

std::string hom_svg(const HomOutput& h, const HomParams& p) {
  Series s;
  for (const auto& x : h.trace.samples) {
    s.x.push_back(x.tau * 1e12);
    s.y.push_back(x.p);
  }
  const std::string title =
      fmt::format("HOM coincidence, tau_c = {:g} s, l = {}, Omega = {:g} rad/s", p.tau_c, p.l,
                  p.omega_rot);
  return svg_line_plot({s}, {title, "tau (ps)", "P_c"});
}

CsvDocument phasematch_document(const PhaseMatchParams& p) {
  CrystalConfig cfg;
  cfg.cut_angle_deg = p.cut_angle_deg;
  cfg.pump_frequency_thz = p.pump_frequency_thz;
  if (p.sellmeier_o || p.sellmeier_e) cfg.sellmeier.source = "user-supplied";
  if (p.sellmeier_o) cfg.sellmeier.ordinary = *p.sellmeier_o;
  if (p.sellmeier_e) cfg.sellmeier.extraordinary = *p.sellmeier_e;
  const auto [o_curve, e_curve] =
      emission_curves(cfg, p.freq_min_thz, p.freq_max_thz, p.points);
  const auto hit = find_intersection(o_curve, e_curve);

  CsvDocument doc;
  doc.add_meta("command", "phasematch");
  doc.add_meta("cut_angle_deg", p.cut_angle_deg);
  doc.add_meta("pump_frequency_thz", p.pump_frequency_thz);
  doc.add_meta("freq_min_thz", p.freq_min_thz);
  doc.add_meta("freq_max_thz", p.freq_max_thz);
  doc.add_meta("points", std::to_string(p.points));
  doc.add_meta("sellmeier_o", coefficients_text(cfg.sellmeier.ordinary));
  doc.add_meta("sellmeier_e", coefficients_text(cfg.sellmeier.extraordinary));
  doc.add_meta("sellmeier_source", cfg.sellmeier.source);
  doc.add_meta("omitted_o", std::to_string(o_curve.omitted));
  doc.add_meta("omitted_e", std::to_string(e_curve.omitted));
  if (hit.exists) {
    doc.add_meta("intersection", hit.frequency_thz);
    doc.add_meta("intersection_angle_deg", hit.outside_angle_deg);
  } else {
    doc.add_meta("intersection", "none");
  }
  doc.columns = {"freq_thz", "angle_o_deg", "angle_e_deg"};

  // Curves store solved samples only, in sweep order, at the same
  // frequencies emission_curves sampled.
  std::size_t io = 0, ie = 0;
  for (int i = 0; i < p.points; ++i) {
    const double f = p.freq_min_thz +
                     (p.freq_max_thz - p.freq_min_thz) * i / static_cast<double>(p.points - 1);
    auto& row = doc.rows.emplace_back();
    row.push_back(f);
    auto take = [f](const EmissionCurve& c, std::size_t& k) -> std::optional<double> {
      if (k < c.samples.size() && c.samples[k].frequency_thz == f)
        return c.samples[k++].outside_angle_deg;
      return std::nullopt;
    };
    row.push_back(take(o_curve, io));
    row.push_back(take(e_curve, ie));
  }
  return doc;
}

std::string phasematch_svg(const CsvDocument& doc) {
  const auto f = column(doc, 0);
  const std::string cut = doc.meta("cut_angle_deg").value_or("?");
  return svg_line_plot({{"o", f, column(doc, 1)}, {"e", f, column(doc, 2)}},
                       {"Outside emission angle, cut " + cut + " deg", "frequency (THz)",
                        "outside angle (deg)"});
}

std::string estimate_json(const EstimateResult& r, const std::string& input,
                          std::size_t n_samples, const std::string& timestamp) {
  std::ostringstream os;
  os << "{\n"
     << "  \"tool\": " << json_string(fmt::format("{} {}", kToolName, kToolVersion)) << ",\n"
     << "  \"" << kTimestampKey << "\": " << json_string(timestamp) << ",\n"
     << "  \"command\": \"estimate\",\n"
     << "  \"input\": " << json_string(input) << ",\n"
     << "  \"samples\": " << n_samples << ",\n"
     << "  \"beat\": " << json_number(r.beat) << ",\n"
     << "  \"tau_c_hat\": " << json_number(r.tau_c_hat) << ",\n"
     << "  \"visibility_hat\": " << json_number(r.visibility_hat) << ",\n"
     << "  \"rms_residual\": " << json_number(r.rms_residual) << ",\n"
     << "  \"converged\": " << (r.converged ? "true" : "false") << ",\n"
     << "  \"iterations\": " << r.iterations << ",\n"
     << "  \"below_resolution\": " << (r.below_resolution ? "true" : "false") << "\n"
     << "}\n";
  return os.str();
}

std::vector<FigureFile> figure_documents(bool with_svg) {
  std::vector<FigureFile> out;
  auto tag = [](CsvDocument doc, const std::string& figure) {
    doc.metadata.insert(doc.metadata.begin(), {"figure", figure});
    return doc;
  };

  out.push_back({"fig2", phasematch_family({40.0, 45.0, 50.0}), {}});
  if (with_svg) {
    const auto& doc = out.back().csv;
    const auto f = column(doc, 0);
    std::vector<Series> series;
    for (std::size_t k = 1; k < doc.columns.size(); ++k) series.push_back({doc.columns[k], f, column(doc, k)});
    out.back().svg = svg_line_plot(series, {"Outside emission angle vs frequency",
                                            "frequency (THz)", "outside angle (deg)"});
  }

  struct JsaFig {
    const char* stem;
    int l;
    double omega;
    double half_width;
  };
  struct HomFig {
    const char* stem;
    int l;
    double omega;
  };
  const JsaFig jsa_figs[] = {{"fig3a", 0, 0.0, 6e12}, {"fig4a", 2, 2e12, 12e12}, {"fig4c", 2, 4e12, 12e12}};
  const HomFig hom_figs[] = {{"fig3b", 0, 0.0}, {"fig4b", 2, 2e12}, {"fig4d", 2, 4e12}};

  for (std::size_t k = 0; k < 3; ++k) {
    JsaParams jp;
    jp.rde_l = jsa_figs[k].l;
    jp.rde_omega = jsa_figs[k].omega;
    jp.half_width = jsa_figs[k].half_width;
    jp.grid = 128;
    auto jsa = jsa_document(jp, with_svg);
    out.push_back({jsa_figs[k].stem, tag(std::move(jsa.csv), jsa_figs[k].stem), std::move(jsa.svg)});

    HomParams hp;
    hp.l = hom_figs[k].l;
    hp.omega_rot = hom_figs[k].omega;
    auto hom = hom_document(hp);
    std::string svg = with_svg ? hom_svg(hom, hp) : std::string{};
    out.push_back({hom_figs[k].stem, tag(std::move(hom.csv), hom_figs[k].stem), std::move(svg)});
  }

  std::vector<HomParams> fig5a;
  for (double omega : {0.0, 0.4e12, 0.8e12, 1e12}) {
    HomParams hp;
    hp.l = 2;
    hp.omega_rot = omega;
    fig5a.push_back(hp);
  }
  auto doc5a = hom_family("fig5a", fig5a);
  std::string svg5a = with_svg ? family_svg(doc5a, {"0", "0.4 Trad/s", "0.8 Trad/s", "1 Trad/s"},
                                            1e12, "ps", "HOM, l = 2, tau_c = 1 ps")
                               : std::string{};
  out.push_back({"fig5a", std::move(doc5a), std::move(svg5a)});

  std::vector<HomParams> fig5b;
  for (double tau_c : {1e-6, 2e-6, 3e-6}) {
    HomParams hp;
    hp.l = 2;
    hp.omega_rot = 1e6;
    hp.tau_c = tau_c;
    hp.tau_span = 6e-6;
    hp.points = 1201;
    fig5b.push_back(hp);
  }
  auto doc5b = hom_family("fig5b", fig5b);
  std::string svg5b = with_svg ? family_svg(doc5b, {"1 us", "2 us", "3 us"}, 1e6, "us",
                                            "HOM, l = 2, Omega = 1 Mrad/s")
                               : std::string{};
  out.push_back({"fig5b", std::move(doc5b), std::move(svg5b)});

  std::stable_sort(out.begin(), out.end(),
                   [](const FigureFile& a, const FigureFile& b) { return a.stem < b.stem; });
  return out;
}

}  // namespace freqent::cli
