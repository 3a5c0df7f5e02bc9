#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "freqent/errors.hpp"
#include "json_config.hpp"

namespace freqent::cli {

namespace {

struct OutputFailure {
  std::string path;
};

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path == "-") {
    out << content;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw OutputFailure{path};
  f << content;
  f.close();
  if (!f) throw OutputFailure{path};
}

std::string csv_text(const CsvDocument& doc) {
  std::ostringstream os;
  write_csv(os, doc);
  return os.str();
}

std::optional<SellmeierCoefficients> coefficients(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  return SellmeierCoefficients{v[0], v[1], v[2], v[3]};
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NumericalFailure:
    case ErrorKind::NoSolution:
      return kExitNumerical;
    default:
      return kExitUsage;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Frequency-entangled photon pairs under rotational Doppler shifts: "
               "state pipeline, joint spectra, HOM traces, phase matching and beat estimation.",
               kToolName};
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON file presetting options; command-line flags win");
  app.allow_config_extras(false);
  app.require_subcommand(1);
  app.fallthrough();

  PipelineParams pipe;
  auto* pipeline = app.add_subcommand("pipeline", "Print the four pipeline states as term lists");
  pipeline->add_option("--l", pipe.l, "OAM charge imparted by the q-plate")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  pipeline->add_option("--omega", pipe.omega_rot, "Rotation rate Omega (rad/s)")->capture_default_str();
  pipeline->add_option("--center-frequency", pipe.center_frequency,
                       "Degenerate photon angular frequency (rad/s)")
      ->check(CLI::PositiveNumber)->capture_default_str();
  double pipe_tau = 0.0;
  auto* tau_opt = pipeline->add_option(
      "--tau", pipe_tau, "Also print the coincidence branch after a delay tau (s)");

  JsaParams jsa;
  double jsa_a = 0.0;
  std::string jsa_out = "-", jsa_svg;
  auto* jsa_cmd = app.add_subcommand("jsa", "Write the joint spectral amplitude grid as CSV");
  jsa_cmd->add_option("--sigma", jsa.sigma, "Pump spectral width sigma (rad/s)")
      ->check(CLI::PositiveNumber)->capture_default_str();
  jsa_cmd->add_option("--gamma", jsa.gamma, "Phase-matching exponent gamma")
      ->check(CLI::PositiveNumber)->capture_default_str();
  auto* a_opt = jsa_cmd->add_option("--a-coef", jsa_a,
                                    "Phase-matching coefficient A = -B (s); "
                                    "default 0.7 / (sigma sqrt(2 gamma))");
  jsa_cmd->add_option("--rde-l", jsa.rde_l, "OAM charge of the rotational shift (0 = unshifted)")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  jsa_cmd->add_option("--rde-omega", jsa.rde_omega, "Rotation rate Omega (rad/s)")->capture_default_str();
  jsa_cmd->add_option("--half-width", jsa.half_width, "Grid half width in nu1 and nu2 (rad/s)")
      ->check(CLI::PositiveNumber)->capture_default_str();
  jsa_cmd->add_option("--grid", jsa.grid, "Grid points per axis")
      ->check(CLI::Range(16, 4096))->capture_default_str();
  jsa_cmd->add_option("--out", jsa_out, "CSV output path, - for stdout")->capture_default_str();
  jsa_cmd->add_option("--svg", jsa_svg, "Optional SVG heatmap path");

  HomParams hom;
  std::string hom_out = "-", hom_svg_path;
  auto* hom_cmd = app.add_subcommand("hom", "Write a HOM coincidence trace as CSV");
  hom_cmd->add_option("--tau-c", hom.tau_c, "Envelope width tau_c (s)")
      ->check(CLI::PositiveNumber)->capture_default_str();
  hom_cmd->add_option("--l", hom.l, "OAM charge")->check(CLI::NonNegativeNumber)->capture_default_str();
  hom_cmd->add_option("--omega", hom.omega_rot, "Rotation rate Omega (rad/s)")->capture_default_str();
  hom_cmd->add_option("--points", hom.points, "Number of delay samples")
      ->check(CLI::Range(2, 1000000))->capture_default_str();
  hom_cmd->add_option("--tau-span", hom.tau_span, "Delays cover [-span, span] (s)")
      ->check(CLI::PositiveNumber)->capture_default_str();
  std::string hom_method = "closed";
  hom_cmd->add_option("--method", hom_method, "closed form or numeric overlap quadrature")
      ->check(CLI::IsMember({"closed", "numeric"}))->capture_default_str();
  hom_cmd->add_option("--noise", hom.noise, "Additive Gaussian noise sigma (closed method only)")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  hom_cmd->add_option("--seed", hom.seed, "Noise RNG seed")->capture_default_str();
  hom_cmd->add_option("--out", hom_out, "CSV output path, - for stdout")->capture_default_str();
  hom_cmd->add_option("--svg", hom_svg_path, "Optional SVG plot path");

  PhaseMatchParams pm;
  std::vector<double> sell_o, sell_e;
  std::string pm_out = "-", pm_svg;
  auto* pm_cmd = app.add_subcommand("phasematch", "Write type-II emission angle curves as CSV");
  pm_cmd->add_option("--cut-angle", pm.cut_angle_deg, "Crystal cut angle (deg), in (0, 90)")
      ->capture_default_str();
  pm_cmd->add_option("--pump-frequency", pm.pump_frequency_thz, "Pump frequency (THz)")
      ->check(CLI::PositiveNumber)->capture_default_str();
  pm_cmd->add_option("--freq-min", pm.freq_min_thz, "Lowest signal frequency (THz)")->capture_default_str();
  pm_cmd->add_option("--freq-max", pm.freq_max_thz, "Highest signal frequency (THz)")->capture_default_str();
  pm_cmd->add_option("--points", pm.points, "Frequency samples")
      ->check(CLI::Range(2, 1000000))->capture_default_str();
  pm_cmd->add_option("--sellmeier-o", sell_o,
                     "Ordinary Sellmeier a b c d, n^2 = a + b/(lambda^2 - c) - d lambda^2 (lambda in um)")
      ->expected(4);
  pm_cmd->add_option("--sellmeier-e", sell_e, "Extraordinary Sellmeier a b c d, same form")
      ->expected(4);
  pm_cmd->add_option("--out", pm_out, "CSV output path, - for stdout")->capture_default_str();
  pm_cmd->add_option("--svg", pm_svg, "Optional SVG plot path");

  std::string est_in, est_out = "-";
  auto* est_cmd = app.add_subcommand("estimate", "Fit a HOM trace CSV and write the estimate as JSON");
  est_cmd->add_option("--in", est_in, "Input trace CSV (columns tau_s,p)")->required();
  est_cmd->add_option("--out", est_out, "JSON output path, - for stdout")->capture_default_str();

  std::string fig_dir;
  bool fig_svg = false;
  auto* fig_cmd = app.add_subcommand("figures", "Write the figure CSVs into a directory");
  fig_cmd->add_option("--out-dir", fig_dir, "Output directory (created if missing)")->required();
  fig_cmd->add_flag("--svg", fig_svg, "Also write an SVG next to each CSV");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto parsed = app.get_subcommands();
    err << (parsed.empty() ? app.help() : parsed.front()->help());
    return kExitUsage;
  }

  const std::string stamp = timestamp_now();
  try {
    if (*pipeline) {
      if (*tau_opt) pipe.tau = pipe_tau;
      out << pipeline_report(pipe, stamp);
    } else if (*jsa_cmd) {
      if (*a_opt) jsa.a_coef = jsa_a;
      const auto doc = jsa_document(jsa, !jsa_svg.empty());
      emit(jsa_out, csv_text(stamped(doc.csv, stamp)), out);
      if (!jsa_svg.empty()) emit(jsa_svg, doc.svg, out);
    } else if (*hom_cmd) {
      hom.method = hom_method == "numeric" ? HomMethod::Numeric : HomMethod::Closed;
      const auto doc = hom_document(hom);
      emit(hom_out, csv_text(stamped(doc.csv, stamp)), out);
      if (!hom_svg_path.empty()) emit(hom_svg_path, hom_svg(doc, hom), out);
    } else if (*pm_cmd) {
      pm.sellmeier_o = coefficients(sell_o);
      pm.sellmeier_e = coefficients(sell_e);
      const auto doc = phasematch_document(pm);
      emit(pm_out, csv_text(stamped(doc, stamp)), out);
      if (!pm_svg.empty()) emit(pm_svg, phasematch_svg(doc), out);
    } else if (*est_cmd) {
      std::ifstream in(est_in);
      if (!in) throw Error(ErrorKind::InvalidInput, "cannot open '" + est_in + "'");
      const auto trace = trace_from_csv(read_csv(in));
      const auto result = estimate(trace);
      emit(est_out, estimate_json(result, est_in, trace.samples.size(), stamp), out);
      if (!result.converged) {
        err << "warning: fit did not converge\n";
        return kExitNotConverged;
      }
    } else if (*fig_cmd) {
      std::error_code ec;
      std::filesystem::create_directories(fig_dir, ec);
      if (ec) throw OutputFailure{fig_dir};
      const std::filesystem::path dir(fig_dir);
      for (const auto& f : figure_documents(fig_svg)) {
        emit((dir / (f.stem + ".csv")).string(), csv_text(stamped(f.csv, stamp)), out);
        if (fig_svg) emit((dir / (f.stem + ".svg")).string(), f.svg, out);
      }
    }
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const OutputFailure& e) {
    err << "error: cannot write '" << e.path << "'\n";
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace freqent::cli
