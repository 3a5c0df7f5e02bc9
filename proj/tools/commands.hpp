// Document builders behind each subcommand. Each validates its parameters
// (throwing freqent::Error) and returns what the command writes, minus the
// tool and timestamp lines.
#pragma once

#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "csv.hpp"
#include "freqent/hom_interference.hpp"
#include "freqent/phase_match.hpp"
#include "freqent/rotation_estimator.hpp"

namespace freqent::cli {

inline constexpr const char* kToolName = "freqent";
inline constexpr const char* kToolVersion = "0.1.0";

struct PipelineParams {
  int l = 2;
  double omega_rot = 1e12;                                   // rad/s
  double center_frequency = 2.0 * std::numbers::pi * 370.44e12;  // rad/s
  std::optional<double> tau;                                 // s
};

struct JsaParams {
  double sigma = 1e12;  // rad/s
  double gamma = 0.1;
  std::optional<double> a_coef;  // s; defaults to 0.7 / (sigma sqrt(2 gamma))
  int rde_l = 0;
  double rde_omega = 0.0;     // rad/s
  double half_width = 6e12;   // rad/s
  int grid = 256;
};

struct HomParams {
  double tau_c = 1e-12;  // s
  int l = 0;
  double omega_rot = 0.0;  // rad/s
  int points = 601;
  double tau_span = 3e-12;  // s, grid covers [-span, span]
  HomMethod method = HomMethod::Closed;
  double noise = 0.0;
  std::uint64_t seed = 0;
};

struct PhaseMatchParams {
  double cut_angle_deg = 45.0;
  double pump_frequency_thz = 740.88;
  double freq_min_thz = 300.0;
  double freq_max_thz = 440.0;
  int points = 1401;
  std::optional<SellmeierCoefficients> sellmeier_o;
  std::optional<SellmeierCoefficients> sellmeier_e;
};

struct JsaOutput {
  CsvDocument csv;
  std::string svg;
};

struct HomOutput {
  CsvDocument csv;
  NoisyTrace trace;
};

struct FigureFile {
  std::string stem;  // e.g. "fig4b"
  CsvDocument csv;
  std::string svg;
};

std::string pipeline_report(const PipelineParams& p, const std::string& timestamp);
JsaOutput jsa_document(const JsaParams& p, bool with_svg);
HomOutput hom_document(const HomParams& p);
std::string hom_svg(const HomOutput& h, const HomParams& p);
CsvDocument phasematch_document(const PhaseMatchParams& p);
std::string phasematch_svg(const CsvDocument& doc);
std::string estimate_json(const EstimateResult& r, const std::string& input,
                          std::size_t n_samples, const std::string& timestamp);

std::vector<FigureFile> figure_documents(bool with_svg);

// ISO-8601 UTC, taken from SOURCE_DATE_EPOCH when that is set.
std::string timestamp_now();

// Returns a copy with tool, timestamp and command metadata in front.
CsvDocument stamped(CsvDocument doc, const std::string& timestamp);

}  // namespace freqent::cli
