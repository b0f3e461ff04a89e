#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "CLI11.hpp"
#include "edgetap/api.hpp"
#include "edgetap/experiment_data.hpp"
#include "edgetap/fitting.hpp"
#include "edgetap/preset.hpp"
#include "edgetap/report.hpp"
#include "edgetap/simulator.hpp"
#include "json.hpp"
#include "plot.hpp"
#include "service.hpp"

namespace edgetap::cli {
namespace {

const CLI::Validator kPositiveValue(
    [](std::string& in) -> std::string {
      double v = 0.0;
      if (!CLI::detail::lexical_cast(in, v) || !(v > 0.0)) return "must be positive, got " + in;
      return {};
    },
    "POSITIVE");

const CLI::Validator kNonNegativeValue(
    [](std::string& in) -> std::string {
      double v = 0.0;
      if (!CLI::detail::lexical_cast(in, v) || !(v >= 0.0)) {
        return "must be non-negative, got " + in;
      }
      return {};
    },
    "NONNEGATIVE");

struct GeometryFlags {
  DeviceGeometry geometry;

  void add(CLI::App& cmd) {
    cmd.add_option("--px-per-mm", geometry.px_per_mm, "Display density for *_px columns")
        ->check(kPositiveValue)
        ->capture_default_str();
    cmd.add_option("--display-w-mm", geometry.display_w_mm, "Display width")
        ->check(kPositiveValue)
        ->capture_default_str();
    cmd.add_option("--display-h-mm", geometry.display_h_mm, "Display height")
        ->check(kPositiveValue)
        ->capture_default_str();
  }
};

CLI::Option* add_edge(CLI::App& cmd, std::string& target, const std::string& help) {
  return cmd.add_option("--edge", target, help)
      ->check(CLI::IsMember({"left", "right", "top", "bottom"}));
}

Edge edge_of(const std::string& name) { return *parse_edge(name); }

PresetRegistry registry(const std::optional<std::string>& dir) {
  return PresetRegistry(resolve_preset_dir(dir));
}

/// Preset lookup failures map to the preset exit code.
struct PresetFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Preset lookup(const PresetRegistry& presets, const std::string& name) {
  try {
    return presets.get(name);
  } catch (const Error& e) {
    throw PresetFailure(e.what());
  }
}

void write_text(const std::string& path, const std::string& body, std::ostream& out) {
  if (path == "-") {
    out << body;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::kIo, "cannot write " + path);
  file << body;
  if (!file) throw Error(ErrorCode::kIo, "write failed for " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string metrics_line(const char* label, const FitReport& r) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(3) << std::left << std::setw(12) << label << " R2 "
    << r.r2 << "  MAE " << r.mae << "  RMSE " << r.rmse << "  MAPE " << r.mape << "%\n";
  return s.str();
}

nlohmann::json metrics_json(const FitReport& r) {
  return {{"r2", r.r2}, {"mae", r.mae}, {"rmse", r.rmse}, {"mape", r.mape},
          {"mape_excluded", r.mape_excluded}};
}

}  // namespace

std::filesystem::path resolve_preset_dir(const std::optional<std::string>& flag) {
  if (flag && !flag->empty()) return *flag;
  if (const char* env = std::getenv("EDGETAP_PRESET_DIR"); env && *env) return env;
  return EDGETAP_DEFAULT_PRESET_DIR;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tap success-rate model for targets near screen edges"};
  app.set_version_flag("--version", EDGETAP_VERSION);
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::string> preset_dir;
  app.add_option("--preset-dir", preset_dir,
                 "Preset directory (default: $EDGETAP_PRESET_DIR, then the install location)");

  // predict
  auto* predict = app.add_subcommand("predict", "Predict the success rate of one target");
  api::PredictRequest req;
  req.preset = "pixel6a-left-index";
  std::string format = "text";
  std::optional<std::size_t> curve_points;
  predict->add_option("--preset", req.preset, "Preset name")->capture_default_str();
  predict->add_option("--size-mm", req.size_mm, "Target width along the edge-normal axis")
      ->required()
      ->check(kPositiveValue);
  predict->add_option("--margin-mm", req.margin_mm, "Gap between target and edge")
      ->required()
      ->check(kNonNegativeValue);
  std::string predict_edge = "left";
  add_edge(*predict, predict_edge, "left, right, top or bottom")->capture_default_str();
  predict->add_option("--format", format, "json or text")
      ->check(CLI::IsMember({"json", "text"}))
      ->capture_default_str();
  predict->add_option("--curve-points", curve_points, "Also sample the predicted density")
      ->check(CLI::Range(std::size_t{2}, api::kMaxCurvePoints));

  // fit
  auto* fit = app.add_subcommand("fit", "Fit both models to a tap log");
  std::string log_path, out_preset, out_report, fit_name = "fitted", device = "unknown";
  GeometryFlags fit_geometry;
  fit->add_option("--log", log_path, "Tap-log CSV")->required();
  fit->add_option("--out-preset", out_preset, "Write the fitted preset here");
  fit->add_option("--out-report", out_report, "Write the fit report document here");
  fit->add_option("--name", fit_name, "Preset name")->capture_default_str();
  fit->add_option("--device", device, "Device label")->capture_default_str();
  fit_geometry.add(*fit);

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Score a preset against a tap log");
  std::string eval_preset = "pixel6a-left-index", eval_format = "text";
  GeometryFlags eval_geometry;
  evaluate->add_option("--preset", eval_preset, "Preset name")->capture_default_str();
  evaluate->add_option("--log", log_path, "Tap-log CSV")->required();
  evaluate->add_option("--format", eval_format, "json or text")
      ->check(CLI::IsMember({"json", "text"}))
      ->capture_default_str();
  eval_geometry.add(*evaluate);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic tap log");
  ExperimentDesign design;
  std::string truth = "pixel6a-left-index", sim_out = "-";
  std::string sim_edge;
  simulate->add_option("--preset", truth, "Preset used as ground truth")->capture_default_str();
  simulate->add_option("--out", sim_out, "Output CSV, - for stdout")->capture_default_str();
  simulate->add_option("--seed", design.seed)->capture_default_str();
  simulate->add_option("--participants", design.participants)
      ->check(kPositiveValue)
      ->capture_default_str();
  simulate->add_option("--sets", design.sets, "Sets per participant, practice set included")
      ->check(kPositiveValue)
      ->capture_default_str();
  add_edge(*simulate, sim_edge, "Defaults to the preset's edge");
  simulate->add_option("--margins-mm", design.margins_mm)->delimiter(',');
  simulate->add_option("--sizes-mm", design.sizes_mm)->delimiter(',');
  simulate->add_option("--participant-mu-sd", design.participant_mu_sd)
      ->check(kNonNegativeValue)
      ->capture_default_str();
  simulate->add_option("--perp-miss-rate", design.perpendicular_miss_rate)
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  simulate->add_option("--contamination-rate", design.contamination_rate)
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  simulate->add_option("--contamination-sd", design.contamination_sd_multiple)
      ->check(kPositiveValue)
      ->capture_default_str();

  // plot
  auto* plot = app.add_subcommand("plot", "Write CSV and SVG figures");
  std::optional<std::string> report_path, plot_preset;
  std::string out_dir = "plots";
  std::size_t density_points = plot::kDefaultDensityPoints;
  double plot_size = 0.0, plot_margin = 0.0;
  std::string plot_edge = "left";
  plot->add_option("--report", report_path, "Fit report document");
  plot->add_option("--preset", plot_preset, "Plot one prediction instead of a report");
  plot->add_option("--size-mm", plot_size)->check(kPositiveValue);
  plot->add_option("--margin-mm", plot_margin)->check(kNonNegativeValue);
  add_edge(*plot, plot_edge, "left, right, top or bottom")->capture_default_str();
  plot->add_option("--out-dir", out_dir)->capture_default_str();
  plot->add_option("--points", density_points, "Samples per density curve")
      ->check(CLI::Range(std::size_t{2}, api::kMaxCurvePoints))
      ->capture_default_str();

  // serve
  auto* serve = app.add_subcommand("serve", "Run the JSON prediction service");
  int port = 8080;
  std::string host = "127.0.0.1";
  serve->add_option("--port", port)->check(CLI::Range(1, 65535))->capture_default_str();
  serve->add_option("--host", host)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (*predict) {
      req.edge = edge_of(predict_edge);
      req.curve_points = curve_points;
      api::PredictResponse resp;
      try {
        resp = api::predict(req, registry(preset_dir));
      } catch (const api::RequestError& e) {
        err << "error: " << e.what() << '\n';
        return e.field() == "preset" ? kPresetError : kUsage;
      }
      out << (format == "json" ? api::to_json(resp) + "\n" : api::to_text(resp));
      return kOk;
    }
    if (*fit) {
      validate(fit_geometry.geometry);
      FitDocument doc = analyze(load_tap_log(log_path, fit_geometry.geometry), fit_name, device);
      if (!out_preset.empty()) save_preset_file(to_preset(doc), out_preset);
      if (!out_report.empty()) write_text(out_report, format_fit_document(doc), out);
      out << render_fit_table(doc);
      return kOk;
    }
    if (*evaluate) {
      const Preset preset = lookup(registry(preset_dir), eval_preset);
      const auto summaries =
          summarize(filter_outliers(load_tap_log(log_path, eval_geometry.geometry)));
      const FitReport skew = evaluate_sr(summaries, preset.coeffs);
      const FitReport gauss = evaluate_sr(summaries, preset.gaussian);
      if (eval_format == "json") {
        out << nlohmann::json{{"preset", preset.name},
                              {"conditions", summaries.size()},
                              {"skewed_sr", metrics_json(skew)},
                              {"gaussian_sr", metrics_json(gauss)}}
                   .dump()
            << '\n';
      } else {
        out << "preset " << preset.name << ", " << summaries.size() << " conditions\n"
            << metrics_line("Skewed SR", skew) << metrics_line("Gaussian SR", gauss);
      }
      return kOk;
    }
    if (*simulate) {
      const Preset preset = lookup(registry(preset_dir), truth);
      design.edge = sim_edge.empty() ? preset.edge : edge_of(sim_edge);
      const auto rows = generate_experiment(design, preset.coeffs);
      std::ostringstream csv;
      write_tap_log(csv, rows);
      write_text(sim_out, csv.str(), out);
      return kOk;
    }
    if (*plot) {
      std::vector<std::filesystem::path> written;
      if (report_path) {
        written = plot::write_report_plots(parse_fit_document(read_text(*report_path)), out_dir,
                                           density_points);
      } else if (plot_preset) {
        if (!(plot_size > 0.0)) {
          err << "error: --size-mm is required with --preset\n";
          return kUsage;
        }
        const Preset preset = lookup(registry(preset_dir), *plot_preset);
        const Edge edge = edge_of(plot_edge);
        const TargetCondition cond{plot_size, plot_margin, side_of(edge),
                                   std::string(axis_of(edge))};
        written = plot::write_prediction_plot(cond, preset, out_dir, density_points);
      } else {
        err << "error: plot needs --report or --preset\n";
        return kUsage;
      }
      for (const auto& p : written) out << p.string() << '\n';
      return kOk;
    }
    if (*serve) {
      const PresetRegistry presets = registry(preset_dir);
      err << "listening on http://" << host << ':' << port << '\n';
      if (!service::serve(host, port, presets)) {
        err << "error: cannot bind " << host << ':' << port << '\n';
        return kFailure;
      }
      return kOk;
    }
  } catch (const PresetFailure& e) {
    err << "error: " << e.what() << '\n';
    return kPresetError;
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return e.code() == ErrorCode::kInvalidCoefficients ||
                   e.code() == ErrorCode::kInadmissibleTruth
               ? kPresetError
               : kFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace edgetap::cli
