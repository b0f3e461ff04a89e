#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "edgetap/preset.hpp"
#include "edgetap/report.hpp"

namespace edgetap::plot {

inline constexpr std::size_t kDefaultDensityPoints = 1001;

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
  bool line = false;
};

/// A minimal static chart: frame, ticks, one polyline or point cloud per
/// series, optional y = x reference.
std::string svg_chart(const std::string& title, const std::string& x_label,
                      const std::string& y_label, const std::vector<Series>& series,
                      bool identity_line = false);

/// Predicted skew-normal, Gaussian baseline and (when given) moment-matched
/// observed densities on one grid, screen orientation.
struct DensityOverlay {
  std::vector<double> x_mm;
  std::vector<double> predicted;
  std::vector<double> gaussian;
  std::vector<double> observed;  ///< empty when no observation
  double size_mm = 0.0;
};

DensityOverlay density_overlay(const TargetCondition& condition, const Preset& preset,
                               const TapMoments* observed_screen, std::size_t points);
std::string density_csv(const DensityOverlay& overlay);

/// Writes scatter data per model row, likelihood ratio vs edge distance, and
/// one density overlay per condition. Returns the files written.
std::vector<std::filesystem::path> write_report_plots(const FitDocument& doc,
                                                      const std::filesystem::path& out_dir,
                                                      std::size_t density_points);

std::vector<std::filesystem::path> write_prediction_plot(const TargetCondition& condition,
                                                         const Preset& preset,
                                                         const std::filesystem::path& out_dir,
                                                         std::size_t density_points);

}  // namespace edgetap::plot
