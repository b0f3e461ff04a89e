#include "plot.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "edgetap/api.hpp"
#include "edgetap/edge_model.hpp"
#include "edgetap/errors.hpp"
#include "edgetap/skew_normal.hpp"

namespace edgetap::plot {
namespace {

std::string num(double v) {
  if (!std::isfinite(v)) return "";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fixed(double v, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += ch;
    }
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& body,
                std::vector<std::filesystem::path>& written) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << body;
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
  written.push_back(path);
}

std::string condition_stem(const ConditionKey& key) {
  return std::string(to_string(key.edge)) + "_s" + fixed(key.size_mm, 3) + "_m" +
         fixed(key.margin_mm, 3);
}

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

}  // namespace

std::string svg_chart(const std::string& title, const std::string& x_label,
                      const std::string& y_label, const std::vector<Series>& series,
                      bool identity_line) {
  constexpr double kW = 640, kH = 440, kL = 70, kR = 20, kT = 40, kB = 60;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      x0 = std::min(x0, x); x1 = std::max(x1, x);
      y0 = std::min(y0, y); y1 = std::max(y1, y);
    }
  }
  if (!std::isfinite(x0)) { x0 = 0; x1 = 1; y0 = 0; y1 = 1; }
  if (identity_line) {
    x0 = y0 = std::min(x0, y0);
    x1 = y1 = std::max(x1, y1);
  }
  if (x1 - x0 <= 0) { x0 -= 0.5; x1 += 0.5; }
  if (y1 - y0 <= 0) { y0 -= 0.5; y1 += 0.5; }
  const double px = (kW - kL - kR) / (x1 - x0), py = (kH - kT - kB) / (y1 - y0);
  const auto sx = [&](double x) { return kL + (x - x0) * px; };
  const auto sy = [&](double y) { return kH - kB - (y - y0) * py; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(title) << "</text>\n"
      << "<rect x=\"" << kL << "\" y=\"" << kT << "\" width=\"" << kW - kL - kR
      << "\" height=\"" << kH - kT - kB << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = x0 + (x1 - x0) * t / 4.0, yv = y0 + (y1 - y0) * t / 4.0;
    svg << "<text x=\"" << sx(xv) << "\" y=\"" << kH - kB + 16 << "\" text-anchor=\"middle\">"
        << fixed(xv, 2) << "</text>\n"
        << "<text x=\"" << kL - 6 << "\" y=\"" << sy(yv) + 4 << "\" text-anchor=\"end\">"
        << fixed(yv, 2) << "</text>\n";
  }
  svg << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 18 << "\" text-anchor=\"middle\">"
      << escape(x_label) << "</text>\n"
      << "<text x=\"16\" y=\"" << kH / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << kH / 2 << ")\">" << escape(y_label) << "</text>\n";
  if (identity_line) {
    svg << "<line x1=\"" << sx(x0) << "\" y1=\"" << sy(y0) << "\" x2=\"" << sx(x1) << "\" y2=\""
        << sy(y1) << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  }
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* colour = kPalette[i % std::size(kPalette)];
    if (s.line) {
      svg << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
      for (const auto& [x, y] : s.points) {
        if (std::isfinite(x) && std::isfinite(y)) svg << sx(x) << ',' << sy(y) << ' ';
      }
      svg << "\"/>\n";
    } else {
      for (const auto& [x, y] : s.points) {
        if (!std::isfinite(x) || !std::isfinite(y)) continue;
        svg << "<circle cx=\"" << sx(x) << "\" cy=\"" << sy(y) << "\" r=\"3\" fill=\"" << colour
            << "\"/>\n";
      }
    }
    svg << "<text x=\"" << kL + 10 << "\" y=\"" << kT + 16 + 14 * static_cast<double>(i)
        << "\" fill=\"" << colour << "\">" << escape(s.name) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

DensityOverlay density_overlay(const TargetCondition& condition, const Preset& preset,
                               const TapMoments* observed_screen, std::size_t points) {
  if (points < 2) throw Error(ErrorCode::kInvalidArgument, "density needs at least 2 points");
  const SrPrediction pred = predict_sr(condition, preset.coeffs);
  const double sigma_g = gaussian_sigma(condition, preset.gaussian);
  std::optional<SkewNormalShape> observed;
  if (observed_screen && observed_screen->sigma > 0.0) observed = moments_to_shape(*observed_screen);

  auto [lo, hi] = api::curve_range(pred.shape, condition.size_mm);
  lo = std::min(lo, -8.0 * sigma_g);
  hi = std::max(hi, 8.0 * sigma_g);
  if (observed) {
    const auto [olo, ohi] = api::curve_range(*observed, condition.size_mm);
    lo = std::min(lo, olo);
    hi = std::max(hi, ohi);
  }

  DensityOverlay out;
  out.size_mm = condition.size_mm;
  for (const auto& p : api::density_curve(pred.shape, lo, hi, points)) {
    out.x_mm.push_back(p.x_mm);
    out.predicted.push_back(p.density);
    out.gaussian.push_back(pdf(p.x_mm, SkewNormalShape{0.0, sigma_g, 0.0}));
    if (observed) out.observed.push_back(pdf(p.x_mm, *observed));
  }
  return out;
}

std::string density_csv(const DensityOverlay& o) {
  std::string out = o.observed.empty() ? "x_mm,predicted,gaussian\n"
                                       : "x_mm,predicted,gaussian,observed\n";
  for (std::size_t i = 0; i < o.x_mm.size(); ++i) {
    out += num(o.x_mm[i]) + ',' + num(o.predicted[i]) + ',' + num(o.gaussian[i]);
    if (!o.observed.empty()) out += ',' + num(o.observed[i]);
    out += '\n';
  }
  return out;
}

namespace {

std::string density_svg(const DensityOverlay& o, const std::string& title) {
  std::vector<Series> series(2);
  series[0] = {"predicted skew-normal", {}, true};
  series[1] = {"Gaussian baseline", {}, true};
  for (std::size_t i = 0; i < o.x_mm.size(); ++i) {
    series[0].points.emplace_back(o.x_mm[i], o.predicted[i]);
    series[1].points.emplace_back(o.x_mm[i], o.gaussian[i]);
  }
  if (!o.observed.empty()) {
    Series obs{"observed (moment-matched)", {}, true};
    for (std::size_t i = 0; i < o.x_mm.size(); ++i) obs.points.emplace_back(o.x_mm[i], o.observed[i]);
    series.push_back(std::move(obs));
  }
  Series target{"target", {{-o.size_mm / 2, 0.0}, {o.size_mm / 2, 0.0}}, true};
  series.push_back(std::move(target));
  return svg_chart(title, "tap offset from target center (mm)", "density", series);
}

}  // namespace

std::vector<std::filesystem::path> write_report_plots(const FitDocument& doc,
                                                      const std::filesystem::path& out_dir,
                                                      std::size_t density_points) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;

  for (const auto& row : doc.fit.rows) {
    const std::string id(row_id(row.row));
    std::string csv = "edge,size_mm,margin_mm,d_edge_mm,observed,predicted\n";
    Series pts{std::string(row_label(row.row)), {}, false};
    for (const auto& r : row.report.per_condition_residuals) {
      csv += std::string(to_string(r.key.edge)) + ',' + num(r.key.size_mm) + ',' +
             num(r.key.margin_mm) + ',' + num(r.d_edge_mm) + ',' + num(r.observed) + ',' +
             num(r.predicted) + '\n';
      pts.points.emplace_back(r.predicted, r.observed);
    }
    write_file(out_dir / ("scatter_" + id + ".csv"), csv, written);
    write_file(out_dir / ("scatter_" + id + ".svg"),
               svg_chart(std::string(row_label(row.row)) + ": observed vs predicted", "predicted",
                         "observed", {pts}, true),
               written);
  }

  std::string lr_csv = "edge,size_mm,margin_mm,d_edge_mm,n,statistic\n";
  Series lr{"likelihood ratio", {}, false};
  for (const auto& p : doc.likelihood_ratio) {
    lr_csv += std::string(to_string(p.key.edge)) + ',' + num(p.key.size_mm) + ',' +
              num(p.key.margin_mm) + ',' + num(p.d_edge_mm) + ',' + std::to_string(p.n) + ',' +
              num(p.statistic) + '\n';
    lr.points.emplace_back(p.d_edge_mm, p.statistic);
  }
  write_file(out_dir / "likelihood_ratio.csv", lr_csv, written);
  write_file(out_dir / "likelihood_ratio.svg",
             svg_chart("Skew-normal vs normal likelihood ratio", "D_edge (mm)", "LR statistic",
                       {lr}),
             written);

  const Preset preset = to_preset(doc);
  for (const auto& c : doc.conditions) {
    const double s = side_sign(c.condition.edge_side);
    const TapMoments screen{s * c.moments.mu, c.moments.sigma, s * c.moments.gamma1};
    const DensityOverlay o = density_overlay(c.condition, preset, &screen, density_points);
    const std::string stem = "density_" + condition_stem(c.key());
    write_file(out_dir / (stem + ".csv"), density_csv(o), written);
    write_file(out_dir / (stem + ".svg"),
               density_svg(o, "size " + fixed(c.condition.size_mm, 3) + " mm, margin " +
                                  fixed(c.condition.margin_mm, 3) + " mm"),
               written);
  }
  return written;
}

std::vector<std::filesystem::path> write_prediction_plot(const TargetCondition& condition,
                                                         const Preset& preset,
                                                         const std::filesystem::path& out_dir,
                                                         std::size_t density_points) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  const DensityOverlay o = density_overlay(condition, preset, nullptr, density_points);
  write_file(out_dir / "density.csv", density_csv(o), written);
  write_file(out_dir / "density.svg",
             density_svg(o, preset.name + ": size " + fixed(condition.size_mm, 3) +
                                " mm, margin " + fixed(condition.margin_mm, 3) + " mm"),
             written);
  return written;
}

}  // namespace edgetap::plot
