#include "evotrack/report_render.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "evotrack/errors.hpp"
#include "evotrack/format.hpp"

namespace evotrack {

namespace {

// v in [0,1] -> grayscale fill, darker for higher values.
std::string gray_fill(double v) {
  const int level = 245 - static_cast<int>(std::lround(225.0 * std::clamp(v, 0.0, 1.0)));
  const std::string s = std::to_string(level);
  return "rgb(" + s + "," + s + "," + s + ")";
}

const char* method_color(const std::string& method) {
  static const std::map<std::string, const char*> palette = {
      {"greene", "#4e79a7"},
      {"takaffoli", "#f28e2b"},
      {"ged", "#59a14f"},
      {"tajeuna", "#b07aa1"},
  };
  auto it = palette.find(method);
  return it == palette.end() ? "#777777" : it->second;
}

}  // namespace

std::string heatmap_svg(const AlignedScores& aligned, bool apnp_metric,
                        const std::string& metric_label) {
  if (aligned.empty()) throw std::invalid_argument("heatmap_svg: empty aligned matrix");

  const double cell = 26.0;
  const double left = 96.0, top = 72.0;
  const double width = left + cell * static_cast<double>(aligned.origins.size()) + 16.0;
  const double height = top + cell * static_cast<double>(aligned.methods.size()) + 16.0;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt_double(width)
      << "\" height=\"" << fmt_double(height) << "\">\n";
  svg << "<text x=\"8\" y=\"18\" font-size=\"14\" font-family=\"sans-serif\">" << metric_label
      << "</text>\n";

  for (std::size_t oi = 0; oi < aligned.origins.size(); ++oi) {
    const double x = left + cell * static_cast<double>(oi) + cell / 2.0;
    svg << "<text x=\"" << fmt_double(x) << "\" y=\"" << fmt_double(top - 6.0)
        << "\" font-size=\"9\" font-family=\"sans-serif\" text-anchor=\"start\" transform=\"rotate(-55 "
        << fmt_double(x) << ' ' << fmt_double(top - 6.0) << ")\">"
        << to_string(aligned.origins[oi]) << "</text>\n";
  }
  for (std::size_t mi = 0; mi < aligned.methods.size(); ++mi) {
    const double y = top + cell * static_cast<double>(mi) + cell * 0.65;
    svg << "<text x=\"" << fmt_double(left - 8.0) << "\" y=\"" << fmt_double(y)
        << "\" font-size=\"11\" font-family=\"sans-serif\" text-anchor=\"end\">"
        << method_name(aligned.methods[mi]) << "</text>\n";
  }

  for (std::size_t mi = 0; mi < aligned.methods.size(); ++mi) {
    const auto& row = apnp_metric ? aligned.apnp_cells[mi] : aligned.apcc_cells[mi];
    for (std::size_t oi = 0; oi < aligned.origins.size(); ++oi) {
      const double v = row[oi];
      svg << "<rect x=\"" << fmt_double(left + cell * static_cast<double>(oi)) << "\" y=\""
          << fmt_double(top + cell * static_cast<double>(mi)) << "\" width=\"" << fmt_double(cell)
          << "\" height=\"" << fmt_double(cell) << "\" fill=\"" << gray_fill(v)
          << "\" stroke=\"#ffffff\"><title>" << metric_label << ' '
          << method_name(aligned.methods[mi]) << ' ' << to_string(aligned.origins[oi]) << " = "
          << fmt_double(v) << "</title></rect>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string quantity_chart_svg(const std::vector<QuantityBar>& bars) {
  if (bars.empty()) throw std::invalid_argument("quantity_chart_svg: no bars");

  // Group bars by dataset, preserving first-seen order.
  std::vector<std::string> datasets;
  for (const auto& b : bars)
    if (std::find(datasets.begin(), datasets.end(), b.dataset) == datasets.end())
      datasets.push_back(b.dataset);
  std::size_t max_group = 0;
  for (const auto& d : datasets) {
    std::size_t n = 0;
    for (const auto& b : bars)
      if (b.dataset == d) ++n;
    max_group = std::max(max_group, n);
  }
  std::size_t max_count = 1;
  for (const auto& b : bars) max_count = std::max(max_count, b.count);

  const double bar_w = 34.0, gap = 6.0, group_gap = 30.0;
  const double left = 56.0, top = 24.0, plot_h = 220.0, bottom = 56.0;
  const double group_w = static_cast<double>(max_group) * (bar_w + gap) + group_gap;
  const double width = left + group_w * static_cast<double>(datasets.size()) + 24.0;
  const double height = top + plot_h + bottom;
  const double baseline = top + plot_h;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt_double(width)
      << "\" height=\"" << fmt_double(height) << "\">\n";

  // y axis with 4 gridlines, linear from 0
  for (int g = 0; g <= 4; ++g) {
    const double frac = static_cast<double>(g) / 4.0;
    const double y = baseline - plot_h * frac;
    const double value = static_cast<double>(max_count) * frac;
    svg << "<line x1=\"" << fmt_double(left) << "\" y1=\"" << fmt_double(y) << "\" x2=\""
        << fmt_double(width - 12.0) << "\" y2=\"" << fmt_double(y)
        << "\" stroke=\"#dddddd\"/>\n";
    svg << "<text x=\"" << fmt_double(left - 6.0) << "\" y=\"" << fmt_double(y + 4.0)
        << "\" font-size=\"10\" font-family=\"sans-serif\" text-anchor=\"end\">"
        << fmt_double(value) << "</text>\n";
  }

  double x = left + group_gap / 2.0;
  for (const auto& d : datasets) {
    const double group_start = x;
    for (const auto& b : bars) {
      if (b.dataset != d) continue;
      const double h = plot_h * static_cast<double>(b.count) / static_cast<double>(max_count);
      svg << "<rect x=\"" << fmt_double(x) << "\" y=\"" << fmt_double(baseline - h)
          << "\" width=\"" << fmt_double(bar_w) << "\" height=\"" << fmt_double(h) << "\" fill=\""
          << method_color(b.method) << "\"><title>" << b.dataset << ' ' << b.method << " = "
          << b.count << "</title></rect>\n";
      svg << "<text x=\"" << fmt_double(x + bar_w / 2.0) << "\" y=\""
          << fmt_double(baseline - h - 4.0)
          << "\" font-size=\"10\" font-family=\"sans-serif\" text-anchor=\"middle\">" << b.count
          << "</text>\n";
      svg << "<text x=\"" << fmt_double(x + bar_w / 2.0) << "\" y=\""
          << fmt_double(baseline + 12.0)
          << "\" font-size=\"9\" font-family=\"sans-serif\" text-anchor=\"middle\">" << b.method
          << "</text>\n";
      x += bar_w + gap;
    }
    const double group_end = x - gap;
    svg << "<text x=\"" << fmt_double((group_start + group_end) / 2.0) << "\" y=\""
        << fmt_double(baseline + 30.0)
        << "\" font-size=\"11\" font-family=\"sans-serif\" text-anchor=\"middle\">" << d
        << "</text>\n";
    x += group_gap;
  }
  svg << "<line x1=\"" << fmt_double(left) << "\" y1=\"" << fmt_double(baseline) << "\" x2=\""
      << fmt_double(width - 12.0) << "\" y2=\"" << fmt_double(baseline)
      << "\" stroke=\"#333333\"/>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace evotrack
