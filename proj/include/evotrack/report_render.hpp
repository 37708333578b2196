#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "evotrack/evaluation.hpp"

namespace evotrack {

/// Grayscale heatmap of the aligned score matrix: one rectangle per
/// (method, origin) cell, darker = higher, with row/column labels and the
/// cell value embedded as a <title> tooltip. `metric_label` is "APCC" or
/// "APNP". The matrix must be non-empty.
std::string heatmap_svg(const AlignedScores& aligned, bool apnp_metric,
                        const std::string& metric_label);

struct QuantityBar {
  std::string dataset;
  std::string method;
  std::size_t count = 0;
};

/// Grouped bar chart of evolving-community counts, one bar per
/// (dataset, method), linear axis from 0. Zero-count bars keep their label.
std::string quantity_chart_svg(const std::vector<QuantityBar>& bars);

}  // namespace evotrack
