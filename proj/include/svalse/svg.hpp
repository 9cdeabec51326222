// Minimal self-contained SVG renderers for the batch plots: DOA-vs-time
// scatter over a beamformer heatmap, and generic labeled curve families.
#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace svalse {

struct XyPoint {
  double x = 0.0;
  double y = 0.0;
};

struct PointSeries {
  std::string name;
  std::vector<XyPoint> points;
};

struct CurveSeries {
  std::string name;
  std::vector<double> y; // same length as the shared x grid
};

/// DOA-versus-time figure: `power` holds one beamformer spectrum per time
/// step (rows = steps, cols = grid_deg), drawn as a dB-scaled heatmap, with
/// the given scatter series on top.
void svg_doa_time(const std::string& path, const std::string& title,
                  const Eigen::MatrixXd& power, const std::vector<double>& grid_deg,
                  const std::vector<PointSeries>& scatter);

/// Labeled polyline chart over a shared x grid.
void svg_curves(const std::string& path, const std::string& title,
                const std::string& xlabel, const std::string& ylabel,
                const std::vector<double>& x, const std::vector<CurveSeries>& series);

} // namespace svalse
