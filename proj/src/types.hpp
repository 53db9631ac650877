#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace midas {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

struct SensorLayout {
  std::vector<int> ids;        // 1-based sensor ids, parallel to pos
  std::vector<Point> pos_cm;

  std::size_t size() const { return ids.size(); }

  // Smallest pairwise sensor distance; localization radii default to half of it.
  double min_pitch_cm() const {
    double best = -1.0;
    for (std::size_t i = 0; i < pos_cm.size(); ++i)
      for (std::size_t j = i + 1; j < pos_cm.size(); ++j) {
        double d = distance(pos_cm[i], pos_cm[j]);
        if (best < 0.0 || d < best) best = d;
      }
    return best;
  }
};

/// Multichannel strain record: time axis plus one series per sensor, in microstrain.
struct StrainSet {
  double timestep = 0.025;                  // seconds between samples
  std::vector<double> time;                 // T entries
  std::vector<std::vector<double>> strain;  // N sensors x T samples

  std::size_t sensor_count() const { return strain.size(); }
  std::size_t sample_count() const { return time.size(); }
};

}  // namespace midas
