#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "heatobs/grid.hpp"
#include "heatobs/surface.hpp"

namespace heatobs {

/// Axis-aligned plane, e.g. {2, 0.0} for z = 0. Coordinate in metres.
struct SlicePlane {
  int axis = 2;
  double coordinate = 0.0;
};

/// Parses "x=1.5", "y=0", "z=-1" with the coordinate in cm.
SlicePlane parse_slice_plane(const std::string& text);

struct IntensityRange {
  double min = 0.0;  // K, maps to 0
  double max = 0.0;  // K, maps to 255
};

/// Parses "300:400" (K).
IntensityRange parse_range(const std::string& text);

/// Row-major image; row 0 is the top of the picture.
struct SliceImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> values;

  double at(std::size_t row, std::size_t col) const noexcept { return values[row * width + col]; }
};

/// Values on the node plane nearest to the requested coordinate. The
/// horizontal image axis is the lower remaining grid axis; rows run from the
/// largest coordinate of the other axis down, so vertical slices show the
/// surface at the top. Throws ConfigError if the plane misses the grid by
/// more than half a spacing.
SliceImage extract_slice(const ScalarField3D& field, const SlicePlane& plane);

/// Frames use the same convention: columns along x, rows from y max down.
SliceImage frame_image(const SurfaceFrame& frame);

/// Writes an 8-bit binary PGM with a linear temperature map and a sidecar
/// `<path>.range.txt` stating the [min, max] K range. Without an explicit
/// range the data extent is used. Throws ConfigError when min >= max.
void write_pgm(const std::filesystem::path& path, const SliceImage& image,
               const std::optional<IntensityRange>& range = std::nullopt);

void export_heatmap(const ScalarField3D& field, const SlicePlane& plane, const std::filesystem::path& path,
                    const std::optional<IntensityRange>& range = std::nullopt);
void export_heatmap(const SurfaceFrame& frame, const std::filesystem::path& path,
                    const std::optional<IntensityRange>& range = std::nullopt);

}  // namespace heatobs
