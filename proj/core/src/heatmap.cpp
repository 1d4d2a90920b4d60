#include "heatobs/heatmap.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "heatobs/errors.hpp"
#include "heatobs/field_io.hpp"

namespace heatobs {
namespace {

double parse_number(std::string_view s, const std::string& what) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ConfigError("bad " + what + ": '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

SlicePlane parse_slice_plane(const std::string& text) {
  if (text.size() < 3 || text[1] != '=') throw ConfigError("slice plane must look like z=0 (cm), got '" + text + "'");
  SlicePlane p;
  switch (text[0]) {
    case 'x': p.axis = 0; break;
    case 'y': p.axis = 1; break;
    case 'z': p.axis = 2; break;
    default: throw ConfigError("slice plane axis must be x, y or z, got '" + text + "'");
  }
  p.coordinate = parse_number(std::string_view(text).substr(2), "slice coordinate") * 1e-2;
  return p;
}

IntensityRange parse_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError("range must look like 300:400 (K), got '" + text + "'");
  IntensityRange r{parse_number(std::string_view(text).substr(0, colon), "range min"),
                   parse_number(std::string_view(text).substr(colon + 1), "range max")};
  if (!(r.min < r.max)) throw ConfigError("range min must be below max");
  return r;
}

SliceImage extract_slice(const ScalarField3D& field, const SlicePlane& plane) {
  if (plane.axis < 0 || plane.axis > 2) throw ConfigError("slice axis must be 0, 1 or 2");
  const Grid3& g = field.grid();
  const double h = g.spacing();
  const double f = (plane.coordinate - g.origin()[plane.axis]) / h;
  const double last = static_cast<double>(g.count(plane.axis) - 1);
  if (!(f >= -0.5) || !(f <= last + 0.5)) {
    throw ConfigError("slice plane " + std::string(1, "xyz"[plane.axis]) + " = " +
                      format_double(plane.coordinate) + " m lies outside the grid");
  }
  const auto fixed = static_cast<std::size_t>(std::clamp(std::round(f), 0.0, last));

  const int ha = plane.axis == 0 ? 1 : 0;  // horizontal axis
  const int va = plane.axis == 2 ? 1 : 2;  // vertical axis
  SliceImage img;
  img.width = g.count(ha);
  img.height = g.count(va);
  img.values.resize(img.width * img.height);
  for (std::size_t row = 0; row < img.height; ++row) {
    for (std::size_t col = 0; col < img.width; ++col) {
      Index3 ijk{};
      ijk[plane.axis] = fixed;
      ijk[ha] = col;
      ijk[va] = img.height - 1 - row;
      img.values[row * img.width + col] = field.at(ijk[0], ijk[1], ijk[2]);
    }
  }
  return img;
}

SliceImage frame_image(const SurfaceFrame& frame) {
  SliceImage img;
  img.width = frame.cols;
  img.height = frame.rows;
  img.values.resize(frame.size());
  for (std::size_t row = 0; row < img.height; ++row) {
    for (std::size_t col = 0; col < img.width; ++col) {
      img.values[row * img.width + col] = frame.at(img.height - 1 - row, col);
    }
  }
  return img;
}

void write_pgm(const std::filesystem::path& path, const SliceImage& image, const std::optional<IntensityRange>& range) {
  if (image.values.empty()) throw ConfigError("empty image");
  IntensityRange r;
  if (range) {
    r = *range;
    if (!(r.min < r.max)) throw ConfigError("intensity range needs min < max");
  } else {
    const auto [lo, hi] = std::minmax_element(image.values.begin(), image.values.end());
    r = {*lo, *hi};
  }
  const double span = r.max - r.min;

  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << "P5\n" << image.width << ' ' << image.height << "\n255\n";
  std::vector<unsigned char> px(image.values.size());
  for (std::size_t n = 0; n < px.size(); ++n) {
    // A flat image with no explicit range maps to black.
    const double s = span > 0.0 ? (image.values[n] - r.min) / span : 0.0;
    px[n] = static_cast<unsigned char>(std::lround(std::clamp(s, 0.0, 1.0) * 255.0));
  }
  os.write(reinterpret_cast<const char*>(px.data()), static_cast<std::streamsize>(px.size()));

  std::ofstream side(path.string() + ".range.txt");
  if (!side) throw std::runtime_error("cannot write range sidecar for " + path.string());
  side << "min_K=" << format_double(r.min) << "\nmax_K=" << format_double(r.max) << '\n';
}

void export_heatmap(const ScalarField3D& field, const SlicePlane& plane, const std::filesystem::path& path,
                    const std::optional<IntensityRange>& range) {
  write_pgm(path, extract_slice(field, plane), range);
}

void export_heatmap(const SurfaceFrame& frame, const std::filesystem::path& path,
                    const std::optional<IntensityRange>& range) {
  write_pgm(path, frame_image(frame), range);
}

}  // namespace heatobs
