#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "heatobs/grid.hpp"
#include "heatobs/surface.hpp"

namespace heatobs {

// TF3D: little-endian flat dump of a field.
//   bytes  0..3   magic "TF3D"
//   bytes  4..15  node counts nx, ny, nz (u32)
//   bytes 16..23  timestamp (f64, s)
//   bytes 24..31  grid spacing (f64, m)
//   then nx*ny*nz f64 values, z fastest.
// The grid is reconstructed in the tissue-block frame.
inline constexpr std::size_t kTf3dHeaderBytes = 32;

struct FieldDump {
  ScalarField3D field;
  double t = 0.0;
};

void write_tf3d(const std::filesystem::path& path, const ScalarField3D& field, double t);
FieldDump read_tf3d(const std::filesystem::path& path);

// Surface frame CSV: one header comment line
//   # t=<s> rows=<r> cols=<c> pitch_m=<m> u_W=<W>
// followed by `rows` lines of `cols` comma-separated temperatures (K).
struct RecordedFrame {
  SurfaceFrame frame;
  double power = 0.0;  // W applied over the step that produced the frame
};

void write_frame_csv(const std::filesystem::path& path, const SurfaceFrame& frame, double power);
RecordedFrame read_frame_csv(const std::filesystem::path& path);

/// All *.csv frames in a directory, sorted by file name.
std::vector<RecordedFrame> read_frame_dir(const std::filesystem::path& dir);

/// Shortest round-trip decimal representation, used by every CSV writer.
std::string format_double(double v);

}  // namespace heatobs
