#include "heatobs/field_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "heatobs/errors.hpp"

namespace heatobs {
namespace {

static_assert(std::endian::native == std::endian::little, "TF3D I/O assumes a little-endian host");

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

double parse_double(std::string_view s, const std::filesystem::path& path) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\t')) s.remove_suffix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError(path.string() + ": cannot parse number '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_tf3d(const std::filesystem::path& path, const ScalarField3D& field, double t) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os.write("TF3D", 4);
  for (int a = 0; a < 3; ++a) put<std::uint32_t>(os, static_cast<std::uint32_t>(field.grid().count(a)));
  put<double>(os, t);
  put<double>(os, field.grid().spacing());
  os.write(reinterpret_cast<const char*>(field.values().data()),
           static_cast<std::streamsize>(field.size() * sizeof(double)));
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

FieldDump read_tf3d(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open " + path.string());
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "TF3D", 4) != 0) throw ConfigError(path.string() + ": not a TF3D dump");
  Index3 counts{};
  for (int a = 0; a < 3; ++a) counts[a] = get<std::uint32_t>(is);
  const double t = get<double>(is);
  const double spacing = get<double>(is);
  if (!is) throw ConfigError(path.string() + ": truncated header");
  const Vec3 extents{static_cast<double>(counts[0] - 1) * spacing, static_cast<double>(counts[1] - 1) * spacing,
                     static_cast<double>(counts[2] - 1) * spacing};
  const Grid3 grid = Grid3::tissue_block(extents, spacing);
  if (grid.counts() != counts) throw ConfigError(path.string() + ": inconsistent grid header");
  std::vector<double> values(grid.size());
  is.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (!is) throw ConfigError(path.string() + ": truncated field data");
  return {ScalarField3D(grid, std::move(values)), t};
}

void write_frame_csv(const std::filesystem::path& path, const SurfaceFrame& frame, double power) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << "# t=" << format_double(frame.t) << " rows=" << frame.rows << " cols=" << frame.cols
     << " pitch_m=" << format_double(frame.pitch) << " u_W=" << format_double(power) << '\n';
  for (std::size_t r = 0; r < frame.rows; ++r) {
    for (std::size_t c = 0; c < frame.cols; ++c) {
      if (c) os << ',';
      os << format_double(frame.at(r, c));
    }
    os << '\n';
  }
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

RecordedFrame read_frame_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open " + path.string());
  std::string header;
  std::getline(is, header);
  if (header.rfind("#", 0) != 0) throw ConfigError(path.string() + ": missing frame header line");

  RecordedFrame out;
  bool have_t = false, have_rows = false, have_cols = false, have_pitch = false;
  std::istringstream hs(header.substr(1));
  std::string token;
  while (hs >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = token.substr(0, eq);
    const std::string_view val(token.c_str() + eq + 1);
    if (key == "t") out.frame.t = parse_double(val, path), have_t = true;
    else if (key == "rows") out.frame.rows = static_cast<std::size_t>(parse_double(val, path)), have_rows = true;
    else if (key == "cols") out.frame.cols = static_cast<std::size_t>(parse_double(val, path)), have_cols = true;
    else if (key == "pitch_m") out.frame.pitch = parse_double(val, path), have_pitch = true;
    else if (key == "u_W") out.power = parse_double(val, path);
  }
  if (!(have_t && have_rows && have_cols && have_pitch)) {
    throw ConfigError(path.string() + ": frame header needs t, rows, cols and pitch_m");
  }

  out.frame.values.reserve(out.frame.rows * out.frame.cols);
  std::string line;
  std::size_t row = 0;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::size_t start = 0, cols = 0;
    while (start <= line.size()) {
      const auto comma = line.find(',', start);
      const auto end = comma == std::string::npos ? line.size() : comma;
      out.frame.values.push_back(parse_double(std::string_view(line).substr(start, end - start), path));
      ++cols;
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (cols != out.frame.cols) throw ConfigError(path.string() + ": row " + std::to_string(row) + " has wrong width");
    ++row;
  }
  if (row != out.frame.rows) throw ConfigError(path.string() + ": expected " + std::to_string(out.frame.rows) + " rows");
  return out;
}

std::vector<RecordedFrame> read_frame_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw ConfigError(dir.string() + " is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<RecordedFrame> out;
  out.reserve(files.size());
  for (const auto& f : files) out.push_back(read_frame_csv(f));
  return out;
}

}  // namespace heatobs
