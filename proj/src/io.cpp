#include "splidar/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

namespace splidar {

namespace {

template <typename U>
void put_le(std::ostream& out, U value) {
  char bytes[sizeof(U)];
  for (std::size_t k = 0; k < sizeof(U); ++k) bytes[k] = static_cast<char>((value >> (8 * k)) & 0xFF);
  out.write(bytes, sizeof(U));
}

void put_f64(std::ostream& out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }

template <typename U>
U get_le(std::istream& in) {
  unsigned char bytes[sizeof(U)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(U)))
    throw FormatError("unexpected end of cube data");
  U value = 0;
  for (std::size_t k = 0; k < sizeof(U); ++k) value |= static_cast<U>(bytes[k]) << (8 * k);
  return value;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_le<std::uint64_t>(in)); }

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

// Next whitespace-delimited header token of a PNM file, skipping comments.
std::string pnm_token(std::istream& in) {
  std::string token;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {}
      continue;
    }
    if (std::isspace(ch)) {
      if (!token.empty()) break;
      continue;
    }
    token.push_back(static_cast<char>(ch));
  }
  if (token.empty()) throw FormatError("truncated PNM header");
  return token;
}

}  // namespace

void write_cube(std::ostream& out, const PixelLists& timestamps, double repetition_period,
                const std::vector<double>* estimates) {
  out.write(kCubeMagic, 4);
  put_le<std::uint16_t>(out, estimates ? kCubeVersionWithEstimates : kCubeVersionPlain);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(timestamps.width()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(timestamps.height()));
  put_f64(out, repetition_period);
  for (std::size_t k = 0; k < timestamps.pixel_count(); ++k) {
    const auto ts = timestamps.at(k);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(ts.size()));
    for (double t : ts) put_f64(out, t);
  }
  if (estimates) {
    if (estimates->size() != timestamps.pixel_count())
      throw std::invalid_argument("estimate plane size != pixel count");
    for (double e : *estimates) put_f64(out, e);
  }
  if (!out) throw std::runtime_error("cube write failed");
}

CubeFile read_cube(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kCubeMagic, 4) != 0)
    throw FormatError("not a timestamp cube (bad magic)");
  const auto version = get_le<std::uint16_t>(in);
  if (version != kCubeVersionPlain && version != kCubeVersionWithEstimates)
    throw FormatError("unsupported cube version " + std::to_string(version));
  const std::size_t width = get_le<std::uint32_t>(in);
  const std::size_t height = get_le<std::uint32_t>(in);
  CubeFile file;
  file.repetition_period = get_f64(in);
  std::vector<std::vector<double>> lists(width * height);
  for (auto& list : lists) {
    const auto count = get_le<std::uint32_t>(in);
    list.resize(count);
    for (auto& t : list) t = get_f64(in);
  }
  file.timestamps = PixelLists::from_lists(height, width, lists);
  if (version == kCubeVersionWithEstimates) {
    file.estimates.resize(width * height);
    for (auto& e : file.estimates) e = get_f64(in);
  }
  return file;
}

void write_cube_file(const std::filesystem::path& path, const TimestampCube& cube) {
  auto out = open_out(path);
  write_cube(out, cube.timestamps, cube.params.repetition_period);
}

void write_censored_file(const std::filesystem::path& path, const CensoredCube& cube,
                         double repetition_period) {
  auto out = open_out(path);
  write_cube(out, cube.signal_sets, repetition_period, &cube.estimates);
}

CubeFile read_cube_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_cube(in);
}

void write_cube_csv(std::ostream& out, const PixelLists& timestamps) {
  out << "pixel_i,pixel_j,timestamp\n";
  out << std::setprecision(17);
  for (std::size_t r = 0; r < timestamps.height(); ++r)
    for (std::size_t c = 0; c < timestamps.width(); ++c)
      for (double t : timestamps.at(r, c)) out << r + 1 << ',' << c + 1 << ',' << t << '\n';
}

Grid<double> read_grid_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(field, &used));
        if (field.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument("");
      } catch (const std::exception&) {
        throw FormatError("bad CSV number '" + field + "' on row " + std::to_string(rows.size() + 1));
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw FormatError("ragged CSV: row " + std::to_string(rows.size() + 1));
    rows.push_back(std::move(row));
  }
  if (rows.empty() || rows.front().empty()) throw FormatError("empty CSV grid");
  Grid<double> grid(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) grid(r, c) = rows[r][c];
  return grid;
}

Grid<double> read_grid_csv_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_grid_csv(in);
}

void write_grid_csv(std::ostream& out, const Grid<double>& grid) {
  out << std::setprecision(17);
  for (std::size_t r = 0; r < grid.height(); ++r) {
    for (std::size_t c = 0; c < grid.width(); ++c) out << (c ? "," : "") << grid(r, c);
    out << '\n';
  }
}

Grid<std::uint16_t> read_pgm16(std::istream& in) {
  if (pnm_token(in) != "P5") throw FormatError("only binary PGM (P5) is supported");
  const std::size_t width = std::stoul(pnm_token(in));
  const std::size_t height = std::stoul(pnm_token(in));
  const unsigned long maxval = std::stoul(pnm_token(in));
  if (width == 0 || height == 0) throw FormatError("PGM has zero size");
  if (maxval != 65535) throw FormatError("PGM maxval must be 65535 (16-bit)");
  Grid<std::uint16_t> image(height, width);
  for (auto& v : image.data()) {
    unsigned char be[2];
    if (!in.read(reinterpret_cast<char*>(be), 2)) throw FormatError("truncated PGM raster");
    v = static_cast<std::uint16_t>(be[0] << 8 | be[1]);
  }
  return image;
}

void write_pgm16(std::ostream& out, const Grid<std::uint16_t>& image) {
  out << "P5\n" << image.width() << ' ' << image.height() << "\n65535\n";
  for (std::uint16_t v : image.data()) {
    const char be[2] = {static_cast<char>(v >> 8), static_cast<char>(v & 0xFF)};
    out.write(be, 2);
  }
}

void write_pbm(std::ostream& out, const Grid<std::uint8_t>& mask) {
  out << "P4\n" << mask.width() << ' ' << mask.height() << '\n';
  for (std::size_t r = 0; r < mask.height(); ++r) {
    unsigned char byte = 0;
    for (std::size_t c = 0; c < mask.width(); ++c) {
      if (mask(r, c)) byte |= static_cast<unsigned char>(0x80 >> (c % 8));
      if (c % 8 == 7 || c + 1 == mask.width()) {
        out.put(static_cast<char>(byte));
        byte = 0;
      }
    }
  }
}

double reflectivity_from_code(std::uint16_t v) { return static_cast<double>(v) / 65535.0; }

double depth_from_code(std::uint16_t v, double z_max) {
  return z_max * static_cast<double>(v) / 65536.0;
}

std::uint16_t depth_to_code(double z, double z_max) {
  const double code = std::round(z / z_max * 65536.0);
  return static_cast<std::uint16_t>(std::clamp(code, 0.0, 65535.0));
}

Scene load_scene_csv(const std::filesystem::path& reflectivity, const std::filesystem::path& depth) {
  return Scene(read_grid_csv_file(reflectivity), read_grid_csv_file(depth));
}

Scene load_scene_pgm(const std::filesystem::path& reflectivity, const std::filesystem::path& depth,
                     const AcquisitionParams& params) {
  auto in_a = open_in(reflectivity);
  auto in_z = open_in(depth);
  const auto codes_a = read_pgm16(in_a);
  const auto codes_z = read_pgm16(in_z);
  Grid<double> alpha(codes_a.height(), codes_a.width());
  Grid<double> z(codes_z.height(), codes_z.width());
  for (std::size_t k = 0; k < alpha.size(); ++k)
    alpha.data()[k] = reflectivity_from_code(codes_a.data()[k]);
  for (std::size_t k = 0; k < z.size(); ++k)
    z.data()[k] = depth_from_code(codes_z.data()[k], params.max_depth());
  return Scene(std::move(alpha), std::move(z));
}

void write_depth_pgm(std::ostream& out, const DepthImage& image, double z_max) {
  Grid<std::uint16_t> codes(image.height(), image.width());
  for (std::size_t k = 0; k < codes.size(); ++k)
    codes.data()[k] = depth_to_code(image.depth.data()[k], z_max);
  write_pgm16(out, codes);
}

void write_depth_f64(std::ostream& out, const DepthImage& image) {
  for (double z : image.depth.data()) put_f64(out, z);
}

}  // namespace splidar
