// ============================================================================
// io.hpp -- on-disk formats
//
// Timestamp container (little-endian):
//   "SPTC" | version u16 | width u32 | height u32 | T_r f64
//   then per pixel in row-major order: count u32, count x f64 timestamps.
// Version 2 appends an estimate plane of width*height f64 (NaN = absent),
// used for filter output.
//
// Scene images: CSV (rows of comma-separated decimals) or 16-bit binary PGM.
// PGM values map as reflectivity = v / 65535 and depth = z_max * v / 65536, so
// every code stays inside [0, z_max).
// ============================================================================
#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "splidar/cube.hpp"
#include "splidar/depth_estimator.hpp"
#include "splidar/grid.hpp"
#include "splidar/scene.hpp"

namespace splidar {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr char kCubeMagic[4] = {'S', 'P', 'T', 'C'};
inline constexpr std::uint16_t kCubeVersionPlain = 1;
inline constexpr std::uint16_t kCubeVersionWithEstimates = 2;

struct CubeFile {
  PixelLists timestamps;
  double repetition_period = 0;
  std::vector<double> estimates;  // empty unless the file is version 2
};

void write_cube(std::ostream& out, const PixelLists& timestamps, double repetition_period,
                const std::vector<double>* estimates = nullptr);
CubeFile read_cube(std::istream& in);

void write_cube_file(const std::filesystem::path& path, const TimestampCube& cube);
void write_censored_file(const std::filesystem::path& path, const CensoredCube& cube,
                         double repetition_period);
CubeFile read_cube_file(const std::filesystem::path& path);

/// One row per timestamp: pixel_i,pixel_j,timestamp (1-based pixel indices).
void write_cube_csv(std::ostream& out, const PixelLists& timestamps);

Grid<double> read_grid_csv(std::istream& in);
Grid<double> read_grid_csv_file(const std::filesystem::path& path);
void write_grid_csv(std::ostream& out, const Grid<double>& grid);

/// Binary 16-bit PGM (P5, maxval 65535).
Grid<std::uint16_t> read_pgm16(std::istream& in);
void write_pgm16(std::ostream& out, const Grid<std::uint16_t>& image);
/// Binary PBM (P4); 1 is written as black.
void write_pbm(std::ostream& out, const Grid<std::uint8_t>& mask);

double reflectivity_from_code(std::uint16_t v);
double depth_from_code(std::uint16_t v, double z_max);
std::uint16_t depth_to_code(double z, double z_max);

Scene load_scene_csv(const std::filesystem::path& reflectivity, const std::filesystem::path& depth);
Scene load_scene_pgm(const std::filesystem::path& reflectivity, const std::filesystem::path& depth,
                     const AcquisitionParams& params);

void write_depth_pgm(std::ostream& out, const DepthImage& image, double z_max);
/// Raw row-major little-endian f64 plane, no header.
void write_depth_f64(std::ostream& out, const DepthImage& image);

}  // namespace splidar
