#ifndef TOFDEMIX_OUTPUTS_HPP
#define TOFDEMIX_OUTPUTS_HPP

#include <string>
#include <vector>

#include "tofdemix/core.hpp"

namespace tofdemix {

/// Writes the cube as CSV with header pixel_x,pixel_y,harmonic,re,im and a
/// JSON sidecar <path>.meta.json holding the modulation plan and noise info.
void write_cube_csv(const MeasurementCube& cube, const std::string& path,
                    std::uint64_t rng_seed = 0);

/// Reads a cube written by write_cube_csv (requires the sidecar).
MeasurementCube read_cube_csv(const std::string& path);

/// One scalar map per image row, comma-separated, full double precision.
void write_grid_csv(const Grid& grid, const std::string& path);

Grid read_grid_csv(const std::string& path);

/// 16-bit binary PGM with values clamp(v/scale_max, 0, 1)*65535.
void write_pgm16(const Grid& grid, const std::string& path, double scale_max);

struct HistogramSeries {
    std::string name;
    std::vector<std::size_t> counts;
};

struct HistogramTable {
    int harmonic = 0;
    std::vector<double> bin_centers; ///< over [0, 2*pi)
    std::vector<HistogramSeries> series;
};

/// CSV rows: series,bin_index,bin_center,count.
void write_histogram_csv(const HistogramTable& table, const std::string& path);

HistogramTable read_histogram_csv(const std::string& path);

}  // namespace tofdemix

#endif
