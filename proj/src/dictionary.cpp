#include "tofdemix/dictionary.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>

namespace tofdemix {

Dictionary::Dictionary(int harmonic_count, int grid_size, double base_frequency_hz)
    : harmonic_count_(harmonic_count), grid_size_(grid_size),
      base_frequency_hz_(base_frequency_hz), atoms_(harmonic_count, grid_size) {
    // Arguments reduced mod L before the complex exponential, so the harmonic
    // structure atom(n, l) = atom(1, l)^n and the wrap-around periodicity hold
    // to the last ulp.
    for (int l = 0; l < grid_size_; ++l) {
        for (int n = 1; n <= harmonic_count_; ++n) {
            const std::int64_t k = static_cast<std::int64_t>(n) * l % grid_size_;
            atoms_(n - 1, l) = std::polar(1.0, two_pi * static_cast<double>(k) / grid_size_);
        }
    }
}

void Dictionary::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open dictionary CSV for writing: " + path);
    out << "n,l,re,im\n";
    char buf[128];
    for (int n = 1; n <= harmonic_count_; ++n) {
        for (int l = 0; l < grid_size_; ++l) {
            const auto a = atoms_(n - 1, l);
            std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%.17g\n", n, l, a.real(), a.imag());
            out << buf;
        }
    }
}

Dictionary build_dictionary(int harmonic_count, int grid_size, double base_frequency_hz) {
    if (harmonic_count < 1) throw ConfigError("harmonic count must be at least 1");
    if (grid_size < 2 * harmonic_count)
        throw ConfigError("insufficient oversampling: grid size must be at least 2N");
    if (!(base_frequency_hz > 0.0)) throw ConfigError("base frequency must be positive");
    return Dictionary(harmonic_count, grid_size, base_frequency_hz);
}

double grid_index_to_depth(int grid_index, const Dictionary& dict) {
    if (grid_index < 0 || grid_index >= dict.grid_size())
        throw std::out_of_range("grid index out of range");
    return dict.grid_cell_depth() * grid_index;
}

int depth_to_nearest_grid_index(double depth_m, const Dictionary& dict) {
    if (!(depth_m >= 0.0) || !std::isfinite(depth_m))
        throw std::domain_error("depth must be finite and nonnegative");
    if (depth_m >= dict.unambiguous_range())
        throw DataError("aliased depth: beyond the unambiguous range");
    const double cells = depth_m / dict.grid_cell_depth();
    const double lower = std::floor(cells);
    int index = static_cast<int>(lower) + (cells - lower > 0.5 ? 1 : 0);
    if (index >= dict.grid_size())
        throw DataError("aliased depth: nearest grid point wraps to index 0");
    return index;
}

Eigen::MatrixXcd forward_vandermonde(std::span<const double> phases, int harmonic_count) {
    if (phases.empty()) throw ConfigError("at least one phase required");
    if (harmonic_count < 1) throw ConfigError("harmonic count must be at least 1");
    Eigen::MatrixXcd mat(harmonic_count, static_cast<Eigen::Index>(phases.size()));
    for (Eigen::Index k = 0; k < mat.cols(); ++k)
        for (int n = 1; n <= harmonic_count; ++n)
            mat(n - 1, k) = std::polar(1.0, n * phases[k]);
    return mat;
}

}  // namespace tofdemix
