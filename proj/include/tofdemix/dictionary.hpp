#ifndef TOFDEMIX_DICTIONARY_HPP
#define TOFDEMIX_DICTIONARY_HPP

#include <Eigen/Dense>
#include <span>
#include <string>

#include "tofdemix/core.hpp"

namespace tofdemix {

/// Oversampled DFT dictionary: atom(n, l) = exp(i*2*pi*n*l/L) for harmonics
/// n = 1..N and grid indices l = 0..L-1, so the L grid points tile the
/// unambiguous phase range [0, 2*pi) exactly once. Column l corresponds to a
/// reflector at depth c*l/(2*f0*L).
///
/// Built once, immutable, safe to share read-only across pixel workers.
class Dictionary {
public:
    Dictionary(int harmonic_count, int grid_size, double base_frequency_hz);

    int harmonic_count() const { return harmonic_count_; }
    int grid_size() const { return grid_size_; }
    double base_frequency_hz() const { return base_frequency_hz_; }

    /// Entry for harmonic n in 1..N and grid index l in [0, L).
    std::complex<double> atom(int harmonic, int grid_index) const {
        return atoms_(harmonic - 1, grid_index);
    }

    /// N x L atom table (unnormalized; every entry has unit modulus).
    const Eigen::MatrixXcd& atoms() const { return atoms_; }

    /// Unit-norm version of column l (scaled by 1/sqrt(N)).
    Eigen::VectorXcd normalized_column(int grid_index) const {
        return atoms_.col(grid_index) / std::sqrt(static_cast<double>(harmonic_count_));
    }

    /// Depth quantization step c/(2*f0*L) [m].
    double grid_cell_depth() const {
        return speed_of_light / (2.0 * base_frequency_hz_ * grid_size_);
    }

    /// Maximum depth before phase wraps: c/(2*f0) [m].
    double unambiguous_range() const { return speed_of_light / (2.0 * base_frequency_hz_); }

    /// Writes the atom table as CSV rows (n, l, re, im) for cross-implementation diffing.
    void write_csv(const std::string& path) const;

private:
    int harmonic_count_;
    int grid_size_;
    double base_frequency_hz_;
    Eigen::MatrixXcd atoms_;
};

/// Builds the N x L dictionary; requires L >= 2N (throws ConfigError
/// "insufficient oversampling" otherwise) and f0 > 0.
Dictionary build_dictionary(int harmonic_count, int grid_size, double base_frequency_hz);

/// Depth of grid point l: c*l/(2*f0*L). Throws std::out_of_range for l outside [0, L).
double grid_index_to_depth(int grid_index, const Dictionary& dict);

/// Nearest grid index to a depth; ties round down. Depths at or beyond the
/// unambiguous range (including those whose nearest grid point wraps to
/// index 0) throw DataError("aliased depth ...").
int depth_to_nearest_grid_index(double depth_m, const Dictionary& dict);

/// N x K Vandermonde forward matrix: entry (n, k) = exp(i*n*phase[k]), n = 1..N.
Eigen::MatrixXcd forward_vandermonde(std::span<const double> phases, int harmonic_count);

}  // namespace tofdemix

#endif
