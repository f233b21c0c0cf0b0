#ifndef TOFDEMIX_SENSOR_HPP
#define TOFDEMIX_SENSOR_HPP

#include <array>
#include <cstdint>
#include <random>

#include "tofdemix/core.hpp"

namespace tofdemix {

/// Correlation bucket samples m_w[q] for every (pixel, harmonic) pair.
class BucketSamples {
public:
    BucketSamples() = default;
    BucketSamples(int width, int height, int harmonic_count, int bucket_count)
        : width_(width), height_(height), harmonic_count_(harmonic_count),
          bucket_count_(bucket_count),
          values_(static_cast<std::size_t>(width) * height * harmonic_count * bucket_count) {}

    int width() const { return width_; }
    int height() const { return height_; }
    int harmonic_count() const { return harmonic_count_; }
    int bucket_count() const { return bucket_count_; }

    double& at(int x, int y, int harmonic, int q) {
        return values_[offset(x, y, harmonic, q)];
    }
    double at(int x, int y, int harmonic, int q) const {
        return values_[offset(x, y, harmonic, q)];
    }

    /// The bucket_count samples of one (pixel, harmonic) pair.
    std::span<const double> buckets(int x, int y, int harmonic) const {
        return {values_.data() + offset(x, y, harmonic, 0),
                static_cast<std::size_t>(bucket_count_)};
    }

private:
    std::size_t offset(int x, int y, int harmonic, int q) const {
        return ((static_cast<std::size_t>(y) * width_ + x) * harmonic_count_ + (harmonic - 1)) *
                   bucket_count_ +
               q;
    }

    int width_ = 0;
    int height_ = 0;
    int harmonic_count_ = 0;
    int bucket_count_ = 0;
    std::vector<double> values_;
};

/// Round-trip delay phase 2*d*omega/c for a reflector at depth d [m].
/// Not wrapped; callers wrap when needed. Throws std::domain_error for d < 0.
double phase_of_depth(double depth_m, double omega_rad_s);

/// Amplitude/phase estimate from four correlation samples.
struct FourBucketEstimate {
    double amplitude = 0.0;
    double phase = 0.0;      ///< wrapped to [0, 2*pi)
    bool degenerate = false; ///< all four sample differences were zero
};

/// Closed-form amplitude and phase from samples taken at quarter-period offsets.
FourBucketEstimate four_bucket_estimate(const std::array<double, 4>& samples,
                                        double modulation_depth);

/// Synthesizes bucket samples for the scene, with i.i.d. Gaussian noise of
/// std `noise_sigma` on every sample. Deterministic given `rng_seed`: pixel
/// (x, y) uses the sub-seed pixel_seed(rng_seed, y*width + x) and draws its
/// normals in (harmonic, bucket) order, so pixels are independent and may be
/// generated in parallel.
BucketSamples simulate_buckets(const Scene& scene, const ModulationPlan& plan,
                               double noise_sigma, std::uint64_t rng_seed);

/// Full acquisition: bucket simulation followed by the four-bucket estimator
/// at every (pixel, harmonic); z = amplitude * exp(i*phase).
MeasurementCube measure(const Scene& scene, const ModulationPlan& plan, double noise_sigma,
                        std::uint64_t rng_seed);

/// Single-frequency depth readout d = c*arg(z)/(2*omega) with arg wrapped to
/// [0, 2*pi). Returns nullopt when |z| = 0 (no signal). This is the
/// multipath-corrupted baseline.
std::optional<double> single_frequency_depth(std::complex<double> z, double omega_rad_s);

namespace rng {

/// SplitMix64 finalizer (Vigna); used to decorrelate per-pixel streams.
std::uint64_t splitmix64(std::uint64_t x);

/// Deterministic sub-seed for one pixel of a run.
std::uint64_t pixel_seed(std::uint64_t run_seed, std::uint64_t pixel_index);

/// Standard normal draws via Box-Muller over mt19937_64, so that streams are
/// reproducible across standard library implementations (std::normal_distribution
/// is not). Each draw consumes exactly two engine outputs.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}
    double next();

private:
    std::mt19937_64 engine_;
};

}  // namespace rng

}  // namespace tofdemix

#endif
