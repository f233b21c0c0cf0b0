#ifndef TOFDEMIX_CORE_HPP
#define TOFDEMIX_CORE_HPP

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tofdemix {

/// Speed of light in vacuum [m/s].
inline constexpr double speed_of_light = 299792458.0;

inline constexpr double two_pi = 6.283185307179586476925286766559;

/// Bad run/solver configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (CLI exit code 3).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Wraps an angle to [0, 2*pi).
inline double wrap_two_pi(double x) {
    double y = std::fmod(x, two_pi);
    if (y < 0.0) y += two_pi;
    if (y >= two_pi) y = 0.0;
    return y;
}

/// Dense row-major scalar field over the image plane.
class Grid {
public:
    Grid() = default;
    Grid(int width, int height, double fill = 0.0)
        : width_(width), height_(height),
          values_(static_cast<std::size_t>(width) * height, fill) {}

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return values_.size(); }

    double& at(int x, int y) { return values_[static_cast<std::size_t>(y) * width_ + x]; }
    double at(int x, int y) const { return values_[static_cast<std::size_t>(y) * width_ + x]; }

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    bool operator==(const Grid&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> values_;
};

/// One reflecting layer: per-pixel depth [m] and reflection amplitude in [0, 1].
/// Amplitude 0 marks the layer as absent at that pixel (its depth is ignored).
struct Layer {
    Grid depth_map;
    Grid amplitude_map;

    bool operator==(const Layer&) const = default;
};

/// Ordered stack of layers (index 0 = nearest); all layers share (height, width).
struct Scene {
    int width = 0;
    int height = 0;
    std::vector<Layer> layers;

    bool operator==(const Scene&) const = default;
};

/// Reports every invariant violation in `scene`; empty result means valid.
std::vector<std::string> validate_scene(const Scene& scene);

/// Throws DataError with the joined report if the scene is invalid.
void require_valid_scene(const Scene& scene);

/// Acquisition plan: equi-spaced modulation frequencies n*f0 for n = 1..N.
///
/// dc_offset overrides the constant term of the bucket samples; when unset it
/// defaults, per pixel, to the sum of the component amplitudes.
struct ModulationPlan {
    double base_frequency_hz = 0.0;
    int harmonic_count = 0;
    double modulation_depth = 1.0;
    int bucket_count = 4;
    std::optional<double> dc_offset;

    double omega0() const { return two_pi * base_frequency_hz; }
    double omega(int harmonic) const { return harmonic * omega0(); }

    /// Throws ConfigError on an invalid plan (bucket_count != 4 is rejected in v1).
    void validate() const;
};

/// Complex pixel measurements z for every (pixel, harmonic) pair.
class MeasurementCube {
public:
    MeasurementCube() = default;
    MeasurementCube(int width, int height, ModulationPlan plan, double noise_sigma)
        : width_(width), height_(height), plan_(std::move(plan)), noise_sigma_(noise_sigma),
          values_(static_cast<std::size_t>(width) * height * plan_.harmonic_count) {}

    int width() const { return width_; }
    int height() const { return height_; }
    const ModulationPlan& plan() const { return plan_; }
    double noise_sigma() const { return noise_sigma_; }

    /// Measurement at (x, y) for harmonic n in 1..N.
    std::complex<double>& at(int x, int y, int harmonic) {
        return values_[pixel_offset(x, y) + harmonic - 1];
    }
    std::complex<double> at(int x, int y, int harmonic) const {
        return values_[pixel_offset(x, y) + harmonic - 1];
    }

    /// All N measurements of one pixel, ordered by harmonic.
    std::span<const std::complex<double>> pixel(int x, int y) const {
        return {values_.data() + pixel_offset(x, y),
                static_cast<std::size_t>(plan_.harmonic_count)};
    }
    std::span<std::complex<double>> pixel(int x, int y) {
        return {values_.data() + pixel_offset(x, y),
                static_cast<std::size_t>(plan_.harmonic_count)};
    }

    const std::vector<std::complex<double>>& values() const { return values_; }

private:
    std::size_t pixel_offset(int x, int y) const {
        return (static_cast<std::size_t>(y) * width_ + x) * plan_.harmonic_count;
    }

    int width_ = 0;
    int height_ = 0;
    ModulationPlan plan_;
    double noise_sigma_ = 0.0;
    std::vector<std::complex<double>> values_;
};

/// One recovered reflection: depth [m], nonnegative amplitude, dictionary index.
struct Component {
    double depth_m = 0.0;
    double amplitude = 0.0;
    int grid_index = 0;

    bool operator==(const Component&) const = default;
};

/// Per-pixel decomposition result, components sorted ascending by depth.
struct PixelDecomposition {
    std::vector<Component> components;
    double residual_norm = 0.0;
    bool phase_warning = false;
};

/// Whole-image decomposition (row-major pixel order).
struct Decomposition {
    int width = 0;
    int height = 0;
    int k_requested = 0;
    std::vector<PixelDecomposition> pixels;

    const PixelDecomposition& at(int x, int y) const {
        return pixels[static_cast<std::size_t>(y) * width + x];
    }
    PixelDecomposition& at(int x, int y) {
        return pixels[static_cast<std::size_t>(y) * width + x];
    }
};

}  // namespace tofdemix

#endif
