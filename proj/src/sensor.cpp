#include "tofdemix/sensor.hpp"

#include <cmath>

namespace tofdemix {

double phase_of_depth(double depth_m, double omega_rad_s) {
    if (!(depth_m >= 0.0) || !std::isfinite(depth_m))
        throw std::domain_error("depth must be finite and nonnegative");
    if (!(omega_rad_s > 0.0)) throw std::domain_error("modulation frequency must be positive");
    return 2.0 * depth_m * omega_rad_s / speed_of_light;
}

FourBucketEstimate four_bucket_estimate(const std::array<double, 4>& m,
                                        double modulation_depth) {
    if (!(modulation_depth > 0.0))
        throw ConfigError("modulation depth must be positive");
    const double s2 = modulation_depth * modulation_depth;
    const double dy = m[3] - m[1];
    const double dx = m[0] - m[2];
    FourBucketEstimate est;
    if (dx == 0.0 && dy == 0.0) {
        est.degenerate = true;
        return est;
    }
    est.amplitude = std::hypot(dy, dx) / s2;
    est.phase = wrap_two_pi(std::atan2(dy, dx));
    return est;
}

namespace {

struct PixelComponent {
    double depth;
    double amplitude;
};

// Present (amplitude > 0) components of one pixel, front to back.
std::vector<PixelComponent> components_at(const Scene& scene, int x, int y) {
    std::vector<PixelComponent> comps;
    comps.reserve(scene.layers.size());
    for (const Layer& layer : scene.layers) {
        const double a = layer.amplitude_map.at(x, y);
        if (a > 0.0) comps.push_back({layer.depth_map.at(x, y), a});
    }
    return comps;
}

}  // namespace

BucketSamples simulate_buckets(const Scene& scene, const ModulationPlan& plan,
                               double noise_sigma, std::uint64_t rng_seed) {
    plan.validate();
    require_valid_scene(scene);
    if (!(noise_sigma >= 0.0)) throw ConfigError("noise sigma must be nonnegative");

    const int n_harm = plan.harmonic_count;
    const double s2_half = plan.modulation_depth * plan.modulation_depth / 2.0;
    BucketSamples samples(scene.width, scene.height, n_harm, plan.bucket_count);

    for (int y = 0; y < scene.height; ++y) {
        for (int x = 0; x < scene.width; ++x) {
            const auto comps = components_at(scene, x, y);
            double amp_sum = 0.0;
            for (const auto& c : comps) amp_sum += c.amplitude;
            const double c0 = plan.dc_offset.value_or(amp_sum);

            rng::GaussianStream noise(
                rng::pixel_seed(rng_seed, static_cast<std::uint64_t>(y) * scene.width + x));

            for (int n = 1; n <= n_harm; ++n) {
                const double omega = plan.omega(n);
                // omega * tau_q = pi*q/2 for tau_q = pi*q/(2*omega)
                for (int q = 0; q < plan.bucket_count; ++q) {
                    double acc = 0.0;
                    for (const auto& c : comps)
                        acc += c.amplitude *
                               std::cos(two_pi / 4.0 * q + phase_of_depth(c.depth, omega));
                    double v = c0 + s2_half * acc;
                    if (noise_sigma > 0.0) v += noise_sigma * noise.next();
                    samples.at(x, y, n, q) = v;
                }
            }
        }
    }
    return samples;
}

MeasurementCube measure(const Scene& scene, const ModulationPlan& plan, double noise_sigma,
                        std::uint64_t rng_seed) {
    const BucketSamples samples = simulate_buckets(scene, plan, noise_sigma, rng_seed);
    MeasurementCube cube(scene.width, scene.height, plan, noise_sigma);
    for (int y = 0; y < scene.height; ++y) {
        for (int x = 0; x < scene.width; ++x) {
            for (int n = 1; n <= plan.harmonic_count; ++n) {
                const auto b = samples.buckets(x, y, n);
                const auto est = four_bucket_estimate({b[0], b[1], b[2], b[3]},
                                                      plan.modulation_depth);
                cube.at(x, y, n) = std::polar(est.amplitude, est.phase);
            }
        }
    }
    return cube;
}

std::optional<double> single_frequency_depth(std::complex<double> z, double omega_rad_s) {
    if (!(omega_rad_s > 0.0)) throw std::domain_error("modulation frequency must be positive");
    if (std::abs(z) == 0.0) return std::nullopt;
    return speed_of_light * wrap_two_pi(std::arg(z)) / (2.0 * omega_rad_s);
}

namespace rng {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t pixel_seed(std::uint64_t run_seed, std::uint64_t pixel_index) {
    return splitmix64(run_seed ^ splitmix64(pixel_index + 1));
}

double GaussianStream::next() {
    // u1 in (0, 1], u2 in [0, 1); 53-bit mantissas from the top engine bits.
    const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

}  // namespace rng

}  // namespace tofdemix
