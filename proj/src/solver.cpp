#include "tofdemix/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace tofdemix {

void SolverConfig::validate() const {
    if (max_components < 1) throw ConfigError("max components must be at least 1");
    if (!(residual_tolerance >= 0.0)) throw ConfigError("residual tolerance must be >= 0");
    if (!(min_amplitude >= 0.0)) throw ConfigError("min amplitude must be >= 0");
}

LeastSquaresResult least_squares_on_support(const Eigen::VectorXcd& z,
                                            const Eigen::MatrixXcd& columns) {
    if (columns.cols() > columns.rows())
        throw ConfigError("support larger than measurement count");
    LeastSquaresResult out;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(columns);
    if (qr.rank() < columns.cols()) {
        out.rank_deficient = true;
        return out;
    }
    out.coefficients = qr.solve(z);
    out.residual_norm = (z - columns * out.coefficients).norm();
    return out;
}

namespace {

void check_finite(const Eigen::VectorXcd& z) {
    for (Eigen::Index i = 0; i < z.size(); ++i)
        if (!std::isfinite(z[i].real()) || !std::isfinite(z[i].imag()))
            throw DataError("measurement vector contains non-finite entries");
}

bool has_phase_warning(const Eigen::VectorXcd& coef) {
    for (Eigen::Index i = 0; i < coef.size(); ++i)
        if (coef[i] != std::complex<double>(0.0, 0.0) && std::abs(std::arg(coef[i])) > 0.1)
            return true;
    return false;
}

}  // namespace

SparseSolution omp_decompose(const Eigen::VectorXcd& z, const Dictionary& dict,
                             const SolverConfig& config) {
    config.validate();
    const int n = dict.harmonic_count();
    const int grid = dict.grid_size();
    if (z.size() != n) throw DataError("measurement vector length does not match dictionary");
    check_finite(z);

    const double atom_scale = 1.0 / std::sqrt(static_cast<double>(n));

    SparseSolution sol;
    Eigen::VectorXcd residual = z;
    double residual_norm = residual.norm();
    std::vector<int> support;
    std::vector<char> unavailable(grid, 0); // selected or blacklisted (rank-deficient)
    Eigen::VectorXcd coef;
    sol.stop_reason = StopReason::component_budget;

    while (true) {
        if (residual_norm <= config.residual_tolerance) {
            sol.stop_reason = StopReason::residual_tolerance;
            break;
        }
        if (static_cast<int>(support.size()) >= config.max_components) {
            sol.stop_reason = StopReason::component_budget;
            break;
        }

        // Atom selection: maximal |<unit atom, residual>|, lowest index on ties.
        const Eigen::VectorXcd correlations = dict.atoms().adjoint() * residual * atom_scale;
        int best = -1;
        double best_mag = -1.0;
        for (int l = 0; l < grid; ++l) {
            if (unavailable[l]) continue;
            const double mag = std::abs(correlations[l]);
            if (mag > best_mag) {
                best_mag = mag;
                best = l;
            }
        }
        if (best < 0) break; // every atom exhausted

        support.push_back(best);
        unavailable[best] = 1;
        ++sol.iterations;

        Eigen::MatrixXcd columns(n, static_cast<Eigen::Index>(support.size()));
        for (std::size_t k = 0; k < support.size(); ++k)
            columns.col(static_cast<Eigen::Index>(k)) = dict.atoms().col(support[k]);
        const auto ls = least_squares_on_support(z, columns);
        if (ls.rank_deficient) {
            // Numerically dependent atom: drop it and keep searching.
            support.pop_back();
            sol.trace.push_back({sol.iterations, best, residual_norm});
            continue;
        }
        coef = ls.coefficients;
        residual = z - columns * coef;
        residual_norm = ls.residual_norm;
        sol.trace.push_back({sol.iterations, best, residual_norm});
    }

    // Report components above the amplitude floor; the trace keeps the rest.
    std::vector<int> kept;
    for (std::size_t k = 0; k < support.size(); ++k)
        if (std::abs(coef[static_cast<Eigen::Index>(k)]) >= config.min_amplitude)
            kept.push_back(static_cast<int>(k));

    if (config.refit && kept.size() != support.size() && !kept.empty()) {
        Eigen::MatrixXcd columns(n, static_cast<Eigen::Index>(kept.size()));
        for (std::size_t k = 0; k < kept.size(); ++k)
            columns.col(static_cast<Eigen::Index>(k)) = dict.atoms().col(support[kept[k]]);
        const auto ls = least_squares_on_support(z, columns);
        if (!ls.rank_deficient) {
            sol.support.reserve(kept.size());
            for (int k : kept) sol.support.push_back(support[k]);
            sol.coefficients = ls.coefficients;
            residual_norm = ls.residual_norm;
            kept.clear(); // already reported
        }
    }
    if (sol.support.empty() && !kept.empty()) {
        sol.coefficients.resize(static_cast<Eigen::Index>(kept.size()));
        for (std::size_t k = 0; k < kept.size(); ++k) {
            sol.support.push_back(support[kept[k]]);
            sol.coefficients[static_cast<Eigen::Index>(k)] = coef[kept[k]];
        }
    }
    sol.amplitudes.reserve(sol.support.size());
    for (Eigen::Index k = 0; k < sol.coefficients.size(); ++k)
        sol.amplitudes.push_back(std::abs(sol.coefficients[k]));
    sol.residual_norm = residual_norm;
    sol.phase_warning = has_phase_warning(sol.coefficients);
    return sol;
}

namespace {

using ComplexLD = std::complex<long double>;

// Solves the Hermitian positive definite system G*c = p (m <= 3) by Gaussian
// elimination with partial pivoting in extended precision.
bool solve_small_hermitian(std::vector<ComplexLD> g, std::vector<ComplexLD> p, int m,
                           std::vector<ComplexLD>& c) {
    for (int col = 0; col < m; ++col) {
        int pivot = col;
        long double best = std::abs(g[col * m + col]);
        for (int r = col + 1; r < m; ++r) {
            const long double v = std::abs(g[r * m + col]);
            if (v > best) {
                best = v;
                pivot = r;
            }
        }
        if (best == 0.0L) return false;
        if (pivot != col) {
            for (int j = 0; j < m; ++j) std::swap(g[col * m + j], g[pivot * m + j]);
            std::swap(p[col], p[pivot]);
        }
        for (int r = col + 1; r < m; ++r) {
            const ComplexLD f = g[r * m + col] / g[col * m + col];
            for (int j = col; j < m; ++j) g[r * m + j] -= f * g[col * m + j];
            p[r] -= f * p[col];
        }
    }
    c.assign(m, ComplexLD(0, 0));
    for (int row = m - 1; row >= 0; --row) {
        ComplexLD acc = p[row];
        for (int j = row + 1; j < m; ++j) acc -= g[row * m + j] * c[j];
        c[row] = acc / g[row * m + row];
    }
    return true;
}

double binomial_guarded(int l, int k) {
    double v = 1.0;
    for (int i = 0; i < k; ++i) v = v * (l - i) / (i + 1);
    return v;
}

}  // namespace

SparseSolution brute_force_decompose(const Eigen::VectorXcd& z, const Dictionary& dict,
                                     int k) {
    if (k < 1 || k > 3) throw ConfigError("brute-force oracle supports K in 1..3");
    const int grid = dict.grid_size();
    const int n = dict.harmonic_count();
    if (z.size() != n) throw DataError("measurement vector length does not match dictionary");
    check_finite(z);
    if (binomial_guarded(grid, k) > 1e7)
        throw ConfigError("brute-force budget exceeded: C(L, K) > 1e7");

    // Gram entries depend only on the index offset: <a_i, a_j> = sum_n e^{i*2*pi*n*(j-i)/L}.
    std::vector<ComplexLD> gram_by_offset(grid);
    const long double step = 2.0L * 3.14159265358979323846264338327950288L / grid;
    for (int d = 0; d < grid; ++d) {
        ComplexLD acc(0, 0);
        for (int nn = 1; nn <= n; ++nn) {
            const long double a = step * (static_cast<std::int64_t>(nn) * d % grid);
            acc += ComplexLD(std::cos(a), std::sin(a));
        }
        gram_by_offset[d] = acc;
    }
    auto gram = [&](int i, int j) {
        return gram_by_offset[((j - i) % grid + grid) % grid];
    };

    std::vector<ComplexLD> proj(grid); // <a_l, z>
    for (int l = 0; l < grid; ++l) {
        ComplexLD acc(0, 0);
        for (int nn = 0; nn < n; ++nn) {
            const std::complex<double> a = dict.atoms()(nn, l);
            const std::complex<double> v = z[nn];
            acc += ComplexLD(a.real(), -a.imag()) * ComplexLD(v.real(), v.imag());
        }
        proj[l] = acc;
    }

    long double z_sq = 0.0L;
    for (Eigen::Index i = 0; i < z.size(); ++i) z_sq += std::norm(ComplexLD(z[i].real(), z[i].imag()));

    long double best_res_sq = std::numeric_limits<long double>::max();
    std::vector<int> best_support;
    std::vector<ComplexLD> g(k * k), p(k), c;

    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        for (int i = 0; i < k; ++i) {
            p[i] = proj[idx[i]];
            for (int j = 0; j < k; ++j) g[i * k + j] = gram(idx[i], idx[j]);
        }
        if (solve_small_hermitian(g, p, k, c)) {
            ComplexLD dot(0, 0);
            for (int i = 0; i < k; ++i) dot += std::conj(p[i]) * c[i];
            const long double res_sq = z_sq - dot.real();
            if (res_sq < best_res_sq) {
                best_res_sq = res_sq;
                best_support = idx;
            }
        }
        // next lexicographic combination
        int pos = k - 1;
        while (pos >= 0 && idx[pos] == grid - k + pos) --pos;
        if (pos < 0) break;
        ++idx[pos];
        for (int i = pos + 1; i < k; ++i) idx[i] = idx[i - 1] + 1;
    }

    SparseSolution sol;
    sol.support = best_support;
    sol.iterations = k;
    sol.stop_reason = StopReason::component_budget;
    // Final coefficients and residual re-evaluated in double for the winner.
    Eigen::MatrixXcd columns(n, k);
    for (int i = 0; i < k; ++i) columns.col(i) = dict.atoms().col(best_support[i]);
    const auto ls = least_squares_on_support(z, columns);
    if (ls.rank_deficient) throw DataError("brute-force winner unexpectedly rank-deficient");
    sol.coefficients = ls.coefficients;
    for (Eigen::Index i = 0; i < sol.coefficients.size(); ++i)
        sol.amplitudes.push_back(std::abs(sol.coefficients[i]));
    sol.residual_norm = ls.residual_norm;
    sol.phase_warning = has_phase_warning(sol.coefficients);
    for (int i = 0; i < k; ++i)
        sol.trace.push_back({i + 1, best_support[i], sol.residual_norm});
    return sol;
}

}  // namespace tofdemix
