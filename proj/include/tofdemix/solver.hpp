#ifndef TOFDEMIX_SOLVER_HPP
#define TOFDEMIX_SOLVER_HPP

#include <Eigen/Dense>

#include "tofdemix/core.hpp"
#include "tofdemix/dictionary.hpp"

namespace tofdemix {

struct SolverConfig {
    int max_components = 1;        ///< K: sparsity budget
    double residual_tolerance = 0; ///< eps0, in l2-norm units of z
    double min_amplitude = 0;      ///< components below this magnitude are not reported
    bool refit = false;            ///< re-solve least squares on the surviving support

    void validate() const;
};

enum class StopReason {
    residual_tolerance, ///< ||r|| <= eps0
    component_budget,   ///< |support| reached K
};

struct TraceEntry {
    int iteration;
    int selected_index;
    double residual_norm; ///< after the orthogonal re-projection of this iteration
};

/// Result of a sparse decomposition. Support, coefficients and amplitudes are
/// the reported (post-floor) components in selection order; the trace records
/// every iteration including components later dropped by the amplitude floor.
struct SparseSolution {
    std::vector<int> support;
    Eigen::VectorXcd coefficients;
    std::vector<double> amplitudes; ///< |coefficients|
    double residual_norm = 0.0;
    int iterations = 0;
    StopReason stop_reason = StopReason::residual_tolerance;
    bool phase_warning = false; ///< some kept coefficient has |arg| > 0.1 rad
    std::vector<TraceEntry> trace;
};

struct LeastSquaresResult {
    Eigen::VectorXcd coefficients;
    double residual_norm = 0.0;
    bool rank_deficient = false;
};

/// Minimizes ||z - columns*c||_2 by Householder QR with column pivoting.
/// A rank-deficient column set (e.g. a duplicated support index) is reported
/// through the flag rather than thrown, so the solver can skip the atom.
LeastSquaresResult least_squares_on_support(const Eigen::VectorXcd& z,
                                            const Eigen::MatrixXcd& columns);

/// Orthogonal matching pursuit over the dictionary grid: repeatedly selects
/// the atom with the largest |<atom, residual>| (atoms scaled to unit norm,
/// ties broken toward the lowest grid index), re-solves least squares on the
/// full support, and stops once the residual norm is within eps0 or the
/// component budget K is spent.
SparseSolution omp_decompose(const Eigen::VectorXcd& z, const Dictionary& dict,
                             const SolverConfig& config);

/// Exhaustive oracle for the same problem: tries every K-subset of columns
/// and keeps the least-squares minimizer. Globally optimal on the grid.
/// Guarded: K <= 3 and C(L, K) <= 1e7, else ConfigError.
SparseSolution brute_force_decompose(const Eigen::VectorXcd& z, const Dictionary& dict,
                                     int k);

}  // namespace tofdemix

#endif
