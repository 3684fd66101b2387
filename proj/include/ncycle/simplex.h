#ifndef NCYCLE_SIMPLEX_H
#define NCYCLE_SIMPLEX_H

#include <cstddef>
#include <span>
#include <vector>

namespace ncycle {

/// Row-major dense matrix.
struct DenseMatrix {
    size_t rows = 0;
    size_t cols = 0;
    std::vector<double> values;

    DenseMatrix() = default;
    DenseMatrix(size_t r, size_t c) : rows(r), cols(c), values(r * c, 0.0) {}
    double &operator()(size_t i, size_t j) { return values[i * cols + j]; }
    double operator()(size_t i, size_t j) const { return values[i * cols + j]; }
};

enum class LpStatus { feasible, infeasible, inconclusive };

struct LpOptions {
    double pivot_tol = 1e-10;
    /// Phase-1 objective below this counts as feasible.
    double feasibility_tol = 1e-8;
    /// Cap is iteration_factor * (rows + cols).
    size_t iteration_factor = 50;
};

struct LpResult {
    LpStatus status = LpStatus::inconclusive;
    /// Basic feasible solution when feasible.
    std::vector<double> weights;
    /// Farkas vector y with y^T A <= 0 and y^T b > 0 when infeasible.
    std::vector<double> farkas;
    double phase1_objective = 0;
    /// max |A w - b| for the returned weights.
    double residual = 0;
    size_t iterations = 0;
};

/// Phase-1 simplex (Bland's rule) for { A w = b, w >= 0 }.
LpResult lp_feasibility(const DenseMatrix &a, std::span<const double> b, const LpOptions &options = {});

}  // namespace ncycle

#endif
