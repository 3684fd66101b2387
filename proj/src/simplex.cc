#include "ncycle/simplex.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ncycle {

LpResult lp_feasibility(const DenseMatrix &a, std::span<const double> b, const LpOptions &options) {
    const size_t m = a.rows;
    const size_t n = a.cols;
    if (b.size() != m) {
        throw std::invalid_argument("lp_feasibility: rhs length differs from row count");
    }
    if (a.values.size() != m * n) {
        throw std::invalid_argument("lp_feasibility: matrix storage has wrong size");
    }

    // Tableau columns: n structural, m artificial, then rhs. Row m holds reduced costs.
    const size_t width = n + m + 1;
    const size_t rhs = n + m;
    std::vector<double> t((m + 1) * width, 0.0);
    auto at = [&](size_t i, size_t j) -> double & { return t[i * width + j]; };

    std::vector<double> row_sign(m, 1.0);
    std::vector<size_t> basis(m);
    for (size_t i = 0; i < m; i++) {
        row_sign[i] = b[i] < 0 ? -1.0 : 1.0;
        for (size_t j = 0; j < n; j++) {
            at(i, j) = row_sign[i] * a(i, j);
        }
        at(i, n + i) = 1.0;
        at(i, rhs) = row_sign[i] * b[i];
        basis[i] = n + i;
    }
    // Minimise the sum of artificials: reduced cost of structural j is -sum_i t(i,j).
    for (size_t j = 0; j < n; j++) {
        double s = 0;
        for (size_t i = 0; i < m; i++) {
            s += at(i, j);
        }
        at(m, j) = -s;
    }
    double objective = 0;
    for (size_t i = 0; i < m; i++) {
        objective += at(i, rhs);
    }
    at(m, rhs) = -objective;

    LpResult result;
    const size_t cap = options.iteration_factor * (m + n);
    bool optimal = false;
    while (result.iterations < cap) {
        size_t enter = width;
        for (size_t j = 0; j < n + m; j++) {
            if (at(m, j) < -options.pivot_tol) {
                enter = j;
                break;
            }
        }
        if (enter == width) {
            optimal = true;
            break;
        }
        size_t leave = m;
        double best = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < m; i++) {
            double coef = at(i, enter);
            if (coef > options.pivot_tol) {
                double ratio = at(i, rhs) / coef;
                if (ratio < best - 1e-15 || (std::abs(ratio - best) <= 1e-15 && leave < m && basis[i] < basis[leave])) {
                    best = ratio;
                    leave = i;
                }
            }
        }
        if (leave == m) {
            // Phase 1 is bounded below by zero, so this only happens on numerical breakdown.
            break;
        }
        double piv = at(leave, enter);
        for (size_t j = 0; j < width; j++) {
            at(leave, j) /= piv;
        }
        for (size_t i = 0; i <= m; i++) {
            if (i == leave) {
                continue;
            }
            double f = at(i, enter);
            if (f != 0) {
                for (size_t j = 0; j < width; j++) {
                    at(i, j) -= f * at(leave, j);
                }
            }
        }
        basis[leave] = enter;
        result.iterations++;
    }

    result.phase1_objective = std::max(0.0, -at(m, rhs));
    if (!optimal) {
        result.status = LpStatus::inconclusive;
        return result;
    }

    result.weights.assign(n, 0.0);
    for (size_t i = 0; i < m; i++) {
        if (basis[i] < n) {
            result.weights[basis[i]] = std::max(0.0, at(i, rhs));
        }
    }
    double residual = 0;
    for (size_t i = 0; i < m; i++) {
        double s = 0;
        for (size_t j = 0; j < n; j++) {
            s += a(i, j) * result.weights[j];
        }
        residual = std::max(residual, std::abs(s - b[i]));
    }
    result.residual = residual;

    if (result.phase1_objective < options.feasibility_tol) {
        result.status = LpStatus::feasible;
    } else {
        result.status = LpStatus::infeasible;
        // Artificial j started as e_j with unit cost, so y_j = 1 - reduced cost.
        result.farkas.resize(m);
        for (size_t i = 0; i < m; i++) {
            result.farkas[i] = row_sign[i] * (1.0 - at(m, n + i));
        }
        result.weights.clear();
    }
    return result;
}

}  // namespace ncycle
