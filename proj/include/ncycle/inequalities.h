#ifndef NCYCLE_INEQUALITIES_H
#define NCYCLE_INEQUALITIES_H

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ncycle/box.h"

namespace ncycle {

/// Shannon entropy in bits with 0 log 0 = 0.
///
/// Rejects negative entries and distributions that do not sum to 1 within 1e-9.
double shannon_entropy(std::span<const double> dist);

/// <X_i X_{i+1}> = p(00) + p(11) - p(01) - p(10) on edge i. Requires d = 2.
double expectation(const Box &box, int edge);

/// sum_i gamma_i <X_i X_{i+1}>. Local boxes satisfy c_value <= n - 2.
double c_value(const Box &box, const Gamma &gamma);

/// Edge and single-observable entropies feeding the BC family.
/// Marginals come from the left edge (i-1, i).
struct EntropyProfile {
    std::vector<double> edge;
    std::vector<double> marginal;
};

/// Throws DisturbanceError when the box is disturbing beyond disturbance_tol.
EntropyProfile entropy_profile(const Box &box, double disturbance_tol = kDataTol);

/// BC^k = H(X_k X_{k+1}) + sum_{j != k,k+1} H(X_j) - sum_{j != k} H(X_j X_{j+1}).
double bc_value(const EntropyProfile &profile, int k);
double bc_value(const Box &box, int k, double disturbance_tol = kDataTol);
std::vector<double> bc_values(const Box &box, double disturbance_tol = kDataTol);

struct InequalityReport {
    int n = 0;
    int d = 0;
    double tol = 0;
    /// Odd gammas in lexicographic order (-1 < +1). Empty when d != 2.
    std::vector<std::pair<Gamma, double>> c_values;
    std::vector<double> bc_values;
    double c_bound = 0;
    double bc_bound = 0;
    std::vector<Gamma> violated_c;
    std::vector<int> violated_bc;
};

InequalityReport full_report(const Box &box, double tol = 1e-9);

/// Columns: family,label,value,bound,violated.
std::string report_csv(const InequalityReport &report);
/// Aligned plain-text table, one row per inequality.
std::string report_table(const InequalityReport &report);

}  // namespace ncycle

#endif
