#ifndef NCYCLE_LOCAL_ORACLE_H
#define NCYCLE_LOCAL_ORACLE_H

#include <optional>
#include <string>
#include <variant>

#include "ncycle/box.h"
#include "ncycle/simplex.h"

namespace ncycle {

enum class MembershipMethod { facet_check, lp_decomposition };

/// Local verdict from facet_check: the tightest C inequality and its slack.
struct FacetSlack {
    Gamma tightest;
    double value;
    double slack;
};

/// Nonlocal verdict: the most violated C inequality (d = 2) and by how much.
/// For LP verdicts `violation` is the phase-1 infeasibility.
struct NonlocalWitness {
    std::optional<Gamma> gamma;
    double violation = 0;
    std::vector<double> farkas;
};

struct MembershipVerdict {
    bool is_local = false;
    MembershipMethod method = MembershipMethod::facet_check;
    std::variant<Decomposition, FacetSlack, NonlocalWitness> certificate;
    /// Set when no facet list backs the verdict (d > 2).
    bool lp_only = false;

    std::string summary() const;
};

/// Constraint system { A rho = b, rho >= 0 } over deterministic assignments.
/// For d = 2 only p(00), p(01), p(10) per edge are used, plus normalisation.
struct LocalLp {
    DenseMatrix a;
    std::vector<double> b;
    std::vector<std::vector<int>> assignments;
};
LocalLp build_local_lp(const Box &box);

/// Decomposition over deterministic vertices by phase-1 simplex.
/// Throws SolverError when the solver is inconclusive, DisturbanceError on disturbing input.
MembershipVerdict decompose_local(const Box &box, double tol = 1e-9);

/// Local iff every C^gamma <= n - 2 + tol. Requires d = 2.
MembershipVerdict facet_check(const Box &box, double tol = 1e-9);

/// Largest C^gamma over odd gammas (first maximiser in lexicographic order).
std::pair<Gamma, double> max_c_value(const Box &box);

}  // namespace ncycle

#endif
