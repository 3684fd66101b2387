#include "ncycle/local_oracle.h"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ncycle/error.h"
#include "ncycle/inequalities.h"

namespace ncycle {

namespace {

void require_nondisturbing(const Box &box, double tol) {
    int bad = first_disturbed_observable(box, tol);
    if (bad >= 0) {
        throw DisturbanceError(bad, disturbance(box, bad));
    }
}

}  // namespace

std::pair<Gamma, double> max_c_value(const Box &box) {
    auto gammas = odd_gammas(box.n());
    size_t best = 0;
    double best_value = -INFINITY;
    for (size_t j = 0; j < gammas.size(); j++) {
        double c = c_value(box, gammas[j]);
        if (c > best_value) {
            best_value = c;
            best = j;
        }
    }
    return {gammas[best], best_value};
}

std::string MembershipVerdict::summary() const {
    std::ostringstream out;
    out << (is_local ? "local" : "nonlocal") << " ("
        << (method == MembershipMethod::facet_check ? "facet-check" : "lp-decomposition");
    if (lp_only) {
        out << ", LP-only verdict";
    }
    out << ")";
    if (const auto *dec = std::get_if<Decomposition>(&certificate)) {
        out << ": " << dec->weights.size() << " vertices";
    } else if (const auto *slack = std::get_if<FacetSlack>(&certificate)) {
        out << ": max C = " << slack->value << " at " << slack->tightest.to_string();
    } else if (const auto *w = std::get_if<NonlocalWitness>(&certificate)) {
        if (w->gamma) {
            out << ": violates " << w->gamma->to_string();
        }
        if (method == MembershipMethod::facet_check) {
            out << " by " << w->violation;
        } else {
            out << ", phase-1 infeasibility " << w->violation;
        }
    }
    return out.str();
}

LocalLp build_local_lp(const Box &box) {
    int n = box.n();
    int d = box.d();
    double columns = std::pow(static_cast<double>(d), n);
    if (columns > static_cast<double>(1 << 20)) {
        throw std::invalid_argument("decompose_local: d^n exceeds 2^20");
    }
    LocalLp lp;
    lp.assignments = all_assignments(n, d);
    // All edge entries except the last of each block; the last follows from normalisation.
    int per_edge = d * d - 1;
    size_t rows = static_cast<size_t>(n * per_edge + 1);
    lp.a = DenseMatrix(rows, lp.assignments.size());
    lp.b.assign(rows, 0.0);
    for (int i = 0; i < n; i++) {
        auto e = box.edge(i);
        for (int r = 0; r < per_edge; r++) {
            lp.b[static_cast<size_t>(i * per_edge + r)] = e[static_cast<size_t>(r)];
        }
    }
    lp.b[rows - 1] = 1.0;
    for (size_t col = 0; col < lp.assignments.size(); col++) {
        const auto &lam = lp.assignments[col];
        for (int i = 0; i < n; i++) {
            int entry = lam[static_cast<size_t>(i)] * d + lam[static_cast<size_t>((i + 1) % n)];
            if (entry < per_edge) {
                lp.a(static_cast<size_t>(i * per_edge + entry), col) = 1.0;
            }
        }
        lp.a(rows - 1, col) = 1.0;
    }
    return lp;
}

MembershipVerdict decompose_local(const Box &box, double tol) {
    require_nondisturbing(box, tol);
    LocalLp lp = build_local_lp(box);
    LpResult res = lp_feasibility(lp.a, lp.b);
    if (res.status == LpStatus::inconclusive) {
        throw SolverError("decompose_local: simplex hit its iteration cap after " + std::to_string(res.iterations) +
                          " pivots");
    }
    MembershipVerdict v;
    v.method = MembershipMethod::lp_decomposition;
    v.lp_only = box.d() != 2;
    if (res.status == LpStatus::feasible) {
        v.is_local = true;
        Decomposition dec;
        for (size_t j = 0; j < res.weights.size(); j++) {
            if (res.weights[j] > 0) {
                dec.weights[VertexLabel::deterministic(lp.assignments[j])] = res.weights[j];
            }
        }
        v.certificate = std::move(dec);
        return v;
    }
    NonlocalWitness w;
    w.violation = res.phase1_objective;
    w.farkas = std::move(res.farkas);
    if (box.d() == 2) {
        w.gamma = max_c_value(box).first;
    }
    v.is_local = false;
    v.certificate = std::move(w);
    return v;
}

MembershipVerdict facet_check(const Box &box, double tol) {
    if (box.d() != 2) {
        throw std::invalid_argument("facet_check needs d = 2");
    }
    require_nondisturbing(box, tol);
    auto [gamma, value] = max_c_value(box);
    double bound = box.n() - 2;
    MembershipVerdict v;
    v.method = MembershipMethod::facet_check;
    v.is_local = value <= bound + tol;
    if (v.is_local) {
        v.certificate = FacetSlack{gamma, value, bound - value};
    } else {
        v.certificate = NonlocalWitness{gamma, value - bound, {}};
    }
    return v;
}

}  // namespace ncycle
