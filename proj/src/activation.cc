#include "ncycle/activation.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ncycle/error.h"
#include "ncycle/inequalities.h"
#include "ncycle/local_oracle.h"

namespace ncycle {

namespace {

constexpr double kLn2 = std::numbers::ln2;

struct Rate {
    double smooth = 0;
    double slope = 0;
};

/// [H(base + v (target - base)) - H(base)] / v in bits, split as smooth + slope * ln(1/v).
Rate entropy_rate(std::span<const double> target, std::span<const double> base, double log_v) {
    double v = std::exp(log_v);
    Rate out;
    for (size_t e = 0; e < target.size(); e++) {
        double r = std::max(target[e], 0.0);
        double c = base[e];
        if (c == 0) {
            if (r > 0) {
                out.smooth -= r * std::log2(r);
                out.slope += r / kLn2;
            }
            continue;
        }
        double delta = r - c;
        if (delta == 0) {
            continue;
        }
        double q = c + v * delta;
        if (q <= 0) {
            // Only reachable at v = 1 with r = 0: the entry's entropy drops from h(c) to 0.
            out.smooth += c * std::log2(c) / v;
            continue;
        }
        double t = v * delta / c;
        double log1p_ratio = t == 0 ? 1.0 : std::log1p(t) / t;
        out.smooth += -delta * std::log2(q) - delta * log1p_ratio / kLn2;
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------- MixtureBc

MixtureBc::MixtureBc(const Box &box, const Gamma &companion, double disturbance_tol) : n_(box.n()) {
    if (box.d() != 2) {
        throw std::invalid_argument("mixture BC needs d = 2");
    }
    if (companion.size() != n_) {
        throw std::invalid_argument("companion length differs from n");
    }
    int bad = first_disturbed_observable(box, disturbance_tol);
    if (bad >= 0) {
        throw DisturbanceError(bad, disturbance(box, bad));
    }
    Box classical = classical_box(companion);
    for (int i = 0; i < n_; i++) {
        auto e = box.edge(i);
        auto c = classical.edge(i);
        edges_.emplace_back(e.begin(), e.end());
        classical_edges_.emplace_back(c.begin(), c.end());
        marginals_.push_back(marginal(box, i, Side::left));
    }
}

MixtureBc::Rates MixtureBc::rates(double log_v) const {
    static const std::vector<double> uniform{0.5, 0.5};
    Rates r;
    for (int i = 0; i < n_; i++) {
        auto er = entropy_rate(edges_[static_cast<size_t>(i)], classical_edges_[static_cast<size_t>(i)], log_v);
        r.edge_smooth.push_back(er.smooth);
        r.edge_slope.push_back(er.slope);
        auto mr = entropy_rate(marginals_[static_cast<size_t>(i)], uniform, log_v);
        r.marginal_smooth.push_back(mr.smooth);
        r.marginal_slope.push_back(mr.slope);
    }
    return r;
}

double MixtureBc::combine(const Rates &r, int k, double log_inv_v) const {
    // BC of the classical box is exactly 0, so BC(v) / v is the same signed sum of entropy rates.
    double smooth = r.edge_smooth[static_cast<size_t>(k)];
    double slope = r.edge_slope[static_cast<size_t>(k)];
    for (int j = 0; j < n_; j++) {
        if (j != k && j != (k + 1) % n_) {
            smooth += r.marginal_smooth[static_cast<size_t>(j)];
            slope += r.marginal_slope[static_cast<size_t>(j)];
        }
        if (j != k) {
            smooth -= r.edge_smooth[static_cast<size_t>(j)];
            slope -= r.edge_slope[static_cast<size_t>(j)];
        }
    }
    return slope == 0 ? smooth : smooth + slope * log_inv_v;
}

std::vector<double> MixtureBc::densities(double log_v) const {
    auto r = rates(log_v);
    std::vector<double> out;
    for (int k = 0; k < n_; k++) {
        out.push_back(combine(r, k, -log_v));
    }
    return out;
}

double MixtureBc::density(double log_v, int k) const {
    if (k < 0 || k >= n_) {
        throw std::out_of_range("BC index out of range");
    }
    return combine(rates(log_v), k, -log_v);
}

double MixtureBc::log_slope(int k) const {
    auto r = rates(0.0);
    double slope = r.edge_slope[static_cast<size_t>(k)];
    for (int j = 0; j < n_; j++) {
        if (j != k && j != (k + 1) % n_) {
            slope += r.marginal_slope[static_cast<size_t>(j)];
        }
        if (j != k) {
            slope -= r.edge_slope[static_cast<size_t>(j)];
        }
    }
    return slope;
}

double MixtureBc::value(double v, int k) const {
    if (!(v >= 0 && v <= 1)) {
        throw std::invalid_argument("mixing weight must lie in [0,1]");
    }
    if (v == 0) {
        return 0;
    }
    return v * density(std::log(v), k);
}

double bc_of_mixture(const Box &box, const Gamma &companion, double v, int k) {
    if (companion.is_odd()) {
        throw std::invalid_argument("companion gamma must have even parity");
    }
    return MixtureBc(box, companion).value(v, k);
}

// ---------------------------------------------------------------- expansion

double ExpansionModel::evaluate(double v) const {
    return v / std::log(4.0) * (f_value - coefficient * std::log(v));
}

ExpansionModel expansion_model(int n, double eps) {
    if (!(eps > 0 && eps < 1)) {
        throw std::domain_error("expansion needs 0 < epsilon < 1");
    }
    ExpansionModel m;
    m.n = n;
    m.epsilon = eps;
    m.coefficient = 2 - n * (1 - eps);
    m.f_value = 2 - n * (1 - eps) * (1 + kLn2) + (n + eps - n * eps) * std::log(1 - eps) - eps * std::log(1 + eps) +
                std::log(4 / (1 - eps * eps));
    return m;
}

double expansion_eq9(int n, double epsilon, double v) {
    if (!(v > 0 && v < 1)) {
        throw std::domain_error("expansion needs 0 < v < 1");
    }
    return expansion_model(n, epsilon).evaluate(v);
}

SmallVFit fit_small_v(const Box &box, const Gamma &companion, int k, double v_lo, double v_hi, int points) {
    if (!(v_lo > 0 && v_lo < v_hi && v_hi < 1) || points < 2) {
        throw std::invalid_argument("fit_small_v: bad v range");
    }
    MixtureBc mb(box, companion);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int j = 0; j < points; j++) {
        double lv = std::log(v_lo) + (std::log(v_hi) - std::log(v_lo)) * j / (points - 1);
        double y = mb.density(lv, k) * std::log(4.0);
        sx += lv;
        sy += y;
        sxx += lv * lv;
        sxy += lv * y;
    }
    double m = points;
    SmallVFit fit;
    fit.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / m;
    return fit;
}

// ---------------------------------------------------------------- search

std::vector<double> grid_log_v(const GridSpec &grid) {
    if (!(grid.v_max > 0 && grid.v_max <= 1 && grid.v_dense_min > 0 && grid.v_dense_min < grid.v_max) ||
        grid.dense_points < 2 || !(grid.extension_ratio > 1)) {
        throw std::invalid_argument("bad activation grid");
    }
    std::vector<double> out;
    double hi = std::log(grid.v_max);
    double lo = std::log(grid.v_dense_min);
    for (int j = 0; j < grid.dense_points; j++) {
        out.push_back(hi + (lo - hi) * j / (grid.dense_points - 1));
    }
    double inv = -lo;
    while (inv * grid.extension_ratio <= grid.max_log_inv_v) {
        inv *= grid.extension_ratio;
        out.push_back(-inv);
    }
    return out;
}

ScanResult scan_mixture(const Box &box, const Gamma &companion, double tol, const GridSpec &grid) {
    MixtureBc mb(box, companion);
    int n = box.n();
    auto lvs = grid_log_v(grid);
    ScanResult res;
    size_t first = lvs.size();
    for (size_t j = 0; j < lvs.size(); j++) {
        auto dens = mb.densities(lvs[j]);
        res.points_scanned++;
        int k = n - 1;
        if (!(dens[static_cast<size_t>(k)] > tol)) {
            k = static_cast<int>(std::max_element(dens.begin(), dens.end()) - dens.begin());
        }
        res.max_density = std::max(res.max_density, dens[static_cast<size_t>(k)]);
        if (dens[static_cast<size_t>(k)] > tol) {
            first = j;
            res.k = k;
            break;
        }
    }
    if (first == lvs.size()) {
        return res;
    }
    res.found = true;
    const int k = res.k;
    // ln BC = ln v + ln(BC / v); only meaningful where the density clears tol.
    auto score = [&](double lv) {
        double d = mb.density(lv, k);
        return d > tol ? lv + std::log(d) : -INFINITY;
    };
    size_t best = first;
    double best_score = score(lvs[first]);
    for (size_t j = first + 1; j < lvs.size(); j++) {
        double s = score(lvs[j]);
        res.points_scanned++;
        if (s > best_score) {
            best = j;
            best_score = s;
        } else {
            break;
        }
    }
    double best_lv = lvs[best];
    if (grid.refine) {
        double a = best + 1 < lvs.size() ? lvs[best + 1] : lvs[best];
        double b = best > 0 ? lvs[best - 1] : 0.0;
        const double phi = (std::sqrt(5.0) - 1) / 2;
        double x1 = b - phi * (b - a);
        double x2 = a + phi * (b - a);
        double f1 = score(x1);
        double f2 = score(x2);
        for (int it = 0; it < 100 && (b - a) > 1e-12 * std::max(1.0, std::abs(a)); it++) {
            if (f1 < f2) {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + phi * (b - a);
                f2 = score(x2);
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - phi * (b - a);
                f1 = score(x1);
            }
        }
        double cand = f1 > f2 ? x1 : x2;
        double cand_score = std::max(f1, f2);
        if (cand_score >= best_score) {
            best_lv = cand;
        }
    }
    res.log_v = best_lv;
    res.density = mb.density(best_lv, k);
    return res;
}

ActivationResult activation_search(const Box &box, const ActivationOptions &options) {
    if (box.d() != 2) {
        throw std::invalid_argument("activation_search needs d = 2");
    }
    int n = box.n();
    ActivationResult res;
    res.used_depolarization = options.depolarize;
    res.companion = Gamma::all_plus(n);

    MembershipVerdict verdict = facet_check(box, options.tol);
    auto [gamma, c] = max_c_value(box);
    res.c_value = c;
    if (verdict.is_local) {
        res.status = ActivationStatus::local;
        res.diagnostic = "box satisfies every C inequality; nothing to activate";
        return res;
    }
    res.violated = gamma;

    Alignment aligned = align_to_canonical(box, options.tol);
    res.alignment = aligned.op;
    Gamma canonical = Gamma::canonical(n);
    Box mixed = options.depolarize ? depolarize(aligned.box, canonical) : aligned.box;
    // The aligned gamma has its single -1 at edge n-1; the companion flips exactly that sign.
    res.companion = canonical.flipped(canonical.first_minus());

    ScanResult scan = scan_mixture(mixed, *res.companion, options.tol, options.grid);
    res.points_scanned = scan.points_scanned;
    res.mixed_box = std::move(mixed);
    if (!scan.found) {
        res.status = ActivationStatus::exhausted;
        std::ostringstream diag;
        diag << "no BC violation down to ln v = " << -options.grid.max_log_inv_v << " (largest BC/v seen "
             << scan.max_density << "); counterexample candidate";
        res.diagnostic = diag.str();
        return res;
    }
    res.status = ActivationStatus::activated;
    res.found = true;
    res.k_star = scan.k;
    res.log_v_star = scan.log_v;
    res.v_star = std::exp(scan.log_v);
    res.bc_density = scan.density;
    res.bc_at_v = res.v_star * scan.density;
    return res;
}

std::string describe(const ActivationResult &r) {
    std::ostringstream out;
    out << std::setprecision(12);
    switch (r.status) {
        case ActivationStatus::local:
            out << "status: local\n";
            break;
        case ActivationStatus::activated:
            out << "status: activated\n";
            break;
        case ActivationStatus::exhausted:
            out << "status: not activated\n";
            break;
    }
    out << "max C: " << r.c_value;
    if (r.violated) {
        out << " (gamma " << r.violated->to_string() << ")";
    }
    out << "\n";
    if (r.status == ActivationStatus::local) {
        return out.str();
    }
    out << "alignment: " << r.alignment.to_string() << "\n";
    out << "depolarized: " << (r.used_depolarization ? "yes" : "no") << "\n";
    out << "companion: " << r.companion->to_string() << "\n";
    if (r.found) {
        out << "k*: " << r.k_star + 1 << "\n";
        out << "ln v*: " << r.log_v_star << "\n";
        out << "v*: " << r.v_star << "\n";
        out << "BC(v*): " << r.bc_at_v << "\n";
        out << "BC(v*)/v*: " << r.bc_density << "\n";
        out << "certificate: v* * aligned box + (1 - v*) * classical_box(" << r.companion->to_string() << ")\n";
    }
    if (!r.diagnostic.empty()) {
        out << "note: " << r.diagnostic << "\n";
    }
    return out.str();
}

// ---------------------------------------------------------------- random trials

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    std::uint32_t out[2];
    seq.generate(out, out + 2);
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

std::string sampler_name(Sampler sampler) { return sampler == Sampler::flat ? "flat" : "pr-weighted"; }

namespace {

struct TrialOutcome {
    bool nonlocal = false;
    bool activated = false;
    bool local_activated = false;
    double c_excess = 0;
    double density = 0;
    double log_inv_v = 0;
};

TrialOutcome run_trial(int n, std::uint64_t seed, const AppendixOptions &options) {
    Box box = options.sampler == Sampler::flat ? random_ns_box(n, seed) : random_pr_weighted_box(n, seed);
    TrialOutcome t;
    auto [gamma, c] = max_c_value(box);
    t.c_excess = c - (n - 2);
    t.nonlocal = !facet_check(box, options.tol).is_local;
    if (t.nonlocal) {
        ActivationOptions ao;
        ao.tol = options.tol;
        ao.depolarize = options.depolarize;
        auto r = activation_search(box, ao);
        t.activated = r.found;
        t.density = r.bc_density;
        t.log_inv_v = -r.log_v_star;
    } else {
        // Bypass the facet gate: the mixture of a local box with the classical box must never violate BC.
        Box aligned = apply(canonical_relabeling(gamma), box);
        auto scan = scan_mixture(aligned, Gamma::all_plus(n), options.tol, GridSpec{});
        t.local_activated = scan.found;
    }
    return t;
}

}  // namespace

AppendixSummary appendix_experiment(int n, int trials, std::uint64_t seed, const AppendixOptions &options) {
    if (n < 3 || (!options.conjecture && n > 7)) {
        throw std::invalid_argument("appendix_experiment supports 3 <= n <= 7 (use conjecture mode beyond)");
    }
    if (n > 16) {
        throw std::invalid_argument("appendix_experiment: n too large");
    }
    if (trials < 0) {
        throw std::invalid_argument("trials must be nonnegative");
    }
    std::vector<TrialOutcome> outcomes(static_cast<size_t>(trials));
    unsigned workers = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max(trials, 1)));
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(workers);
    auto work = [&](unsigned id) {
        try {
            for (int i = next++; i < trials; i = next++) {
                outcomes[static_cast<size_t>(i)] = run_trial(n, trial_seed(seed, static_cast<std::uint64_t>(i)), options);
            }
        } catch (...) {
            errors[id] = std::current_exception();
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; w++) {
        pool.emplace_back(work, w);
    }
    work(0);
    for (auto &t : pool) {
        t.join();
    }
    for (auto &e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }

    AppendixSummary s;
    s.n = n;
    s.trials = trials;
    s.sampler = options.sampler;
    s.depolarize = options.depolarize;
    for (const auto &t : outcomes) {
        if (t.nonlocal) {
            s.nonlocal++;
            s.min_c_excess = std::min(s.min_c_excess, t.c_excess);
            if (t.activated) {
                s.activated++;
                s.min_density = std::min(s.min_density, t.density);
                s.max_log_inv_v = std::max(s.max_log_inv_v, t.log_inv_v);
            } else {
                s.failed++;
            }
        } else {
            s.local++;
            s.local_activated += t.local_activated ? 1 : 0;
        }
    }
    return s;
}

// ---------------------------------------------------------------- CHSH weights

namespace {

void validate_chsh_weights(const std::map<ChshVertex, double> &weights) {
    double total = 0;
    for (const auto &[v, w] : weights) {
        if (!(w >= -1e-12)) {
            throw std::invalid_argument("negative CHSH vertex weight");
        }
        total += w;
    }
    if (std::abs(total - 1) > 1e-9) {
        throw std::invalid_argument("CHSH vertex weights do not sum to 1");
    }
}

}  // namespace

double c4_from_weights(const std::map<ChshVertex, double> &weights) {
    validate_chsh_weights(weights);
    double c = 0;
    for (const auto &[v, w] : weights) {
        if (v.kind == ChshVertex::Kind::deterministic) {
            int exponent = (1 - v.alpha) * (v.beta + v.delta) + v.alpha * (v.beta + v.gamma + v.delta);
            c += (exponent % 2 == 0 ? 1.0 : -1.0) * w;
        } else if (v.alpha == 0 && v.beta == 0) {
            c += (v.gamma == 0 ? 2.0 : -2.0) * w;
        }
    }
    return c;
}

Box chsh_remix(const std::map<ChshVertex, double> &weights) {
    validate_chsh_weights(weights);
    std::vector<double> p(16, 0.0);
    for (const auto &[v, w] : weights) {
        Box b = chsh_box(v);
        auto src = b.data();
        for (size_t e = 0; e < p.size(); e++) {
            p[e] += w * src[e];
        }
    }
    return Box(4, 2, std::move(p), kDataTol);
}

// ---------------------------------------------------------------- curves

std::vector<CurveRow> bc_curve(const Box &box, const Gamma &companion, std::span<const double> vs,
                               const std::optional<ExpansionModel> &model) {
    MixtureBc mb(box, companion);
    std::vector<CurveRow> rows;
    for (double v : vs) {
        for (int k = 0; k < box.n(); k++) {
            double eq9 = NAN;
            if (model && k == box.n() - 1 && v > 0 && v < 1) {
                eq9 = model->evaluate(v);
            }
            rows.push_back(CurveRow{v, k, mb.value(v, k), eq9});
        }
    }
    return rows;
}

std::string curve_csv(const std::vector<CurveRow> &rows) {
    std::ostringstream out;
    out << "v,k,bc_value_exact,bc_value_eq9\n" << std::setprecision(17);
    for (const auto &r : rows) {
        out << r.v << "," << r.k + 1 << "," << r.bc_exact << ",";
        if (std::isnan(r.bc_eq9)) {
            out << "nan";
        } else {
            out << r.bc_eq9;
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace ncycle
