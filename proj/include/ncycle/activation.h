#ifndef NCYCLE_ACTIVATION_H
#define NCYCLE_ACTIVATION_H

#include <cstdint>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ncycle/box.h"
#include "ncycle/symmetry.h"

namespace ncycle {

/// BC values of the mixture v * box + (1 - v) * classical_box(companion).
///
/// Works in the rate form BC_k(v) / v, which stays exact when v underflows:
/// each entropy is expanded around the classical box with log1p, and the
/// coefficient of ln(1/v) (fed only by entries the classical box leaves at
/// zero) is accumulated separately from the bounded remainder.
class MixtureBc {
   public:
    MixtureBc(const Box &box, const Gamma &companion, double disturbance_tol = kDataTol);

    int n() const { return n_; }
    /// BC_k(v) / v for every k, at v = exp(log_v).
    std::vector<double> densities(double log_v) const;
    double density(double log_v, int k) const;
    /// Coefficient of ln(1/v) in BC_k(v) / v. Positive iff small v violates BC_k.
    double log_slope(int k) const;
    /// BC_k(v). Returns 0 at v = 0.
    double value(double v, int k) const;

   private:
    struct Rates {
        std::vector<double> edge_smooth, edge_slope, marginal_smooth, marginal_slope;
    };
    Rates rates(double log_v) const;
    double combine(const Rates &r, int k, double log_inv_v) const;

    int n_;
    std::vector<std::vector<double>> edges_, classical_edges_, marginals_;
};

double bc_of_mixture(const Box &box, const Gamma &companion, double v, int k);

/// Small-v expansion of BC for the isotropic box mixed with its classical companion.
struct ExpansionModel {
    int n = 0;
    double epsilon = 0;
    double f_value = 0;
    /// 2 - n (1 - epsilon); positive iff epsilon > (n - 2) / n.
    double coefficient = 0;

    /// (v / ln 4) [f - coefficient * ln v], in bits.
    double evaluate(double v) const;
};

/// Throws std::domain_error unless 0 < epsilon < 1.
ExpansionModel expansion_model(int n, double epsilon);
/// Throws std::domain_error unless 0 < epsilon < 1 and 0 < v < 1.
double expansion_eq9(int n, double epsilon, double v);

/// Least-squares line BC * ln4 / v = intercept + slope * ln v over a log-spaced v range.
/// The intercept is the box-dependent constant g; the slope is 2 - C for n = 4.
struct SmallVFit {
    double intercept = 0;
    double slope = 0;
};
SmallVFit fit_small_v(const Box &box, const Gamma &companion, int k, double v_lo = 1e-7, double v_hi = 1e-5,
                      int points = 25);

struct GridSpec {
    double v_max = 0.5;
    double v_dense_min = 1e-8;
    int dense_points = 64;
    /// Past the dense range ln(1/v) grows geometrically by this ratio...
    double extension_ratio = 1.25;
    /// ...up to this value.
    double max_log_inv_v = 1e13;
    bool refine = true;
};

/// ln v for every grid point, largest v first.
std::vector<double> grid_log_v(const GridSpec &grid);

struct ScanResult {
    bool found = false;
    int k = -1;
    double log_v = 0;
    /// BC_k / v at the reported point.
    double density = 0;
    size_t points_scanned = 0;
    /// Largest density seen over the whole scan (for diagnostics).
    double max_density = -INFINITY;
};

/// Scans the grid for a BC violation of the mixture. k = n - 1 is preferred when it violates.
ScanResult scan_mixture(const Box &box, const Gamma &companion, double tol, const GridSpec &grid);

enum class ActivationStatus { local, activated, exhausted };

struct ActivationResult {
    ActivationStatus status = ActivationStatus::local;
    bool found = false;
    double v_star = 0;
    /// ln v_star; authoritative when v_star underflows to 0.
    double log_v_star = 0;
    int k_star = -1;
    /// Raw BC_k at v_star (may underflow) and BC_k / v_star.
    double bc_at_v = 0;
    double bc_density = 0;
    std::optional<Gamma> companion;
    bool used_depolarization = false;
    /// Largest C of the input and the gamma attaining it.
    double c_value = 0;
    std::optional<Gamma> violated;
    LocalOperation alignment;
    /// The box actually mixed with the classical companion.
    std::optional<Box> mixed_box;
    size_t points_scanned = 0;
    std::string diagnostic;
};

struct ActivationOptions {
    double tol = 1e-9;
    bool depolarize = true;
    GridSpec grid;
};

/// facet_check -> align_to_canonical -> depolarize (optional) -> mix with the
/// all-plus classical box and scan v. Requires d = 2 and a nondisturbing box.
ActivationResult activation_search(const Box &box, const ActivationOptions &options = {});

std::string describe(const ActivationResult &result);

enum class Sampler { flat, pr_weighted };

struct AppendixOptions {
    Sampler sampler = Sampler::flat;
    bool depolarize = false;
    /// Lifts the 3 <= n <= 7 guard.
    bool conjecture = false;
    double tol = 1e-9;
    /// 0 picks std::thread::hardware_concurrency().
    unsigned threads = 0;
};

struct AppendixSummary {
    int n = 0;
    int trials = 0;
    Sampler sampler = Sampler::flat;
    bool depolarize = false;
    int nonlocal = 0;
    int activated = 0;
    int failed = 0;
    int local = 0;
    /// Local samples whose mixture scan still reported a violation. Must be 0.
    int local_activated = 0;
    /// Smallest C - (n - 2) among nonlocal samples.
    double min_c_excess = INFINITY;
    /// Smallest achieved BC / v among activated samples.
    double min_density = INFINITY;
    /// Largest ln(1/v_star) needed.
    double max_log_inv_v = 0;
};

/// Seed for trial `index`, independent of scheduling.
std::uint64_t trial_seed(std::uint64_t master, std::uint64_t index);

AppendixSummary appendix_experiment(int n, int trials, std::uint64_t seed, const AppendixOptions &options = {});

std::string sampler_name(Sampler sampler);

/// CHSH weight formula; equals c_value(box, {+1,+1,-1,+1}) / 2 for the mixed box.
double c4_from_weights(const std::map<ChshVertex, double> &weights);
Box chsh_remix(const std::map<ChshVertex, double> &weights);

struct CurveRow {
    double v;
    int k;
    double bc_exact;
    /// NaN when no expansion applies.
    double bc_eq9;
};

std::vector<CurveRow> bc_curve(const Box &box, const Gamma &companion, std::span<const double> vs,
                               const std::optional<ExpansionModel> &model);
/// Columns: v,k,bc_value_exact,bc_value_eq9 (k is 1-based).
std::string curve_csv(const std::vector<CurveRow> &rows);

}  // namespace ncycle

#endif
