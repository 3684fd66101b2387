#ifndef NCYCLE_BOX_H
#define NCYCLE_BOX_H

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ncycle {

/// Tolerance used when validating boxes built by this library.
inline constexpr double kConstructionTol = 1e-12;
/// Tolerance used for user-supplied data (box files, LP certificates).
inline constexpr double kDataTol = 1e-9;

/// Sign vector labelling a facet inequality or a nonsignalling vertex family.
///
/// Position i refers to edge i, i.e. the pair (X_i, X_{i+1 mod n}). A -1 at
/// position i means the edge is anticorrelated in the matching vertex box.
class Gamma {
   public:
    explicit Gamma(std::vector<int> signs);

    /// (+1, ..., +1, -1): the inequality every aligned box is reported against.
    static Gamma canonical(int n);
    static Gamma all_plus(int n);
    /// Parses "+-++" or "1,1,-1,1".
    static Gamma parse(std::string_view text);

    int size() const { return static_cast<int>(signs_.size()); }
    int operator[](int i) const { return signs_[static_cast<size_t>(i)]; }
    const std::vector<int> &signs() const { return signs_; }

    int minus_count() const;
    bool is_odd() const { return minus_count() % 2 == 1; }

    /// Same vector with position k negated (the companion gamma').
    Gamma flipped(int k) const;
    /// Index of the first -1 entry, or -1 when there is none.
    int first_minus() const;

    std::string to_string() const;

    auto operator<=>(const Gamma &) const = default;
    bool operator==(const Gamma &) const = default;

   private:
    std::vector<int> signs_;
};

/// All odd-parity gammas of length n, lexicographic with -1 < +1.
std::vector<Gamma> odd_gammas(int n);
/// All even-parity gammas of length n, lexicographic with -1 < +1.
std::vector<Gamma> even_gammas(int n);

enum class Side { left, right };

/// An n-cycle probability model.
///
/// Edge i stores p(x_i, x_{i+1} | X_i X_{i+1}) as a row-major d x d block,
/// with the observable X_i indexing rows. Edge n-1 wraps to X_0.
class Box {
   public:
    Box(int n, int d, std::vector<double> probabilities, double tol = kConstructionTol, std::string label = {});

    int n() const { return n_; }
    int d() const { return d_; }
    std::span<const double> edge(int i) const;
    std::span<const double> data() const { return probs_; }
    double at(int edge, int a, int b) const;
    const std::string &label() const { return label_; }
    Box with_label(std::string label) const;

    /// Exact entrywise equality (labels ignored).
    bool operator==(const Box &other) const;

   private:
    int n_;
    int d_;
    std::vector<double> probs_;
    std::string label_;
};

/// Marginal of observable i taken from edge (i-1, i) or edge (i, i+1).
std::vector<double> marginal(const Box &box, int observable, Side side);
/// Largest entrywise gap between the two marginals of one observable.
double disturbance(const Box &box, int observable);
/// First observable whose two marginals differ by more than tol, or -1.
int first_disturbed_observable(const Box &box, double tol);
bool is_nondisturbing(const Box &box, double tol);

/// Edgewise convex combination.
Box mix(std::span<const Box> boxes, std::span<const double> weights);
Box mix(const Box &a, const Box &b, double weight_a);

/// Largest absolute entrywise difference between boxes of equal shape.
double max_abs_difference(const Box &a, const Box &b);

Box white_noise(int n, int d = 2);
Box deterministic_box(std::span<const int> assignment, int d = 2);
Box pr_box(const Gamma &gamma);
Box classical_box(const Gamma &gamma_prime);
Box isotropic_box(int n, double epsilon, const Gamma &gamma);

/// Every assignment in {0..d-1}^n, first observable most significant.
std::vector<std::vector<int>> all_assignments(int n, int d);

struct VertexLabel {
    enum class Kind { deterministic, extremal };
    Kind kind;
    /// Outcome assignment for deterministic vertices, gamma signs otherwise.
    std::vector<int> values;

    static VertexLabel deterministic(std::vector<int> assignment);
    static VertexLabel extremal(const Gamma &gamma);

    std::string to_string() const;
    auto operator<=>(const VertexLabel &) const = default;
    bool operator==(const VertexLabel &) const = default;
};

Box vertex_box(const VertexLabel &label, int d = 2);

/// Convex weights over labelled polytope vertices.
struct Decomposition {
    std::map<VertexLabel, double> weights;

    double total() const;
    /// Throws std::invalid_argument unless weights are >= -1e-12 and sum to 1 within 1e-9.
    void validate() const;
    /// Sum of weight * vertex box, without renormalisation.
    Box remix(int n, int d = 2) const;
};

/// Flat-Dirichlet weights over all 2^n deterministic and 2^(n-1) odd-gamma vertices.
Decomposition random_ns_decomposition(int n, std::uint64_t seed);
Box random_ns_box(int n, std::uint64_t seed);
/// Flat-Dirichlet mixture of deterministic boxes only; always local.
Box random_local_box(int n, std::uint64_t seed);
/// Weight u ~ U(0,1) on one random odd-gamma PR box, the rest on random_ns_box.
Box random_pr_weighted_box(int n, std::uint64_t seed);

// CHSH parametrisation with X_1 = A_0, X_2 = B_0, X_3 = A_1, X_4 = B_1.
// Edges are (A0,B0), (B0,A1), (A1,B1), (B1,A0).

struct ChshVertex {
    enum class Kind { deterministic, pr };
    Kind kind;
    int alpha = 0;
    int beta = 0;
    int gamma = 0;
    int delta = 0;  ///< Unused for PR vertices.

    static ChshVertex deterministic(int alpha, int beta, int gamma, int delta);
    static ChshVertex pr(int alpha, int beta, int gamma);
    std::string to_string() const;
    auto operator<=>(const ChshVertex &) const = default;
    bool operator==(const ChshVertex &) const = default;
};

/// p(ab|xy) for the CHSH vertex, a,b,x,y in {0,1}.
double chsh_probability(const ChshVertex &vertex, int a, int b, int x, int y);
Box chsh_box(const ChshVertex &vertex);
/// The 16 deterministic and 8 PR vertices.
std::vector<ChshVertex> chsh_vertices();

}  // namespace ncycle

#endif
