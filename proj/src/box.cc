#include "ncycle/box.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "ncycle/error.h"

namespace ncycle {

namespace {

size_t edge_offset(int edge, int d) { return static_cast<size_t>(edge) * static_cast<size_t>(d * d); }

std::mt19937_64 make_rng(std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    return std::mt19937_64(seq);
}

std::vector<double> flat_dirichlet(size_t count, std::mt19937_64 &rng) {
    std::exponential_distribution<double> unit(1.0);
    std::vector<double> w(count);
    for (auto &x : w) {
        x = unit(rng);
    }
    double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto &x : w) {
        x /= total;
    }
    return w;
}

void require_binary(const Gamma &gamma) {
    if (gamma.size() < 3) {
        throw std::invalid_argument("gamma must have at least 3 entries");
    }
}

Box parity_box(const Gamma &gamma) {
    int n = gamma.size();
    std::vector<double> p(static_cast<size_t>(4 * n), 0.0);
    for (int i = 0; i < n; i++) {
        // gamma_i = -1 puts the mass on x_i != x_{i+1}.
        int target = gamma[i] == -1 ? 1 : 0;
        for (int a = 0; a < 2; a++) {
            for (int b = 0; b < 2; b++) {
                if ((a ^ b) == target) {
                    p[edge_offset(i, 2) + static_cast<size_t>(2 * a + b)] = 0.5;
                }
            }
        }
    }
    return Box(n, 2, std::move(p));
}

}  // namespace

DisturbanceError::DisturbanceError(int observable, double gap)
    : std::runtime_error("box is disturbing at observable X_" + std::to_string(observable + 1) +
                         " (marginal gap " + std::to_string(gap) + ")"),
      observable_(observable),
      gap_(gap) {}

// ---------------------------------------------------------------- Gamma

Gamma::Gamma(std::vector<int> signs) : signs_(std::move(signs)) {
    if (signs_.empty()) {
        throw std::invalid_argument("gamma must be nonempty");
    }
    for (int s : signs_) {
        if (s != 1 && s != -1) {
            throw std::invalid_argument("gamma entries must be +1 or -1");
        }
    }
}

Gamma Gamma::canonical(int n) {
    std::vector<int> s(static_cast<size_t>(n), 1);
    s.back() = -1;
    return Gamma(std::move(s));
}

Gamma Gamma::all_plus(int n) { return Gamma(std::vector<int>(static_cast<size_t>(n), 1)); }

Gamma Gamma::parse(std::string_view text) {
    std::vector<int> s;
    if (text.find(',') == std::string_view::npos) {
        for (char c : text) {
            if (c == '+') {
                s.push_back(1);
            } else if (c == '-') {
                s.push_back(-1);
            } else {
                throw std::invalid_argument("bad gamma character: " + std::string(1, c));
            }
        }
    } else {
        std::stringstream ss{std::string(text)};
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item == "1" || item == "+1" || item == "+") {
                s.push_back(1);
            } else if (item == "-1" || item == "-") {
                s.push_back(-1);
            } else {
                throw std::invalid_argument("bad gamma entry: " + item);
            }
        }
    }
    return Gamma(std::move(s));
}

int Gamma::minus_count() const { return static_cast<int>(std::count(signs_.begin(), signs_.end(), -1)); }

Gamma Gamma::flipped(int k) const {
    if (k < 0 || k >= size()) {
        throw std::out_of_range("gamma flip index out of range");
    }
    auto s = signs_;
    s[static_cast<size_t>(k)] = -s[static_cast<size_t>(k)];
    return Gamma(std::move(s));
}

int Gamma::first_minus() const {
    auto it = std::find(signs_.begin(), signs_.end(), -1);
    return it == signs_.end() ? -1 : static_cast<int>(it - signs_.begin());
}

std::string Gamma::to_string() const {
    std::string out;
    for (int s : signs_) {
        out.push_back(s > 0 ? '+' : '-');
    }
    return out;
}

static std::vector<Gamma> gammas_with_parity(int n, bool odd) {
    if (n < 1 || n > 30) {
        throw std::invalid_argument("gamma length out of range");
    }
    std::vector<Gamma> out;
    for (std::uint32_t mask = 0; mask < (1u << n); mask++) {
        // Position 0 is the most significant bit; a zero bit is -1.
        std::vector<int> s(static_cast<size_t>(n));
        int minus = 0;
        for (int i = 0; i < n; i++) {
            bool plus = (mask >> (n - 1 - i)) & 1u;
            s[static_cast<size_t>(i)] = plus ? 1 : -1;
            minus += plus ? 0 : 1;
        }
        if ((minus % 2 == 1) == odd) {
            out.emplace_back(std::move(s));
        }
    }
    return out;
}

std::vector<Gamma> odd_gammas(int n) { return gammas_with_parity(n, true); }
std::vector<Gamma> even_gammas(int n) { return gammas_with_parity(n, false); }

// ---------------------------------------------------------------- Box

Box::Box(int n, int d, std::vector<double> probabilities, double tol, std::string label)
    : n_(n), d_(d), probs_(std::move(probabilities)), label_(std::move(label)) {
    if (n_ < 3) {
        throw std::invalid_argument("box needs n >= 3");
    }
    if (d_ < 2) {
        throw std::invalid_argument("box needs d >= 2");
    }
    if (probs_.size() != static_cast<size_t>(n_) * static_cast<size_t>(d_ * d_)) {
        throw std::invalid_argument("box data has wrong length");
    }
    for (int i = 0; i < n_; i++) {
        double total = 0;
        for (double p : edge(i)) {
            if (!(p >= -tol && p <= 1 + tol)) {
                throw std::invalid_argument("edge " + std::to_string(i) + " has an entry outside [0,1]");
            }
            total += p;
        }
        if (std::abs(total - 1) > tol) {
            throw std::invalid_argument("edge " + std::to_string(i) + " does not sum to 1");
        }
    }
}

std::span<const double> Box::edge(int i) const {
    if (i < 0 || i >= n_) {
        throw std::out_of_range("edge index out of range");
    }
    return std::span<const double>(probs_).subspan(edge_offset(i, d_), static_cast<size_t>(d_ * d_));
}

double Box::at(int edge, int a, int b) const { return this->edge(edge)[static_cast<size_t>(a * d_ + b)]; }

Box Box::with_label(std::string label) const {
    Box copy = *this;
    copy.label_ = std::move(label);
    return copy;
}

bool Box::operator==(const Box &other) const {
    return n_ == other.n_ && d_ == other.d_ && probs_ == other.probs_;
}

std::vector<double> marginal(const Box &box, int observable, Side side) {
    int n = box.n();
    int d = box.d();
    if (observable < 0 || observable >= n) {
        throw std::out_of_range("observable index out of range");
    }
    std::vector<double> m(static_cast<size_t>(d), 0.0);
    if (side == Side::right) {
        auto e = box.edge(observable);
        for (int a = 0; a < d; a++) {
            for (int b = 0; b < d; b++) {
                m[static_cast<size_t>(a)] += e[static_cast<size_t>(a * d + b)];
            }
        }
    } else {
        auto e = box.edge((observable + n - 1) % n);
        for (int a = 0; a < d; a++) {
            for (int b = 0; b < d; b++) {
                m[static_cast<size_t>(b)] += e[static_cast<size_t>(a * d + b)];
            }
        }
    }
    return m;
}

double disturbance(const Box &box, int observable) {
    auto l = marginal(box, observable, Side::left);
    auto r = marginal(box, observable, Side::right);
    double gap = 0;
    for (size_t a = 0; a < l.size(); a++) {
        gap = std::max(gap, std::abs(l[a] - r[a]));
    }
    return gap;
}

int first_disturbed_observable(const Box &box, double tol) {
    for (int i = 0; i < box.n(); i++) {
        if (disturbance(box, i) > tol) {
            return i;
        }
    }
    return -1;
}

bool is_nondisturbing(const Box &box, double tol) { return first_disturbed_observable(box, tol) < 0; }

Box mix(std::span<const Box> boxes, std::span<const double> weights) {
    if (boxes.empty() || boxes.size() != weights.size()) {
        throw std::invalid_argument("mix needs one weight per box");
    }
    int n = boxes[0].n();
    int d = boxes[0].d();
    double total = 0;
    for (size_t j = 0; j < boxes.size(); j++) {
        if (boxes[j].n() != n || boxes[j].d() != d) {
            throw std::invalid_argument("mix: boxes differ in n or d");
        }
        if (!(weights[j] >= 0)) {
            throw std::invalid_argument("mix: negative weight");
        }
        total += weights[j];
    }
    if (std::abs(total - 1) > kConstructionTol) {
        throw std::invalid_argument("mix: weights do not sum to 1");
    }
    std::vector<double> p(boxes[0].data().size(), 0.0);
    for (size_t j = 0; j < boxes.size(); j++) {
        auto src = boxes[j].data();
        for (size_t e = 0; e < p.size(); e++) {
            p[e] += weights[j] * src[e];
        }
    }
    return Box(n, d, std::move(p));
}

Box mix(const Box &a, const Box &b, double weight_a) {
    const Box boxes[] = {a, b};
    const double w[] = {weight_a, 1 - weight_a};
    return mix(boxes, w);
}

double max_abs_difference(const Box &a, const Box &b) {
    if (a.n() != b.n() || a.d() != b.d()) {
        throw std::invalid_argument("boxes differ in shape");
    }
    double gap = 0;
    auto x = a.data();
    auto y = b.data();
    for (size_t e = 0; e < x.size(); e++) {
        gap = std::max(gap, std::abs(x[e] - y[e]));
    }
    return gap;
}

Box white_noise(int n, int d) {
    double u = 1.0 / (static_cast<double>(d) * d);
    return Box(n, d, std::vector<double>(static_cast<size_t>(n * d * d), u));
}

Box deterministic_box(std::span<const int> assignment, int d) {
    int n = static_cast<int>(assignment.size());
    if (n < 3) {
        throw std::invalid_argument("assignment needs at least 3 entries");
    }
    for (int x : assignment) {
        if (x < 0 || x >= d) {
            throw std::invalid_argument("assignment outcome out of range");
        }
    }
    std::vector<double> p(static_cast<size_t>(n * d * d), 0.0);
    for (int i = 0; i < n; i++) {
        int a = assignment[static_cast<size_t>(i)];
        int b = assignment[static_cast<size_t>((i + 1) % n)];
        p[edge_offset(i, d) + static_cast<size_t>(a * d + b)] = 1.0;
    }
    return Box(n, d, std::move(p));
}

Box pr_box(const Gamma &gamma) {
    require_binary(gamma);
    if (!gamma.is_odd()) {
        throw std::invalid_argument("pr_box needs odd-parity gamma");
    }
    return parity_box(gamma);
}

Box classical_box(const Gamma &gamma_prime) {
    require_binary(gamma_prime);
    if (gamma_prime.is_odd()) {
        throw std::invalid_argument("classical_box needs even-parity gamma");
    }
    return parity_box(gamma_prime);
}

Box isotropic_box(int n, double epsilon, const Gamma &gamma) {
    if (gamma.size() != n) {
        throw std::invalid_argument("gamma length differs from n");
    }
    if (!(epsilon >= 0 && epsilon <= 1)) {
        throw std::invalid_argument("epsilon must lie in [0,1]");
    }
    return mix(pr_box(gamma), white_noise(n, 2), epsilon);
}

std::vector<std::vector<int>> all_assignments(int n, int d) {
    double count = std::pow(static_cast<double>(d), n);
    if (count > static_cast<double>(1 << 22)) {
        throw std::invalid_argument("too many assignments");
    }
    std::vector<std::vector<int>> out;
    out.reserve(static_cast<size_t>(count));
    std::vector<int> cur(static_cast<size_t>(n), 0);
    while (true) {
        out.push_back(cur);
        int pos = n - 1;
        while (pos >= 0 && ++cur[static_cast<size_t>(pos)] == d) {
            cur[static_cast<size_t>(pos)] = 0;
            pos--;
        }
        if (pos < 0) {
            break;
        }
    }
    return out;
}

// ---------------------------------------------------------------- vertices

VertexLabel VertexLabel::deterministic(std::vector<int> assignment) {
    return VertexLabel{Kind::deterministic, std::move(assignment)};
}

VertexLabel VertexLabel::extremal(const Gamma &gamma) { return VertexLabel{Kind::extremal, gamma.signs()}; }

std::string VertexLabel::to_string() const {
    if (kind == Kind::extremal) {
        return "ns:" + Gamma(values).to_string();
    }
    std::string out = "det:";
    for (int x : values) {
        out += std::to_string(x);
    }
    return out;
}

Box vertex_box(const VertexLabel &label, int d) {
    if (label.kind == VertexLabel::Kind::extremal) {
        return pr_box(Gamma(label.values));
    }
    return deterministic_box(label.values, d);
}

double Decomposition::total() const {
    double t = 0;
    for (const auto &[label, w] : weights) {
        t += w;
    }
    return t;
}

void Decomposition::validate() const {
    for (const auto &[label, w] : weights) {
        if (!(w >= -1e-12)) {
            throw std::invalid_argument("decomposition weight for " + label.to_string() + " is negative");
        }
    }
    if (std::abs(total() - 1) > 1e-9) {
        throw std::invalid_argument("decomposition weights do not sum to 1");
    }
}

Box Decomposition::remix(int n, int d) const {
    std::vector<double> p(static_cast<size_t>(n * d * d), 0.0);
    for (const auto &[label, w] : weights) {
        Box v = vertex_box(label, d);
        if (v.n() != n) {
            throw std::invalid_argument("decomposition vertex has wrong n");
        }
        auto src = v.data();
        for (size_t e = 0; e < p.size(); e++) {
            p[e] += w * src[e];
        }
    }
    return Box(n, d, std::move(p), kDataTol);
}

Decomposition random_ns_decomposition(int n, std::uint64_t seed) {
    if (n < 3 || n > 16) {
        throw std::invalid_argument("random_ns_box supports 3 <= n <= 16");
    }
    auto rng = make_rng(seed);
    auto dets = all_assignments(n, 2);
    auto odd = odd_gammas(n);
    auto w = flat_dirichlet(dets.size() + odd.size(), rng);
    Decomposition out;
    size_t j = 0;
    for (auto &lam : dets) {
        out.weights[VertexLabel::deterministic(lam)] = w[j++];
    }
    for (auto &g : odd) {
        out.weights[VertexLabel::extremal(g)] = w[j++];
    }
    return out;
}

Box random_ns_box(int n, std::uint64_t seed) { return random_ns_decomposition(n, seed).remix(n).with_label("random-ns"); }

Box random_local_box(int n, std::uint64_t seed) {
    auto rng = make_rng(seed);
    auto dets = all_assignments(n, 2);
    auto w = flat_dirichlet(dets.size(), rng);
    std::vector<double> p(static_cast<size_t>(4 * n), 0.0);
    for (size_t j = 0; j < dets.size(); j++) {
        Box v = deterministic_box(dets[j]);
        auto src = v.data();
        for (size_t e = 0; e < p.size(); e++) {
            p[e] += w[j] * src[e];
        }
    }
    return Box(n, 2, std::move(p), kDataTol, "random-local");
}

Box random_pr_weighted_box(int n, std::uint64_t seed) {
    auto rng = make_rng(seed ^ 0x9e3779b97f4a7c15ULL);
    auto odd = odd_gammas(n);
    std::uniform_int_distribution<size_t> pick(0, odd.size() - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const Gamma &g = odd[pick(rng)];
    double u = unit(rng);
    return mix(pr_box(g), random_ns_box(n, rng()), u).with_label("random-pr-weighted");
}

// ---------------------------------------------------------------- CHSH

ChshVertex ChshVertex::deterministic(int alpha, int beta, int gamma, int delta) {
    for (int b : {alpha, beta, gamma, delta}) {
        if (b != 0 && b != 1) {
            throw std::invalid_argument("CHSH vertex labels must be bits");
        }
    }
    return ChshVertex{Kind::deterministic, alpha, beta, gamma, delta};
}

ChshVertex ChshVertex::pr(int alpha, int beta, int gamma) {
    for (int b : {alpha, beta, gamma}) {
        if (b != 0 && b != 1) {
            throw std::invalid_argument("CHSH vertex labels must be bits");
        }
    }
    return ChshVertex{Kind::pr, alpha, beta, gamma, 0};
}

std::string ChshVertex::to_string() const {
    std::string out = kind == Kind::pr ? "PR" : "det";
    out += "(" + std::to_string(alpha) + "," + std::to_string(beta) + "," + std::to_string(gamma);
    if (kind == Kind::deterministic) {
        out += "," + std::to_string(delta);
    }
    return out + ")";
}

double chsh_probability(const ChshVertex &v, int a, int b, int x, int y) {
    if (v.kind == ChshVertex::Kind::deterministic) {
        bool hit = a == ((v.alpha * x) ^ v.beta) && b == ((v.gamma * y) ^ v.delta);
        return hit ? 1.0 : 0.0;
    }
    int rhs = (x * y + v.alpha * x + v.beta * y + v.gamma) % 2;
    return (a ^ b) == rhs ? 0.5 : 0.0;
}

Box chsh_box(const ChshVertex &v) {
    // (first observable is Alice?, x or y of the first, x or y of the second)
    struct EdgeMap {
        bool alice_first;
        int first_setting;
        int second_setting;
    };
    const EdgeMap edges[4] = {{true, 0, 0}, {false, 0, 1}, {true, 1, 1}, {false, 1, 0}};
    std::vector<double> p(16, 0.0);
    for (int e = 0; e < 4; e++) {
        for (int u = 0; u < 2; u++) {
            for (int w = 0; w < 2; w++) {
                const auto &m = edges[e];
                double q = m.alice_first ? chsh_probability(v, u, w, m.first_setting, m.second_setting)
                                         : chsh_probability(v, w, u, m.second_setting, m.first_setting);
                p[static_cast<size_t>(4 * e + 2 * u + w)] = q;
            }
        }
    }
    return Box(4, 2, std::move(p), kConstructionTol, v.to_string());
}

std::vector<ChshVertex> chsh_vertices() {
    std::vector<ChshVertex> out;
    for (int a = 0; a < 2; a++) {
        for (int b = 0; b < 2; b++) {
            for (int c = 0; c < 2; c++) {
                for (int d = 0; d < 2; d++) {
                    out.push_back(ChshVertex::deterministic(a, b, c, d));
                }
            }
        }
    }
    for (int a = 0; a < 2; a++) {
        for (int b = 0; b < 2; b++) {
            for (int c = 0; c < 2; c++) {
                out.push_back(ChshVertex::pr(a, b, c));
            }
        }
    }
    return out;
}

}  // namespace ncycle
