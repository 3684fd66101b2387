#include "ncycle/symmetry.h"

#include <set>
#include <sstream>
#include <stdexcept>

#include "ncycle/error.h"
#include "ncycle/inequalities.h"
#include "ncycle/local_oracle.h"

namespace ncycle {

namespace {

int wrap(int i, int n) { return ((i % n) + n) % n; }

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::vector<bool> atom_flip_mask(const Atom &atom, int n) {
    std::vector<bool> mask(static_cast<size_t>(n), false);
    auto set = [&](int obs) {
        if (obs < 0 || obs >= n) {
            throw std::invalid_argument("local operation: observable index out of range");
        }
        mask[static_cast<size_t>(obs)] = !mask[static_cast<size_t>(obs)];
    };
    if (const auto *f = std::get_if<OutputFlip>(&atom)) {
        for (int obs : f->observables) {
            set(obs);
        }
    } else if (const auto *e = std::get_if<EdgeDoubleFlip>(&atom)) {
        if (e->edge < 0 || e->edge >= n) {
            throw std::invalid_argument("local operation: edge index out of range");
        }
        set(e->edge);
        set((e->edge + 1) % n);
    }
    return mask;
}

/// Observable flip mask whose edge sign pattern is sigma (product of sigma must be +1).
std::vector<int> flips_for_edge_signs(const std::vector<int> &sigma) {
    int n = static_cast<int>(sigma.size());
    std::vector<int> out;
    bool cur = false;
    for (int i = 0; i < n; i++) {
        if (cur) {
            out.push_back(i);
        }
        // Edge i is negated iff exactly one of X_i, X_{i+1} is flipped.
        if (sigma[static_cast<size_t>(i)] == -1) {
            cur = !cur;
        }
    }
    if (cur) {
        throw std::logic_error("edge sign pattern with odd parity has no flip realisation");
    }
    return out;
}

Box apply_flip_mask(const Box &box, const std::vector<bool> &mask) {
    if (box.d() != 2) {
        throw std::invalid_argument("output flips need d = 2");
    }
    int n = box.n();
    std::vector<double> p(box.data().begin(), box.data().end());
    for (int i = 0; i < n; i++) {
        int fa = mask[static_cast<size_t>(i)] ? 1 : 0;
        int fb = mask[static_cast<size_t>((i + 1) % n)] ? 1 : 0;
        auto src = box.edge(i);
        for (int a = 0; a < 2; a++) {
            for (int b = 0; b < 2; b++) {
                p[static_cast<size_t>(4 * i + 2 * a + b)] = src[static_cast<size_t>(2 * (a ^ fa) + (b ^ fb))];
            }
        }
    }
    return Box(n, 2, std::move(p), kDataTol, box.label());
}

Box apply_shift(const Box &box, int offset) {
    int n = box.n();
    std::vector<double> p;
    p.reserve(box.data().size());
    for (int i = 0; i < n; i++) {
        auto src = box.edge(wrap(i + offset, n));
        p.insert(p.end(), src.begin(), src.end());
    }
    return Box(n, box.d(), std::move(p), kDataTol, box.label());
}

}  // namespace

LocalOperation LocalOperation::flip(std::vector<int> observables) {
    return LocalOperation({OutputFlip{std::move(observables)}});
}

LocalOperation LocalOperation::shift(int offset) { return LocalOperation({CyclicShift{offset}}); }

LocalOperation LocalOperation::from_normal_form(const NormalForm &form) {
    std::vector<Atom> atoms;
    if (form.shift != 0) {
        atoms.push_back(CyclicShift{form.shift});
    }
    std::vector<int> obs;
    for (size_t i = 0; i < form.flips.size(); i++) {
        if (form.flips[i]) {
            obs.push_back(static_cast<int>(i));
        }
    }
    if (!obs.empty()) {
        atoms.push_back(OutputFlip{std::move(obs)});
    }
    return LocalOperation(std::move(atoms));
}

LocalOperation LocalOperation::then(const LocalOperation &next) const {
    auto atoms = atoms_;
    atoms.insert(atoms.end(), next.atoms_.begin(), next.atoms_.end());
    return LocalOperation(std::move(atoms));
}

LocalOperation LocalOperation::inverse() const {
    std::vector<Atom> atoms;
    for (auto it = atoms_.rbegin(); it != atoms_.rend(); ++it) {
        if (const auto *s = std::get_if<CyclicShift>(&*it)) {
            atoms.push_back(CyclicShift{-s->offset});
        } else {
            atoms.push_back(*it);
        }
    }
    return LocalOperation(std::move(atoms));
}

NormalForm LocalOperation::normal_form(int n) const {
    NormalForm form{0, std::vector<bool>(static_cast<size_t>(n), false)};
    for (const auto &atom : atoms_) {
        if (const auto *s = std::get_if<CyclicShift>(&atom)) {
            // Shift_t Flip_m = Flip_{m'} Shift_t with m'[j] = m[j + t].
            std::vector<bool> moved(static_cast<size_t>(n));
            for (int j = 0; j < n; j++) {
                moved[static_cast<size_t>(j)] = form.flips[static_cast<size_t>(wrap(j + s->offset, n))];
            }
            form.flips = std::move(moved);
            form.shift = wrap(form.shift + s->offset, n);
        } else {
            auto mask = atom_flip_mask(atom, n);
            for (int j = 0; j < n; j++) {
                form.flips[static_cast<size_t>(j)] = form.flips[static_cast<size_t>(j)] != mask[static_cast<size_t>(j)];
            }
        }
    }
    return form;
}

bool LocalOperation::is_identity(int n) const {
    auto form = normal_form(n);
    if (form.shift != 0) {
        return false;
    }
    for (bool f : form.flips) {
        if (f) {
            return false;
        }
    }
    return true;
}

std::string LocalOperation::to_string() const {
    if (atoms_.empty()) {
        return "identity";
    }
    std::ostringstream out;
    bool first = true;
    for (const auto &atom : atoms_) {
        if (!first) {
            out << " ; ";
        }
        first = false;
        std::visit(overloaded{[&](const OutputFlip &f) {
                                  out << "flip{";
                                  for (size_t j = 0; j < f.observables.size(); j++) {
                                      out << (j ? "," : "") << f.observables[j] + 1;
                                  }
                                  out << "}";
                              },
                              [&](const CyclicShift &s) { out << "shift(" << s.offset << ")"; },
                              [&](const EdgeDoubleFlip &e) { out << "edge-flip(" << e.edge + 1 << ")"; }},
                   atom);
    }
    return out.str();
}

Box apply(const LocalOperation &op, const Box &box) {
    Box cur = box;
    for (const auto &atom : op.atoms()) {
        if (const auto *s = std::get_if<CyclicShift>(&atom)) {
            cur = apply_shift(cur, s->offset);
        } else {
            cur = apply_flip_mask(cur, atom_flip_mask(atom, box.n()));
        }
    }
    return cur;
}

Gamma transform_gamma(const LocalOperation &op, const Gamma &gamma) {
    int n = gamma.size();
    std::vector<int> g = gamma.signs();
    for (const auto &atom : op.atoms()) {
        if (const auto *s = std::get_if<CyclicShift>(&atom)) {
            std::vector<int> moved(static_cast<size_t>(n));
            for (int i = 0; i < n; i++) {
                moved[static_cast<size_t>(i)] = g[static_cast<size_t>(wrap(i + s->offset, n))];
            }
            g = std::move(moved);
        } else {
            auto mask = atom_flip_mask(atom, n);
            for (int i = 0; i < n; i++) {
                if (mask[static_cast<size_t>(i)] != mask[static_cast<size_t>((i + 1) % n)]) {
                    g[static_cast<size_t>(i)] = -g[static_cast<size_t>(i)];
                }
            }
        }
    }
    return Gamma(std::move(g));
}

TwirlSpec twirl_group(const Gamma &target) {
    int n = target.size();
    std::vector<int> all(static_cast<size_t>(n));
    for (int i = 0; i < n; i++) {
        all[static_cast<size_t>(i)] = i;
    }
    // After a unit shift edge i carries gamma_{i+1}; flips must supply sigma_i = gamma_i gamma_{i+1}.
    std::vector<int> sigma(static_cast<size_t>(n));
    for (int i = 0; i < n; i++) {
        sigma[static_cast<size_t>(i)] = target[i] * target[(i + 1) % n];
    }
    LocalOperation rotate = LocalOperation::shift(1).then(LocalOperation::flip(flips_for_edge_signs(sigma)));
    if (transform_gamma(rotate, target) != target) {
        throw std::logic_error("twirl generator does not stabilise gamma");
    }
    const LocalOperation generators[] = {LocalOperation::flip(all), rotate};

    std::set<NormalForm> seen;
    std::vector<NormalForm> queue{LocalOperation().normal_form(n)};
    seen.insert(queue.front());
    for (size_t head = 0; head < queue.size(); head++) {
        auto current = LocalOperation::from_normal_form(queue[head]);
        for (const auto &g : generators) {
            auto next = current.then(g).normal_form(n);
            if (seen.insert(next).second) {
                queue.push_back(next);
            }
        }
    }
    TwirlSpec spec{{}, target};
    for (const auto &form : queue) {
        spec.elements.push_back(LocalOperation::from_normal_form(form));
    }
    return spec;
}

Box twirl(const TwirlSpec &spec, const Box &box) {
    std::vector<double> acc(box.data().size(), 0.0);
    for (const auto &g : spec.elements) {
        Box moved = apply(g, box);
        auto src = moved.data();
        for (size_t e = 0; e < acc.size(); e++) {
            acc[e] += src[e];
        }
    }
    double scale = 1.0 / static_cast<double>(spec.elements.size());
    for (auto &x : acc) {
        x *= scale;
    }
    return Box(box.n(), box.d(), std::move(acc), kDataTol, box.label());
}

Box depolarize(const Box &box, const Gamma &gamma) {
    if (box.d() != 2) {
        throw std::invalid_argument("depolarize needs d = 2");
    }
    if (gamma.size() != box.n()) {
        throw std::invalid_argument("gamma length differs from n");
    }
    if (!gamma.is_odd()) {
        throw std::invalid_argument("depolarize needs odd-parity gamma");
    }
    int bad = first_disturbed_observable(box, kDataTol);
    if (bad >= 0) {
        throw DisturbanceError(bad, disturbance(box, bad));
    }
    return twirl(twirl_group(gamma), box);
}

LocalOperation canonical_relabeling(const Gamma &gamma) {
    if (!gamma.is_odd()) {
        throw std::invalid_argument("canonical_relabeling needs odd-parity gamma");
    }
    int n = gamma.size();
    Gamma target = Gamma::canonical(n);
    if (gamma == target) {
        return LocalOperation();
    }
    std::vector<int> sigma(static_cast<size_t>(n));
    for (int i = 0; i < n; i++) {
        sigma[static_cast<size_t>(i)] = gamma[i] * target[i];
    }
    auto op = LocalOperation::flip(flips_for_edge_signs(sigma));
    if (transform_gamma(op, gamma) != target) {
        throw std::logic_error("alignment flips do not reach the canonical gamma");
    }
    return op;
}

Alignment align_to_canonical(const Box &box, double tol) {
    if (box.d() != 2) {
        throw std::invalid_argument("align_to_canonical needs d = 2");
    }
    auto [gamma, value] = max_c_value(box);
    if (value <= box.n() - 2 + tol) {
        return Alignment{box, LocalOperation(), std::nullopt};
    }
    auto op = canonical_relabeling(gamma);
    if (op.atoms().empty()) {
        return Alignment{box, op, gamma};
    }
    return Alignment{apply(op, box), op, gamma};
}

}  // namespace ncycle
