#ifndef NCYCLE_SYMMETRY_H
#define NCYCLE_SYMMETRY_H

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ncycle/box.h"

namespace ncycle {

/// Relabel the outputs (x -> 1 - x) of the listed observables.
struct OutputFlip {
    std::vector<int> observables;
    bool operator==(const OutputFlip &) const = default;
};

/// New observable i is old observable i + offset (mod n).
struct CyclicShift {
    int offset = 0;
    bool operator==(const CyclicShift &) const = default;
};

/// Flip both outputs of edge e, i.e. the observables X_e and X_{e+1}.
struct EdgeDoubleFlip {
    int edge = 0;
    bool operator==(const EdgeDoubleFlip &) const = default;
};

using Atom = std::variant<OutputFlip, CyclicShift, EdgeDoubleFlip>;

/// Every composition of atoms reduces to Flip(mask) after Shift(shift).
struct NormalForm {
    int shift = 0;
    std::vector<bool> flips;
    bool operator==(const NormalForm &) const = default;
    auto operator<=>(const NormalForm &) const = default;
};

/// An ordered sequence of atoms, applied first to last.
class LocalOperation {
   public:
    LocalOperation() = default;
    explicit LocalOperation(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {}

    static LocalOperation flip(std::vector<int> observables);
    static LocalOperation shift(int offset);
    static LocalOperation from_normal_form(const NormalForm &form);

    const std::vector<Atom> &atoms() const { return atoms_; }
    bool is_identity(int n) const;

    /// This operation followed by `next`.
    LocalOperation then(const LocalOperation &next) const;
    LocalOperation inverse() const;
    NormalForm normal_form(int n) const;

    /// e.g. "flip{1,3} ; shift(1) ; edge-flip(2)" with 1-based indices.
    std::string to_string() const;

    bool operator==(const LocalOperation &) const = default;

   private:
    std::vector<Atom> atoms_;
};

/// Throws std::invalid_argument for atoms that do not fit the box (or flips on d != 2).
Box apply(const LocalOperation &op, const Box &box);

/// gamma' with c_value(apply(op, p), gamma') == c_value(p, gamma) for every box p.
Gamma transform_gamma(const LocalOperation &op, const Gamma &gamma);

/// Group elements averaged by the depolarisation twirl for a target gamma.
struct TwirlSpec {
    std::vector<LocalOperation> elements;
    Gamma target;
};

/// Closure of the global flip and the gamma-preserving cyclic shift. Size 2n.
TwirlSpec twirl_group(const Gamma &target);

/// Uniform average of apply(g, box) over the group.
Box twirl(const TwirlSpec &spec, const Box &box);

/// Maps a nondisturbing d = 2 box to eps * pr_box(gamma) + (1 - eps) * white
/// with eps = c_value(box, gamma) / n.
Box depolarize(const Box &box, const Gamma &gamma);

struct Alignment {
    Box box;
    LocalOperation op;
    /// Most violated gamma of the input, when it violates one.
    std::optional<Gamma> original;
};

/// Output flips taking an odd gamma to Gamma::canonical(n) (identity when already canonical).
LocalOperation canonical_relabeling(const Gamma &gamma);

/// Output flips moving the violated inequality onto Gamma::canonical(n).
/// Local boxes come back unchanged with the identity operation.
Alignment align_to_canonical(const Box &box, double tol = 1e-9);

}  // namespace ncycle

#endif
