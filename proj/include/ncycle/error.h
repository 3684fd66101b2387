#ifndef NCYCLE_ERROR_H
#define NCYCLE_ERROR_H

#include <stdexcept>
#include <string>

namespace ncycle {

/// Raised when a box's two marginals for one observable disagree.
class DisturbanceError : public std::runtime_error {
   public:
    DisturbanceError(int observable, double gap);
    int observable() const { return observable_; }
    double gap() const { return gap_; }

   private:
    int observable_;
    double gap_;
};

/// Malformed external data (box files, CLI inputs).
class DataError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// The LP engine hit its iteration cap or lost numerical footing.
class SolverError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

}  // namespace ncycle

#endif
