#include "ncycle/inequalities.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "ncycle/error.h"

namespace ncycle {

double shannon_entropy(std::span<const double> dist) {
    double total = 0;
    for (double p : dist) {
        if (!(p >= 0)) {
            throw std::invalid_argument("entropy of a distribution with a negative entry");
        }
        total += p;
    }
    if (std::abs(total - 1) > 1e-9) {
        throw std::invalid_argument("entropy of an unnormalised distribution");
    }
    double h = 0;
    for (double p : dist) {
        if (p > 0) {
            h -= p * std::log2(p);
        }
    }
    return h;
}

double expectation(const Box &box, int edge) {
    if (box.d() != 2) {
        throw std::invalid_argument("correlators need d = 2");
    }
    auto e = box.edge(edge);
    return e[0] + e[3] - e[1] - e[2];
}

double c_value(const Box &box, const Gamma &gamma) {
    if (gamma.size() != box.n()) {
        throw std::invalid_argument("gamma length differs from n");
    }
    if (!gamma.is_odd()) {
        throw std::invalid_argument("C inequalities need odd-parity gamma");
    }
    double c = 0;
    for (int i = 0; i < box.n(); i++) {
        c += gamma[i] * expectation(box, i);
    }
    return c;
}

EntropyProfile entropy_profile(const Box &box, double disturbance_tol) {
    int bad = first_disturbed_observable(box, disturbance_tol);
    if (bad >= 0) {
        throw DisturbanceError(bad, disturbance(box, bad));
    }
    EntropyProfile out;
    for (int i = 0; i < box.n(); i++) {
        // Entries may sit a hair below zero after remixing; entropy treats them as zero.
        auto e = box.edge(i);
        std::vector<double> clean(e.begin(), e.end());
        for (auto &p : clean) {
            p = std::max(p, 0.0);
        }
        out.edge.push_back(shannon_entropy(clean));
        auto m = marginal(box, i, Side::left);
        for (auto &p : m) {
            p = std::max(p, 0.0);
        }
        out.marginal.push_back(shannon_entropy(m));
    }
    return out;
}

double bc_value(const EntropyProfile &profile, int k) {
    int n = static_cast<int>(profile.edge.size());
    if (k < 0 || k >= n) {
        throw std::out_of_range("BC index out of range");
    }
    double v = profile.edge[static_cast<size_t>(k)];
    for (int j = 0; j < n; j++) {
        if (j != k && j != (k + 1) % n) {
            v += profile.marginal[static_cast<size_t>(j)];
        }
    }
    for (int j = 0; j < n; j++) {
        if (j != k) {
            v -= profile.edge[static_cast<size_t>(j)];
        }
    }
    return v;
}

double bc_value(const Box &box, int k, double disturbance_tol) {
    if (k < 0 || k >= box.n()) {
        throw std::out_of_range("BC index out of range");
    }
    return bc_value(entropy_profile(box, disturbance_tol), k);
}

std::vector<double> bc_values(const Box &box, double disturbance_tol) {
    auto profile = entropy_profile(box, disturbance_tol);
    std::vector<double> out;
    for (int k = 0; k < box.n(); k++) {
        out.push_back(bc_value(profile, k));
    }
    return out;
}

InequalityReport full_report(const Box &box, double tol) {
    InequalityReport r;
    r.n = box.n();
    r.d = box.d();
    r.tol = tol;
    r.c_bound = box.n() - 2;
    r.bc_bound = 0;
    if (box.d() == 2) {
        for (auto &g : odd_gammas(box.n())) {
            double c = c_value(box, g);
            if (c > r.c_bound + tol) {
                r.violated_c.push_back(g);
            }
            r.c_values.emplace_back(std::move(g), c);
        }
    }
    r.bc_values = bc_values(box);
    for (int k = 0; k < box.n(); k++) {
        if (r.bc_values[static_cast<size_t>(k)] > r.bc_bound + tol) {
            r.violated_bc.push_back(k);
        }
    }
    return r;
}

namespace {

std::string fmt(double x) {
    std::ostringstream ss;
    ss << std::setprecision(17) << x;
    return ss.str();
}

}  // namespace

std::string report_csv(const InequalityReport &r) {
    std::ostringstream out;
    out << "family,label,value,bound,violated\n";
    for (const auto &[g, c] : r.c_values) {
        bool v = c > r.c_bound + r.tol;
        out << "C," << g.to_string() << "," << fmt(c) << "," << fmt(r.c_bound) << "," << (v ? 1 : 0) << "\n";
    }
    for (size_t k = 0; k < r.bc_values.size(); k++) {
        double b = r.bc_values[k];
        bool v = b > r.bc_bound + r.tol;
        out << "BC," << (k + 1) << "," << fmt(b) << "," << fmt(r.bc_bound) << "," << (v ? 1 : 0) << "\n";
    }
    return out.str();
}

std::string report_table(const InequalityReport &r) {
    std::ostringstream out;
    out << "n = " << r.n << ", d = " << r.d << ", tol = " << r.tol << "\n";
    out << std::left << std::setw(8) << "family" << std::setw(14) << "label" << std::right << std::setw(22)
        << "value" << std::setw(8) << "bound"
        << "  violated\n";
    auto row = [&](const char *family, const std::string &label, double value, double bound, bool violated) {
        out << std::left << std::setw(8) << family << std::setw(14) << label << std::right << std::setw(22)
            << std::setprecision(12) << value << std::setw(8) << bound << "  " << (violated ? "yes" : "no") << "\n";
    };
    for (const auto &[g, c] : r.c_values) {
        row("C", g.to_string(), c, r.c_bound, c > r.c_bound + r.tol);
    }
    for (size_t k = 0; k < r.bc_values.size(); k++) {
        row("BC", "k=" + std::to_string(k + 1), r.bc_values[k], r.bc_bound, r.bc_values[k] > r.bc_bound + r.tol);
    }
    return out.str();
}

}  // namespace ncycle
