#include "cli.h"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "ncycle/acceptance.h"
#include "ncycle/activation.h"
#include "ncycle/box.h"
#include "ncycle/box_io.h"
#include "ncycle/error.h"
#include "ncycle/inequalities.h"
#include "ncycle/local_oracle.h"

namespace ncycle::cli {

namespace {

using json = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string command;
    std::optional<int> n;
    int d = 2;
    std::optional<double> epsilon;
    int trials = 1000;
    std::uint64_t seed = 20130101;
    double tol = 1e-9;
    bool no_depolarize = false;
    bool depolarize = false;
    bool conjecture = false;
    std::string preset;
    std::string format = "table";
    std::string out;
    std::string box_file;
    std::string sampler = "flat";
    std::string companion;
    int points = 40;
    double v_min = 1e-8;
    double v_max = 0.5;
    unsigned threads = 0;
};

constexpr int kLpColumnLimit = 1 << 14;

std::string fmt(double x, int precision = 12) {
    std::ostringstream s;
    s << std::setprecision(precision) << x;
    return s.str();
}

Box preset_box(const RunConfig &cfg) {
    const std::string &p = cfg.preset;
    auto fixed_n = [&](int n) {
        if (cfg.n && *cfg.n != n) {
            throw UsageError("--preset " + p + " has n = " + std::to_string(n));
        }
        return n;
    };
    if (cfg.epsilon && p != "iso") {
        throw UsageError("--epsilon only applies to --preset iso");
    }
    if (cfg.d != 2 && p != "white") {
        throw UsageError("--d only applies to --preset white");
    }
    int n = cfg.n.value_or(4);
    if (n < 3) {
        throw UsageError("--n must be at least 3");
    }
    if (p == "pr4") {
        return pr_box(Gamma::canonical(fixed_n(4))).with_label("pr4");
    }
    if (p == "emax4") {
        int m = fixed_n(4);
        return mix(pr_box(Gamma::canonical(m)), classical_box(Gamma::all_plus(m)), 0.5).with_label("emax4");
    }
    if (p == "prN") {
        if (!cfg.n) {
            throw UsageError("--preset prN needs --n");
        }
        return pr_box(Gamma::canonical(n)).with_label("pr" + std::to_string(n));
    }
    if (p == "classical") {
        return classical_box(Gamma::all_plus(n)).with_label("classical" + std::to_string(n));
    }
    if (p == "white") {
        if (cfg.d < 2) {
            throw UsageError("--d must be at least 2");
        }
        return white_noise(n, cfg.d).with_label("white" + std::to_string(n));
    }
    if (p == "iso") {
        if (!cfg.epsilon) {
            throw UsageError("--preset iso needs --epsilon");
        }
        if (!(*cfg.epsilon >= 0 && *cfg.epsilon <= 1)) {
            throw UsageError("--epsilon must lie in [0,1]");
        }
        return isotropic_box(n, *cfg.epsilon, Gamma::canonical(n)).with_label("iso" + std::to_string(n) + "@" + fmt(*cfg.epsilon));
    }
    throw UsageError("unknown preset '" + p + "' (pr4, prN, classical, white, iso, emax4)");
}

Box input_box(const RunConfig &cfg) {
    bool has_file = !cfg.box_file.empty();
    bool has_preset = !cfg.preset.empty();
    if (has_file == has_preset) {
        throw UsageError("give exactly one of a box file or --preset");
    }
    if (has_file) {
        if (cfg.n || cfg.epsilon || cfg.d != 2) {
            throw UsageError("--n, --d and --epsilon describe presets, not box files");
        }
        return read_box_file(cfg.box_file);
    }
    return preset_box(cfg);
}

json membership_json(const MembershipVerdict &v) {
    json j{{"local", v.is_local},
           {"method", v.method == MembershipMethod::facet_check ? "facet-check" : "lp-decomposition"},
           {"lp_only", v.lp_only},
           {"summary", v.summary()}};
    if (const auto *dec = std::get_if<Decomposition>(&v.certificate)) {
        json rows = json::array();
        for (const auto &[label, w] : dec->weights) {
            rows.push_back({{"vertex", label.to_string()}, {"weight", w}});
        }
        j["decomposition"] = rows;
    } else if (const auto *slack = std::get_if<FacetSlack>(&v.certificate)) {
        j["tightest"] = slack->tightest.to_string();
        j["max_c"] = slack->value;
        j["slack"] = slack->slack;
    } else if (const auto *w = std::get_if<NonlocalWitness>(&v.certificate)) {
        if (w->gamma) {
            j["violated"] = w->gamma->to_string();
        }
        j["violation"] = w->violation;
    }
    return j;
}

std::string decomposition_csv(const MembershipVerdict &v) {
    std::ostringstream s;
    s << "vertex,weight\n" << std::setprecision(17);
    if (const auto *dec = std::get_if<Decomposition>(&v.certificate)) {
        for (const auto &[label, w] : dec->weights) {
            s << label.to_string() << "," << w << "\n";
        }
    }
    return s.str();
}

std::string cmd_report(const RunConfig &cfg) {
    Box box = input_box(cfg);
    InequalityReport report = full_report(box, cfg.tol);
    std::optional<MembershipVerdict> facet, lp;
    if (box.d() == 2) {
        facet = facet_check(box, cfg.tol);
    }
    if (std::pow(static_cast<double>(box.d()), box.n()) <= kLpColumnLimit) {
        lp = decompose_local(box, cfg.tol);
    }
    std::ostringstream s;
    if (cfg.format == "json") {
        json j{{"label", box.label()}, {"n", box.n()}, {"d", box.d()}, {"tol", cfg.tol}};
        json cs = json::array();
        for (const auto &[g, value] : report.c_values) {
            cs.push_back({{"gamma", g.to_string()}, {"value", value}, {"violated", value > report.c_bound + cfg.tol}});
        }
        j["c_bound"] = report.c_bound;
        j["c_values"] = cs;
        j["bc_bound"] = report.bc_bound;
        j["bc_values"] = report.bc_values;
        j["facet_check"] = facet ? membership_json(*facet) : json(nullptr);
        j["lp"] = lp ? membership_json(*lp) : json(nullptr);
        s << j.dump(2) << "\n";
    } else if (cfg.format == "csv") {
        s << report_csv(report);
        for (const auto *v : {facet ? &*facet : nullptr, lp ? &*lp : nullptr}) {
            if (v) {
                s << "membership," << (v->method == MembershipMethod::facet_check ? "facet-check" : "lp-decomposition")
                  << "," << (v->is_local ? "local" : "nonlocal") << ",," << (v->is_local ? 0 : 1) << "\n";
            }
        }
        if (lp && lp->is_local) {
            s << "\n" << decomposition_csv(*lp);
        }
    } else {
        s << "box: " << (box.label().empty() ? "(unlabelled)" : box.label()) << "  n=" << box.n() << " d=" << box.d()
          << "\n\n";
        s << report_table(report) << "\n";
        s << "facet check: " << (facet ? facet->summary() : "n/a (d != 2)") << "\n";
        s << "LP:          " << (lp ? lp->summary() : "skipped (too many deterministic vertices)") << "\n";
        if (lp && lp->is_local) {
            for (const auto &[label, w] : std::get<Decomposition>(lp->certificate).weights) {
                s << "  " << std::left << std::setw(16) << label.to_string() << " " << fmt(w) << "\n";
            }
        }
    }
    return s.str();
}

std::string status_name(ActivationStatus status) {
    switch (status) {
        case ActivationStatus::local:
            return "local";
        case ActivationStatus::activated:
            return "activated";
        case ActivationStatus::exhausted:
            return "not-activated";
    }
    return "?";
}

std::string cmd_activate(const RunConfig &cfg, int &code) {
    Box box = input_box(cfg);
    ActivationOptions opts;
    opts.tol = cfg.tol;
    opts.depolarize = !cfg.no_depolarize;
    ActivationResult r = activation_search(box, opts);
    code = r.status == ActivationStatus::activated ? exit_ok
           : r.status == ActivationStatus::local   ? exit_local
                                                   : exit_not_activated;
    std::ostringstream s;
    if (cfg.format == "json" || cfg.format == "csv") {
        json j{{"status", status_name(r.status)}, {"max_c", r.c_value}, {"depolarized", r.used_depolarization}};
        j["violated"] = r.violated ? json(r.violated->to_string()) : json(nullptr);
        if (r.status != ActivationStatus::local) {
            j["alignment"] = r.alignment.to_string();
            j["companion"] = r.companion->to_string();
            j["points_scanned"] = r.points_scanned;
        }
        if (r.found) {
            j["k_star"] = r.k_star + 1;
            j["log_v_star"] = r.log_v_star;
            j["v_star"] = r.v_star;
            j["bc_at_v"] = r.bc_at_v;
            j["bc_density"] = r.bc_density;
        }
        if (cfg.format == "json") {
            if (r.mixed_box) {
                j["mixed_box"] = json::parse(serialize_box(*r.mixed_box));
            }
            s << j.dump(2) << "\n";
        } else {
            s << "key,value\n";
            for (const auto &[key, value] : j.items()) {
                s << key << "," << (value.is_string() ? value.get<std::string>() : value.dump()) << "\n";
            }
        }
    } else {
        s << describe(r);
    }
    return s.str();
}

std::string cmd_verify(const RunConfig &cfg, int &code, std::ostream &err) {
    CheckOptions opts;
    opts.seed = cfg.seed;
    opts.threads = cfg.threads;
    auto results = run_acceptance_checks(opts);
    bool all = std::all_of(results.begin(), results.end(), [](const CriterionResult &r) { return r.pass(); });
    code = all ? exit_ok : exit_failure;
    for (const auto &r : results) {
        err << "[" << r.id << "] " << std::fixed << std::setprecision(2) << r.seconds << "s (budget "
            << r.budget_seconds << "s)" << std::defaultfloat << "\n";
    }
    std::ostringstream s;
    if (cfg.format == "json") {
        json rows = json::array();
        for (const auto &r : results) {
            rows.push_back({{"id", r.id},
                            {"name", r.name},
                            {"measured", r.measured},
                            {"expected", r.expected},
                            {"tolerance", r.tolerance},
                            {"pass", r.value_pass}});
        }
        s << rows.dump(2) << "\n";
    } else if (cfg.format == "csv") {
        auto quote = [](const std::string &x) {
            std::string q = "\"";
            for (char c : x) {
                q += c == '"' ? std::string("\"\"") : std::string(1, c);
            }
            return q + "\"";
        };
        s << "id,name,measured,expected,tolerance,pass\n";
        for (const auto &r : results) {
            s << r.id << "," << quote(r.name) << "," << quote(r.measured) << "," << quote(r.expected) << ","
              << quote(r.tolerance) << "," << (r.value_pass ? "true" : "false") << "\n";
        }
    } else {
        s << checks_table(results, false);
    }
    return s.str();
}

std::string cmd_appendix(const RunConfig &cfg, int &code) {
    if (!cfg.n) {
        throw UsageError("appendix needs --n");
    }
    if (cfg.trials < 1) {
        throw UsageError("--trials must be positive");
    }
    if (cfg.depolarize && cfg.no_depolarize) {
        throw UsageError("--depolarize and --no-depolarize are exclusive");
    }
    AppendixOptions opts;
    if (cfg.sampler == "flat") {
        opts.sampler = Sampler::flat;
    } else if (cfg.sampler == "pr-weighted") {
        opts.sampler = Sampler::pr_weighted;
    } else {
        throw UsageError("--sampler must be flat or pr-weighted");
    }
    opts.depolarize = cfg.depolarize;
    opts.conjecture = cfg.conjecture;
    opts.tol = cfg.tol;
    opts.threads = cfg.threads;
    if (*cfg.n < 3 || (*cfg.n > 7 && !cfg.conjecture)) {
        throw UsageError("appendix supports 3 <= n <= 7; pass --conjecture to go further");
    }
    AppendixSummary sum = appendix_experiment(*cfg.n, cfg.trials, cfg.seed, opts);
    code = sum.failed == 0 && sum.local_activated == 0 ? exit_ok : exit_not_activated;
    json j{{"n", sum.n},
           {"trials", sum.trials},
           {"sampler", sampler_name(sum.sampler)},
           {"depolarize", sum.depolarize},
           {"seed", cfg.seed},
           {"nonlocal", sum.nonlocal},
           {"activated", sum.activated},
           {"failed", sum.failed},
           {"local", sum.local},
           {"local_activated", sum.local_activated}};
    j["min_c_excess"] = sum.nonlocal ? json(sum.min_c_excess) : json(nullptr);
    j["min_density"] = sum.activated ? json(sum.min_density) : json(nullptr);
    j["max_log_inv_v"] = sum.max_log_inv_v;
    std::ostringstream s;
    if (cfg.format == "json") {
        s << j.dump(2) << "\n";
    } else {
        bool csv = cfg.format == "csv";
        if (csv) {
            s << "key,value\n";
        }
        for (const auto &[key, value] : j.items()) {
            std::string text = value.is_string() ? value.get<std::string>() : value.dump();
            if (csv) {
                s << key << "," << text << "\n";
            } else {
                s << std::left << std::setw(16) << key << text << "\n";
            }
        }
    }
    return s.str();
}

std::string cmd_curve(const RunConfig &cfg) {
    Box box = input_box(cfg);
    if (cfg.points < 2 || !(cfg.v_min > 0 && cfg.v_min < cfg.v_max && cfg.v_max <= 1)) {
        throw UsageError("curve needs --points >= 2 and 0 < --v-min < --v-max <= 1");
    }
    Gamma companion = cfg.companion.empty() ? Gamma::all_plus(box.n()) : Gamma::parse(cfg.companion);
    std::vector<double> vs;
    double lo = std::log(cfg.v_min), hi = std::log(cfg.v_max);
    for (int i = 0; i < cfg.points; i++) {
        vs.push_back(std::exp(lo + (hi - lo) * i / (cfg.points - 1)));
    }
    vs.front() = cfg.v_min;
    vs.back() = cfg.v_max;
    std::optional<ExpansionModel> model;
    if (cfg.preset == "iso" && *cfg.epsilon > 0 && *cfg.epsilon < 1 && cfg.companion.empty()) {
        model = expansion_model(box.n(), *cfg.epsilon);
    }
    return curve_csv(bc_curve(box, companion, vs, model));
}

std::string cmd_make_box(const RunConfig &cfg) {
    if (!cfg.box_file.empty()) {
        throw UsageError("make-box takes --preset only");
    }
    return serialize_box(input_box(cfg));
}

void add_box_options(CLI::App *sub, RunConfig &cfg) {
    sub->add_option("box", cfg.box_file, "Box file (JSON)");
    sub->add_option("--preset", cfg.preset, "pr4 | prN | classical | white | iso | emax4");
    sub->add_option("--n", cfg.n, "Number of observables for presets");
    sub->add_option("--d", cfg.d, "Outcomes per observable (white preset)");
    sub->add_option("--epsilon", cfg.epsilon, "Visibility for the iso preset");
}

void add_common_options(CLI::App *sub, RunConfig &cfg) {
    sub->add_option("--format", cfg.format, "table | csv | json")
        ->check(CLI::IsMember({"table", "csv", "json"}));
    sub->add_option("--out", cfg.out, "Write output to this file instead of stdout");
}

}  // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    RunConfig cfg;
    CLI::App app{"n-cycle box toolkit: inequalities, locality, depolarization and entropic activation", "ncycle"};
    app.require_subcommand(1);

    auto *report = app.add_subcommand("report", "Evaluate all C and BC inequalities and decide locality");
    add_box_options(report, cfg);
    report->add_option("--tol", cfg.tol, "Violation tolerance");
    add_common_options(report, cfg);

    auto *activate = app.add_subcommand("activate", "Search for a BC violation after mixing with a classical box");
    add_box_options(activate, cfg);
    activate->add_option("--tol", cfg.tol, "Violation tolerance");
    activate->add_flag("--no-depolarize", cfg.no_depolarize, "Skip the depolarization twirl");
    add_common_options(activate, cfg);

    auto *verify = app.add_subcommand("verify-paper", "Run the acceptance checks and print a pass/fail table");
    verify->add_option("--seed", cfg.seed, "Master seed for sampled boxes");
    verify->add_option("--threads", cfg.threads, "Worker threads (0 = all cores)");
    add_common_options(verify, cfg);

    auto *appendix = app.add_subcommand("appendix", "Activate random nonsignalling boxes without depolarization");
    appendix->add_option("--n", cfg.n, "Number of observables")->required();
    appendix->add_option("--trials", cfg.trials, "Number of random boxes");
    appendix->add_option("--seed", cfg.seed, "Master seed");
    appendix->add_option("--tol", cfg.tol, "Violation tolerance");
    appendix->add_option("--sampler", cfg.sampler, "flat | pr-weighted");
    appendix->add_flag("--depolarize", cfg.depolarize, "Depolarize before the scan");
    appendix->add_flag("--no-depolarize", cfg.no_depolarize, "Do not depolarize (default)");
    appendix->add_flag("--conjecture", cfg.conjecture, "Allow n > 7");
    appendix->add_option("--threads", cfg.threads, "Worker threads (0 = all cores)");
    add_common_options(appendix, cfg);

    auto *curve = app.add_subcommand("emit-curve", "CSV of BC values of the mixture along a log-spaced v grid");
    add_box_options(curve, cfg);
    curve->add_option("--companion", cfg.companion, "Even gamma of the classical box (default all plus)");
    curve->add_option("--points", cfg.points, "Grid size");
    curve->add_option("--v-min", cfg.v_min, "Smallest v");
    curve->add_option("--v-max", cfg.v_max, "Largest v");
    curve->add_option("--out", cfg.out, "Write output to this file instead of stdout");

    auto *make = app.add_subcommand("make-box", "Write a preset box in the box file format");
    add_box_options(make, cfg);
    make->add_option("--out", cfg.out, "Write output to this file instead of stdout");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp &e) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp &e) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError &e) {
        err << "usage error: " << e.what() << "\n" << "run 'ncycle --help' for usage\n";
        return exit_usage;
    }

    int code = exit_ok;
    try {
        std::string text;
        if (report->parsed()) {
            text = cmd_report(cfg);
        } else if (activate->parsed()) {
            text = cmd_activate(cfg, code);
        } else if (verify->parsed()) {
            text = cmd_verify(cfg, code, err);
        } else if (appendix->parsed()) {
            text = cmd_appendix(cfg, code);
        } else if (curve->parsed()) {
            text = cmd_curve(cfg);
        } else {
            text = cmd_make_box(cfg);
        }
        if (cfg.out.empty()) {
            out << text;
        } else {
            write_text_atomically(cfg.out, text);
        }
    } catch (const UsageError &e) {
        err << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const DisturbanceError &e) {
        err << "data error: " << e.what() << "\n";
        return exit_data;
    } catch (const DataError &e) {
        err << "data error: " << e.what() << "\n";
        return exit_data;
    } catch (const std::invalid_argument &e) {
        err << "data error: " << e.what() << "\n";
        return exit_data;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return exit_failure;
    }
    return code;
}

}  // namespace ncycle::cli
