#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cmsbm/error.hpp"
#include "cmsbm/families.hpp"
#include "cmsbm/harness.hpp"
#include "cmsbm/io.hpp"
#include "cmsbm/rounding.hpp"
#include "cmsbm/statistics.hpp"
#include "cmsbm/thresholds.hpp"
#include "cmsbm/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cmsbm;

namespace {

enum class LogLevel { Quiet, Info, Debug };

struct Global {
    int threads = 0;
    double budget = 1e11;
    std::string log_level = "info";
    LogLevel level() const {
        if (log_level == "quiet") return LogLevel::Quiet;
        if (log_level == "debug") return LogLevel::Debug;
        return LogLevel::Info;
    }
};

void log(const Global& g, const std::string& msg) {
    if (g.level() != LogLevel::Quiet) std::cerr << msg << '\n';
}

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

Hypothesis parse_hypothesis(const std::string& s) {
    if (s == "P" || s == "planted") return Hypothesis::Planted;
    if (s == "Q" || s == "null") return Hypothesis::Null;
    throw Error(ErrorKind::InvalidParams, "hypothesis: expected P or Q, got " + s);
}

// Observation from --input, or a fresh draw from --params and --seed.
struct Source {
    std::string params_path;
    std::string input;
    std::uint64_t seed = 0;
    std::string hypothesis = "P";

    void add(CLI::App* cmd) {
        cmd->add_option("--params", params_path, "model parameters (JSON or TOML)");
        cmd->add_option("--input", input, "observation directory written by `sample`");
        cmd->add_option("--seed", seed, "seed for a fresh draw");
        cmd->add_option("--hypothesis", hypothesis, "P (planted) or Q (null) for a fresh draw")
            ->check(CLI::IsMember({"P", "Q", "planted", "null"}));
    }

    std::pair<Observation, ModelParams> resolve() const {
        if (!input.empty()) {
            Observation obs = read_observation(input);
            ModelParams m = params_path.empty() ? obs.params : load_params(params_path);
            return {std::move(obs), m};
        }
        if (params_path.empty()) throw Error(ErrorKind::InvalidParams, "need --params or --input");
        const ModelParams m = load_params(params_path);
        const Hypothesis h = parse_hypothesis(hypothesis);
        return {h == Hypothesis::Planted ? sample_planted(m, seed) : sample_null(m, seed), m};
    }
};

struct StatFlags {
    int aleph = 4;
    std::string backend = "transfer";
    double c = 0.5;
    bool no_b_correction = false;

    void add(CLI::App* cmd) {
        cmd->add_option("--aleph", aleph, "cycle or path length");
        cmd->add_option("--backend", backend, "exact or transfer")->check(CLI::IsMember({"exact", "transfer"}));
        cmd->add_option("--c", c, "threshold constant in (0, 1)");
        cmd->add_flag("--no-b-correction", no_b_correction, "first-order feature-index collision handling");
    }

    StatisticConfig config(const Global& g) const {
        StatisticConfig s;
        s.aleph = aleph;
        s.backend = parse_backend(backend);
        s.threshold_c = c;
        s.b_collision_correction = !no_b_correction;
        s.op_budget = g.budget;
        if (!(c > 0.0 && c < 1.0)) throw Error(ErrorKind::InvalidParams, "--c must lie in (0, 1)");
        return s;
    }
};

int run(int argc, char** argv) {
    CLI::App app{"Contextual multi-layer SBM: sampling, thresholds, subgraph statistics, experiments"};
    app.require_subcommand(1);
    app.fallthrough();
    Global g;
    app.add_option("--threads", g.threads, "worker threads (default: CMSBM_THREADS or hardware)")
        ->check(CLI::PositiveNumber);
    app.add_option("--budget", g.budget, "operation budget for statistic evaluation")->check(CLI::PositiveNumber);
    app.add_option("--log-level", g.log_level, "quiet, info or debug")
        ->check(CLI::IsMember({"quiet", "info", "debug"}));

    int exit_code = 0;

    // sample
    auto* sample = app.add_subcommand("sample", "draw an observation and write it to a directory");
    std::string sample_params, sample_out, sample_h = "P";
    std::uint64_t sample_seed = 0;
    sample->add_option("--params", sample_params, "model parameters")->required();
    sample->add_option("--seed", sample_seed, "seed");
    sample->add_option("--hypothesis", sample_h, "P or Q")->check(CLI::IsMember({"P", "Q", "planted", "null"}));
    sample->add_option("--out", sample_out, "output directory")->required();
    sample->callback([&] {
        const ModelParams m = load_params(sample_params);
        const Hypothesis h = parse_hypothesis(sample_h);
        const Observation obs = h == Hypothesis::Planted ? sample_planted(m, sample_seed) : sample_null(m, sample_seed);
        write_observation(sample_out, obs);
        json edges = json::array();
        for (const auto& layer : obs.layers) edges.push_back(layer.edges().size());
        print({{"out", sample_out},
               {"hypothesis", h == Hypothesis::Planted ? "P" : "Q"},
               {"seed", sample_seed},
               {"n", m.n},
               {"p", m.p},
               {"edges", edges}});
    });

    // threshold
    auto* threshold = app.add_subcommand("threshold", "threshold F, sigma_plus and related quantities");
    std::string thr_params;
    std::optional<int> thr_aleph;
    double thr_t = 0.0;
    threshold->add_option("--params", thr_params, "model parameters")->required();
    threshold->add_option("--aleph", thr_aleph, "also report the word recursion at this length");
    threshold->add_option("--t", thr_t, "tilt of the chi-square surrogate");
    threshold->callback([&] {
        const ModelParams m = load_params(thr_params);
        validate_params(m, m.n);
        const auto chi = chi2_surrogate(m, thr_t);
        json out{{"F_intro", threshold_F(m, FormulaVariant::Intro)},
                 {"F_sec3", threshold_F(m, FormulaVariant::Section3)},
                 {"sigma_plus", sigma_plus(m)},
                 {"interaction_matrix", matrix_json(interaction_matrix(m))},
                 {"chi2", {{"t", thr_t},
                           {"value", std::isfinite(chi.value) ? json(chi.value) : json("inf")},
                           {"finite", std::isfinite(chi.value)}}}};
        if (thr_aleph) {
            const Eigen::VectorXd rec = word_recursion(m, *thr_aleph);
            out["word_recursion"] = std::vector<double>(rec.data(), rec.data() + rec.size());
        }
        print(out);
    });

    // families
    auto* families = app.add_subcommand("families", "enumerate weighted cycle or path families");
    std::string fam_params, fam_topology = "cycle";
    int fam_aleph = 4;
    bool fam_leaf = false;
    std::optional<int> fam_color;
    families->add_option("--params", fam_params, "model parameters")->required();
    families->add_option("--aleph", fam_aleph, "length");
    families->add_option("--topology", fam_topology, "cycle or path")->check(CLI::IsMember({"cycle", "path"}));
    families->add_flag("--leaf-restricted", fam_leaf, "paths whose end letters are colored");
    families->add_option("--color", fam_color, "keep only the monochromatic words of this color");
    families->callback([&] {
        const ModelParams m = load_params(fam_params);
        validate_params(m, m.n);
        FamilyWeights fw =
            fam_topology == "cycle" ? enumerate_cycles(fam_aleph, m) : enumerate_paths(fam_aleph, m, fam_leaf);
        if (fam_color) fw = monochromatic(fw, *fam_color);
        json classes = json::array();
        for (const auto& c : fw.classes)
            classes.push_back({{"word", word_string(c.word)},
                               {"aut", c.aut},
                               {"dif0", c.dif0},
                               {"dif", c.dif},
                               {"counts", c.counts},
                               {"xi", c.xi}});
        print({{"topology", fam_topology}, {"aleph", fw.aleph}, {"beta", fw.beta}, {"classes", classes}});
    });

    // detect
    auto* detect = app.add_subcommand("detect", "detection statistic and test decision");
    Source det_src;
    StatFlags det_flags;
    det_src.add(detect);
    det_flags.add(detect);
    detect->callback([&] {
        const auto [obs, m] = det_src.resolve();
        const StatisticConfig cfg = det_flags.config(g);
        if (g.level() == LogLevel::Debug)
            log(g, "estimated cost: " + format_double(estimated_cost(m, cfg, Topology::Cycle)));
        const StatisticReport r = detection_statistic(obs, m, cfg);
        print({{"value", r.value},
               {"beta", r.beta},
               {"tau", r.tau},
               {"decision", r.decision.value_or(false)},
               {"backend", backend_name(r.backend)},
               {"elapsed", r.elapsed}});
    });

    // recover
    auto* recover = app.add_subcommand("recover", "recovery matrix, optional projection and rounding");
    Source rec_src;
    StatFlags rec_flags;
    std::string rec_out;
    bool rec_project = false, rec_round = false;
    ProjectionConfig rec_proj;
    std::uint64_t rec_round_seed = 0;
    rec_src.add(recover);
    rec_flags.add(recover);
    recover->add_option("--out", rec_out, "output matrix file")->required();
    recover->add_flag("--project", rec_project, "project onto unit-diagonal PSD matrices");
    recover->add_option("--floor", rec_proj.correlation_floor, "correlation floor of the projection");
    recover->add_option("--max-iters", rec_proj.max_iters, "projection iteration cap");
    recover->add_option("--tol", rec_proj.tol, "projection tolerance");
    recover->add_flag("--round", rec_round, "round the projection to signs (implies --project)");
    recover->add_option("--round-seed", rec_round_seed, "seed for sign rounding");
    recover->callback([&] {
        const auto [obs, m] = rec_src.resolve();
        const StatisticConfig cfg = rec_flags.config(g);
        if (g.level() == LogLevel::Debug)
            log(g, "estimated cost: " + format_double(estimated_cost(m, cfg, Topology::Path)));
        const StatisticReport r = recovery_matrix(obs, m, cfg);
        write_matrix(rec_out, *r.matrix, kEstimateMagic);
        json out{{"out", rec_out}, {"beta", r.beta}, {"backend", backend_name(r.backend)}, {"elapsed", r.elapsed}};
        if (obs.truth) out["cosine"] = metrics(*r.matrix, obs).cosine;
        if (rec_project || rec_round) {
            Estimate est = psd_project(*r.matrix, rec_proj);
            const auto& d = est.diagnostics;
            out["projection"] = {{"achieved_floor", d.achieved_floor},
                                 {"min_eigenvalue", d.min_eigenvalue},
                                 {"diagonal_error", d.diagonal_error},
                                 {"constraint_slack", d.constraint_slack},
                                 {"distance", d.distance},
                                 {"iters", d.iters}};
            if (obs.truth) out["projection"]["cosine"] = metrics(est.phi_hat, obs).cosine;
            if (rec_round) {
                const auto x_hat = sign_round(est, rec_round_seed);
                out["x_hat"] = x_hat;
                if (obs.truth) out["overlap"] = metrics(x_hat, obs).overlap;
            }
        }
        print(out);
    });

    // experiment
    auto* experiment = app.add_subcommand("experiment", "run a seeded batch experiment from a plan file");
    std::string exp_plan, exp_out;
    bool exp_plots = false;
    experiment->add_option("--plan", exp_plan, "plan file (JSON or TOML)")->required();
    experiment->add_option("--out", exp_out, "output directory")->required();
    experiment->add_flag("--plots", exp_plots, "also write SVG plots");
    experiment->callback([&] {
        const ExperimentPlan plan = load_plan(exp_plan);
        ExperimentPlan run_plan = plan;
        run_plan.statistic.op_budget = g.budget;
        const int threads = g.threads > 0 ? g.threads : default_threads();
        const Topology topo = plan.kind == ExperimentKind::Detection ? Topology::Cycle : Topology::Path;
        double cost = 0.0;
        for (const auto& arm : plan.arms) cost += estimated_cost(arm.params, plan.statistic, topo);
        const int per_trial = plan.kind == ExperimentKind::Detection ? 2 : 1;
        log(g, "experiment: " + std::to_string(plan.arms.size()) + " arms x " + std::to_string(plan.trials) +
                   " trials, estimated cost " + format_double(cost * plan.trials * per_trial) + " ops, " +
                   std::to_string(threads) + " threads");
        const ExperimentResult res = run_experiment(run_plan, threads);
        write_experiment(exp_out, res, exp_plots);
        json arms = json::array();
        for (const auto& s : res.summary) {
            json a{{"arm_id", s.arm_id},     {"variant", s.variant},       {"F_intro", s.f_intro},
                   {"F_sec3", s.f_sec3},     {"sigma_plus", s.sigma_plus}, {"mean_value", s.mean_value},
                   {"trials", s.trials},     {"failures", s.failures}};
            if (s.auc) a["auc"] = *s.auc;
            if (s.mean_cosine) a["mean_cosine"] = *s.mean_cosine;
            arms.push_back(a);
        }
        print({{"out", exp_out}, {"records", res.records.size()}, {"summary", arms}});
    });

    // verify
    auto* verify = app.add_subcommand("verify", "run the oracle suite");
    verify->callback([&] {
        const auto checks = run_verification();
        bool ok = true;
        json list = json::array();
        for (const auto& c : checks) {
            ok = ok && c.passed;
            list.push_back({{"name", c.name},
                            {"passed", c.passed},
                            {"measured", c.measured},
                            {"tolerance", c.tolerance},
                            {"cases", c.cases}});
        }
        print({{"passed", ok}, {"checks", list}});
        if (!ok) exit_code = 2;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        if (e.get_exit_code() != 0) std::cerr << app.help();
        return 1;
    }
    return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const Error& e) {
        std::cerr << "error: " << error_name(e.kind()) << ": " << e.what() << '\n'
                  << "remedy: " << error_remedy(e.kind()) << '\n';
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: SchemaMismatch: " << e.what() << '\n'
                  << "remedy: " << error_remedy(ErrorKind::SchemaMismatch) << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
