#include "cmsbm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

#include "cmsbm/error.hpp"
#include "cmsbm/families.hpp"
#include "cmsbm/io.hpp"
#include "cmsbm/thresholds.hpp"

namespace cmsbm {

using nlohmann::json;

namespace {

const char* const kColumns = "arm_id,hypothesis,seed,variant,value,F_intro,F_sec3,sigma_plus,auc,cosine,elapsed";

[[noreturn]] void schema(const std::string& what) { throw Error(ErrorKind::SchemaMismatch, what); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct ArmContext {
    double f_intro, f_sec3, sigma;
    std::vector<FamilyWeights> families;  // one per variant
};

FamilyWeights variant_family(const FamilyWeights& full, const std::string& variant) {
    if (variant == "all") return full;
    if (variant.rfind("color", 0) == 0) {
        const int c = std::stoi(variant.substr(5));
        if (c < 0 || c >= full.colors) throw Error(ErrorKind::InvalidParams, "variant color out of range: " + variant);
        return monochromatic(full, c);
    }
    throw Error(ErrorKind::InvalidParams, "unknown variant " + variant);
}

ArmContext arm_context(const ExperimentPlan& plan, const ArmSpec& arm, Topology topo) {
    ArmContext ctx;
    ctx.f_intro = threshold_F(arm.params, FormulaVariant::Intro);
    ctx.f_sec3 = threshold_F(arm.params, FormulaVariant::Section3);
    ctx.sigma = sigma_plus(arm.params);
    const FamilyWeights full = topo == Topology::Cycle ? enumerate_cycles(plan.statistic.aleph, arm.params)
                                                       : enumerate_paths(plan.statistic.aleph, arm.params);
    for (const auto& v : plan.variants) ctx.families.push_back(variant_family(full, v));
    return ctx;
}

// Runs jobs 0..count-1 on a fixed number of workers; job results land in
// their own slots so the output order never depends on scheduling.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& job) {
    const auto workers = static_cast<std::size_t>(std::max(1, threads));
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < count;) {
            try {
                job(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < std::min(workers, count); ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? NAN : s / static_cast<double>(v.size());
}

double std_error(const std::vector<double>& v) {
    if (v.size() < 2) return NAN;
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

ExperimentRecord base_record(const ArmSpec& arm, const ArmContext& ctx, char hyp, std::uint64_t seed,
                             const std::string& variant) {
    ExperimentRecord r;
    r.arm_id = arm.id;
    r.hypothesis = hyp;
    r.seed = seed;
    r.variant = variant;
    r.f_intro = ctx.f_intro;
    r.f_sec3 = ctx.f_sec3;
    r.sigma_plus = ctx.sigma;
    return r;
}

std::vector<ArmSummary> summarize(const ExperimentPlan& plan, const std::vector<ExperimentRecord>& records) {
    std::vector<std::string> keys;
    std::map<std::string, std::vector<const ExperimentRecord*>> groups;
    for (const auto& r : records) {
        if (r.hypothesis != 'P') continue;
        const std::string key = r.arm_id + '\x1f' + r.variant;
        if (!groups.count(key)) keys.push_back(key);
        groups[key].push_back(&r);
    }
    (void)plan;
    std::vector<ArmSummary> out;
    for (const auto& key : keys) {
        const auto& rows = groups[key];
        ArmSummary s;
        s.arm_id = rows.front()->arm_id;
        s.variant = rows.front()->variant;
        s.f_intro = rows.front()->f_intro;
        s.f_sec3 = rows.front()->f_sec3;
        s.sigma_plus = rows.front()->sigma_plus;
        s.auc = rows.front()->auc;
        std::vector<double> vals, cos;
        for (const auto* r : rows) {
            ++s.trials;
            if (!std::isfinite(r->value)) {
                ++s.failures;
                continue;
            }
            vals.push_back(r->value);
            if (r->cosine && std::isfinite(*r->cosine)) cos.push_back(*r->cosine);
        }
        s.mean_value = mean(vals);
        s.se_value = std_error(vals);
        if (!cos.empty()) {
            s.mean_cosine = mean(cos);
            s.se_cosine = std_error(cos);
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : "NA"; }

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_number(const std::string& s) {
    if (s == "nan") return NAN;
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) schema("not a number: " + s);
    return v;
}

std::optional<double> parse_optional(const std::string& s) {
    if (s == "NA") return std::nullopt;
    return parse_number(s);
}

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

int default_threads() {
    if (const char* env = std::getenv("CMSBM_THREADS")) {
        const int t = std::atoi(env);
        if (t > 0) return t;
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::uint64_t trial_seed(std::uint64_t base, std::size_t arm, std::size_t trial) {
    return base + static_cast<std::uint64_t>(arm) * 1'000'000u + static_cast<std::uint64_t>(trial);
}

ExperimentPlan plan_from_json(const json& j) {
    if (!j.is_object()) schema("plan must be an object");
    ExperimentPlan plan;
    const std::string kind = j.value("kind", "detection");
    if (kind == "detection") plan.kind = ExperimentKind::Detection;
    else if (kind == "recovery") plan.kind = ExperimentKind::Recovery;
    else schema("plan kind must be detection or recovery");
    plan.seed = j.value("seed", std::uint64_t{0});
    plan.trials = j.value("trials", 100);
    if (plan.trials < 1) throw Error(ErrorKind::InvalidParams, "trials: must be positive");
    plan.statistic.aleph = j.value("aleph", 4);
    plan.statistic.backend = parse_backend(j.value("backend", std::string("transfer")));
    plan.statistic.threshold_c = j.value("c", 0.5);
    plan.statistic.b_collision_correction = j.value("b_collision_correction", true);
    plan.statistic.op_budget = j.value("op_budget", 1e11);
    if (j.contains("variants")) plan.variants = j.at("variants").get<std::vector<std::string>>();
    if (j.contains("projection")) {
        const json& p = j.at("projection");
        plan.projection.correlation_floor = p.value("floor", plan.projection.correlation_floor);
        plan.projection.max_iters = p.value("max_iters", plan.projection.max_iters);
        plan.projection.tol = p.value("tol", plan.projection.tol);
    }
    plan.project = j.value("project", true);
    plan.round = j.value("round", true);
    plan.record_timings = j.value("record_timings", false);
    if (!j.contains("base")) schema("plan needs base model parameters");
    if (!j.contains("arms") || !j.at("arms").is_array() || j.at("arms").empty()) schema("plan needs a nonempty arms list");
    std::size_t idx = 0;
    for (const json& a : j.at("arms")) {
        json merged = j.at("base");
        for (auto it = a.begin(); it != a.end(); ++it)
            if (it.key() != "id" && it.key() != "target_F") merged[it.key()] = it.value();
        ArmSpec arm;
        arm.id = a.value("id", "arm" + std::to_string(idx));
        arm.params = params_from_json(merged);
        if (a.contains("target_F")) {
            const double lam = lambda_for_threshold(arm.params, a.at("target_F").get<double>(), FormulaVariant::Intro);
            std::fill(arm.params.lambda.begin(), arm.params.lambda.end(), lam);
        }
        validate_params(arm.params);
        plan.arms.push_back(std::move(arm));
        ++idx;
    }
    for (const auto& v : plan.variants)
        if (v != "all" && v.rfind("color", 0) != 0) throw Error(ErrorKind::InvalidParams, "unknown variant " + v);
    return plan;
}

ExperimentPlan load_plan(const std::filesystem::path& path) {
    return plan_from_json(parse_config_text(read_text(path), path.extension() == ".toml"));
}

double auc_rank(const std::vector<double>& pos, const std::vector<double>& neg) {
    if (pos.empty() || neg.empty()) return NAN;
    std::vector<std::pair<double, int>> all;
    for (double v : pos) all.emplace_back(v, 1);
    for (double v : neg) all.emplace_back(v, 0);
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    // Mid-ranks for ties.
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < all.size();) {
        std::size_t j = i;
        while (j < all.size() && all[j].first == all[i].first) ++j;
        const double mid = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
        for (std::size_t k = i; k < j; ++k)
            if (all[k].second) rank_sum += mid;
        i = j;
    }
    const double np = static_cast<double>(pos.size()), nn = static_cast<double>(neg.size());
    return (rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

double auc_trapezoid(const std::vector<double>& pos, const std::vector<double>& neg) {
    if (pos.empty() || neg.empty()) return NAN;
    std::vector<double> thresholds(pos);
    thresholds.insert(thresholds.end(), neg.begin(), neg.end());
    std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    std::vector<double> sp(pos), sn(neg);
    std::sort(sp.begin(), sp.end(), std::greater<>());
    std::sort(sn.begin(), sn.end(), std::greater<>());
    double area = 0.0, prev_tpr = 0.0, prev_fpr = 0.0;
    std::size_t ip = 0, in = 0;
    for (double t : thresholds) {
        while (ip < sp.size() && sp[ip] >= t) ++ip;
        while (in < sn.size() && sn[in] >= t) ++in;
        const double tpr = static_cast<double>(ip) / static_cast<double>(sp.size());
        const double fpr = static_cast<double>(in) / static_cast<double>(sn.size());
        area += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
        prev_tpr = tpr;
        prev_fpr = fpr;
    }
    return area;
}

ExperimentResult run_detection_experiment(const ExperimentPlan& plan, int threads) {
    std::vector<ArmContext> ctx;
    for (const auto& arm : plan.arms) ctx.push_back(arm_context(plan, arm, Topology::Cycle));
    const std::size_t trials = static_cast<std::size_t>(plan.trials);
    const std::size_t jobs = plan.arms.size() * trials;
    std::vector<std::vector<ExperimentRecord>> slots(jobs);
    parallel_for(jobs, threads, [&](std::size_t job) {
        const std::size_t a = job / trials, t = job % trials;
        const ArmSpec& arm = plan.arms[a];
        const std::uint64_t seed = trial_seed(plan.seed, a, t);
        for (const char hyp : {'P', 'Q'}) {
            const auto t0 = std::chrono::steady_clock::now();
            const Observation obs = hyp == 'P' ? sample_planted(arm.params, seed) : sample_null(arm.params, seed);
            const WordSums sums = word_sums(obs, plan.statistic, Topology::Cycle);
            const double elapsed = seconds_since(t0);
            for (std::size_t v = 0; v < plan.variants.size(); ++v) {
                ExperimentRecord r = base_record(arm, ctx[a], hyp, seed, plan.variants[v]);
                r.value = ctx[a].families[v].beta > 0.0 ? detection_from_sums(sums, ctx[a].families[v]) : NAN;
                if (plan.record_timings) r.elapsed = elapsed;
                slots[job].push_back(std::move(r));
            }
        }
    });
    ExperimentResult res;
    for (auto& s : slots)
        for (auto& r : s) res.records.push_back(std::move(r));
    // Per-arm, per-variant AUC of planted against null values.
    for (std::size_t a = 0; a < plan.arms.size(); ++a)
        for (const auto& variant : plan.variants) {
            std::vector<double> pos, neg;
            for (const auto& r : res.records)
                if (r.arm_id == plan.arms[a].id && r.variant == variant)
                    (r.hypothesis == 'P' ? pos : neg).push_back(r.value);
            const double auc = auc_rank(pos, neg);
            for (auto& r : res.records)
                if (r.arm_id == plan.arms[a].id && r.variant == variant) r.auc = auc;
        }
    res.summary = summarize(plan, res.records);
    return res;
}

ExperimentResult run_recovery_experiment(const ExperimentPlan& plan, int threads) {
    std::vector<ArmContext> ctx;
    for (const auto& arm : plan.arms) ctx.push_back(arm_context(plan, arm, Topology::Path));
    const std::size_t trials = static_cast<std::size_t>(plan.trials);
    const std::size_t jobs = plan.arms.size() * trials;
    std::vector<std::vector<ExperimentRecord>> slots(jobs);
    std::vector<std::optional<ProjectionTrial>> projected(jobs);
    parallel_for(jobs, threads, [&](std::size_t job) {
        const std::size_t a = job / trials, t = job % trials;
        const ArmSpec& arm = plan.arms[a];
        const std::uint64_t seed = trial_seed(plan.seed, a, t);
        const auto t0 = std::chrono::steady_clock::now();
        const Observation obs = sample_planted(arm.params, seed);
        const WordSums sums = word_sums(obs, plan.statistic, Topology::Path);
        const double elapsed = seconds_since(t0);
        const auto& x = obs.truth->x;
        const double n = static_cast<double>(arm.params.n);
        Eigen::VectorXd xv(static_cast<Eigen::Index>(x.size()));
        for (std::size_t i = 0; i < x.size(); ++i) xv(static_cast<Eigen::Index>(i)) = x[i];
        std::optional<Eigen::MatrixXd> phi_all;
        for (std::size_t v = 0; v < plan.variants.size(); ++v) {
            ExperimentRecord r = base_record(arm, ctx[a], 'P', seed, plan.variants[v]);
            if (ctx[a].families[v].beta > 0.0) {
                Eigen::MatrixXd phi = recovery_from_sums(sums, ctx[a].families[v], arm.params.n);
                r.value = xv.dot(phi * xv) / (n * n);
                r.cosine = cosine_similarity(phi, x);
                if (plan.variants[v] == "all") phi_all = std::move(phi);
            } else {
                r.value = NAN;
                r.cosine = NAN;
            }
            if (plan.record_timings) r.elapsed = elapsed;
            slots[job].push_back(std::move(r));
        }
        if (phi_all && plan.project) {
            ExperimentRecord rp = base_record(arm, ctx[a], 'P', seed, "all:proj");
            ExperimentRecord rr = base_record(arm, ctx[a], 'P', seed, "all:round");
            try {
                const auto t1 = std::chrono::steady_clock::now();
                Estimate est = psd_project(*phi_all, plan.projection);
                projected[job] = ProjectionTrial{arm.id, seed, true, est.diagnostics};
                rp.value = est.diagnostics.achieved_floor;
                rp.cosine = cosine_similarity(est.phi_hat, x);
                if (plan.record_timings) rp.elapsed = seconds_since(t1);
                slots[job].push_back(rp);
                if (plan.round) {
                    const auto xh = sign_round(est, seed);
                    const double ov = overlap(xh, x);
                    rr.value = ov;
                    rr.cosine = ov * ov;
                    slots[job].push_back(rr);
                }
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::NoConvergence) throw;
                projected[job] = ProjectionTrial{arm.id, seed, false, {}};
                rp.value = NAN;
                rp.cosine = NAN;
                slots[job].push_back(rp);
            }
        }
    });
    ExperimentResult res;
    for (auto& s : slots)
        for (auto& r : s) res.records.push_back(std::move(r));
    for (auto& p : projected)
        if (p) res.projections.push_back(std::move(*p));
    res.summary = summarize(plan, res.records);
    return res;
}

ExperimentResult run_experiment(const ExperimentPlan& plan, int threads) {
    return plan.kind == ExperimentKind::Detection ? run_detection_experiment(plan, threads)
                                                  : run_recovery_experiment(plan, threads);
}

std::string records_csv(const std::vector<ExperimentRecord>& records) {
    std::ostringstream ss;
    ss << kCsvSchema << '\n' << kColumns << '\n';
    for (const auto& r : records) {
        ss << r.arm_id << ',' << r.hypothesis << ',' << r.seed << ',' << r.variant << ',' << format_double(r.value)
           << ',' << format_double(r.f_intro) << ',' << format_double(r.f_sec3) << ','
           << format_double(r.sigma_plus) << ',' << opt(r.auc) << ',' << opt(r.cosine) << ',' << opt(r.elapsed)
           << '\n';
    }
    return ss.str();
}

std::vector<ExperimentRecord> parse_records_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kCsvSchema) schema("records csv must start with " + std::string(kCsvSchema));
    if (!std::getline(in, line) || line != kColumns) schema("records csv has unexpected columns");
    std::vector<ExperimentRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 11) schema("records csv row has " + std::to_string(f.size()) + " fields");
        ExperimentRecord r;
        r.arm_id = f[0];
        if (f[1] != "P" && f[1] != "Q") schema("hypothesis must be P or Q");
        r.hypothesis = f[1][0];
        r.seed = std::stoull(f[2]);
        r.variant = f[3];
        r.value = parse_number(f[4]);
        r.f_intro = parse_number(f[5]);
        r.f_sec3 = parse_number(f[6]);
        r.sigma_plus = parse_number(f[7]);
        r.auc = parse_optional(f[8]);
        r.cosine = parse_optional(f[9]);
        r.elapsed = parse_optional(f[10]);
        out.push_back(std::move(r));
    }
    return out;
}

std::string summary_csv(const std::vector<ArmSummary>& summary) {
    std::ostringstream ss;
    ss << "#cmsbm-summary-v1\n"
       << "arm_id,variant,F_intro,F_sec3,sigma_plus,auc,mean_value,se_value,mean_cosine,se_cosine,trials,failures\n";
    for (const auto& s : summary)
        ss << s.arm_id << ',' << s.variant << ',' << format_double(s.f_intro) << ',' << format_double(s.f_sec3) << ','
           << format_double(s.sigma_plus) << ',' << opt(s.auc) << ',' << format_double(s.mean_value) << ','
           << format_double(s.se_value) << ',' << opt(s.mean_cosine) << ',' << opt(s.se_cosine) << ',' << s.trials
           << ',' << s.failures << '\n';
    return ss.str();
}

void write_experiment(const std::filesystem::path& dir, const ExperimentResult& result, bool plots) {
    std::filesystem::create_directories(dir);
    const std::string csv = records_csv(result.records);
    write_text(dir / "records.csv", csv);
    write_text(dir / "summary.csv", summary_csv(result.summary));
    if (plots)
        for (const auto& [name, svg] : emit_plots(csv)) write_text(dir / name, svg);
}

}  // namespace cmsbm
