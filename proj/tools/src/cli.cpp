#include "s4is/cli.hpp"

#include "s4is/errors.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace s4is::cli {

namespace {

void check_keys(const nlohmann::json& j, const std::string& where, const std::set<std::string>& allowed) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (!allowed.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

double number(const nlohmann::json& v, const std::string& key) {
    if (!v.is_number()) throw ConfigError("'" + key + "' must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError("'" + key + "' must be finite");
    return x;
}

std::string text(const nlohmann::json& v, const std::string& key) {
    if (!v.is_string()) throw ConfigError("'" + key + "' must be a string");
    return v.get<std::string>();
}

ProblemSelector parse_problem(const nlohmann::json& j) {
    check_keys(j, "problem", {"builtin", "params", "external"});
    ProblemSelector sel;
    const bool has_builtin = j.contains("builtin");
    const bool has_external = j.contains("external");
    if (has_builtin == has_external) throw ConfigError("problem needs exactly one of 'builtin' or 'external'");
    if (has_builtin) {
        sel.builtin = text(j["builtin"], "builtin");
        if (j.contains("params")) {
            check_keys(j["params"], "problem.params", {"c", "d", "sd"});
            for (const auto& [key, value] : j["params"].items()) sel.params[key] = number(value, key);
        }
        // Constructing a built-in problem checks its parameters without evaluating it.
        (void)builtin_problem(sel.builtin, sel.params);
        return sel;
    }
    if (j.contains("params")) throw ConfigError("'params' applies to built-in problems only");
    const nlohmann::json& e = j["external"];
    check_keys(e, "problem.external", {"command", "dim", "marginals"});
    if (!e.contains("command")) throw ConfigError("external problem needs 'command'");
    if (!e.contains("marginals")) throw ConfigError("external problem needs 'marginals'");
    sel.command = text(e["command"], "command");
    if (sel.command.empty()) throw ConfigError("external command is empty");
    if (!e["marginals"].is_array() || e["marginals"].empty()) throw ConfigError("'marginals' must be a non-empty array");
    for (const nlohmann::json& m : e["marginals"]) {
        check_keys(m, "marginal", {"kind", "mean", "sd"});
        if (!m.contains("kind") || !m.contains("mean") || !m.contains("sd")) {
            throw ConfigError("each marginal needs 'kind', 'mean' and 'sd'");
        }
        MarginalDecl d;
        try {
            d.kind = marginal_kind_from_string(text(m["kind"], "kind"));
            d.mean = number(m["mean"], "mean");
            d.sd = number(m["sd"], "sd");
            (void)Marginal::make(d.kind, d.mean, d.sd);
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& err) {
            throw ConfigError(std::string("invalid marginal: ") + err.what());
        }
        sel.marginals.push_back(d);
    }
    if (e.contains("dim")) {
        if (!e["dim"].is_number_unsigned() || e["dim"].get<std::size_t>() != sel.marginals.size()) {
            throw ConfigError("'dim' does not match the number of marginals");
        }
    }
    return sel;
}

nlohmann::json problem_json(const ProblemSelector& sel) {
    if (!sel.external()) {
        nlohmann::json params = nlohmann::json::object();
        for (const auto& [k, v] : sel.params) params[k] = v;
        return {{"builtin", sel.builtin}, {"params", params}};
    }
    nlohmann::json marginals = nlohmann::json::array();
    for (const MarginalDecl& m : sel.marginals) marginals.push_back({{"kind", to_string(m.kind)}, {"mean", m.mean}, {"sd", m.sd}});
    return {{"external", {{"command", sel.command}, {"dim", sel.marginals.size()}, {"marginals", marginals}}}};
}

}  // namespace

RunConfig parse_run_config(const nlohmann::json& j) {
    check_keys(j, "config", {"problem", "method", "seed", "replicates", "s4is", "akis", "form", "mcs", "output"});
    if (!j.contains("problem")) throw ConfigError("config needs a 'problem' block");
    RunConfig c;
    c.problem = parse_problem(j["problem"]);
    if (j.contains("method")) c.method = method_from_string(text(j["method"], "method"));
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) throw ConfigError("'seed' must be a non-negative integer");
        c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("replicates")) {
        if (!j["replicates"].is_number_integer() || j["replicates"].get<long long>() < 1) {
            throw ConfigError("'replicates' must be a positive integer");
        }
        c.replicates = j["replicates"].get<int>();
    }
    if (j.contains("s4is")) c.settings.s4is = s4is_config_from_json(j["s4is"]);
    if (j.contains("akis")) c.settings.akis = akis_config_from_json(j["akis"]);
    if (j.contains("form")) c.settings.form = hlrf_options_from_json(j["form"]);
    if (j.contains("mcs")) {
        check_keys(j["mcs"], "mcs", {"n"});
        if (j["mcs"].contains("n")) {
            if (!j["mcs"]["n"].is_number_unsigned() || j["mcs"]["n"].get<std::size_t>() == 0) {
                throw ConfigError("'mcs.n' must be a positive integer");
            }
            c.settings.mcs_n = j["mcs"]["n"].get<std::size_t>();
        }
    }
    if (j.contains("output")) {
        check_keys(j["output"], "output", {"json", "csv"});
        if (j["output"].contains("json")) c.json_path = text(j["output"]["json"], "json");
        if (j["output"].contains("csv")) c.csv_path = text(j["output"]["csv"], "csv");
    }
    c.settings.s4is.validate();
    return c;
}

nlohmann::json to_json(const RunConfig& c) {
    nlohmann::json output = nlohmann::json::object();
    if (!c.json_path.empty()) output["json"] = c.json_path;
    if (!c.csv_path.empty()) output["csv"] = c.csv_path;
    return {{"problem", problem_json(c.problem)},
            {"method", to_string(c.method)},
            {"seed", c.seed},
            {"replicates", c.replicates},
            {"s4is", s4is::to_json(c.settings.s4is)},
            {"akis", s4is::to_json(c.settings.akis)},
            {"form", s4is::to_json(c.settings.form)},
            {"mcs", {{"n", c.settings.mcs_n}}},
            {"output", output}};
}

ProblemSpec make_problem(const ProblemSelector& sel) {
    if (!sel.external()) return builtin_problem(sel.builtin, sel.params);
    std::vector<Marginal> marginals;
    for (const MarginalDecl& m : sel.marginals) marginals.push_back(Marginal::make(m.kind, m.mean, m.sd));
    return external_problem(sel.command, RandomVector(std::move(marginals)));
}

namespace {

nlohmann::json run_report_impl(const RunConfig& config, const ProblemSpec& problem,
                               const std::vector<ReplicateResult>& reps) {
    nlohmann::json report;
    report["method"] = to_string(config.method);
    nlohmann::json params = nlohmann::json::object();
    for (const auto& [k, v] : problem.params) params[k] = v;
    report["problem"] = {{"name", problem.name}, {"dim", problem.dim()}, {"params", params}};
    report["seed"] = config.seed;
    nlohmann::json cfg = to_json(config);
    cfg.erase("output");
    report["config"] = cfg;
    if (problem.reference) {
        report["reference"] = {{"pf", problem.reference->pf}, {"source", problem.reference->source}};
    } else {
        report["reference"] = nullptr;
    }
    nlohmann::json rows = nlohmann::json::array();
    double sum_pf = 0.0, sum_n = 0.0, sum_cov = 0.0;
    int ok = 0, with_cov = 0;
    for (const ReplicateResult& r : reps) {
        rows.push_back(s4is::to_json(r));
        if (!r.ok) continue;
        ++ok;
        sum_pf += r.pf;
        sum_n += static_cast<double>(r.n_eval);
        if (r.cov_defined) {
            sum_cov += r.cov;
            ++with_cov;
        }
    }
    report["replicates"] = rows;
    nlohmann::json agg{{"replicates", reps.size()}, {"failed_replicates", reps.size() - static_cast<std::size_t>(ok)}};
    if (ok > 0) {
        agg["mean_pf"] = sum_pf / ok;
        agg["mean_n_eval"] = sum_n / ok;
        agg["mean_cov"] = with_cov > 0 ? nlohmann::json(sum_cov / with_cov) : nlohmann::json(nullptr);
        if (problem.reference && problem.reference->pf > 0.0) {
            agg["eps_r"] = relative_error(problem.reference->pf, sum_pf / ok);
        } else {
            agg["eps_r"] = nullptr;
        }
    } else {
        agg["mean_pf"] = nullptr;
        agg["mean_n_eval"] = nullptr;
        agg["mean_cov"] = nullptr;
        agg["eps_r"] = nullptr;
    }
    report["aggregate"] = agg;
    return report;
}

std::vector<ReplicateResult> run_replicates(const RunConfig& config, const ProblemSpec& problem) {
    std::vector<ReplicateResult> reps;
    for (int r = 0; r < config.replicates; ++r) {
        ReplicateResult rep = run_method(config.method, problem, config.settings, replicate_seed(config.seed, config.method, r));
        rep.replicate = r;
        reps.push_back(std::move(rep));
    }
    return reps;
}

}  // namespace

nlohmann::json run_report(const RunConfig& config, const ProblemSpec& problem) {
    return run_report_impl(config, problem, run_replicates(config, problem));
}

bool report_has_failures(const nlohmann::json& report) {
    return report.at("aggregate").at("failed_replicates").get<std::size_t>() > 0;
}

namespace {

std::string num(const nlohmann::json& v) {
    if (v.is_null()) return "";
    if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

}  // namespace

std::string report_csv(const nlohmann::json& report) {
    std::ostringstream out;
    out << "replicate,seed,ok,pf,cov,n_eval,termination,stage1_pf,stage1_n_eval,error\r\n";
    for (const nlohmann::json& r : report.at("replicates")) {
        out << r.at("replicate").dump() << ',' << r.at("seed").dump() << ',' << (r.at("ok").get<bool>() ? 1 : 0) << ','
            << num(r.at("pf")) << ',' << num(r.at("cov")) << ',' << r.at("n_eval").dump() << ','
            << csv_field(r.at("termination").get<std::string>()) << ',' << num(r.value("stage1_pf", nlohmann::json())) << ','
            << num(r.value("stage1_n_eval", nlohmann::json())) << ',' << csv_field(r.value("error", std::string())) << "\r\n";
    }
    return out.str();
}

std::string history_csv(const nlohmann::json& report, std::size_t replicate) {
    if (!report.is_object() || !report.contains("replicates") || !report["replicates"].is_array()) {
        throw DataError("report has no replicates array");
    }
    const nlohmann::json& reps = report["replicates"];
    if (replicate >= reps.size()) throw DataError("report has no replicate " + std::to_string(replicate));
    const nlohmann::json& rep = reps[replicate];
    if (!rep.contains("stages") || !rep["stages"].is_object()) {
        throw DataError("replicate " + std::to_string(replicate) + " has no stage history (only S4IS runs record one)");
    }
    std::ostringstream out;
    out << "stage,iteration,pf,cov,n_eval_cumulative\r\n";
    try {
        for (const char* stage : {"stage1", "stage2"}) {
            const nlohmann::json& hist = rep["stages"].at(stage).at("history");
            if (!hist.is_array()) throw DataError(std::string(stage) + " history is not an array");
            for (const nlohmann::json& h : hist) {
                out << (stage[5] == '1' ? 1 : 2) << ',' << h.at("iteration").dump() << ',' << num(h.at("pf")) << ','
                    << num(h.at("cov")) << ',' << h.at("n_eval").dump() << "\r\n";
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed stage history: ") + e.what());
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Command line

namespace {

nlohmann::json read_json_file(const std::string& path, bool config) {
    std::ifstream in(path);
    if (!in) {
        const std::string msg = "cannot open '" + path + "'";
        if (config) throw ConfigError(msg);
        throw DataError(msg);
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        const std::string msg = "'" + path + "' is not valid JSON: " + e.what();
        if (config) throw ConfigError(msg);
        throw DataError(msg);
    }
}

void write_text(const std::string& path, const std::string& body) {
    if (path.empty() || path == "-") {
        std::cout << body;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << body;
}

struct RunArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> replicates;
    std::string method;
    std::string json_path;
    std::string csv_path;
    std::string checkpoint_dir;
};

int cmd_run(const RunArgs& args) {
    RunConfig config = parse_run_config(read_json_file(args.config, true));
    if (args.seed) config.seed = *args.seed;
    if (args.replicates) {
        if (*args.replicates < 1) throw ConfigError("--replicates must be >= 1");
        config.replicates = *args.replicates;
    }
    if (!args.method.empty()) config.method = method_from_string(args.method);
    if (!args.json_path.empty()) config.json_path = args.json_path;
    if (!args.csv_path.empty()) config.csv_path = args.csv_path;
    if (!args.checkpoint_dir.empty()) {
        if (config.method != Method::S4is) throw ConfigError("--checkpoint-dir applies to the s4is method only");
        config.settings.keep_checkpoint = true;
    }

    const ProblemSpec problem = make_problem(config.problem);
    const std::vector<ReplicateResult> reps = run_replicates(config, problem);
    const nlohmann::json report = run_report_impl(config, problem, reps);
    write_text(config.json_path, report.dump(2) + "\n");
    if (!config.csv_path.empty()) write_text(config.csv_path, report_csv(report));
    if (!args.checkpoint_dir.empty()) {
        std::filesystem::create_directories(args.checkpoint_dir);
        for (const ReplicateResult& r : reps) {
            if (r.checkpoint.is_null()) continue;
            write_text((std::filesystem::path(args.checkpoint_dir) / ("replicate_" + std::to_string(r.replicate) + ".json")).string(),
                       r.checkpoint.dump(2) + "\n");
        }
    }
    for (const ReplicateResult& r : reps) {
        if (!r.ok) std::cerr << "replicate " << r.replicate << " failed: " << r.error << "\n";
    }
    return report_has_failures(report) ? kExitRuntime : kExitOk;
}

struct ResumeArgs {
    std::string config;
    std::string checkpoint;
    std::string json_path;
};

int cmd_resume(const ResumeArgs& args) {
    RunConfig config = parse_run_config(read_json_file(args.config, true));
    const nlohmann::json checkpoint = read_json_file(args.checkpoint, false);
    const ProblemSpec problem = make_problem(config.problem);
    EvaluationLedger ledger(problem);
    std::uint64_t seed = 0;
    restore_checkpoint(checkpoint, ledger, config.settings.s4is, seed);
    config.method = Method::S4is;
    config.replicates = 1;
    config.seed = seed;
    ReplicateResult rep = run_method(Method::S4is, problem, config.settings, seed, &ledger);
    nlohmann::json report = run_report_impl(config, problem, {rep});
    report["replayed_evaluations"] = ledger.replayed();
    write_text(args.json_path.empty() ? config.json_path : args.json_path, report.dump(2) + "\n");
    if (!rep.ok) std::cerr << "resumed run failed: " << rep.error << "\n";
    return rep.ok ? kExitOk : kExitRuntime;
}

struct ReproduceArgs {
    std::string id;
    std::optional<double> c;
    std::optional<int> d;
    std::uint64_t seed = 1;
    std::optional<int> replicates;
    std::vector<std::string> methods;
    std::string json_path;
    std::string csv_path;
};

std::vector<std::string> resolve_ids(const ReproduceArgs& a) {
    if (a.id == "all") {
        if (a.c || a.d) throw ConfigError("--c/--d select a single case and cannot be combined with 'all'");
        return experiment_ids();
    }
    if (a.id == "example4") {
        if (a.d) throw ConfigError("--d applies to example5");
        const double c = a.c.value_or(3.0);
        if (c != 3.0 && c != 4.0 && c != 5.0) throw ConfigError("example4 has tables for c = 3, 4 and 5");
        return {"example4_c" + std::to_string(static_cast<int>(c))};
    }
    if (a.id == "example5") {
        if (a.c) throw ConfigError("--c applies to example4");
        const int d = a.d.value_or(2);
        if (d != 2 && d != 10 && d != 50) throw ConfigError("example5 has tables for d = 2, 10 and 50");
        return {"example5_d" + std::to_string(d)};
    }
    if (a.c || a.d) throw ConfigError("--c/--d only apply to example4/example5");
    const auto& ids = experiment_ids();
    if (std::find(ids.begin(), ids.end(), a.id) == ids.end()) throw ConfigError("unknown experiment '" + a.id + "'");
    return {a.id};
}

int cmd_reproduce(const ReproduceArgs& args) {
    std::vector<ExperimentDef> defs;
    for (const std::string& id : resolve_ids(args)) {
        ExperimentDef def = reference_table(id);
        if (args.replicates) def.replicates = *args.replicates;
        if (!args.methods.empty()) {
            def.methods.clear();
            for (const std::string& m : args.methods) def.methods.push_back(method_from_string(m));
        }
        def.validate();
        defs.push_back(std::move(def));
    }
    bool passed = true;
    nlohmann::json all = nlohmann::json::array();
    std::string csv;
    for (const ExperimentDef& def : defs) {
        const ComparisonReport report = run_experiment(def, args.seed);
        std::cout << report.to_text() << "\n";
        std::cout.flush();
        passed = passed && report.passed();
        all.push_back(report.to_json());
        const std::string rows = report.to_csv();
        csv += csv.empty() ? rows : rows.substr(rows.find('\n') + 1);
    }
    if (!args.json_path.empty()) write_text(args.json_path, nlohmann::json{{"experiments", all}, {"passed", passed}}.dump(2) + "\n");
    if (!args.csv_path.empty()) write_text(args.csv_path, csv);
    std::cout << (passed ? "all gating bands passed\n" : "some gating bands failed\n");
    return passed ? kExitOk : kExitBandFailure;
}

struct HistoryArgs {
    std::string report;
    std::size_t replicate = 0;
    std::string output;
};

int cmd_history(const HistoryArgs& args) {
    const nlohmann::json report = read_json_file(args.report, false);
    write_text(args.output, history_csv(report, args.replicate));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"S4IS reliability analysis: surrogate-guided importance sampling with MCS, FORM and AK-IS baselines"};
    app.require_subcommand(1);

    RunArgs run_args;
    CLI::App* run = app.add_subcommand("run", "Run one method on a configured problem");
    run->add_option("--config,-c", run_args.config, "JSON run configuration")->required();
    run->add_option("--seed", run_args.seed, "Override the configured seed");
    run->add_option("--replicates", run_args.replicates, "Override the replicate count");
    run->add_option("--method", run_args.method, "Override the method (mcs, form, akis, s4is)");
    run->add_option("--output,-o", run_args.json_path, "JSON report path (default: standard output)");
    run->add_option("--csv", run_args.csv_path, "Per-replicate CSV path");
    run->add_option("--checkpoint-dir", run_args.checkpoint_dir, "Write one S4IS resumption checkpoint per replicate");

    ResumeArgs resume_args;
    CLI::App* resume = app.add_subcommand("resume", "Rerun an S4IS replicate, replaying checkpointed evaluations");
    resume->add_option("--config,-c", resume_args.config, "JSON run configuration naming the problem")->required();
    resume->add_option("--checkpoint", resume_args.checkpoint, "Checkpoint written by run --checkpoint-dir")->required();
    resume->add_option("--output,-o", resume_args.json_path, "JSON report path");

    ReproduceArgs rep_args;
    CLI::App* reproduce = app.add_subcommand("reproduce", "Rerun a published comparison and check its tolerance bands");
    reproduce->add_option("id", rep_args.id, "example1..example5, a case id such as example4_c4, or all")->required();
    reproduce->add_option("--c", rep_args.c, "example4 reliability level (3, 4, 5)");
    reproduce->add_option("--d", rep_args.d, "example5 dimension (2, 10, 50)");
    reproduce->add_option("--seed", rep_args.seed, "Experiment seed")->capture_default_str();
    reproduce->add_option("--replicates", rep_args.replicates, "Replicates for AK-IS and S4IS");
    reproduce->add_option("--methods", rep_args.methods, "Subset of mcs, form, akis, s4is")->delimiter(',');
    reproduce->add_option("--json", rep_args.json_path, "Write the comparison reports as JSON");
    reproduce->add_option("--csv", rep_args.csv_path, "Write one CSV row per method and experiment");

    HistoryArgs hist_args;
    CLI::App* history = app.add_subcommand("history", "Per-iteration pf/CoV series of an S4IS run report as CSV");
    history->add_option("report", hist_args.report, "JSON report written by run")->required();
    history->add_option("--replicate", hist_args.replicate, "Replicate index")->capture_default_str();
    history->add_option("--output,-o", hist_args.output, "CSV path (default: standard output)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*run) return cmd_run(run_args);
        if (*resume) return cmd_resume(resume_args);
        if (*reproduce) return cmd_reproduce(rep_args);
        if (*history) return cmd_history(hist_args);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitConfig;
}

}  // namespace s4is::cli
