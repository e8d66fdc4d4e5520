// rns: run one selection, evaluate a procedure over many replications, or
// print a procedure constant.
//
// Exit codes: 0 decision / success, 1 usage or config error, 2 no decision.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "rns/rns.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNoDecision = 2;

std::string join(const std::vector<std::uint64_t>& xs)
{
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ' ';
        out += std::to_string(xs[i]);
    }
    return out;
}

std::string fmt(double x, const char* spec = "%.17g")
{
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, x);
    return buf;
}

void print_trace(std::ostream& out, const rns::SelectionResult& result, const rns::RunTrace& trace)
{
    out << "\n# eliminations\nstage,eliminated_index\n";
    for (const auto& e : result.elimination_log) out << e.stage << ',' << e.index << '\n';
    if (!trace.allocation.empty()) {
        out << "\n# allocation\nstage,alternative,target,granted\n";
        for (const auto& a : trace.allocation)
            out << a.stage << ',' << a.alternative << ',' << fmt(a.target) << ',' << a.granted << '\n';
    }
    if (!trace.matches.empty()) {
        out << "\n# matches\nworker,round,alpha,members,winner,samples\n";
        for (const auto& m : trace.matches) {
            out << m.worker << ',' << m.round << ',' << fmt(m.alpha) << ',';
            for (std::size_t i = 0; i < m.members.size(); ++i) out << (i ? " " : "") << m.members[i];
            out << ',' << m.winner << ',' << m.samples << '\n';
        }
    }
    if (!trace.messages.empty()) {
        out << "\n# messages\nkind,time,job_id,worker\n";
        for (const auto& m : trace.messages) {
            const char* kind = m.kind == rns::PoolMessage::Kind::dispatch     ? "dispatch"
                               : m.kind == rns::PoolMessage::Kind::completion ? "completion"
                                                                               : "marker";
            out << kind << ',' << fmt(m.time) << ',' << m.job_id << ',';
            if (m.worker == rns::kNoWorker) out << '-';
            else out << m.worker;
            out << '\n';
        }
    }
}

int cmd_run(const std::string& path, std::optional<std::uint64_t> seed, bool trace_flag)
{
    auto cf = rns::cli::load_config(path);
    auto& ex = cf.experiment;
    if (seed) ex.seed = *seed;
    rns::RunTrace trace;
    const auto result = rns::run_once(ex.procedure, ex.instance, ex.seed, 0, trace_flag ? &trace : nullptr);

    std::cout << "procedure: " << rns::to_string(ex.procedure.kind) << '\n'
              << "k: " << ex.instance.k() << '\n'
              << "seed: " << ex.seed << '\n'
              << "selected: " << result.selected << '\n'
              << "samples: " << join(result.per_alt_samples) << '\n'
              << "total: " << result.total_samples << '\n'
              << "terminated_by: " << rns::to_string(result.terminated_by) << '\n';
    if (trace_flag) print_trace(std::cout, result, trace);
    return result.terminated_by == rns::Termination::decision ? kExitOk : kExitNoDecision;
}

int cmd_eval(const std::string& path, std::optional<std::uint64_t> seed, unsigned jobs, const std::string& out_path,
             const std::string& format)
{
    auto cf = rns::cli::load_config(path);
    auto& ex = cf.experiment;
    if (seed) {
        ex.seed = *seed;
        cf.raw["harness"]["seed"] = std::to_string(*seed);
    }

    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) {
            std::cerr << "error: cannot write '" << out_path << "'\n";
            return kExitUsage;
        }
    }

    const auto report = rns::evaluate(ex, jobs);
    const std::string hash = rns::cli::config_hash(cf.raw);
    std::string body;
    if (format == "json") body = rns::to_json(report, hash, rns::cli::to_json(cf.raw)).dump(2) + "\n";
    else body = rns::to_csv(report, hash);

    if (file.is_open()) {
        file << body;
        file.close();
        if (!file) {
            std::cerr << "error: failed writing '" << out_path << "'\n";
            return kExitUsage;
        }
    } else {
        std::cout << body;
    }

    if (rns::is_fixed_budget(ex.procedure.kind)) {
        std::cout << "verdict: n/a (fixed-budget procedure) pcs_hat=" << fmt(report.pcs.value, "%.4f") << '\n';
    } else {
        const double alpha = ex.procedure.fixed.alpha;
        const auto v = rns::guarantee_verdict(report, alpha);
        std::cout << "verdict: " << rns::to_string(v) << " pcs_hat=" << fmt(report.pcs.value, "%.4f")
                  << " threshold=" << fmt(1.0 - alpha - 2.0 * report.pcs.se, "%.4f") << " (1-alpha-2SE, R="
                  << report.replications << ", aborted=" << report.aborted << ")\n";
    }
    return kExitOk;
}

int cmd_constants(const std::string& name, int k, double alpha, std::optional<int> n0)
{
    if (name == "bechhofer_h") {
        const double h = rns::bechhofer_h(k, alpha);
        const double residual = rns::bechhofer_probability(k, h) - (1.0 - alpha);
        std::cout << "bechhofer_h = " << fmt(h, "%.10f") << " (residual " << fmt(residual, "%.3e") << ")\n";
        return kExitOk;
    }
    if (!n0) {
        std::cerr << "error: " << name << " needs --n0\n";
        return kExitUsage;
    }
    if (name == "rinott_h") {
        const double h = rns::rinott_h(k, *n0, alpha);
        const double residual = rns::rinott_probability(k, *n0, h) - (1.0 - alpha);
        std::cout << "rinott_h = " << fmt(h, "%.10f") << " (residual " << fmt(residual, "%.3e") << ")\n";
        return kExitOk;
    }
    if (name == "kn_eta") {
        const double eta = rns::kn_eta(k, *n0, alpha);
        std::cout << "kn_eta = " << fmt(eta, "%.15f") << " (closed form; h^2 = " << fmt(rns::kn_h2(k, *n0, alpha), "%.15f")
                  << ")\n";
        return kExitOk;
    }
    std::cerr << "error: unknown constant '" << name << "' (expected bechhofer_h, rinott_h or kn_eta)\n";
    return kExitUsage;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Ranking-and-selection procedures: run, evaluate, constants"};
    app.require_subcommand(1);

    std::string config_path, out_path, format = "csv", constant;
    std::optional<std::uint64_t> seed;
    bool trace = false;
    unsigned jobs = 1;
    int k = 0;
    double alpha = 0.05;
    std::optional<int> n0;

    auto* run = app.add_subcommand("run", "Run one selection and print the result");
    run->add_option("--config", config_path, "Config file")->required();
    run->add_option("--seed", seed, "Seed (overrides the config)");
    run->add_flag("--trace", trace, "Print elimination/allocation/pool traces as CSV");

    auto* eval = app.add_subcommand("eval", "Evaluate a procedure over macro-replications");
    eval->add_option("--config", config_path, "Config file")->required();
    eval->add_option("--seed", seed, "Seed (overrides the config)");
    eval->add_option("--jobs", jobs, "Concurrent replications")->check(CLI::PositiveNumber);
    eval->add_option("--out", out_path, "Output file (default: standard output)");
    eval->add_option("--format", format, "Report format")->check(CLI::IsMember({"csv", "json"}));

    auto* constants = app.add_subcommand("constants", "Print a procedure constant");
    constants->add_option("name", constant, "bechhofer_h | rinott_h | kn_eta")->required();
    constants->add_option("--k", k, "Number of alternatives")->required();
    constants->add_option("--alpha", alpha, "Error probability");
    constants->add_option("--n0", n0, "First-stage sample size");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*run) return cmd_run(config_path, seed, trace);
        if (*eval) return cmd_eval(config_path, seed, jobs, out_path, format);
        return cmd_constants(constant, k, alpha, n0);
    } catch (const rns::cli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}
