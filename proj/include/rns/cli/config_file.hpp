#pragma once

// Experiment config files: a flat INI dialect with a top-level
// schema_version and the sections [instance], [procedure], [harness] and
// [pool]. Every error carries the dotted path of the offending key.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "rns/core/problem.hpp"
#include "rns/harness/evaluate.hpp"
#include "rns/harness/instances.hpp"
#include "rns/harness/procedure.hpp"
#include "rns/harness/report.hpp"
#include "rns/parallel/pool.hpp"

namespace rns::cli {

inline constexpr int kSchemaVersion = 1;

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key_path, const std::string& what)
        : std::runtime_error(key_path.empty() ? what : key_path + ": " + what), key_path_(std::move(key_path))
    {
    }

    const std::string& key_path() const noexcept { return key_path_; }

private:
    std::string key_path_;
};

/// section -> key -> raw value. The empty section holds top-level keys.
using RawConfig = std::map<std::string, std::map<std::string, std::string>>;

inline const std::map<std::string, std::set<std::string>>& allowed_keys()
{
    static const std::map<std::string, std::set<std::string>> keys{
        {"", {"schema_version"}},
        {"instance", {"means", "variances", "generator", "k", "delta", "spacing", "sigma2"}},
        {"procedure",
         {"name", "alpha", "delta", "n0", "lambda", "budget_cap", "fhn_variance_update", "budget", "tau", "sigma2",
          "prior_means", "prior_variances", "g"}},
        {"harness", {"replications", "seed", "good_delta"}},
        {"pool", {"backend", "workers", "delay"}},
    };
    return keys;
}

inline RawConfig parse_raw(std::istream& in)
{
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("", "line " + std::to_string(e.line()) + ": " + e.message());
    }
    RawConfig raw;
    const auto& allowed = allowed_keys();
    for (const auto& [name, node] : tree) {
        if (node.empty()) {
            if (!allowed.at("").count(name)) throw ConfigError(name, "unknown key");
            raw[""][name] = node.data();
            continue;
        }
        const auto section = allowed.find(name);
        if (section == allowed.end() || name.empty()) throw ConfigError(name, "unknown section");
        for (const auto& [key, value] : node) {
            if (!section->second.count(key)) throw ConfigError(name + "." + key, "unknown key");
            raw[name][key] = value.data();
        }
    }
    return raw;
}

/// Typed access to a RawConfig that reports errors by key path.
class Reader {
public:
    explicit Reader(const RawConfig& raw) : raw_(&raw) {}

    bool has(const std::string& section, const std::string& key) const
    {
        const auto s = raw_->find(section);
        return s != raw_->end() && s->second.count(key);
    }

    std::optional<std::string> text(const std::string& section, const std::string& key) const
    {
        if (!has(section, key)) return std::nullopt;
        return raw_->at(section).at(key);
    }

    std::string required_text(const std::string& section, const std::string& key) const
    {
        auto v = text(section, key);
        if (!v) throw ConfigError(path(section, key), "required key is missing");
        return *v;
    }

    std::optional<double> real(const std::string& section, const std::string& key) const
    {
        auto v = text(section, key);
        if (!v) return std::nullopt;
        return parse_real(*v, path(section, key));
    }

    double required_real(const std::string& section, const std::string& key) const
    {
        return parse_real(required_text(section, key), path(section, key));
    }

    std::optional<std::uint64_t> count(const std::string& section, const std::string& key) const
    {
        auto v = text(section, key);
        if (!v) return std::nullopt;
        return parse_count(*v, path(section, key));
    }

    std::uint64_t required_count(const std::string& section, const std::string& key) const
    {
        return parse_count(required_text(section, key), path(section, key));
    }

    std::optional<std::vector<double>> list(const std::string& section, const std::string& key) const
    {
        auto v = text(section, key);
        if (!v) return std::nullopt;
        std::vector<double> out;
        std::stringstream ss(*v);
        for (std::string item; std::getline(ss, item, ',');) out.push_back(parse_real(trim(item), path(section, key)));
        return out;
    }

    static std::string path(const std::string& section, const std::string& key)
    {
        return section.empty() ? key : section + "." + key;
    }

private:
    static std::string trim(const std::string& s)
    {
        const auto b = s.find_first_not_of(" \t");
        if (b == std::string::npos) return "";
        return s.substr(b, s.find_last_not_of(" \t") - b + 1);
    }

    static double parse_real(const std::string& s, const std::string& where)
    {
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v))
            throw ConfigError(where, "expected a number, got '" + s + "'");
        return v;
    }

    static std::uint64_t parse_count(const std::string& s, const std::string& where)
    {
        std::uint64_t v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
            throw ConfigError(where, "expected a nonnegative integer, got '" + s + "'");
        return v;
    }

    const RawConfig* raw_;
};

namespace detail {

inline void require(bool ok, const std::string& where, const std::string& what)
{
    if (!ok) throw ConfigError(where, what);
}

inline ProblemInstance build_instance(const Reader& r)
{
    const bool explicit_means = r.has("instance", "means");
    const bool generated = r.has("instance", "generator");
    require(explicit_means || generated, "instance.means", "give either instance.means or instance.generator");
    require(!(explicit_means && generated), "instance.generator", "conflicts with instance.means");

    if (explicit_means) {
        auto means = *r.list("instance", "means");
        auto vars = r.list("instance", "variances");
        require(vars.has_value(), "instance.variances", "required key is missing");
        require(means.size() >= 2, "instance.means", "need at least 2 alternatives");
        require(vars->size() == means.size(), "instance.variances", "must have one entry per mean");
        for (double v : *vars) require(v > 0.0, "instance.variances", "variances must be positive");
        const auto delta = r.real("instance", "delta");
        if (delta) require(*delta > 0.0, "instance.delta", "must be positive");
        for (const char* key : {"k", "spacing", "sigma2"})
            require(!r.has("instance", key), Reader::path("instance", key), "only used with instance.generator");
        return ProblemInstance(std::move(means), std::move(*vars), delta);
    }

    require(!r.has("instance", "variances"), "instance.variances", "only used with instance.means");
    const std::string gen = r.required_text("instance", "generator");
    const auto k = r.required_count("instance", "k");
    require(k >= 2, "instance.k", "need at least 2 alternatives");
    const double sigma2 = r.required_real("instance", "sigma2");
    require(sigma2 > 0.0, "instance.sigma2", "must be positive");
    if (gen == "slippage") {
        require(!r.has("instance", "spacing"), "instance.spacing", "not used by the slippage generator");
        const double delta = r.required_real("instance", "delta");
        require(delta > 0.0, "instance.delta", "must be positive");
        return slippage_config(k, delta, sigma2);
    }
    if (gen == "monotone") {
        require(!r.has("instance", "delta"), "instance.delta", "not used by the monotone generator");
        const double spacing = r.required_real("instance", "spacing");
        require(spacing > 0.0, "instance.spacing", "must be positive");
        return monotone_config(k, spacing, sigma2);
    }
    if (gen == "equal_means") {
        require(!r.has("instance", "delta"), "instance.delta", "not used by the equal_means generator");
        require(!r.has("instance", "spacing"), "instance.spacing", "not used by the equal_means generator");
        return equal_means_config(k, sigma2);
    }
    throw ConfigError("instance.generator", "expected slippage, monotone or equal_means, got '" + gen + "'");
}

inline ProcedureSpec build_procedure(const Reader& r, std::size_t k)
{
    ProcedureSpec spec;
    const std::string name = r.required_text("procedure", "name");
    const auto kind = parse_procedure(name);
    require(kind.has_value(), "procedure.name", "unknown procedure '" + name + "'");
    spec.kind = *kind;

    auto& fp = spec.fixed;
    if (auto a = r.real("procedure", "alpha")) fp.alpha = *a;
    fp.delta = r.real("procedure", "delta");
    if (auto n0 = r.count("procedure", "n0")) {
        require(*n0 <= 1'000'000, "procedure.n0", "too large");
        fp.n0 = static_cast<int>(*n0);
    }
    fp.lambda = r.real("procedure", "lambda");
    fp.budget_cap = r.count("procedure", "budget_cap");
    if (auto u = r.text("procedure", "fhn_variance_update")) {
        require(*u == "full" || *u == "first_stage", "procedure.fhn_variance_update", "expected full or first_stage");
        fp.fhn_variance_update = *u == "full" ? FhnVarianceUpdate::full : FhnVarianceUpdate::first_stage;
    }

    if (!is_fixed_budget(spec.kind)) {
        const double kd = static_cast<double>(k);
        require(fp.alpha > 0.0 && fp.alpha < 1.0 - 1.0 / kd, "procedure.alpha", "must lie in (0, 1 - 1/k)");
        require(fp.n0 >= 2, "procedure.n0", "must be >= 2");
        if (needs_delta(spec.kind)) require(fp.delta.has_value(), "procedure.delta", "required key is missing");
        if (fp.delta) require(*fp.delta > 0.0, "procedure.delta", "must be positive");
        if (spec.kind == ProcedureKind::paulson)
            require(fp.lambda.has_value(), "procedure.lambda", "required key is missing");
        if (fp.lambda && fp.delta)
            require(*fp.lambda > 0.0 && *fp.lambda < *fp.delta, "procedure.lambda", "must lie in (0, delta)");
    }

    if (is_fixed_budget(spec.kind)) {
        spec.budget.budget = r.required_count("procedure", "budget");
        if (auto t = r.count("procedure", "tau")) spec.budget.tau = *t;
        if (auto n0 = r.count("procedure", "n0")) spec.budget.n0 = static_cast<int>(*n0);
        require(spec.budget.tau >= 1, "procedure.tau", "must be >= 1");
        const int min_n0 = spec.kind == ProcedureKind::evi ? 3 : spec.kind == ProcedureKind::ocba ? 5 : 0;
        if (min_n0 > 0)
            require(spec.budget.n0 >= min_n0, "procedure.n0", "must be >= " + std::to_string(min_n0));
        const std::uint64_t floor = spec.kind == ProcedureKind::ocba || spec.kind == ProcedureKind::evi
                                        ? k * static_cast<std::uint64_t>(spec.budget.n0)
                                        : k;
        require(spec.budget.budget >= floor, "procedure.budget",
                "must be at least " + std::to_string(floor) + " for this procedure");
    }

    spec.sigma2 = r.real("procedure", "sigma2");
    if (spec.sigma2) require(*spec.sigma2 > 0.0, "procedure.sigma2", "must be positive");
    auto pm = r.list("procedure", "prior_means");
    auto pv = r.list("procedure", "prior_variances");
    require(pm.has_value() == pv.has_value(), pm ? "procedure.prior_variances" : "procedure.prior_means",
            "prior_means and prior_variances go together");
    if (pm) {
        require(pm->size() == k, "procedure.prior_means", "must have one entry per alternative");
        require(pv->size() == k, "procedure.prior_variances", "must have one entry per alternative");
        for (double v : *pv) require(v >= 0.0, "procedure.prior_variances", "must be nonnegative");
        spec.priors = KgPriors{std::move(*pm), std::move(*pv)};
    }

    if (auto g = r.count("procedure", "g")) {
        require(*g >= 2, "procedure.g", "must be >= 2");
        spec.kt.g = *g;
    }

    if (auto b = r.text("pool", "backend")) {
        require(*b == "threads" || *b == "simulated", "pool.backend", "expected threads or simulated");
        spec.pool.backend = *b == "threads" ? PoolBackend::threads : PoolBackend::simulated;
    }
    if (auto w = r.count("pool", "workers")) {
        require(*w >= 1, "pool.workers", "must be >= 1");
        spec.pool.workers = *w;
    }
    if (auto d = r.text("pool", "delay")) {
        try {
            spec.pool.delay = DelayModel::parse(*d);
        } catch (const std::invalid_argument& e) {
            throw ConfigError("pool.delay", e.what());
        }
    }
    spec.kt.m = spec.pool.workers;
    spec.kt.lambda = fp.lambda;
    if (spec.kind == ProcedureKind::kt_plus) require(k >= spec.kt.m, "pool.workers", "kt_plus needs k >= workers");
    return spec;
}

} // namespace detail

/// A parsed config: the raw key/values (for provenance) and the experiment.
struct ConfigFile {
    RawConfig raw;
    ExperimentConfig experiment;
};

inline ConfigFile parse_config(std::istream& in)
{
    ConfigFile cf{parse_raw(in), {ProblemInstance({0.0, 1.0}, {1.0, 1.0}), {}, 1, 1, std::nullopt}};
    const Reader r(cf.raw);
    const auto version = r.required_count("", "schema_version");
    if (version != kSchemaVersion)
        throw ConfigError("schema_version", "unsupported version " + std::to_string(version) + " (expected " +
                                                std::to_string(kSchemaVersion) + ")");
    for (const char* section : {"instance", "procedure"})
        if (!cf.raw.count(section)) throw ConfigError(section, "required section is missing");

    auto& ex = cf.experiment;
    ex.instance = detail::build_instance(r);
    ex.procedure = detail::build_procedure(r, ex.instance.k());
    if (auto reps = r.count("harness", "replications")) {
        detail::require(*reps >= 1, "harness.replications", "must be >= 1");
        ex.replications = *reps;
    }
    if (auto seed = r.count("harness", "seed")) ex.seed = *seed;
    ex.good_delta = r.real("harness", "good_delta");
    if (ex.good_delta) detail::require(*ex.good_delta > 0.0, "harness.good_delta", "must be positive");
    return cf;
}

inline ConfigFile parse_config_string(const std::string& text)
{
    std::istringstream in(text);
    return parse_config(in);
}

inline ConfigFile load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot read config file '" + path + "'");
    return parse_config(in);
}

inline std::string format_real(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string format_list(std::span<const double> xs)
{
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ", ";
        out += format_real(xs[i]);
    }
    return out;
}

/// Canonical text of a raw config: sorted sections and keys.
inline std::string to_ini(const RawConfig& raw)
{
    std::string out;
    if (auto top = raw.find(""); top != raw.end())
        for (const auto& [k, v] : top->second) out += k + " = " + v + "\n";
    for (const auto& [section, keys] : raw) {
        if (section.empty()) continue;
        out += "\n[" + section + "]\n";
        for (const auto& [k, v] : keys) out += k + " = " + v + "\n";
    }
    return out;
}

/// [instance] section listing means and variances explicitly.
inline std::map<std::string, std::string> instance_section(const ProblemInstance& instance)
{
    std::map<std::string, std::string> s{
        {"means", format_list(instance.means())},
        {"variances", format_list(instance.variances())},
    };
    if (auto d = instance.iz_delta()) s["delta"] = format_real(*d);
    return s;
}

inline std::string config_hash(const RawConfig& raw) { return fnv1a64_hex(to_ini(raw)); }

inline nlohmann::json to_json(const RawConfig& raw)
{
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [section, keys] : raw) j[section.empty() ? "top" : section] = keys;
    return j;
}

} // namespace rns::cli
