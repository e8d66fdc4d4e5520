#pragma once

#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "rns/harness/evaluate.hpp"

namespace rns {

/// 64-bit FNV-1a, rendered as 16 hex digits.
inline std::string fnv1a64_hex(std::string_view text)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline constexpr std::string_view kCsvHeader =
    "procedure,k,config_hash,R,pcs_hat,pcs_se,pgs_hat,pgs_se,eoc_hat,eoc_se,mean_N,mean_N_se,runtime_s";

namespace detail {

inline std::string format_double(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace detail

inline std::string csv_row(const EvalReport& r, std::string_view config_hash)
{
    using detail::format_double;
    std::ostringstream out;
    out << r.procedure << ',' << r.k << ',' << config_hash << ',' << r.replications << ',' << format_double(r.pcs.value)
        << ',' << format_double(r.pcs.se) << ',' << format_double(r.pgs.value) << ',' << format_double(r.pgs.se) << ','
        << format_double(r.eoc.value) << ',' << format_double(r.eoc.se) << ',' << format_double(r.mean_total_samples.value)
        << ',' << format_double(r.mean_total_samples.se) << ',' << format_double(r.runtime_s);
    return out.str();
}

inline std::string to_csv(const EvalReport& r, std::string_view config_hash)
{
    return std::string(kCsvHeader) + '\n' + csv_row(r, config_hash) + '\n';
}

/// JSON mirror of the CSV row plus Wilson bounds, abort count and the
/// config that produced it.
inline nlohmann::json to_json(const EvalReport& r, std::string_view config_hash, const nlohmann::json& config)
{
    return {
        {"procedure", r.procedure},
        {"k", r.k},
        {"config_hash", config_hash},
        {"R", r.replications},
        {"pcs_hat", r.pcs.value},
        {"pcs_se", r.pcs.se},
        {"pcs_wilson", {{"low", r.pcs_wilson_low}, {"high", r.pcs_wilson_high}}},
        {"pgs_hat", r.pgs.value},
        {"pgs_se", r.pgs.se},
        {"eoc_hat", r.eoc.value},
        {"eoc_se", r.eoc.se},
        {"mean_N", r.mean_total_samples.value},
        {"mean_N_se", r.mean_total_samples.se},
        {"runtime_s", r.runtime_s},
        {"aborted", r.aborted},
        {"config", config},
    };
}

/// JSON Schema (draft 2020-12) for to_json output.
inline constexpr std::string_view kReportSchema = R"({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "title": "rns evaluation report",
  "type": "object",
  "required": ["procedure", "k", "config_hash", "R", "pcs_hat", "pcs_se", "pcs_wilson", "pgs_hat", "pgs_se",
               "eoc_hat", "eoc_se", "mean_N", "mean_N_se", "runtime_s", "aborted", "config"],
  "additionalProperties": false,
  "properties": {
    "procedure": {"type": "string"},
    "k": {"type": "integer", "minimum": 2},
    "config_hash": {"type": "string", "pattern": "^[0-9a-f]{16}$"},
    "R": {"type": "integer", "minimum": 1},
    "pcs_hat": {"type": "number", "minimum": 0, "maximum": 1},
    "pcs_se": {"type": "number", "minimum": 0},
    "pcs_wilson": {
      "type": "object",
      "required": ["low", "high"],
      "additionalProperties": false,
      "properties": {
        "low": {"type": "number", "minimum": 0, "maximum": 1},
        "high": {"type": "number", "minimum": 0, "maximum": 1}
      }
    },
    "pgs_hat": {"type": "number", "minimum": 0, "maximum": 1},
    "pgs_se": {"type": "number", "minimum": 0},
    "eoc_hat": {"type": "number", "minimum": 0},
    "eoc_se": {"type": "number", "minimum": 0},
    "mean_N": {"type": "number", "minimum": 0},
    "mean_N_se": {"type": "number", "minimum": 0},
    "runtime_s": {"type": "number", "minimum": 0},
    "aborted": {"type": "integer", "minimum": 0},
    "config": {
      "type": "object",
      "additionalProperties": {
        "type": "object",
        "additionalProperties": {"type": "string"}
      }
    }
  }
})";

} // namespace rns
