#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "randers_foliate/foliated.hpp"
#include "randers_foliate/report.hpp"

namespace rf {

struct RunConfig {
  ExampleSpec example;
  std::vector<int> resolutions;  // empty: {d/2, d} with d the example's default resolution
  std::vector<std::string> formulas{"all"};
  Scheme scheme = Scheme::spectral;
  std::uint64_t seed = 1;
  int jobs = 0;  // 0: RANDERS_FOLIATE_JOBS, else hardware concurrency
  std::string out;  // empty: stdout
  std::optional<ReportFormat> format;  // unset: from the extension of `out`, else json
};

// Values as given on the command line or in a config file, before validation.
struct RawConfig {
  std::optional<std::string> example, res, formulas, scheme, seed, jobs, out, format;
  std::vector<std::string> params;  // "k=v"
};

// Flat key = value file. '#' starts a comment; keys: example, param (repeatable, "k=v"), param.<k>,
// res, formulas, scheme, seed, jobs, out, format. ConfigError names the line and key.
RawConfig parse_config_text(const std::string& text, const std::string& origin = "config");
RawConfig load_config_file(const std::string& path);

// Fields set in `flags` replace those of `file`; params are appended so flags win on a repeated key.
RawConfig merge(const RawConfig& file, const RawConfig& flags);

// Validates every field; ConfigError with the offending field on failure.
RunConfig resolve(const RawConfig& raw);

std::vector<int> parse_int_list(const std::string& s, const std::string& field);
std::vector<std::string> parse_name_list(const std::string& s);

std::vector<int> effective_resolutions(const RunConfig& cfg);
int effective_jobs(const RunConfig& cfg);
ReportFormat effective_format(const RunConfig& cfg);

VerifyRequest to_request(const RunConfig& cfg);

}  // namespace rf
