#include "randers_foliate/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "randers_foliate/error.hpp"

namespace rf {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& s, const std::string& field) {
  const std::string t = trim(s);
  T v{};
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ConfigError("field '" + field + "': cannot parse '" + s + "' as a number");
  return v;
}

double parse_double(const std::string& s, const std::string& field) {
  const std::string t = trim(s);
  std::istringstream is(t);
  is.imbue(std::locale::classic());
  double v = 0.0;
  is >> v;
  if (t.empty() || is.fail() || !is.eof()) throw ConfigError("field '" + field + "': cannot parse '" + s + "' as a number");
  return v;
}

}  // namespace

std::vector<int> parse_int_list(const std::string& s, const std::string& field) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number<int>(item, field));
  if (out.empty()) throw ConfigError("field '" + field + "': empty list");
  return out;
}

std::vector<std::string> parse_name_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

RawConfig parse_config_text(const std::string& text, const std::string& origin) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (value.empty()) throw ConfigError(where + ": field '" + key + "' has no value");
    if (key == "example") raw.example = value;
    else if (key == "res") raw.res = value;
    else if (key == "formulas") raw.formulas = value;
    else if (key == "scheme") raw.scheme = value;
    else if (key == "seed") raw.seed = value;
    else if (key == "jobs") raw.jobs = value;
    else if (key == "out") raw.out = value;
    else if (key == "format") raw.format = value;
    else if (key == "param") raw.params.push_back(value);
    else if (key.rfind("param.", 0) == 0 && key.size() > 6) raw.params.push_back(key.substr(6) + "=" + value);
    else throw ConfigError(where + ": unknown field '" + key + "'");
  }
  return raw;
}

RawConfig load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str(), path);
}

RawConfig merge(const RawConfig& file, const RawConfig& flags) {
  RawConfig r = file;
  auto take = [](std::optional<std::string>& dst, const std::optional<std::string>& src) {
    if (src) dst = src;
  };
  take(r.example, flags.example);
  take(r.res, flags.res);
  take(r.formulas, flags.formulas);
  take(r.scheme, flags.scheme);
  take(r.seed, flags.seed);
  take(r.jobs, flags.jobs);
  take(r.out, flags.out);
  take(r.format, flags.format);
  r.params.insert(r.params.end(), flags.params.begin(), flags.params.end());
  return r;
}

RunConfig resolve(const RawConfig& raw) {
  RunConfig cfg;
  if (!raw.example) throw ConfigError("field 'example': required");
  cfg.example.name = *raw.example;
  catalog_entry(cfg.example.name);
  for (const auto& p : raw.params) {
    const auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("field 'param': expected k=v, got '" + p + "'");
    cfg.example.params[trim(p.substr(0, eq))] = parse_double(p.substr(eq + 1), "param " + trim(p.substr(0, eq)));
  }
  resolve_params(cfg.example);
  if (raw.res) {
    cfg.resolutions = parse_int_list(*raw.res, "res");
    for (int r : cfg.resolutions)
      if (r < 8 || r > 4096) throw ConfigError("field 'res': " + std::to_string(r) + " outside [8, 4096]");
  }
  if (raw.formulas) {
    cfg.formulas = parse_name_list(*raw.formulas);
    if (cfg.formulas.empty()) throw ConfigError("field 'formulas': empty list");
  }
  check_formula_selectors(cfg.formulas);
  if (raw.scheme) {
    try {
      cfg.scheme = parse_scheme(*raw.scheme);
    } catch (const Error& e) {
      throw ConfigError(std::string("field 'scheme': ") + e.what());
    }
  }
  if (raw.seed) cfg.seed = parse_number<std::uint64_t>(*raw.seed, "seed");
  if (raw.jobs) {
    cfg.jobs = parse_number<int>(*raw.jobs, "jobs");
    if (cfg.jobs < 1) throw ConfigError("field 'jobs': must be positive");
  }
  if (raw.out) cfg.out = *raw.out;
  if (raw.format) cfg.format = parse_format(*raw.format);
  return cfg;
}

std::vector<int> effective_resolutions(const RunConfig& cfg) {
  if (!cfg.resolutions.empty()) return cfg.resolutions;
  const int d = default_resolution(cfg.example);
  return {d / 2, d};
}

int effective_jobs(const RunConfig& cfg) {
  if (cfg.jobs > 0) return cfg.jobs;
  if (const char* env = std::getenv("RANDERS_FOLIATE_JOBS")) {
    const int j = parse_number<int>(env, "RANDERS_FOLIATE_JOBS");
    if (j < 1) throw ConfigError("RANDERS_FOLIATE_JOBS must be positive");
    return j;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

ReportFormat effective_format(const RunConfig& cfg) {
  if (cfg.format) return *cfg.format;
  if (cfg.out.size() >= 4 && cfg.out.compare(cfg.out.size() - 4, 4, ".csv") == 0) return ReportFormat::csv;
  return ReportFormat::json;
}

VerifyRequest to_request(const RunConfig& cfg) {
  VerifyRequest req;
  req.example = cfg.example;
  req.resolutions = effective_resolutions(cfg);
  req.formulas = cfg.formulas;
  req.scheme = cfg.scheme;
  req.seed = cfg.seed;
  req.jobs = effective_jobs(cfg);
  return req;
}

}  // namespace rf
