#include "randers_foliate/report.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "randers_foliate/error.hpp"

namespace rf {

using json = nlohmann::ordered_json;

std::string format_name(ReportFormat f) { return f == ReportFormat::json ? "json" : "csv"; }

ReportFormat parse_format(const std::string& s) {
  if (s == "json") return ReportFormat::json;
  if (s == "csv") return ReportFormat::csv;
  throw ConfigError("unknown format '" + s + "' (expected json or csv)");
}

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double to_number(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

json to_json(const ResidualReport& r) {
  json params = json::object();
  for (const auto& [k, v] : r.params) params[k] = number(v);
  json conv = json::array();
  for (const auto& p : r.convergence)
    conv.push_back({{"resolution", p.resolution}, {"h", number(p.h)}, {"residual", number(p.value)}});
  json hyps = json::array();
  for (const auto& h : r.hypotheses)
    hyps.push_back({{"name", h.name},
                    {"measured", number(h.measured)},
                    {"threshold", number(h.threshold)},
                    {"holds", h.holds},
                    {"analytic", h.analytic}});
  return {{"formula_id", r.formula_id},
          {"example", r.example},
          {"params", params},
          {"resolution", r.resolution},
          {"scheme", r.scheme},
          {"relation", relation_name(r.relation)},
          {"value", number(r.value)},
          {"expected", number(r.expected)},
          {"residual", number(r.residual())},
          {"tolerance", number(r.tolerance)},
          {"scale", number(r.scale)},
          {"verdict", verdict_name(r.verdict)},
          {"convergence", conv},
          {"hypotheses", hyps},
          {"note", r.note}};
}

Verdict parse_verdict(const std::string& s) {
  if (s == "pass") return Verdict::pass;
  if (s == "fail") return Verdict::fail;
  if (s == "not-applicable") return Verdict::not_applicable;
  throw ValidationError("unknown verdict '" + s + "'");
}

std::string join_sizes(const std::vector<int>& sizes) {
  std::string s;
  for (std::size_t i = 0; i < sizes.size(); ++i) s += (i ? "x" : "") + std::to_string(sizes[i]);
  return s.empty() ? "-" : s;
}

std::string csv_number(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::string render_json(const std::vector<ResidualReport>& reports) {
  json root;
  root["schema_version"] = 1;
  root["reports"] = json::array();
  for (const auto& r : reports) root["reports"].push_back(to_json(r));
  return root.dump(2) + "\n";
}

std::string render_csv(const std::vector<ResidualReport>& reports) {
  std::string out = "formula_id,example,resolution,residual,verdict\n";
  for (const auto& r : reports)
    out += r.formula_id + "," + r.example + "," + join_sizes(r.resolution) + "," + csv_number(r.residual()) + "," +
           verdict_name(r.verdict) + "\n";
  return out;
}

std::string render(const std::vector<ResidualReport>& reports, ReportFormat format) {
  return format == ReportFormat::json ? render_json(reports) : render_csv(reports);
}

std::vector<ResidualReport> parse_json_report(const std::string& text) {
  std::vector<ResidualReport> out;
  try {
    const json root = json::parse(text);
    if (root.at("schema_version").get<int>() != 1) throw ValidationError("unsupported schema_version");
    for (const auto& j : root.at("reports")) {
      ResidualReport r;
      r.formula_id = j.at("formula_id").get<std::string>();
      r.example = j.at("example").get<std::string>();
      for (const auto& [k, v] : j.at("params").items()) r.params[k] = to_number(v);
      r.resolution = j.at("resolution").get<std::vector<int>>();
      r.scheme = j.at("scheme").get<std::string>();
      r.relation = j.at("relation").get<std::string>() == "equal" ? Relation::equal : Relation::at_least;
      r.value = to_number(j.at("value"));
      r.expected = to_number(j.at("expected"));
      r.tolerance = to_number(j.at("tolerance"));
      r.scale = to_number(j.at("scale"));
      r.verdict = parse_verdict(j.at("verdict").get<std::string>());
      for (const auto& p : j.at("convergence"))
        r.convergence.push_back({p.at("resolution").get<int>(), to_number(p.at("h")), to_number(p.at("residual"))});
      for (const auto& h : j.at("hypotheses"))
        r.hypotheses.push_back({h.at("name").get<std::string>(), to_number(h.at("measured")),
                                to_number(h.at("threshold")), h.at("holds").get<bool>(), h.at("analytic").get<bool>()});
      r.note = j.at("note").get<std::string>();
      out.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed report: ") + e.what());
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw ConfigError("write to '" + path + "' failed");
}

}  // namespace rf
