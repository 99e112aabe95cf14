#pragma once

#include <string>
#include <vector>

#include "randers_foliate/verifier.hpp"

namespace rf {

enum class ReportFormat { json, csv };

std::string format_name(ReportFormat f);
ReportFormat parse_format(const std::string& s);  // ConfigError if unknown

// {"schema_version": 1, "reports": [ResidualReport...]}. Stable key order and shortest round-trip doubles,
// so equal reports serialize to equal bytes.
std::string render_json(const std::vector<ResidualReport>& reports);

// Header: formula_id,example,resolution,residual,verdict. Resolution is the finest grid, e.g. 64x64x64.
std::string render_csv(const std::vector<ResidualReport>& reports);

std::string render(const std::vector<ResidualReport>& reports, ReportFormat format);

// Parses a JSON report back; used by tests and by sweep tooling. ValidationError on schema mismatch.
std::vector<ResidualReport> parse_json_report(const std::string& text);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace rf
