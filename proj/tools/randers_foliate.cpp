#include <cstdio>
#include <functional>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "randers_foliate/error.hpp"
#include "randers_foliate/extrinsic.hpp"
#include "randers_foliate/run_config.hpp"
#include "randers_foliate/verifier.hpp"

namespace {

constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

void print_catalog(std::ostream& os) {
  for (const auto& e : rf::catalog()) {
    os << e.profile << "\n";
    os << "  " << e.description << "\n";
    for (const auto& p : e.params) os << "  --param " << p.name << "=" << p.default_value << "  " << p.help << "\n";
  }
  os << "formulas (ids, series ids expand to .k1..km, or a group name, or all):\n";
  for (const auto& f : rf::formula_registry())
    os << "  " << f.id << (f.series ? ".kN" : "") << "  [" << f.group << "]  " << f.description << "\n";
}

struct Flags {
  std::string config, example, res, formulas, scheme, seed, jobs, out, format;
  std::vector<std::string> params;
};

void add_run_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "flat key = value config file; flags override it");
  cmd->add_option("--example", f.example, "catalog example name");
  cmd->add_option("--param", f.params, "example parameter k=v (repeatable)");
  cmd->add_option("--res", f.res, "comma-separated resolutions (points per axis)");
  cmd->add_option("--formulas", f.formulas, "comma-separated formula ids, groups or all");
  cmd->add_option("--scheme", f.scheme, "derivative scheme: spectral or central4");
  cmd->add_option("--seed", f.seed, "seed for randomized checks");
  cmd->add_option("--jobs", f.jobs, "worker threads (default RANDERS_FOLIATE_JOBS or core count)");
  cmd->add_option("--out", f.out, "report path (default stdout)");
  cmd->add_option("--format", f.format, "json or csv");
}

rf::RunConfig config_from(const Flags& f, const CLI::App* cmd) {
  rf::RawConfig file;
  if (!f.config.empty()) file = rf::load_config_file(f.config);
  rf::RawConfig flags;
  auto set = [&](const char* name, std::optional<std::string>& dst, const std::string& v) {
    if (cmd->count(name)) dst = v;
  };
  set("--example", flags.example, f.example);
  set("--res", flags.res, f.res);
  set("--formulas", flags.formulas, f.formulas);
  set("--scheme", flags.scheme, f.scheme);
  set("--seed", flags.seed, f.seed);
  set("--jobs", flags.jobs, f.jobs);
  set("--out", flags.out, f.out);
  set("--format", flags.format, f.format);
  flags.params = f.params;
  return rf::resolve(rf::merge(file, flags));
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty())
    std::cout << text;
  else
    rf::write_text_file(path, text);
}

int run_verify(const rf::RunConfig& cfg) {
  const auto reports = rf::verify(rf::to_request(cfg));
  emit(rf::render(reports, rf::effective_format(cfg)), cfg.out);
  int fails = 0;
  for (const auto& r : reports) {
    if (r.verdict != rf::Verdict::fail) continue;
    ++fails;
    std::cerr << "FAIL " << r.formula_id << " on " << r.example << ": residual " << r.residual() << " > tolerance "
              << r.tolerance << "\n";
  }
  return fails ? kExitFail : 0;
}

int run_dump(const rf::RunConfig& cfg, const std::string& field_name) {
  const int res = cfg.resolutions.empty() ? rf::default_resolution(cfg.example) : cfg.resolutions.back();
  const rf::Geometry G = rf::build_geometry(cfg.example, res, cfg.scheme);
  const std::map<std::string, const rf::Field*> fields = {
      {"metric", &G.M.metric},
      {"beta", &G.M.beta},
      {"beta_sharp", &G.M.beta_sharp},
      {"normal", &G.M.normal},
      {"test_function", &G.M.test_function},
      {"shape_bar", &G.bar.shape},
      {"curvature_vector_bar", &G.bar.curvature_vector},
      {"c", &G.bar.c},
      {"c_hat", &G.bar.c_hat},
      {"ricci_normal_bar", &G.curv.ricci_normal},
      {"g", &G.X.g},
      {"nu", &G.X.nu},
      {"shape_g", &G.X.Ag_direct},
      {"shape_g_formula", &G.X.Ag_formula},
      {"z", &G.X.Z_direct},
      {"csharp", &G.X.Csharp_direct},
      {"shape_F", &G.X.A},
      {"delta", &G.X.delta},
  };
  const auto it = fields.find(field_name);
  if (it == fields.end()) {
    std::string known;
    for (const auto& [k, v] : fields) known += " " + k;
    throw rf::ConfigError("unknown field '" + field_name + "'; known:" + known);
  }
  if (cfg.out.empty()) throw rf::ConfigError("field 'out': dump needs an output path");
  rf::write_field_csv(*it->second, cfg.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verifier for integral formulas of foliated Randers spaces"};
  app.require_subcommand(0, 1);
  bool list = false;
  app.add_flag("--list", list, "list catalog examples, their hypothesis profiles and the formula ids");

  Flags vf;
  CLI::App* verify = app.add_subcommand("verify", "build an example, run formulas, write a report");
  add_run_flags(verify, vf);

  Flags df;
  std::string field = "shape_g";
  CLI::App* dump = app.add_subcommand("dump", "write one field of an example as CSV");
  add_run_flags(dump, df);
  dump->add_option("--field", field, "field name");

  CLI::App* list_cmd = app.add_subcommand("list", "same as --list");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (list || list_cmd->parsed()) {
      print_catalog(std::cout);
      return 0;
    }
    if (verify->parsed()) return run_verify(config_from(vf, verify));
    if (dump->parsed()) return run_dump(config_from(df, dump), field);
    std::cerr << app.help();
    return kExitConfig;
  } catch (const rf::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
