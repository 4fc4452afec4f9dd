// padiclf: cyclotomic p-adic L-functions of weight-2 newforms, exactly.
//
// Subcommands:
//   compute   full pipeline: symbol -> measure -> expansion -> checks
//   symbols   build/inspect the modular-symbol cache for a level
//   check     run a single named check
//   import    validate an external measure table
//   psi       truncated psi-matrix inversion demo

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "padiclf/pipeline.hpp"

using namespace padiclf;

namespace {

struct CommonArgs {
  std::vector<long> curve_coeffs;
  long level = 0;
  std::vector<std::string> ap_args;
  long p = 5;
  long levels = 5;
  long terms = 40;
  long coeffs = 8;
  std::vector<std::string> centers;
  std::vector<std::string> checks;
  std::string cache_dir;
  std::string format = "text";
  std::string root;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--curve", a.curve_coeffs,
                  "Weierstrass coefficients a1,a2,a3,a4,a6")
      ->delimiter(',')
      ->expected(5);
  cmd->add_option("--level", a.level, "level N (the conductor)");
  cmd->add_option("--ap", a.ap_args, "Hecke eigenvalues q=v,...")
      ->delimiter(',');
  cmd->add_option("--p", a.p, "the prime p");
  cmd->add_option("--levels", a.levels, "measure depth n_max");
  cmd->add_option("--terms", a.terms, "binomial series terms K");
  cmd->add_option("--coeffs", a.coeffs, "Taylor coefficients M");
  cmd->add_option("--center", a.centers,
                  "expansion center (integer or digits@p); repeatable");
  cmd->add_option("--check", a.checks,
                  "checks: additivity interpolation fe decay modp psi");
  cmd->add_option("--cache-dir", a.cache_dir, "symbol cache directory");
  cmd->add_option("--format", a.format, "text | json-like-canonical");
  cmd->add_option("--root", a.root, "root choice: unit | plus | minus");
}

JobConfig to_config(const CommonArgs& a) {
  JobConfig cfg;
  if (!a.curve_coeffs.empty()) {
    CurveData e;
    e.a1 = a.curve_coeffs[0];
    e.a2 = a.curve_coeffs[1];
    e.a3 = a.curve_coeffs[2];
    e.a4 = a.curve_coeffs[3];
    e.a6 = a.curve_coeffs[4];
    e.conductor = a.level;
    cfg.curve = e;
  }
  if (a.level > 0) cfg.level = a.level;
  for (const auto& t : a.ap_args) {
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError("--ap entries look like q=v");
    cfg.eigenvalues[std::stol(t.substr(0, eq))] = std::stol(t.substr(eq + 1));
  }
  cfg.p = a.p;
  cfg.levels_m = a.levels;
  cfg.terms_K = a.terms;
  cfg.coeffs_M = a.coeffs;
  if (!a.centers.empty()) cfg.centers = a.centers;
  cfg.checks = a.checks;
  cfg.cache_dir = a.cache_dir;
  if (cfg.cache_dir.empty()) {
    const char* env = std::getenv("PADICLF_CACHE_DIR");
    if (env) cfg.cache_dir = env;
  }
  cfg.format = a.format;
  cfg.root_label = a.root;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact cyclotomic p-adic L-functions for weight-2 newforms"};
  app.require_subcommand(1);

  CommonArgs compute_args;
  CLI::App* compute = app.add_subcommand("compute", "run the full pipeline");
  add_common(compute, compute_args);

  CommonArgs symbols_args;
  CLI::App* symbols = app.add_subcommand("symbols",
                                         "build/inspect the symbol cache");
  add_common(symbols, symbols_args);
  int symbols_sign = 1;
  symbols->add_option("--sign", symbols_sign, "+1 or -1");

  CommonArgs check_args;
  std::string check_name;
  CLI::App* check = app.add_subcommand("check", "run a single check");
  check->add_option("name", check_name, "check name")->required();
  add_common(check, check_args);

  std::string import_file;
  std::string import_format = "text";
  CLI::App* import_cmd =
      app.add_subcommand("import", "validate an external measure table");
  import_cmd->add_option("file", import_file, "path to the table")->required();
  import_cmd->add_option("--format", import_format, "text | json-like-canonical");

  long psi_K = 12;
  long psi_p = 5;
  std::string psi_center = "1";
  std::vector<long> psi_indices;
  CLI::App* psi = app.add_subcommand("psi", "truncated psi-matrix inversion");
  psi->add_option("--K", psi_K, "truncation size");
  psi->add_option("--p", psi_p, "the prime p");
  psi->add_option("--center", psi_center, "expansion center s0 (rational)");
  psi->add_option("--indices", psi_indices, "strictly increasing k-indices")
      ->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (*compute) {
      RunReport rep = run(to_config(compute_args));
      std::cout << rep.document;
      return rep.exit_code;
    }
    if (*symbols) {
      JobConfig cfg = to_config(symbols_args);
      if (!cfg.level && !cfg.curve) {
        std::cout << "config error: symbols needs --level or --curve\n";
        return 2;
      }
      long N = cfg.level ? *cfg.level : cfg.curve->conductor;
      std::map<long, long> eigen = cfg.eigenvalues;
      if (eigen.empty() && cfg.curve) {
        CurveData e = *cfg.curve;
        e.conductor = N;
        eigen = curve_eigensystem(e, N);
      }
      EigenSymbol sym = obtain_symbol(N, eigen, symbols_sign, cfg.cache_dir);
      std::cout << symbol_cache_text(sym);
      std::cout << "fricke " << fricke_sign(sym) << "\n";
      return 0;
    }
    if (*check) {
      JobConfig cfg = to_config(check_args);
      cfg.checks = {check_name};
      cfg.coeffs_M = 0;  // checks only
      if (check_name == "fe" || check_name == "decay") cfg.coeffs_M = 0;
      RunReport rep = run(cfg);
      std::cout << rep.document;
      return rep.exit_code;
    }
    if (*import_cmd) {
      MeasureTable t = import_external_table(read_text_file(import_file));
      std::cout << "import ok: N=" << t.level_N << " k=" << t.weight_k
                << " j=" << t.moment_j << " p=" << t.p()
                << " levels=" << t.n_max << " c0=" << t.c0.get_str()
                << " mass=" << t.total_mass.to_string() << "\n";
      return 0;
    }
    if (*psi) {
      if (psi_indices.empty())
        for (long i = 1; i <= psi_K; ++i) psi_indices.push_back(i);
      PsiInversion res = truncated_psi_inverse(
          psi_K, psi_indices, parse_rational(psi_center), psi_p);
      std::cout << "mphi:\n";
      for (const auto& row : res.mphi) {
        for (size_t j = 0; j < row.size(); ++j)
          std::cout << (j ? " " : "") << row[j].get_str();
        std::cout << "\n";
      }
      std::cout << "inverse:\n";
      for (const auto& row : res.inverse) {
        for (size_t j = 0; j < row.size(); ++j)
          std::cout << (j ? " " : "") << row[j].get_str();
        std::cout << "\n";
      }
      std::cout << "product_is_identity "
                << (res.product_is_identity ? "true" : "false") << "\n";
      return res.product_is_identity ? 0 : 1;
    }
  } catch (const std::invalid_argument& e) {
    std::cout << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::string what = e.what();
    std::cout << "error: " << what << "\n";
    return what.find("precision exhausted") != std::string::npos ? 3 : 2;
  }
  return 2;
}
