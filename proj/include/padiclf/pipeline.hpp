#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "padiclf/lseries.hpp"
#include "padiclf/measure.hpp"
#include "padiclf/modsym.hpp"
#include "padiclf/numoracle.hpp"

namespace padiclf {

// Front door: resolves the input (curve, explicit eigenvalue system, or an
// external measure file), runs the pipeline, and emits a deterministic
// canonical report.  One job per call; no floating point outside the
// clearly-labeled oracle section.

struct JobConfig {
  std::optional<CurveData> curve;
  std::optional<long> level;
  std::map<long, long> eigenvalues;
  std::string measure_file;  // external table; bypasses the symbol engine

  long p = 5;
  long levels_m = 5;
  long terms_K = 40;
  long coeffs_M = 8;
  std::vector<std::string> centers = {"1"};
  std::vector<std::string> checks;  // additivity interpolation fe decay modp psi
  std::string cache_dir;
  std::string format = "text";  // text | json-like-canonical
  std::string root_label;       // "" = unit (ordinary) / plus (supersingular)
};

struct RunReport {
  std::string document;
  bool all_checks_passed = true;
  int exit_code = 0;  // 0 ok, 1 check failure, 2 config error, 3 precision
};

// ---- small helpers -------------------------------------------------------------

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cli: cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// write-temp-then-rename so concurrent readers never see a torn file
inline void atomic_write_file(const std::string& path,
                              const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cli: cannot write '" + tmp + "'");
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

inline PadicNumber parse_center(const std::string& text, long p, long prec) {
  auto at = text.find('@');
  if (at == std::string::npos) {
    mpz_class v(text);
    return PadicNumber::from_integer(p, v, prec);
  }
  long declared = std::stol(text.substr(at + 1));
  if (declared != p)
    throw std::invalid_argument("cli: center digits declared for prime " +
                                std::to_string(declared) + ", job uses " +
                                std::to_string(p));
  std::istringstream ds(text.substr(0, at));
  std::string tok;
  mpz_class acc = 0, pw = 1;
  long count = 0;
  while (std::getline(ds, tok, ',')) {
    long d = std::stol(tok);
    if (d < 0 || d >= p)
      throw std::invalid_argument("cli: center digit out of range");
    acc += d * pw;
    pw *= p;
    ++count;
  }
  if (count == 0) throw std::invalid_argument("cli: empty center digits");
  return PadicNumber::from_integer(p, acc, std::max(count, prec));
}

// Scans small good primes for a_p = 0 (the supersingular fixture hunt).
inline long find_supersingular_prime(const CurveData& e, long p_min = 5,
                                     long p_max = 60) {
  for (long q = p_min; q <= p_max; ++q) {
    if (!is_prime(q) || e.conductor % q == 0) continue;
    if (curve_ap(e, q) == 0) return q;
  }
  return 0;
}

// ---- symbol acquisition with cache ----------------------------------------------

inline std::string symbol_cache_path(const std::string& dir, long N,
                                     int sign) {
  return dir + "/padiclf_sym_N" + std::to_string(N) + "_" +
         (sign > 0 ? "plus" : "minus") + ".txt";
}

inline EigenSymbol obtain_symbol(long N, const std::map<long, long>& eigen,
                                 int sign, const std::string& cache_dir) {
  if (!cache_dir.empty()) {
    std::string path = symbol_cache_path(cache_dir, N, sign);
    if (std::filesystem::exists(path)) {
      try {
        EigenSymbol sym = symbol_from_cache_text(read_text_file(path));
        bool match = sym.level() == N && sym.sign() == sign;
        for (auto [q, a] : eigen)
          match = match && sym.eigenvalues().count(q) &&
                  sym.eigenvalues().at(q) == a;
        if (match) return sym;
      } catch (const std::exception&) {
        // stale or corrupt cache: fall through and rebuild
      }
    }
  }
  SymbolSpace sp = build_space(N);
  EigenSymbol sym = eigensymbol(sp, eigen, sign);
  if (!cache_dir.empty()) {
    std::filesystem::create_directories(cache_dir);
    atomic_write_file(symbol_cache_path(cache_dir, N, sign),
                      symbol_cache_text(sym));
  }
  return sym;
}

// Eigenvalues from point counting at enough primes to cut a 1-dimensional
// eigenspace: starts with q in {2,3} and extends while the cut is ambiguous.
inline std::map<long, long> curve_eigensystem(const CurveData& e, long N) {
  std::map<long, long> eigen;
  SymbolSpace sp = build_space(N);
  std::vector<long> primes = {2, 3, 5, 7, 11, 13, 17, 19};
  size_t used = 0;
  for (long q : primes) {
    if (N % q == 0) continue;
    eigen[q] = curve_ap(e, q);
    ++used;
    if (used < 2) continue;
    try {
      eigensymbol(sp, eigen, +1);
      return eigen;
    } catch (const std::domain_error& err) {
      if (std::string(err.what()).find("not 1-dimensional") ==
          std::string::npos)
        throw;
    }
  }
  throw std::domain_error(
      "cli: could not isolate a 1-dimensional eigenspace from point counts");
}

// ---- report assembly ---------------------------------------------------------------

class ReportBuilder {
 public:
  explicit ReportBuilder(const std::string& format) : json_(format != "text") {}

  void section(const std::string& name) {
    flush_section();
    cur_name_ = name;
  }
  void kv(const std::string& key, const std::string& value) {
    cur_.emplace_back(key, value);
  }
  void kv(const std::string& key, long value) {
    kv(key, std::to_string(value));
  }
  void kv(const std::string& key, const mpq_class& value) {
    kv(key, value.get_str());
  }

  std::string str() {
    flush_section();
    std::ostringstream os;
    if (!json_) {
      for (auto& [name, entries] : sections_) {
        os << "[" << name << "]\n";
        for (auto& [k, v] : entries) os << k << " = " << v << "\n";
      }
      return os.str();
    }
    os << "{\n";
    for (size_t i = 0; i < sections_.size(); ++i) {
      os << "  \"" << sections_[i].first << "\": {\n";
      auto& entries = sections_[i].second;
      for (size_t j = 0; j < entries.size(); ++j) {
        os << "    \"" << entries[j].first << "\": \"" << entries[j].second
           << "\"";
        os << (j + 1 < entries.size() ? ",\n" : "\n");
      }
      os << "  }" << (i + 1 < sections_.size() ? ",\n" : "\n");
    }
    os << "}\n";
    return os.str();
  }

 private:
  void flush_section() {
    if (!cur_name_.empty()) {
      sections_.emplace_back(cur_name_, cur_);
      cur_.clear();
      cur_name_.clear();
    }
  }
  bool json_;
  std::string cur_name_;
  std::vector<std::pair<std::string, std::string>> cur_;
  std::vector<std::pair<std::string,
                        std::vector<std::pair<std::string, std::string>>>>
      sections_;
};

// ---- the pipeline ------------------------------------------------------------------

inline RunReport run(const JobConfig& cfg) {
  RunReport out;
  ReportBuilder rb(cfg.format);
  bool expansion_job = cfg.coeffs_M > 0 && !cfg.centers.empty();

  auto has_check = [&](const std::string& name) {
    for (const auto& c : cfg.checks)
      if (c == name) return true;
    return false;
  };

  try {
    // ---- configuration validation (config errors exit with 2)
    if (!is_prime(cfg.p)) throw std::invalid_argument("cli: p must be prime");
    if (expansion_job && cfg.p < 5)
      throw std::invalid_argument(
          "cli: expansion jobs need p >= 5; measure-only jobs allow p >= 3");
    if (!expansion_job && cfg.p < 3)
      throw std::invalid_argument("cli: p must be at least 3");
    for (const auto& c : cfg.checks)
      if (c != "additivity" && c != "interpolation" && c != "fe" &&
          c != "decay" && c != "modp" && c != "psi")
        throw std::invalid_argument("cli: unknown check '" + c + "'");
    if ((has_check("decay") || has_check("fe")) && cfg.p < 5)
      throw std::invalid_argument("cli: decay/fe checks need p >= 5");
    if (cfg.format != "text" && cfg.format != "json-like-canonical")
      throw std::invalid_argument("cli: format must be text or json-like-canonical");

    // ---- input resolution
    MeasureTable table;
    std::optional<EigenSymbol> symbol;
    long N = 0;
    if (!cfg.measure_file.empty()) {
      table = import_external_table(read_text_file(cfg.measure_file));
      N = table.level_N;
      if (N % cfg.p == 0 || table.p() != cfg.p)
        throw std::invalid_argument("cli: measure file prime mismatch");
      if (cfg.levels_m > table.n_max)
        throw std::invalid_argument(
            "cli: requested more levels than the imported table has");
    } else {
      std::map<long, long> eigen = cfg.eigenvalues;
      if (cfg.curve) {
        CurveData e = *cfg.curve;
        if (!cfg.level)
          throw std::invalid_argument(
              "cli: curve input needs --level to assert the conductor");
        e.conductor = *cfg.level;
        e.validate();
        N = e.conductor;
        if (eigen.empty()) eigen = curve_eigensystem(e, N);
      } else if (cfg.level) {
        N = *cfg.level;
        if (eigen.empty())
          throw std::invalid_argument("cli: level input needs --ap values");
      } else {
        throw std::invalid_argument(
            "cli: provide --curve, --level with --ap, or an external measure");
      }
      if (N % cfg.p == 0)
        throw std::invalid_argument("cli: p divides N");

      symbol = obtain_symbol(N, eigen, +1, cfg.cache_dir);
      mpq_class apq = recover_eigenvalue(*symbol, cfg.p);
      long ap = (long)apq.get_num().get_si();
      HeckeContext ctx{cfg.p, ap, 2};
      std::string label =
          !cfg.root_label.empty() ? cfg.root_label
                                  : (ctx.ordinary() ? "unit" : "plus");
      table = build_measure(*symbol, cfg.p, AdmissibleRoot::make(ctx, label),
                            cfg.levels_m, has_check("additivity"));
    }

    // ---- report header
    rb.section("config");
    rb.kv("N", N);
    rb.kv("p", cfg.p);
    rb.kv("levels", cfg.levels_m);
    rb.kv("terms", cfg.terms_K);
    rb.kv("coefficients", cfg.coeffs_M);
    rb.kv("root", table.root.label);
    rb.kv("source",
          table.source == MeasureSource::Native ? "native" : "external");

    rb.section("eigenvalues");
    if (symbol) {
      for (auto [q, a] : symbol->eigenvalues())
        rb.kv("a" + std::to_string(q), a);
      rb.kv("fricke", fricke_sign(*symbol));
    } else {
      rb.kv("ap", table.root.ctx.ap);
    }

    long wp = lseries_work_prec(table, cfg.levels_m, cfg.terms_K);
    rb.section("alpha");
    rb.kv("label", table.root.label);
    rb.kv("value", table.root.image(wp).to_string());
    rb.kv("valuation", table.alpha_valuation());

    rb.section("measure");
    rb.kv("c0", table.c0);
    rb.kv("c0_effective", table.c0_effective);
    rb.kv("deeper_norm_violation",
          table.deeper_norm_violation ? "true" : "false");
    rb.kv("mass", table.total_mass.to_string());
    rb.kv("riemann_error", table.riemann_error(cfg.levels_m));

    // ---- per-center expansions
    bool all_checks = true;
    if (expansion_job) {
      for (const auto& ctext : cfg.centers) {
        PadicNumber s0 = parse_center(ctext, cfg.p, wp);
        PadicPowerSeries ser = taylor_expand(table, s0, cfg.coeffs_M,
                                             cfg.levels_m, cfg.terms_K);
        OrderReport rep = order_of_vanishing(ser);
        rb.section("series center=" + ctext);
        std::istringstream lines(ser.export_text());
        std::string line;
        long ln = 0;
        while (std::getline(lines, line)) {
          rb.kv(ln == 0 ? std::string("header") : "c" + std::to_string(ln - 1),
                line);
          ++ln;
        }
        rb.section("order center=" + ctext);
        rb.kv("order", rep.determined ? std::to_string(rep.order)
                                      : "undetermined");
        if (rep.determined)
          rb.kv("leading_coeff", rep.leading_coeff->to_string());
        for (size_t j = 0; j < rep.ledger.size(); ++j) {
          const auto& st = rep.ledger[j];
          rb.kv("c" + std::to_string(j),
                st.provably_nonzero
                    ? "provably nonzero, valuation " +
                          st.valuation_or_bound.get_str()
                    : "consistent with zero up to p^" +
                          st.valuation_or_bound.get_str());
        }
      }
    }

    // ---- checks
    for (const auto& name : cfg.checks) {
      rb.section("check " + name);
      if (name == "additivity") {
        // exact verification happened at build time (fatal on failure), and
        // the streamed extra level ran when requested
        table.verify_additivity();
        rb.kv("result", "pass");
        rb.kv("levels_verified",
              std::to_string(table.n_max) + "+streamed");
      } else if (name == "interpolation") {
        if (!symbol) {
          rb.kv("result", "skip (external table)");
          continue;
        }
        AlphaElement one = AlphaElement::from_rational(table.root.ctx, 1);
        AlphaElement fac =
            one - AlphaElement::alpha(table.root.ctx).inverse();
        AlphaElement expect =
            (fac * fac).scale(symbol->eval_path(0));
        bool exact_ok = expect == table.total_mass;
        rb.kv("exact_identity", exact_ok ? "pass" : "fail");
        bool ok = exact_ok;
        if (cfg.curve) {
          CurveData e = *cfg.curve;
          e.conductor = N;
          int sign = -fricke_sign(*symbol);
          LValueResult lv = l_value_numeric(e, 4000, sign);
          double om = real_period(e);
          double ratio = lv.value / om;
          mpq_class lam0 = symbol->eval_path(0);
          rb.kv("oracle_note", "floating point below, oracle only");
          std::ostringstream fl;
          fl.setf(std::ios::fixed);
          fl.precision(10);
          fl << "L=" << lv.value << " omega=" << om << " ratio=" << ratio;
          rb.kv("oracle_values", fl.str());
          if (lam0 != 0) {
            double rho = ratio / lam0.get_d();
            mpq_class rho_rat = rational_reconstruct(rho, 50);
            double err = std::abs(rho_rat.get_d() - rho);
            bool num_ok =
                std::abs(ratio) > 1e-9
                    ? err <= 1e-4 * std::abs(rho)
                    : std::abs(ratio) < 1e-6;
            rb.kv("normalization_ratio", rho_rat);
            rb.kv("numeric_match", num_ok ? "pass" : "fail");
            ok = ok && num_ok;
          }
        }
        rb.kv("result", ok ? "pass" : "fail");
        all_checks = all_checks && ok;
      } else if (name == "fe") {
        if (!symbol) {
          rb.kv("result", "skip (external table)");
          continue;
        }
        std::vector<PadicNumber> samples = {
            PadicNumber::from_integer(cfg.p, 1, wp),
            PadicNumber::from_integer(cfg.p, 1 + cfg.p, wp),
            PadicNumber::from_integer(cfg.p, 1 - cfg.p, wp)};
        FunctionalEquationReport rep = functional_equation_check(
            table, *symbol, samples, cfg.levels_m, cfg.terms_K);
        rb.kv("sign", rep.sign_calibrated ? std::to_string(rep.sign_used)
                                          : "uncalibrated");
        rb.kv("fricke", rep.fricke);
        for (size_t i = 0; i < rep.samples.size(); ++i) {
          const auto& s = rep.samples[i];
          rb.kv("sample" + std::to_string(i),
                std::string(s.pass ? "pass" : "fail") + ", floor " +
                    s.shared_floor.get_str());
        }
        rb.kv("result", rep.all_pass ? "pass" : "fail");
        all_checks = all_checks && rep.all_pass;
      } else if (name == "decay") {
        MomentVector mv = moments(table, 20, cfg.levels_m);
        auto ledger = decay_check(mv, table);
        bool ok = true;
        for (const auto& e : ledger) {
          rb.kv("k" + std::to_string(e.k),
                std::string(e.pass ? "pass" : "fail") + ", margin " +
                    e.margin.get_str());
          ok = ok && e.pass;
        }
        rb.kv("margins_nondecreasing_beyond_p",
              decay_margins_nondecreasing_beyond_p(ledger, cfg.p) ? "true"
                                                                  : "false");
        rb.kv("result", ok ? "pass" : "fail");
        all_checks = all_checks && ok;
      } else if (name == "modp") {
        if (!table.root.ctx.ordinary()) {
          rb.kv("result", "skip (supersingular)");
          continue;
        }
        ModPScanReport rep = mod_p_scan(table);
        rb.kv("alpha_is_one_mod_p", rep.alpha_is_one_mod_p ? "true" : "false");
        if (rep.found) {
          rb.kv("first_nondivisible_level", rep.level);
          rb.kv("first_nondivisible_residue", rep.residue.get_str());
        } else {
          rb.kv("scan", "all divisible up to n_max");
        }
        rb.kv("result", "pass");
      } else if (name == "psi") {
        std::mt19937 rng(424242);  // fixed seed: deterministic report
        std::vector<long> idx;
        long cur = 0;
        for (int i = 0; i < 12; ++i) {
          cur += 1 + (long)(rng() % 3);
          idx.push_back(cur);
        }
        PsiInversion psi =
            truncated_psi_inverse(12, idx, mpq_class(1), cfg.p);
        rb.kv("indices", [&] {
          std::string s;
          for (long v : idx) s += (s.empty() ? "" : ",") + std::to_string(v);
          return s;
        }());
        rb.kv("product_is_identity",
              psi.product_is_identity ? "true" : "false");
        rb.kv("result", psi.product_is_identity ? "pass" : "fail");
        all_checks = all_checks && psi.product_is_identity;
      }
    }

    out.all_checks_passed = all_checks;
    out.exit_code = all_checks ? 0 : 1;
    out.document = rb.str();
    return out;
  } catch (const std::invalid_argument& e) {
    out.document = std::string("config error: ") + e.what() + "\n";
    out.all_checks_passed = false;
    out.exit_code = 2;
    return out;
  } catch (const std::runtime_error& e) {
    std::string what = e.what();
    out.document = std::string("error: ") + what + "\n";
    out.all_checks_passed = false;
    out.exit_code =
        what.find("precision exhausted") != std::string::npos ? 3 : 2;
    return out;
  } catch (const std::exception& e) {
    out.document = std::string("error: ") + e.what() + "\n";
    out.all_checks_passed = false;
    out.exit_code = 1;
    return out;
  }
}

}  // namespace padiclf
