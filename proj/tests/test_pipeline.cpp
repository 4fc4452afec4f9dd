#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <filesystem>

#include "padiclf/pipeline.hpp"

using namespace padiclf;

namespace {

JobConfig config_11a1() {
  JobConfig cfg;
  CurveData e{0, -1, 1, -10, -20, 11};
  cfg.curve = e;
  cfg.level = 11;
  cfg.p = 5;
  cfg.levels_m = 4;
  cfg.terms_K = 30;
  cfg.coeffs_M = 4;
  cfg.centers = {"1"};
  cfg.checks = {"interpolation", "fe", "decay", "modp", "psi", "additivity"};
  return cfg;
}

}  // namespace

TEST_CASE("full pipeline on 11a1: all checks pass, order 0") {
  RunReport rep = run(config_11a1());
  CHECK(rep.exit_code == 0);
  CHECK(rep.all_checks_passed);
  CHECK(rep.document.find("order = 0") != std::string::npos);
  CHECK(rep.document.find("result = pass") != std::string::npos);
  CHECK(rep.document.find("result = fail") == std::string::npos);
}

TEST_CASE("full pipeline on 37a1: order >= 1 reported with ledger") {
  JobConfig cfg;
  cfg.curve = CurveData{0, 0, 1, -1, 0, 37};
  cfg.level = 37;
  cfg.p = 5;
  cfg.levels_m = 4;
  cfg.terms_K = 30;
  cfg.coeffs_M = 4;
  cfg.centers = {"1"};
  RunReport rep = run(cfg);
  CHECK(rep.exit_code == 0);
  CHECK(rep.document.find("order = 1") != std::string::npos);
  CHECK(rep.document.find("consistent with zero up to p^") !=
        std::string::npos);
}

TEST_CASE("config rejection: p divides N") {
  JobConfig cfg = config_11a1();
  cfg.p = 11;
  RunReport rep = run(cfg);
  CHECK(rep.exit_code == 2);
  CHECK(rep.document.find("p divides N") != std::string::npos);
}

TEST_CASE("config rejection: p < 5 for expansion jobs, p = 3 measure-only") {
  JobConfig cfg = config_11a1();
  cfg.p = 3;
  RunReport rep = run(cfg);
  CHECK(rep.exit_code == 2);

  // measure-only at p = 3 is allowed
  JobConfig m3 = config_11a1();
  m3.p = 3;
  m3.coeffs_M = 0;
  m3.checks = {"additivity", "modp"};
  RunReport rep3 = run(m3);
  CHECK(rep3.exit_code == 0);
}

TEST_CASE("determinism: identical config gives byte-identical reports") {
  JobConfig cfg = config_11a1();
  RunReport a = run(cfg);
  RunReport b = run(cfg);
  CHECK(a.document == b.document);

  cfg.format = "json-like-canonical";
  RunReport c = run(cfg);
  RunReport d = run(cfg);
  CHECK(c.document == d.document);
  CHECK(c.document != a.document);
  CHECK(c.document.find("{") == 0);
  // the canonical document is well-formed JSON
  nlohmann::json parsed = nlohmann::json::parse(c.document);
  CHECK(parsed.is_object());

  cfg.format = "yaml";
  RunReport bad = run(cfg);
  CHECK(bad.exit_code == 2);
}

TEST_CASE("cache transparency: cold and warm runs match byte for byte") {
  std::string dir = "/tmp/padiclf_test_cache";
  std::filesystem::remove_all(dir);
  JobConfig cfg = config_11a1();
  cfg.cache_dir = dir;
  RunReport cold = run(cfg);
  CHECK(std::filesystem::exists(symbol_cache_path(dir, 11, +1)));
  RunReport warm = run(cfg);
  CHECK(cold.document == warm.document);
  CHECK(cold.exit_code == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("external measure input round-trips through the pipeline") {
  // export a native table, re-import through a file
  SymbolSpace sp = build_space(11);
  EigenSymbol sym = eigensymbol(sp, {{2, -2}, {3, -1}}, +1);
  MeasureTable t = build_measure(
      sym, 5, AdmissibleRoot::make(HeckeContext{5, 1, 2}, "unit"), 3);
  std::string path = "/tmp/padiclf_test_measure.txt";
  atomic_write_file(path, export_measure_text(t));

  JobConfig cfg;
  cfg.measure_file = path;
  cfg.p = 5;
  cfg.levels_m = 3;
  cfg.terms_K = 20;
  cfg.coeffs_M = 3;
  cfg.centers = {"1"};
  cfg.checks = {"additivity", "decay"};
  RunReport rep = run(cfg);
  CHECK(rep.exit_code == 0);
  CHECK(rep.document.find("source = external") != std::string::npos);
  std::filesystem::remove(path);
}

TEST_CASE("precision exhaustion surfaces as exit code 3") {
  JobConfig cfg = config_11a1();
  cfg.terms_K = 30;
  cfg.coeffs_M = 4;
  cfg.levels_m = 4;
  // find the supersingular prime and under-provision the levels
  long ssp = find_supersingular_prime(CurveData{0, -1, 1, -10, -20, 11});
  REQUIRE(ssp > 0);
  cfg.p = ssp;
  cfg.levels_m = 1;
  cfg.terms_K = 8;
  cfg.coeffs_M = 2;
  RunReport rep = run(cfg);
  CHECK(rep.exit_code == 3);
  CHECK(rep.document.find("precision exhausted") != std::string::npos);
}

TEST_CASE("multiple centers in one job") {
  JobConfig cfg = config_11a1();
  cfg.checks.clear();
  cfg.centers = {"1", "2", "1,1@5"};
  RunReport rep = run(cfg);
  CHECK(rep.exit_code == 0);
  CHECK(rep.document.find("series center=1]") != std::string::npos);
  CHECK(rep.document.find("series center=2]") != std::string::npos);
  CHECK(rep.document.find("series center=1,1@5]") != std::string::npos);
  CHECK(rep.document.find("order center=2]") != std::string::npos);
}

TEST_CASE("center parsing") {
  PadicNumber c = parse_center("2,0,3@5", 5, 12);
  // 2 + 3*25 = 77
  CHECK((c - PadicNumber::from_integer(5, 77, 12)).is_zero());
  CHECK_THROWS(parse_center("2,0,3@7", 5, 12));
  CHECK_THROWS(parse_center("6,0@5", 5, 12));
  PadicNumber i = parse_center("-4", 5, 12);
  CHECK((i - PadicNumber::from_integer(5, -4, 12)).is_zero());
}
