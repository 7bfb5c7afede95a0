#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "cyma/calculus.hpp"
#include "cyma/checks.hpp"
#include "cyma/config.hpp"
#include "cyma/errors.hpp"
#include "cyma/io.hpp"
#include "cyma/random.hpp"
#include "cyma/runner.hpp"

using namespace cyma;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("cyma_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

const char* kMinimalConfig = R"({
  "geometry": {"n": 1, "res": 64},
  "metric": {"kind": "flat"},
  "problem": {"mode": "solve", "lambda": 1.0},
  "solver": {"tol": 1e-10},
  "output": {"directory": "out"}
})";

}  // namespace

TEST_CASE("CYF1 round trip is bit exact") {
  TempDir tmp;
  auto g = TorusGrid::make(1, 32);
  FieldSampler sampler(123);
  const ScalarField field = sampler.band_limited(g, 8, 2.5);
  const fs::path p = tmp.path / "field.cyf";
  write_field(p, field);
  write_field_meta(p, *g, "test field");
  const ScalarField back = read_scalar_field(p);
  REQUIRE(back.size() == field.size());
  for (std::size_t i = 0; i < field.size(); ++i) CHECK(back[i] == field[i]);

  // Round-trip the bytes themselves.
  const std::string once = slurp(p);
  write_field(tmp.path / "again.cyf", back);
  CHECK(once == slurp(tmp.path / "again.cyf"));
  CHECK(fs::exists(tmp.path / "field.cyf.meta.json"));
}

TEST_CASE("hermitian fields round trip") {
  TempDir tmp;
  auto g = TorusGrid::make(2, 16);
  FieldSampler sampler(9);
  const ScalarField phi = sampler.band_limited(g, 4, 0.5);
  const HermitianField h = HermitianField::identity(g) + ddc(phi);
  const fs::path p = tmp.path / "h.cyf";
  write_field(p, h);
  const HermitianField back = read_hermitian_field(p);
  for (std::size_t i = 0; i < h.coeffs().size(); ++i) CHECK(back.coeffs()[i] == h.coeffs()[i]);
}

TEST_CASE("CYF1 error taxonomy") {
  TempDir tmp;
  SUBCASE("bad magic") {
    spit(tmp.path / "bad.cyf", "CYF2xxxxxxxxxxxxxxxx");
    try {
      (void)read_field(tmp.path / "bad.cyf");
      FAIL("expected bad magic");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::io_bad_magic);
    }
  }
  SUBCASE("truncated payload") {
    auto g = TorusGrid::make(1, 32);
    const fs::path p = tmp.path / "trunc.cyf";
    write_field(p, ScalarField::constant(g, 1.0));
    const std::string full = slurp(p);
    spit(p, full.substr(0, full.size() / 2));
    try {
      (void)read_field(p);
      FAIL("expected truncation");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::io_truncated);
    }
  }
  SUBCASE("kind mismatch") {
    auto g = TorusGrid::make(1, 32);
    const fs::path p = tmp.path / "h.cyf";
    write_field(p, HermitianField::identity(g));
    try {
      (void)read_scalar_field(p);
      FAIL("expected kind mismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::io_kind_mismatch);
    }
  }
}

TEST_CASE("config validation") {
  SUBCASE("minimal config parses") {
    const RunConfig cfg = parse_config(kMinimalConfig, ".");
    CHECK(cfg.n == 1);
    CHECK(cfg.res == 64);
    CHECK(cfg.mode == RunMode::solve);
    CHECK(cfg.tol == 1e-10);
    CHECK(cfg.output_directory == fs::path(".") / "out");
  }
  SUBCASE("unknown keys are rejected with the key name") {
    const char* bad = R"({
      "geometry": {"n": 1, "res": 64, "resolution": 64},
      "metric": {"kind": "flat"},
      "problem": {"mode": "solve"}
    })";
    try {
      (void)parse_config(bad, ".");
      FAIL("expected rejection");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::config);
      CHECK(std::string(e.what()).find("resolution") != std::string::npos);
    }
  }
  SUBCASE("negative lambda names the offending key") {
    const char* bad = R"({
      "geometry": {"n": 1, "res": 64},
      "metric": {"kind": "flat"},
      "problem": {"mode": "solve", "lambda": -1}
    })";
    try {
      (void)parse_config(bad, ".");
      FAIL("expected rejection");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("problem.lambda") != std::string::npos);
    }
  }
  SUBCASE("malformed JSON reports line and column") {
    try {
      (void)parse_config("{\n  \"geometry\": [,]\n}", ".");
      FAIL("expected parse error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }
}

TEST_CASE("run driver writes artifacts and honors exit codes") {
  TempDir tmp;
  SUBCASE("minimal solve run") {
    spit(tmp.path / "config.json", kMinimalConfig);
    RunRequest req;
    req.config_path = tmp.path / "config.json";
    req.no_timestamp = true;
    std::string msg;
    CHECK(run(req, msg) == kExitOk);
    CHECK(fs::exists(tmp.path / "out" / "solution.cyf"));
    CHECK(fs::exists(tmp.path / "out" / "solution.cyf.meta.json"));
    CHECK(fs::exists(tmp.path / "out" / "report.json"));
    CHECK(fs::exists(tmp.path / "out" / "monitors.csv"));
    const ScalarField phi = read_scalar_field(tmp.path / "out" / "solution.cyf");
    CHECK(phi.sup_abs() < 1e-12);
    // Monitor header is pinned.
    const std::string csv = slurp(tmp.path / "out" / "monitors.csv");
    CHECK(csv.rfind("step,residual,osc_phi,max_laplacian,c_or_b,mass\n", 0) == 0);
  }
  SUBCASE("determinism: identical report bytes with --no-timestamp") {
    spit(tmp.path / "config.json", kMinimalConfig);
    RunRequest req;
    req.config_path = tmp.path / "config.json";
    req.no_timestamp = true;
    std::string msg;
    req.output_override = tmp.path / "a";
    CHECK(run(req, msg) == kExitOk);
    req.output_override = tmp.path / "b";
    CHECK(run(req, msg) == kExitOk);
    CHECK(slurp(tmp.path / "a" / "report.json") == slurp(tmp.path / "b" / "report.json"));
  }
  SUBCASE("config errors exit 3 and write nothing") {
    spit(tmp.path / "bad.json", R"({"geometry": {"n": 1, "res": 64},
      "metric": {"kind": "flat"},
      "problem": {"mode": "solve", "lambda": -1},
      "output": {"directory": "nothing_here"}})");
    RunRequest req;
    req.config_path = tmp.path / "bad.json";
    std::string msg;
    CHECK(run(req, msg) == kExitConfigError);
    CHECK(msg.find("problem.lambda") != std::string::npos);
    CHECK(!fs::exists(tmp.path / "nothing_here"));
  }
  SUBCASE("calabi config reproduces the closed-form constant") {
    spit(tmp.path / "calabi.json", R"({
      "geometry": {"n": 1, "res": 64},
      "metric": {"kind": "flat"},
      "problem": {"mode": "calabi", "lambda": 0.0, "p_exponent": 2.0,
                  "density": {"constant": 1.0,
                              "modes": [{"index": [1, 0], "amplitude": 0.3, "phase": 0.0}]}},
      "output": {"directory": "out"}
    })");
    RunRequest req;
    req.config_path = tmp.path / "calabi.json";
    req.no_timestamp = true;
    std::string msg;
    REQUIRE(run(req, msg) == kExitOk);
    const std::string report = slurp(tmp.path / "out" / "report.json");
    // c is 1 to solver accuracy; the serialized value must read back as ~1.
    CHECK(report.find("\"c\":") != std::string::npos);
    const auto pos = report.find("\"c\":");
    const double c = std::stod(report.substr(pos + 4));
    CHECK(std::abs(c - 1.0) < 1e-8);
  }
}

TEST_CASE("check suites") {
  SUBCASE("report serialization is deterministic and sorted") {
    CheckOptions opts;
    opts.record_timings = false;
    const CheckReport a = run_checks("degenerate", opts);
    const CheckReport b = run_checks("degenerate", opts);
    CHECK(report_to_json(a, false) == report_to_json(b, false));
    for (std::size_t i = 1; i < a.checks.size(); ++i)
      CHECK(a.checks[i - 1].id < a.checks[i].id);
  }
  SUBCASE("flipped Hessian sign is caught by the smooth suite") {
    CheckOptions opts;
    opts.record_timings = false;
    opts.hessian_sign = -1.0;
    const CheckReport mutated = run_checks("smooth", opts);
    CHECK(!mutated.overall_pass);
    // The analytic ddc value checks are the ones that must trip.
    bool ddc_failed = false;
    for (const CheckRecord& c : mutated.checks)
      if (c.id.find("ddc_cos") != std::string::npos) ddc_failed |= !c.pass;
    CHECK(ddc_failed);
  }
}
