#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "perscale/config.hpp"
#include "perscale/error.hpp"
#include "perscale/experiment.hpp"
#include "perscale/io.hpp"
#include "perscale/oracles/persistence_oracle.hpp"
#include "perscale/parallel.hpp"
#include "perscale/verify.hpp"

using namespace perscale;
using doctest::Approx;
using nlohmann::json;
namespace fs = std::filesystem;

#ifndef PERSCALE_CONFIG_DIR
#define PERSCALE_CONFIG_DIR "configs"
#endif
#ifndef PERSCALE_CLI
#define PERSCALE_CLI "perscale"
#endif

namespace {

json small_config() {
  return json::parse(R"({
    "schema": "perscale/experiment/v1",
    "name": "small",
    "process": {"type": "poisson", "gamma0": 100, "eta1": 0.25},
    "dimension": 2,
    "times": [1, 2, 4],
    "window": {"shape": "box", "lower": [0, 0], "upper": [3, 3]},
    "scales": [0.5, 0.75, 1.0],
    "ensemble_size": 4,
    "complex": {"backend": "alpha2d"},
    "grid": {"nb": 16, "nd": 16},
    "betti_queries": [{"degree": 1, "r": 0.05, "s": 0.08}],
    "summary": {"kind": "betti", "s_min": 0, "s_max": 0.2, "count": 11, "degree": 1},
    "seed": 7,
    "expected": {"eta1": 0.25, "eta2": 0.5}
  })");
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("perscale_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  f << text;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct CliResult {
  int code = -1;
  std::string output;
};

CliResult cli(const std::string& args, const fs::path& dir) {
  const fs::path log = dir / "cli.log";
  const std::string cmd = std::string("\"") + PERSCALE_CLI + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(log)};
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("small config parses") {
  const auto c = parse_config(small_config().dump());
  CHECK(c.times.size() == 3);
  CHECK(c.ensemble_size == 4);
  CHECK(c.sequence().size() == 3);
  CHECK(volume(c.sequence().at(2)) == Approx(9.0));
}

TEST_CASE("zero ensemble size names the field") {
  auto j = small_config();
  j["ensemble_size"] = 0;
  CHECK_THROWS_WITH_AS(parse_config(j.dump()), doctest::Contains("ensemble_size"), ValidationError);
}

TEST_CASE("invalid configs are rejected with their field") {
  auto bad_schema = small_config();
  bad_schema["schema"] = "perscale/experiment/v0";
  CHECK_THROWS_WITH_AS(parse_config(bad_schema.dump()), doctest::Contains("schema"), ValidationError);

  auto unordered = small_config();
  unordered["times"] = {1, 4, 2};
  CHECK_THROWS_WITH_AS(parse_config(unordered.dump()), doctest::Contains("times"), ValidationError);

  auto early = small_config();
  early["times"] = {0.5, 1, 2};
  CHECK_THROWS_WITH_AS(parse_config(early.dump()), doctest::Contains("times"), ValidationError);

  auto scales = small_config();
  scales["scales"] = {1.0, 0.5};
  CHECK_THROWS_WITH_AS(parse_config(scales.dump()), doctest::Contains("scales"), ValidationError);

  auto unknown = small_config();
  unknown["ensemble"] = 3;
  CHECK_THROWS_WITH_AS(parse_config(unknown.dump()), doctest::Contains("ensemble"), ValidationError);

  CHECK_THROWS_AS(parse_config("{not json"), ValidationError);
}

TEST_CASE("shipped configs parse") {
  for (const char* name : {"poisson_scaling", "sublevel_scaling", "convergence_balls", "convergence_squares"}) {
    CAPTURE(name);
    CHECK_NOTHROW(load_config(std::string(PERSCALE_CONFIG_DIR) + "/" + name + ".json"));
  }
}

TEST_CASE("shipped convergence configs match the verify suite") {
  for (auto shape : {RegionKind::Ball, RegionKind::Box}) {
    const auto built = verify::convergence_config(shape, {});
    const auto shipped = load_config(std::string(PERSCALE_CONFIG_DIR) + "/" + built.name + ".json");
    CAPTURE(built.name);
    CHECK(shipped.window->describe() == built.window->describe());
    CHECK(shipped.scales == built.scales);
    CHECK(shipped.times == built.times);
    CHECK(shipped.ensemble_size == built.ensemble_size);
    CHECK(shipped.seed == built.seed);
    CHECK(shipped.process.poisson.gamma0 == built.process.poisson.gamma0);
    CHECK(shipped.process.poisson.eta1 == built.process.poisson.eta1);
    REQUIRE(shipped.betti.size() == built.betti.size());
    for (std::size_t q = 0; q < built.betti.size(); ++q) {
      CHECK(shipped.betti[q].degree == built.betti[q].degree);
      CHECK(shipped.betti[q].r == Approx(built.betti[q].r).epsilon(1e-12));
      CHECK(shipped.betti[q].s == Approx(built.betti[q].s).epsilon(1e-12));
    }
  }
}

}  // TEST_SUITE

TEST_SUITE("pipeline") {

TEST_CASE("parallel_for fills every slot and rethrows the lowest failing index") {
  std::vector<int> out(100, 0);
  parallel_for(out.size(), [&](std::size_t i) { out[i] = static_cast<int>(i) * 2; }, 4);
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i) * 2);
  try {
    parallel_for(50, [](std::size_t i) {
      if (i == 7 || i == 30) throw std::runtime_error("task " + std::to_string(i));
    }, 4);
    FAIL("no exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "task 7");
  }
}

TEST_CASE("run is deterministic and independent of the worker count") {
  const auto cfg = parse_config(small_config().dump());
  const auto a_dir = scratch("det_a"), b_dir = scratch("det_b"), c_dir = scratch("det_c");
  setenv(kWorkersEnv, "1", 1);
  write_outputs(run_experiment(cfg), a_dir.string());
  write_outputs(run_experiment(cfg), b_dir.string());
  setenv(kWorkersEnv, "3", 1);
  write_outputs(run_experiment(cfg), c_dir.string());
  unsetenv(kWorkersEnv);
  for (const char* f : {"diagrams.csv", "measure.csv", "quantities.csv", "summary.csv", "report.json"}) {
    CAPTURE(f);
    const std::string a = slurp(a_dir / f);
    CHECK_FALSE(a.empty());
    CHECK(a == slurp(b_dir / f));
    CHECK(a == slurp(c_dir / f));
  }
}

TEST_CASE("run report carries verdicts and tolerances") {
  const auto r = run_experiment(parse_config(small_config().dump()));
  CHECK(r.report.contains("verdicts"));
  CHECK(r.report["verdicts"].contains("packing_relation"));
  CHECK(r.report["verdicts"].contains("collapse"));
  CHECK(r.report.contains("tolerances"));
  CHECK(r.report["schema"] == "perscale/report/v1");
  REQUIRE(r.report["ensemble_conventions"].size() == 3);
  CHECK(r.report["ensemble_conventions"][0]["l_pooled"].contains("1"));
  CHECK(r.cells.size() == 9);
  CHECK(r.diagrams.size() == 12);
}

TEST_CASE("csv round trips") {
  const auto dir = scratch("io");
  const auto cfg = parse_config(small_config().dump());
  const auto r = run_experiment(cfg);

  std::vector<PointCloud> clouds{sample_cloud(cfg, 0, 0, cfg.window_at(2, 1.0)),
                                 sample_cloud(cfg, 1, 2, cfg.window_at(2, 4.0))};
  write_points_csv((dir / "points.csv").string(), clouds);
  const auto back = read_points_csv((dir / "points.csv").string());
  REQUIRE(back.size() == 2);
  for (std::size_t c = 0; c < 2; ++c) {
    REQUIRE(back[c].size() == clouds[c].size());
    CHECK(back[c].t == clouds[c].t);
    for (std::size_t i = 0; i < back[c].size(); ++i)
      CHECK(back[c].points[i][0] == Approx(clouds[c].points[i][0]).epsilon(1e-11));
  }

  write_diagrams_csv((dir / "diagrams.csv").string(), r.diagrams);
  const auto diagrams = read_diagrams_csv((dir / "diagrams.csv").string());
  REQUIRE(diagrams.size() == r.diagrams.size());
  for (std::size_t i = 0; i < diagrams.size(); ++i)
    CHECK(oracle::diagrams_match(diagrams[i], r.diagrams[i], 1e-10));

  std::vector<GeometricQuantities> rows;
  for (const auto& c : r.cells) rows.push_back(c.quantities.mean);
  write_quantities_csv((dir / "q.csv").string(), rows, 3.0);
  const auto qs = read_quantities_csv((dir / "q.csv").string(), 3.0);
  REQUIRE(qs.size() == rows.size());
  CHECK(qs[4].n_classes == Approx(rows[4].n_classes));
  CHECK(qs[4].l_at(1.0) == Approx(rows[4].l_at(1.0)));
  CHECK(*qs[4].d_max == Approx(*rows[4].d_max));
}

TEST_CASE("missing or malformed intermediates name the producer") {
  const auto dir = scratch("missing");
  CHECK_THROWS_WITH_AS(read_points_csv((dir / "none.csv").string()), doctest::Contains("sample"), ValidationError);
  CHECK_THROWS_WITH_AS(read_diagrams_csv((dir / "none.csv").string()), doctest::Contains("persist"), ValidationError);
  write_text(dir / "bad.csv", "a,b,c\n1,2,3\n");
  CHECK_THROWS_WITH_AS(read_diagrams_csv((dir / "bad.csv").string()), doctest::Contains("persist"), ValidationError);
}

TEST_CASE("number formatting keeps 12 significant digits") {
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(2.0) == "2");
  CHECK(format_number(123456789.123456789) == "123456789.123");
}

}  // TEST_SUITE

TEST_SUITE("cli") {

TEST_CASE("unknown verify suite lists the valid ones") {
  const auto dir = scratch("cli_verify");
  const auto r = cli("verify unknown", dir);
  CHECK(r.code == 2);
  for (const char* s : {"oracle", "geometry", "isomorphism", "convergence", "all"}) CHECK(r.output.find(s) != std::string::npos);
}

TEST_CASE("usage and validation errors exit with 2") {
  const auto dir = scratch("cli_usage");
  CHECK(cli("", dir).code == 2);
  CHECK(cli("run", dir).code == 2);
  auto j = small_config();
  j["ensemble_size"] = 0;
  write_text(dir / "bad.json", j.dump());
  const auto r = cli("run \"" + (dir / "bad.json").string() + "\"", dir);
  CHECK(r.code == 2);
  CHECK(r.output.find("ensemble_size") != std::string::npos);
  CHECK(cli("persist \"" + (dir / "none.csv").string() + "\"", dir).code == 2);
  CHECK(cli("--help", dir).code == 0);
}

TEST_CASE("sample then persist equals run") {
  const auto dir = scratch("cli_stages");
  auto j = small_config();
  write_text(dir / "cfg.json", j.dump());
  const auto pts = dir / "points.csv", dgm = dir / "diagrams.csv";
  REQUIRE(cli("sample \"" + (dir / "cfg.json").string() + "\" -o \"" + pts.string() + "\"", dir).code == 0);
  REQUIRE(cli("persist \"" + pts.string() + "\" -o \"" + dgm.string() + "\"", dir).code == 0);
  const auto staged = read_diagrams_csv(dgm.string());
  const auto r = run_experiment(parse_config(j.dump()));
  REQUIRE(staged.size() == r.diagrams.size());
  for (std::size_t i = 0; i < staged.size(); ++i) {
    CHECK(staged[i].provenance.sample_id == r.diagrams[i].provenance.sample_id);
    CHECK(staged[i].provenance.t == r.diagrams[i].provenance.t);
    std::string why;
    CHECK_MESSAGE(oracle::diagrams_match(staged[i], r.diagrams[i], 1e-9, &why), why);
  }
}

TEST_CASE("fit recovers exact exponents from a synthetic quantities table") {
  const auto dir = scratch("cli_fit");
  std::ostringstream csv;
  csv << "t,k,volume,n_classes,l_1,l_2,l_ndelta,d_max,pers_total,e_alpha\n";
  for (double t : {1.0, 2.0, 4.0, 8.0}) {
    const double n = 100.0 * std::pow(t, -0.5), l = std::pow(t, 0.25);
    csv << format_number(t) << ",0,1," << format_number(n) << "," << format_number(l) << "," << format_number(1.1 * l)
        << "," << format_number(1.2 * l) << "," << format_number(3 * l) << ",1,1\n";
  }
  write_text(dir / "q.csv", csv.str());
  const auto r = cli("fit \"" + (dir / "q.csv").string() + "\" -o \"" + (dir / "fit.json").string() + "\"", dir);
  CHECK(r.code == 0);
  const auto rep = json::parse(slurp(dir / "fit.json"));
  CHECK(rep["schema"] == "perscale/fit/v1");
  CHECK(rep["exponents"]["eta1"]["value"].get<double>() == Approx(0.25).epsilon(1e-9));
  CHECK(rep["exponents"]["eta2"]["value"].get<double>() == Approx(0.5).epsilon(1e-9));
  CHECK(rep["packing_relation"]["pass"] == true);
}

TEST_CASE("fit reports a failed packing relation with exit 1") {
  const auto dir = scratch("cli_fit_fail");
  std::ostringstream csv;
  csv << "t,k,volume,n_classes,l_1,l_2,l_ndelta,d_max,pers_total,e_alpha\n";
  for (double t : {1.0, 2.0, 4.0, 8.0}) {
    const double n = 100.0 * std::pow(t, -0.9), l = std::pow(t, 0.25);
    csv << format_number(t) << ",0,1," << format_number(n) << "," << format_number(l) << "," << format_number(l)
        << "," << format_number(l) << "," << format_number(l) << ",1,1\n";
  }
  write_text(dir / "q.csv", csv.str());
  CHECK(cli("fit \"" + (dir / "q.csv").string() + "\"", dir).code == 1);
}

TEST_CASE("measure needs the grouping flag for mixed times") {
  const auto dir = scratch("cli_measure");
  const auto r = run_experiment(parse_config(small_config().dump()));
  write_diagrams_csv((dir / "d.csv").string(), r.diagrams);
  const std::string base = "measure \"" + (dir / "d.csv").string() + "\" -o \"" + (dir / "m.csv").string() + "\"";
  const auto mixed = cli(base, dir);
  CHECK(mixed.code == 2);
  CHECK(mixed.output.find("group-by-t") != std::string::npos);
  CHECK(cli(base + " --group-by-t", dir).code == 0);
  CHECK(fs::file_size(dir / "m.csv") > 0);
}

}  // TEST_SUITE
