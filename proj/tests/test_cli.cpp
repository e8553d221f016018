// Drives the installed command-line tool as a subprocess.
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "support.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
  std::string err;
};

Run cli(const std::string& args, const std::string& env = "") {
  const auto dir = testing::scratch("cli-io");
  const auto out = dir / "stdout";
  const auto err = dir / "stderr";
  const std::string command =
      env + " " + std::string(ROIML_CLI_PATH) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int raw = std::system(command.c_str());
  Run r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = testing::read_file(out);
  r.err = testing::read_file(err);
  return r;
}

std::string config(const std::string& name) { return (testing::source_dir() / "data" / "configs" / name).string(); }

// Writes `body` as a config next to the shipped ones so relative paths resolve.
std::string temp_config(const std::string& name, const nlohmann::json& body) {
  const auto path = testing::scratch("cli-config-" + name) / "config.json";
  std::FILE* f = std::fopen(path.c_str(), "wb");
  const auto text = body.dump(2);
  std::fwrite(text.data(), 1, text.size(), f);
  std::fclose(f);
  return path.string();
}

nlohmann::json error_json(const Run& r) {
  const auto pos = r.err.rfind("{\"error\"");
  REQUIRE(pos != std::string::npos);
  return nlohmann::json::parse(r.err.substr(pos, r.err.find('\n', pos) - pos));
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("validate-config on the Table 5 config echoes the paper economics") {
    const auto r = cli("validate-config --config " + config("table5-default.json"));
    CHECK(r.status == 0);
    for (const char* line : {"cost_fn=25000", "cost_fp=10000", "value_prod=4000000", "c_hr=70", "n_hr=10"}) {
      CHECK_MESSAGE(r.out.find(line) != std::string::npos, line);
    }
  }

  TEST_CASE("curve on the bundled synthetic corpus writes an 8-point CSV") {
    const auto out = testing::scratch("cli-curve");
    const auto r = cli("curve --config " + config("table5-default.json") + " --out " + out.string());
    REQUIRE(r.status == 0);
    const auto csv = testing::read_file(out / "curves" / "rf.csv");
    std::size_t lines = 0;
    for (char c : csv) lines += c == '\n';
    CHECK(lines == 9);
    CHECK(fs::exists(out / "curves" / "rf.json"));
    const auto manifest = nlohmann::json::parse(testing::read_file(out / "manifest.json"));
    CHECK(manifest["subcommand"] == "curve");
    CHECK(manifest["seeds"]["sampling"] == 42);
  }

  TEST_CASE("config without a seed exits 1 naming sampling.seed") {
    const auto path = temp_config("noseed", {{"dataset", {{"corpus", (testing::source_dir() / "data" / "synthetic_corpus.csv").string()}}},
                                             {"sampling", {{"fractions", {0.2}}}}});
    const auto r = cli("validate-config --config " + path);
    CHECK(r.status == 1);
    const auto e = error_json(r);
    CHECK(e["error"]["status"] == "config_error");
    CHECK(e["error"]["message"].get<std::string>().find("sampling.seed") != std::string::npos);
  }

  TEST_CASE("seed on the command line overrides the config") {
    const auto r = cli("validate-config --config " + config("table5-default.json") + " --seed 77");
    CHECK(r.status == 0);
    CHECK(r.out.find("seed=77") != std::string::npos);
  }

  TEST_CASE("unknown or missing subcommand is a usage error") {
    CHECK(cli("explode --config x").status == 64);
    CHECK(cli("").status == 64);
    CHECK(cli("curve").status == 64);  // --config is required
  }

  TEST_CASE("bad fraction list exits 1") {
    CHECK(cli("validate-config --config " + config("table5-default.json") + " --fractions 0.2,0.1").status == 1);
    CHECK(cli("validate-config --config " + config("table5-default.json") + " --fractions abc").status == 1);
  }

  TEST_CASE("missing config file exits 1") {
    CHECK(cli("validate-config --config /nonexistent/config.json").status == 1);
  }

  TEST_CASE("external predictions glob that matches nothing exits 1") {
    const auto r = cli("validate-config --config " + config("table5-default.json") +
                       " --external-preds '/nonexistent/preds_*.csv'");
    CHECK(r.status == 1);
  }

  TEST_CASE("runtime failures exit 2 with module-qualified JSON") {
    // Sampling more fractions than the sample corpus can serve trips the
    // corpus module at run time, after validation.
    const auto path = temp_config(
        "tiny", {{"dataset", {{"input", (testing::source_dir() / "data" / "sample" / "issues.csv").string()},
                              {"min_words", 50}}},
                 {"sampling", {{"seed", 1}, {"fractions", {0.4}}}},
                 {"classifier", {{"kind", "naive_bayes"}}}});
    const auto out = testing::scratch("cli-runtime");
    const auto r = cli("pairs --config " + path + " --out " + out.string());
    CHECK(r.status == 2);
    const auto e = error_json(r);
    CHECK(!e["error"]["module"].get<std::string>().empty());
  }

  TEST_CASE("external predictions flow into curve and compare") {
    const auto out = testing::scratch("cli-external");
    // Build the split, then hand back perfect predictions for two fractions.
    REQUIRE(cli("pairs --config " + config("sample-export.json") + " --out " + out.string()).status == 0);
    const auto test = testing::read_file(out / "pairs" / "test.csv");
    const auto corpus_rows = test.substr(test.find('\n') + 1);
    std::string preds = "pair_id,true_label,predicted_label,score\n";
    std::size_t start = 0;
    while (start < corpus_rows.size()) {
      const auto end = corpus_rows.find('\n', start);
      const auto line = corpus_rows.substr(start, end - start);
      start = end + 1;
      const auto c1 = line.find(',');
      std::size_t comma = c1;
      for (int k = 0; k < 2; ++k) comma = line.find(',', comma + 1);
      const auto label = line.substr(comma + 1, 1);
      preds += line.substr(0, c1) + "," + label + "," + label + ",1\n";
    }
    const auto dir = testing::scratch("cli-external-preds");
    for (const char* name : {"oracle_40.csv", "oracle_80.csv"}) {
      std::FILE* f = std::fopen((dir / name).c_str(), "wb");
      std::fwrite(preds.data(), 1, preds.size(), f);
      std::fclose(f);
    }
    const auto r = cli("compare --config " + config("sample-export.json") + " --out " + out.string() +
                       " --external-preds '" + (dir / "oracle_*.csv").string() + "'");
    CHECK(r.status == 0);
    CHECK(r.err.find("0.600000") != std::string::npos);  // missing fraction is reported
    CHECK(fs::exists(out / "curves" / "external.csv"));
    CHECK(fs::exists(out / "compare" / "crossovers.json"));
    CHECK(fs::exists(out / "compare" / "overlay_roi.svg"));
  }

  TEST_CASE("ROIML_LOG=debug prints progress to stderr") {
    const auto r = cli("validate-config --config " + config("table5-default.json"), "ROIML_LOG=debug");
    CHECK(r.status == 0);
    CHECK(r.err.find("roiml [info]") != std::string::npos);
  }

  TEST_CASE("version flag") {
    const auto r = cli("--version");
    CHECK(r.status == 0);
    CHECK(!r.out.empty());
  }
}
