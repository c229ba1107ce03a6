#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"
#include "support.hpp"

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "mwsp");
  std::ostringstream out, err;
  const int code = mwsp::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

const std::string root = support::data_dir().string();

}  // namespace

TEST_CASE("stats") {
  auto r = run({"stats", "--dataset", "MUTAG", "--data-root", root});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out.substr(0, r.out.find('\n')));
  CHECK(j["size"] == 188);
  CHECK(j["classes"] == 2);
  CHECK(j["node_labels"] == 7);
  CHECK(j["max_sp"] == 15);
  CHECK(r.out.find("17.93") != std::string::npos);
  CHECK(r.out.find("19.79") != std::string::npos);
  CHECK(r.out.find("3.87") != std::string::npos);

  support::TempDir empty("cli_empty");
  CHECK(run({"stats", "--dataset", "MUTAG", "--data-root", empty.path.string()}).code == 2);
  CHECK(run({"stats"}).code == 2);
}

TEST_CASE("stats after surrogate labeling") {
  support::TempDir dir("cli_unlabeled");
  for (const char* suffix : {"_A.txt", "_graph_indicator.txt", "_graph_labels.txt"})
    std::filesystem::copy_file(support::data_dir() / "FIG2" / (std::string("FIG2") + suffix),
                               dir.path / (std::string("FIG2") + suffix));
  auto r = run({"stats", "--dataset", "FIG2", "--data-root", dir.path.string()});
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(r.out.substr(0, r.out.find('\n')))["node_labels"] == 0);
  r = run({"stats", "--dataset", "FIG2", "--data-root", dir.path.string(), "--labels", "degree"});
  REQUIRE(r.code == 0);
  // Degrees in the fixture are 1, 2, 3 and 4, so four surrogate labels.
  CHECK(nlohmann::json::parse(r.out.substr(0, r.out.find('\n')))["node_labels"] == 4);
  CHECK(run({"gram", "--dataset", "FIG2", "--data-root", dir.path.string()}).code == 2);
  CHECK(run({"gram", "--dataset", "FIG2", "--data-root", dir.path.string(), "--labels", "uniform"}).code == 0);
}

TEST_CASE("gram outputs") {
  support::TempDir dir("cli_gram");
  const auto csv = (dir.path / "fig.csv").string();
  auto r = run({"gram", "--dataset", "FIG2", "--data-root", root, "--d", "2", "--k", "1", "--lambda", "0.1", "--out", csv});
  REQUIRE(r.code == 0);
  const auto text = slurp(csv);
  std::istringstream lines(text);
  std::string l1, l2, extra;
  std::getline(lines, l1);
  std::getline(lines, l2);
  CHECK_FALSE(std::getline(lines, extra));
  CHECK(l1.substr(0, 2) == "1,");
  CHECK(l2.substr(l2.size() - 2) == ",1");
  const auto meta = nlohmann::json::parse(slurp(dir.path / "fig.json"));
  CHECK(meta["variant"] == "MWSP");
  CHECK(meta["d"] == 2);
  CHECK(meta["lambda"] == 0.1);
  CHECK(nlohmann::json::parse(slurp(dir.path / "fig.timing.json")).contains("kernel_seconds"));

  const auto csv2 = (dir.path / "again.csv").string();
  REQUIRE(run({"gram", "--dataset", "FIG2", "--data-root", root, "--d", "2", "--k", "1", "--lambda", "0.1", "--out", csv2,
               "--jobs", "3"})
              .code == 0);
  CHECK(slurp(csv2) == text);
  CHECK(slurp(dir.path / "again.json") == slurp(dir.path / "fig.json"));
}

TEST_CASE("MUTAG gram is 188 x 188 and symmetric") {
  const auto r = run({"gram", "--dataset", "MUTAG", "--data-root", root, "--d", "1", "--k", "0"});
  REQUIRE(r.code == 0);
  std::istringstream lines(r.out);
  std::vector<std::vector<std::string>> cells;
  for (std::string line; std::getline(lines, line);) {
    cells.emplace_back();
    std::istringstream fields(line);
    for (std::string f; std::getline(fields, f, ',');) cells.back().push_back(f);
  }
  REQUIRE(cells.size() == 188);
  bool symmetric = true;
  for (std::size_t i = 0; i < 188; ++i) {
    REQUIRE(cells[i].size() == 188);
    CHECK(cells[i][i] == "1");
    for (std::size_t j = 0; j < i; ++j) symmetric &= cells[i][j] == cells[j][i];
  }
  CHECK(symmetric);
}

TEST_CASE("gram argument handling") {
  CHECK(run({"gram", "--dataset", "FIG2", "--data-root", root, "--variant", "wl"}).code == 2);
  CHECK(run({"gram", "--dataset", "FIG2", "--data-root", root, "--lambda", "-1"}).code == 2);
  CHECK(run({"gram", "--dataset", "FIG2", "--data-root", root, "--bogus"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"--help"}).code == 0);
  auto r = run({"gram", "--dataset", "FIG2", "--data-root", root, "--variant", "sp", "--d", "3"});
  CHECK(r.code == 0);
  CHECK(r.err.find("warning") != std::string::npos);
  r = run({"gram", "--dataset", "MUTAG", "--data-root", root, "--d", "6", "--k", "6", "--memory-limit-mb", "1"});
  CHECK(r.code == 2);
  CHECK(r.err.find("MiB") != std::string::npos);
  CHECK(r.err.find("exceeds") != std::string::npos);
}

TEST_CASE("data root from the environment") {
  ::setenv("MWSP_DATA_ROOT", root.c_str(), 1);
  CHECK(run({"stats", "--dataset", "FIG2"}).code == 0);
  ::unsetenv("MWSP_DATA_ROOT");
}

TEST_CASE("cv command") {
  support::TempDir dir("cli_cv");
  const auto a = (dir.path / "a.json").string(), b = (dir.path / "b.json").string();
  const std::vector<std::string> base{"cv", "--dataset", "MUTAG", "--data-root", root, "--repeats", "1", "--seed", "4"};
  auto args = base;
  args.insert(args.end(), {"--fixed", "d=1", "k=0", "lambda=0.1", "C=10", "--out", a});
  REQUIRE(run(args).code == 0);
  args = base;
  args.insert(args.end(), {"--variant", "wsp", "--fixed", "d=1 lambda=0.1 C=10", "--out", b, "--jobs", "2"});
  REQUIRE(run(args).code == 0);
  auto ja = nlohmann::json::parse(slurp(a)), jb = nlohmann::json::parse(slurp(b));
  CHECK(ja["mode"] == "fixed");
  CHECK(ja["folds_table"] == jb["folds_table"]);
  CHECK(ja["mean"] == jb["mean"]);
  CHECK(std::filesystem::exists(dir.path / "a.timing.json"));

  args = base;
  args.insert(args.end(), {"--folds", "200"});
  CHECK(run(args).code == 2);
  args = base;
  args.insert(args.end(), {"--fixed", "d=1", "C=oops"});
  CHECK(run(args).code == 2);
}

TEST_CASE("oracle command") {
  auto r = run({"oracle", "--instances", "50", "--trees", "200"});
  CHECK(r.code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
  r = run({"oracle", "--instances", "20", "--trees", "50", "--inject-sign-flip"});
  CHECK(r.code == 1);
  CHECK(r.out.find("FAIL transport-oracle") != std::string::npos);
  r = run({"oracle", "--max-rows", "9"});
  CHECK(r.code == 2);
  CHECK(r.err.find("refused") != std::string::npos);
}
