#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <sstream>

#include "bitr/data.hpp"
#include "bitr/model_io.hpp"
#include "bitr/policy.hpp"
#include "helpers.hpp"

using namespace bitr;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(const std::string& args, const fs::path& dir) {
  const fs::path o = dir / "stdout.txt", e = dir / "stderr.txt";
  const std::string cmd =
      std::string(BITR_CLI_PATH) + " " + args + " >" + o.string() + " 2>" + e.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, testing::slurp(o), testing::slurp(e)};
}

std::vector<std::vector<std::string>> read_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

const std::string kFast = "--set n_trees=20 --set epochs=40";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("simulate smoke run writes three OTIA lines") {
  const auto dir = testing::temp_dir("cli_sim");
  const auto r = cli("simulate --set R=5 --out " + (dir / "a").string(), dir);
  INFO(r.err);
  REQUIRE(r.code == 0);
  int lines = 0;
  std::istringstream in(testing::slurp(dir / "a" / "summary.txt"));
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("OTIA c=", 0) != 0) continue;
    ++lines;
    const double v = std::stod(line.substr(line.find(": ") + 2));
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  CHECK(lines == 3);
  CHECK(r.out == testing::slurp(dir / "a" / "summary.txt"));
  CHECK(fs::file_size(dir / "a" / "report.csv") > 0);
}

TEST_CASE("simulate output is byte identical across runs and worker counts") {
  const auto dir = testing::temp_dir("cli_det");
  const std::string base = "simulate --set scenario=case2 --set R=4 --set n=100 " + kFast;
  REQUIRE(cli(base + " --out " + (dir / "a").string(), dir).code == 0);
  REQUIRE(cli(base + " --out " + (dir / "b").string(), dir).code == 0);
  REQUIRE(cli(base + " --jobs 3 --out " + (dir / "c").string(), dir).code == 0);
  const auto a = testing::slurp(dir / "a" / "report.csv");
  CHECK(!a.empty());
  CHECK(a == testing::slurp(dir / "b" / "report.csv"));
  CHECK(a == testing::slurp(dir / "c" / "report.csv"));
  CHECK(testing::slurp(dir / "a" / "summary.txt") == testing::slurp(dir / "c" / "summary.txt"));
}

TEST_CASE("generate, fit and decide agree with the library") {
  const auto dir = testing::temp_dir("cli_fit");
  const auto data = dir / "train.csv", model = dir / "model.json", cov = dir / "cov.csv";
  REQUIRE(cli("generate --set n=150 --set scenario=case2 --out " + data.string(), dir).code == 0);
  const auto g2 = cli("generate --set n=150 --set scenario=case2", dir);
  CHECK(g2.out == testing::slurp(data));

  const auto f = cli("fit " + kFast + " --data " + data.string() + " --out " + model.string(), dir);
  INFO(f.err);
  REQUIRE(f.code == 0);
  CHECK(f.out.find("arm 2:") != std::string::npos);
  CHECK(cli("validate --data " + data.string(), dir).code == 0);

  const Dataset d = load_dataset(data);
  std::string cov_text = "x1,x2\n";
  for (const auto& o : d) cov_text += format_double(o.x[0]) + "," + format_double(o.x[1]) + "\n";
  testing::spit(cov, cov_text);
  const auto dec = cli("decide --model " + model.string() + " --covariates " + cov.string(), dir);
  INFO(dec.err);
  REQUIRE(dec.code == 0);

  const SavedModel m = load_model(model);
  const auto rows = read_csv(dec.out);
  REQUIRE(rows.size() == d.size() + 1);
  CHECK(rows[0] == std::vector<std::string>{"x1", "x2", "arm", "prob0", "prob1", "prob2"});
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto& row = rows[i + 1];
    REQUIRE(row.size() == 6);
    const int arm = std::stoi(row[2]);
    CHECK(arm == decide(m.net, d[i].x));
    std::vector<double> pr{std::stod(row[3]), std::stod(row[4]), std::stod(row[5])};
    CHECK(std::abs(pr[0] + pr[1] + pr[2] - 1.0) <= 1e-9);
    CHECK(arm == argmax_first(pr));
    const auto lib = policy(m.net, d[i].x);
    for (int a = 0; a < 3; ++a) CHECK(pr[a] == lib[a]);
  }

  // one row at a time gives the same answers as the batch
  for (std::size_t i = 0; i < 5; ++i) {
    testing::spit(dir / "one.csv", "x2,x1\n" + format_double(d[i].x[1]) + "," +
                                       format_double(d[i].x[0]) + "\n");
    const auto one = cli("decide --model " + model.string() + " --covariates " +
                             (dir / "one.csv").string(), dir);
    REQUIRE(one.code == 0);
    CHECK(read_csv(one.out)[1] == rows[i + 1]);
  }

  const auto plot = cli("plot --oracle --set scenario=case2 --model " + model.string() +
                            " --grid -2.8,2.8,30 --out " + (dir / "p.svg").string(), dir);
  CHECK(plot.code == 0);
  CHECK(testing::slurp(dir / "p.svg").find("prediction") != std::string::npos);

  // covariates with fewer columns than the model expects
  testing::spit(dir / "narrow.csv", "x1\n0.5\n");
  const auto narrow = cli("decide --model " + model.string() + " --covariates " +
                              (dir / "narrow.csv").string(), dir);
  CHECK(narrow.code == 2);
}

TEST_CASE("input errors exit with status 2") {
  const auto dir = testing::temp_dir("cli_err");
  testing::spit(dir / "no_arm.csv", "y1,y2,d1,d2,x1,x2\n1,2,1,0,0.1,0.2\n");
  const auto missing = cli("fit --data " + (dir / "no_arm.csv").string() + " --out " +
                               (dir / "m.json").string(), dir);
  CHECK(missing.code == 2);
  CHECK(missing.err.find("'a'") != std::string::npos);

  std::string one_arm = "y1,y2,d1,d2,a,x1,x2\n";
  for (int i = 0; i < 20; ++i) one_arm += std::to_string(1 + i) + ",2,1,1,0,0.1,0.2\n";
  testing::spit(dir / "one_arm.csv", one_arm);
  const auto k0 = cli("fit --data " + (dir / "one_arm.csv").string() + " --out " +
                          (dir / "m.json").string(), dir);
  CHECK(k0.code == 2);
  CHECK(k0.err.find("K = 0") != std::string::npos);

  CHECK(cli("plot --oracle --grid 1,1,10 --out " + (dir / "e.svg").string(), dir).code == 2);
  CHECK(cli("plot --oracle --grid -1,1,0 --out " + (dir / "e.svg").string(), dir).code == 2);
  CHECK(cli("simulate --set bogus=1", dir).code == 2);
  CHECK(cli("simulate --set R=0", dir).code == 2);
  CHECK(cli("", dir).code == 2);
  CHECK(cli("fit", dir).code == 2);
  testing::spit(dir / "bad.json", "{\"format\": \"bitr-model\", \"version\": 7}");
  testing::spit(dir / "cov.csv", "x1,x2\n0,0\n");
  CHECK(cli("decide --model " + (dir / "bad.json").string() + " --covariates " +
                (dir / "cov.csv").string(), dir)
            .code == 2);
}

}
