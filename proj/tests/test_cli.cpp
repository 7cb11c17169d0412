#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"

using namespace shiftconv::cli;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "shiftconv");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

// JSON output without the config header.
std::vector<std::string> body(const std::string& s) {
  auto l = lines(s);
  l.erase(l.begin());
  return l;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("shiftconv_cli_" + name);
}

}  // namespace

TEST_CASE("optimize pipeline") {
  const auto r = invoke({"optimize", "--paper-pipeline"});
  CHECK(r.code == kPass);
  CHECK(r.out.find("D = Q^{2/3}") != std::string::npos);
  CHECK(r.out.find("Q = X^{6/11}") != std::string::npos);
  CHECK(r.out.find("exponent 21/22") != std::string::npos);

  const auto j = invoke({"optimize", "--pipeline", "--format", "json"});
  const auto row = nlohmann::json::parse(lines(j.out).at(1));
  CHECK(row["exponent"] == "21/22");

  const auto custom = invoke({"optimize", "--terms", "E + X E^-1", "--var", "E"});
  CHECK(custom.out.find("optimum E = X^{1/2}") != std::string::npos);
}

TEST_CASE("verify identities") {
  const auto r = invoke({"verify-identities", "--max-modulus", "300", "--exhaustive-max", "20", "--samples", "20"});
  CHECK(r.code == kPass);
  CHECK(r.out.find("PASS S-factorization") != std::string::npos);
  CHECK(r.out.find("PASS T-multiplicativity") != std::string::npos);
}

TEST_CASE("suite quick") {
  const auto r = invoke({"suite", "--quick"});
  CHECK(r.code == kPass);
  CHECK(r.out.find("[FAIL]") == std::string::npos);
  const auto only = invoke({"suite", "--quick", "--only", "3,9", "--format", "json"});
  CHECK(only.code == kPass);
  CHECK(lines(only.out).size() == 4);
}

TEST_CASE("exit codes") {
  CHECK(invoke({}).code == kUsage);
  CHECK(invoke({"no-such-command"}).code == kUsage);
  CHECK(invoke({"kloosterman", "--bogus", "1"}).code == kUsage);
  CHECK(invoke({"kloosterman", "--c", "seven"}).code == kUsage);
  CHECK(invoke({"kloosterman", "--format", "xml"}).code == kUsage);
  CHECK(invoke({"kloosterman", "--c", "0"}).code == kRange);
  CHECK(invoke({"kloosterman", "--c", "-5"}).code == kRange);
  CHECK(invoke({"voronoi", "--q", "6", "--a", "3", "--Y", "500"}).code == kRange);
  CHECK(invoke({"baby-sums", "--c", "15", "--d", "4"}).code == kRange);
  CHECK(invoke({"jutila", "--Q", "2"}).code == kRange);
  CHECK(invoke({"suite", "--only", "11"}).code == kRange);
  CHECK(invoke({"kloosterman", "--workers", "0"}).code == kRange);
  CHECK(invoke({"--help"}).code == kPass);
}

TEST_CASE("header carries the resolved config") {
  const auto r = invoke({"kloosterman", "--m", "3", "--n", "5", "--c", "101", "--format", "csv"});
  const auto l = lines(r.out);
  REQUIRE(l.size() == 3);
  CHECK(l[0].rfind("# config: ", 0) == 0);
  const auto config = nlohmann::json::parse(l[0].substr(10));
  CHECK(config["params"]["c"] == 101);
  CHECK(config["seed"] == 0);
  CHECK(l[1].find("re") != std::string::npos);
  CHECK(r.code == kPass);  // Weil bound at a prime
}

TEST_CASE("replay reproduces values") {
  const auto first = invoke({"correlation", "--hi", "150", "--tuples", "4", "--seed", "11", "--format", "json"});
  REQUIRE(first.code == kPass);
  const auto path = temp_file("replay.jsonl");
  std::ofstream(path) << first.out;
  const auto again = invoke({"--replay", path.string()});
  CHECK(again.code == kPass);
  CHECK(again.out == first.out);

  const auto other_seed = invoke({"--replay", path.string(), "--seed", "12"});
  CHECK(body(other_seed.out) != body(first.out));
  std::filesystem::remove(path);
}

TEST_CASE("worker count changes nothing but the header") {
  for (const auto& cmd : std::vector<std::vector<std::string>>{
           {"correlation", "--hi", "200", "--tuples", "5"},
           {"verify-identities", "--max-modulus", "60", "--exhaustive-max", "15", "--samples", "10"},
           {"voronoi", "--q-max", "4", "--Y", "500"}}) {
    auto one = cmd, four = cmd;
    one.insert(one.end(), {"--format", "json", "--workers", "1"});
    four.insert(four.end(), {"--format", "json", "--workers", "4"});
    CHECK(body(invoke(one).out) == body(invoke(four).out));
  }
}

TEST_CASE("precedence: flags over config file over environment") {
  const auto path = temp_file("config.txt");
  std::ofstream(path) << "# sweep\nhi = 150\ntuples=3\nworkers = 2\n";
  ::setenv("SHIFTCONV_WORKERS", "3", 1);
  const auto from_env = invoke({"correlation", "--hi", "100", "--tuples", "2", "--format", "json"});
  CHECK(nlohmann::json::parse(lines(from_env.out).at(0))["config"]["workers"] == 3);

  const auto r = invoke({"correlation", "--config", path.string(), "--tuples", "4", "--format", "json"});
  const auto config = nlohmann::json::parse(lines(r.out).at(0))["config"];
  CHECK(config["params"]["hi"] == 150);
  CHECK(config["params"]["tuples"] == 4);
  CHECK(config["workers"] == 2);
  ::unsetenv("SHIFTCONV_WORKERS");

  std::ofstream(path) << "nonsense line\n";
  CHECK(invoke({"correlation", "--config", path.string()}).code == kUsage);
  std::filesystem::remove(path);
}

TEST_CASE("cache directory") {
  const auto dir = temp_file("cache");
  std::filesystem::remove_all(dir);
  const auto a = invoke({"coeffs", "--kind", "sym2", "--n", "500", "--print", "5", "--cache-dir", dir.string()});
  CHECK(a.code == kPass);
  CHECK(std::filesystem::exists(dir));
  const auto b = invoke({"coeffs", "--kind", "sym2", "--n", "500", "--print", "5", "--cache-dir", dir.string()});
  CHECK(body(a.out) == body(b.out));
  std::filesystem::remove_all(dir);
}

TEST_CASE("shifted convolution output") {
  const auto all = invoke({"shifted-conv", "--X", "64", "--format", "csv"});
  const auto l = lines(all.out);
  CHECK(l.at(1) == "abs,h,im,re");
  CHECK(l.size() == 2 + 2 * 192 + 1);
  const auto one = invoke({"shifted-conv", "--X", "64", "--h", "5", "--format", "json"});
  const auto direct = nlohmann::json::parse(lines(one.out).at(1));
  bool found = false;
  for (std::size_t i = 2; i < l.size(); ++i) {
    std::istringstream cells(l[i]);
    std::string abs, h, im, re;
    std::getline(cells, abs, ',');
    std::getline(cells, h, ',');
    std::getline(cells, im, ',');
    std::getline(cells, re, ',');
    if (h != "5") continue;
    found = true;
    CHECK(std::stod(re) == doctest::Approx(direct["re"].get<double>()).epsilon(1e-9));
    CHECK(std::stod(im) == doctest::Approx(direct["im"].get<double>()).epsilon(1e-9).scale(1.0));
  }
  CHECK(found);
}
