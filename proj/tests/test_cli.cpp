#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <unistd.h>

#include "cli.hpp"
#include "oracles.hpp"
#include "streamdelay/io.hpp"

namespace fs = std::filesystem;
namespace cli = streamdelay::cli;

namespace {

struct Run
{
  int         status;
  std::string out;
  std::string err;
};

Run
run(std::vector<std::string> args)
{
  args.insert(args.begin(), "streamdelay");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int status = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

std::string
slurp(const fs::path& path)
{
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::vector<std::string>>
csv(const std::string& text)
{
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);)
  {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

struct TempDir
{
  TempDir() : path(fs::temp_directory_path() / ("streamdelay-cli-" + std::to_string(::getpid())))
  {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
  fs::path path;
};

} // namespace

TEST_CASE("tradeoff: no-feedback sweep")
{
  const auto r = run({"tradeoff", "--no-feedback", "-p", "0.6", "--r-grid", "0.01:0.59:0.01"});
  REQUIRE(r.status == 0);
  const auto rows = csv(r.out);
  REQUIRE(rows.size() == 60);
  CHECK(rows[0] == std::vector<std::string>{"provenance", "tau", "lambda"});
  for (std::size_t i = 1; i < rows.size(); ++i)
  {
    const double rate = std::stod(rows[i][1]);
    CHECK(rate == doctest::Approx(0.01 * static_cast<double>(i)).epsilon(1e-12));
    CHECK(std::stod(rows[i][2]) == doctest::Approx(oracle::kl(rate, 0.6)).epsilon(1e-11));
  }
}

TEST_CASE("tradeoff: single scheme, ARQ and suggested family")
{
  const auto s = run({"tradeoff", "--scheme", "1,0,3,0", "-p", "0.6"});
  REQUIRE(s.status == 0);
  const auto rows = csv(s.out);
  REQUIRE(rows.size() == 2);
  CHECK(std::stod(rows[1][1]) == doctest::Approx(0.5676).epsilon(1e-11));
  CHECK(std::stod(rows[1][2]) == doctest::Approx(-std::log(1 - 0.6864) / 4).epsilon(1e-11));
  CHECK(std::stod(rows[1][2]) == doctest::Approx(0.289909).epsilon(1e-6));

  const auto g = run({"tradeoff", "--suggested", "-d", "10", "-p", "0.6"});
  REQUIRE(g.status == 0);
  const auto grows = csv(g.out);
  REQUIRE(grows.size() == 11);
  for (int a = 1; a <= 10; ++a)
  {
    CHECK(std::stod(grows[a][1]) == doctest::Approx(oracle::suggested_tau(0.6, 10, a)).epsilon(1e-11));
    CHECK(std::stod(grows[a][2]) == doctest::Approx(oracle::suggested_lambda(0.6, 10, a)).epsilon(1e-11));
  }

  const auto combined = run({"tradeoff", "--arq", "--no-feedback", "-p", "0.6"});
  REQUIRE(combined.status == 0);
  const auto frows = csv(combined.out);
  CHECK(frows[1][0] == "ARQ/d=1");
  CHECK(frows.size() == 2 + 59);
}

TEST_CASE("envelope command")
{
  const auto two = run({"envelope", "-d", "2", "-p", "0.6"});
  REQUIRE(two.status == 0);
  int on = 0;
  for (const auto& row : csv(two.out)) on += row.back() == "1";
  CHECK(on == 2);

  const auto three = run({"envelope", "-d", "3", "-p", "0.6"});
  REQUIRE(three.status == 0);
  on = 0;
  bool saw_off = false;
  for (const auto& row : csv(three.out))
  {
    on += row.back() == "1";
    if (row[0] == "[1 2 0]") saw_off = row.back() == "0";
  }
  CHECK(on == 3);
  CHECK(saw_off);

  const auto one = run({"envelope", "-d", "1", "-p", "0.6"});
  REQUIRE(one.status == 0);
  const auto rows = csv(one.out);
  REQUIRE(rows.size() == 2);
  CHECK(std::stod(rows[1][1]) == doctest::Approx(0.6));
  CHECK(std::stod(rows[1][2]) == doctest::Approx(-std::log(0.4)).epsilon(1e-11));
  CHECK(rows[1][3] == "1");
}

TEST_CASE("cost curves")
{
  const auto r = run({"cost-curves", "-p", "0.6", "--d-min", "1", "--d-max", "20"});
  REQUIRE(r.status == 0);
  const auto rows = csv(r.out);
  REQUIRE(rows.size() == 21);
  CHECK(std::stod(rows[1][1]) == doctest::Approx(0.6));
  CHECK(std::stod(rows[1][2]) == doctest::Approx(0.91629).epsilon(1e-5));
  CHECK(std::stod(rows[1][3]) == doctest::Approx(0.6));
  CHECK(std::stod(rows[1][4]) == doctest::Approx(0.91629).epsilon(1e-5));
  CHECK(std::stod(rows[2][1]) == doctest::Approx(0.42).epsilon(1e-11));
  CHECK(std::stod(rows[10][4]) == doctest::Approx(0.091629).epsilon(1e-5));
}

TEST_CASE("simulate commands write reports and histograms")
{
  TempDir tmp;
  const auto arq = run({"simulate", "arq", "-p", "0.6", "-n", "1000000", "--seed", "7", "-o", tmp.file("arq.json"),
                        "--hist", tmp.file("arq.csv")});
  REQUIRE(arq.status == 0);
  const auto report = nlohmann::json::parse(slurp(tmp.file("arq.json")));
  CHECK(std::abs(report["tau_hat"].get<double>() - 0.6) <= 0.002);
  CHECK(report["engine"] == "arq");

  const auto scheme = run({"simulate", "scheme", "--scheme", "1,1,1", "-p", "0.6", "--blocks", "100000", "--seed",
                           "7", "-o", tmp.file("scheme.json")});
  REQUIRE(scheme.status == 0);
  const auto sj = nlohmann::json::parse(slurp(tmp.file("scheme.json")));
  CHECK(std::abs(sj["p_d_hat"].get<double>() - 0.6) <= 0.005);

  const auto mix = run({"simulate", "mixture", "--mixture", "2,0;1,1", "--weights", "0.5,0.5", "-p", "0.6",
                        "--blocks", "20000", "-o", tmp.file("mix.json")});
  REQUIRE(mix.status == 0);

  const auto fr = run({"simulate", "full-rank", "-r", "0.3", "-p", "0.6", "-n", "200000", "--seed", "7", "-o",
                       tmp.file("fr.json"), "--hist", tmp.file("fr.csv")});
  REQUIRE(fr.status == 0);
  const auto fj = nlohmann::json::parse(slurp(tmp.file("fr.json")));
  CHECK(std::abs(fj["tau_hat"].get<double>() - 0.3) <= 0.005);
  CHECK(fj["exponent"]["method"] == "tail-regression");

  const auto split = run({"simulate", "full-rank", "--schedule", "0.2:1000,0.4:1000", "-p", "0.6"});
  REQUIRE(split.status == 0);
  CHECK(nlohmann::json::parse(split.out)["slots"] == 2000);
}

TEST_CASE("every emitted file passes validation and reruns are byte-identical")
{
  TempDir tmp;
  const std::vector<std::vector<std::string>> commands = {
    {"tradeoff", "--arq", "--no-feedback", "-p", "0.6"},
    {"tradeoff", "--scheme", "1,0,3,0", "--suggested", "-d", "6", "-p", "0.6", "--format", "json"},
    {"envelope", "-d", "4", "-p", "0.6"},
    {"envelope", "-d", "4", "-p", "0.6", "--format", "json"},
    {"cost-curves", "-p", "0.3"},
    {"simulate", "scheme", "--scheme", "1,0,3,0", "-p", "0.6", "--blocks", "5000", "--seed", "3"},
    {"simulate", "mixture", "--mixture", "3,0,0;1,1,1", "--weights", "0.25,0.75", "-p", "0.6", "--blocks", "5000"},
    {"simulate", "arq", "-p", "0.6", "-n", "20000", "--seed", "3"},
    {"simulate", "full-rank", "-r", "0.3", "-p", "0.6", "-n", "50000", "--seed", "3"},
  };
  std::vector<std::string> files;
  for (std::size_t i = 0; i < commands.size(); ++i)
  {
    for (const char* pass : {"a", "b"})
    {
      auto args = commands[i];
      const auto stem = tmp.file(std::to_string(i) + pass);
      args.insert(args.end(), {"-o", stem + ".out"});
      if (args[0] == "simulate") args.insert(args.end(), {"--hist", stem + ".hist.csv"});
      const auto r = run(args);
      INFO(args[0] << " " << args[1] << ": " << r.err);
      REQUIRE(r.status == 0);
      files.push_back(stem + ".out");
      if (args[0] == "simulate") files.push_back(stem + ".hist.csv");
    }
    const auto stem = tmp.file(std::to_string(i));
    CHECK(slurp(stem + "a.out") == slurp(stem + "b.out"));
    if (commands[i][0] == "simulate") CHECK(slurp(stem + "a.hist.csv") == slurp(stem + "b.hist.csv"));
  }
  std::vector<std::string> args = {"validate"};
  args.insert(args.end(), files.begin(), files.end());
  const auto v = run(args);
  INFO(v.err);
  CHECK(v.status == 0);
  CHECK(v.err.empty());
}

TEST_CASE("validation catches damaged files")
{
  TempDir tmp;
  const auto path = tmp.file("bad.csv");
  {
    std::ofstream(path) << "t,count,ccdf\n1,10,0.4\n2,10,0\n";
  }
  auto r = run({"validate", path});
  CHECK(r.status == 3);
  CHECK(r.err.find("disagrees") != std::string::npos);

  {
    std::ofstream(path) << "scheme,tau,lambda,on_envelope\n[2 0],0.42,0.9,1\n[1 1],0.6,0.45,1\n[0 2],0.5,0.9,0\n";
  }
  r = run({"validate", path});
  CHECK(r.status == 3);
  CHECK(r.err.find("above the envelope") != std::string::npos);

  {
    std::ofstream(path) << "what,is,this\n";
  }
  CHECK(run({"validate", path}).status == 3);
  CHECK(run({"validate", tmp.file("missing.csv")}).status == 3);
}

TEST_CASE("exit codes and messages")
{
  auto r = run({});
  CHECK(r.status == 2);
  r = run({"tradeoff", "-p", "0.6"});
  CHECK(r.status == 2);
  r = run({"tradeoff", "--scheme", "1,0,3,0"});
  CHECK(r.status == 2);
  r = run({"tradeoff", "--scheme", "1,0,3", "-p", "0.6"});
  CHECK(r.status == 3);
  CHECK(r.err.find("--scheme") != std::string::npos);
  r = run({"tradeoff", "--arq", "-p", "1.5"});
  CHECK(r.status == 3);
  CHECK(r.err.find("-p") != std::string::npos);
  r = run({"tradeoff", "--no-feedback", "-p", "0.6", "--r-grid", "0.1:0.2"});
  CHECK(r.status == 2);
  CHECK(r.err.find("--r-grid") != std::string::npos);
  r = run({"tradeoff", "--arq", "-p", "0.6", "--format", "xml"});
  CHECK(r.status == 2);
  CHECK(r.err.find("--format") != std::string::npos);
  r = run({"envelope", "-d", "13", "-p", "0.6"});
  CHECK(r.status == 3);
  CHECK(r.err.find("-d") != std::string::npos);
  r = run({"simulate", "warp", "-p", "0.6"});
  CHECK(r.status == 2);
  r = run({"simulate", "scheme", "-p", "0.6"});
  CHECK(r.status == 2);
  CHECK(r.err.find("--scheme") != std::string::npos);
  r = run({"simulate", "full-rank", "-p", "0.6"});
  CHECK(r.status == 2);
  CHECK(r.err.find("-r") != std::string::npos);
  r = run({"simulate", "mixture", "--mixture", "2,0;1,1", "--weights", "0.5,0.6", "-p", "0.6"});
  CHECK(r.status == 3);
  CHECK(r.err.find("--weights") != std::string::npos);
  r = run({"cost-curves", "-p", "0.6", "--d-min", "5", "--d-max", "2"});
  CHECK(r.status == 3);
  CHECK(r.err.find("--d-max") != std::string::npos);
  r = run({"--help"});
  CHECK(r.status == 0);
}
