#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

namespace pdmtorus::cli {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "pdmtorus_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

const std::vector<std::string> sim_flags{"--a",  "1",   "--c",     "2",   "--u0", "0",  "--v0", "0.5",
                                         "--du0", "0.3", "--dv0", "0.1", "--t-end", "1", "--dt", "0.01"};

std::vector<std::string> with(std::vector<std::string> head, const std::vector<std::string>& tail) {
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

const std::vector<std::string> quad_flags{"--lambda", "1", "--alpha", "1", "--c1", "1", "--c2", "0"};

TEST(CliTest, UnknownCommandPrintsUsageAndExits2) {
  const auto r = call({"bogus"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(call({}).code, 2);
}

TEST(CliTest, HelpExits0) {
  const auto r = call({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("verify"), std::string::npos);
}

TEST(CliTest, MissingOrBadFlagsExit2) {
  std::vector<std::string> no_a(sim_flags.begin() + 2, sim_flags.end());
  const auto r = call(with({"torus", "simulate"}, no_a));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--a"), std::string::npos);

  auto bad = sim_flags;
  bad[1] = "inf";
  EXPECT_EQ(call(with({"torus", "simulate"}, bad)).code, 2);
  bad[1] = "1x";
  EXPECT_EQ(call(with({"torus", "simulate"}, bad)).code, 2);
  // A horn torus is rejected by the library and surfaces as bad input.
  bad[1] = "3";
  EXPECT_EQ(call(with({"torus", "simulate"}, bad)).code, 2);
  EXPECT_EQ(call(with({"torus", "simulate", "--format", "xml"}, sim_flags)).code, 2);
  EXPECT_EQ(call({"pdm", "map", "--case", "ml", "--lambda", "1", "--alpha", "1", "--c1", "1", "--c2", "0", "--x0", "0.1",
                  "--dx0", "0", "--t-end", "1", "--dt", "0.01"})
                .code,
            2);
  EXPECT_EQ(call({"verify", "--suite", "nope"}).code, 2);
}

TEST(CliTest, SimulateCsvShape) {
  const auto r = call(with({"torus", "simulate"}, sim_flags));
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream is(r.out);
  std::string line;
  int headers = 0, data = 0;
  bool seen_header = false;
  while (std::getline(is, line)) {
    if (line.rfind("#", 0) == 0) continue;
    if (!seen_header) {
      EXPECT_EQ(line, "t,u,v,du,dv,q1,q2_energy,q2_paper,lagrangian");
      seen_header = true;
      ++headers;
      continue;
    }
    ++data;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 8);
  }
  EXPECT_EQ(headers, 1);
  EXPECT_EQ(data, 101);
  EXPECT_EQ(r.out.rfind("# pdmtorus ", 0), 0u);
  EXPECT_NE(r.out.find("# a=1"), std::string::npos);
}

TEST(CliTest, CsvNumbersRoundTrip) {
  const double v = 0.1 + 0.2;
  EXPECT_EQ(std::strtod(fmt17(v).c_str(), nullptr), v);
}

TEST(CliTest, OutputsAreDeterministicAndAtomic) {
  for (const std::string fmt : {"csv", "json"}) {
    const auto p1 = scratch("a." + fmt), p2 = scratch("b." + fmt);
    ASSERT_EQ(call(with({"torus", "simulate", "--format", fmt, "--out", p1.string()}, sim_flags)).code, 0);
    ASSERT_EQ(call(with({"torus", "simulate", "--format", fmt, "--out", p2.string()}, sim_flags)).code, 0);
    EXPECT_EQ(slurp(p1), slurp(p2));
    EXPECT_FALSE(slurp(p1).empty());
    EXPECT_FALSE(fs::exists(fs::path(p1.string() + ".tmp")));
  }
  EXPECT_EQ(call(with({"torus", "simulate", "--out", "/nonexistent-dir/x.csv"}, sim_flags)).code, 2);
}

TEST(CliTest, JsonOutputsMatchSchemaKeys) {
  const auto schema = json::parse(slurp(fs::path(PDMTORUS_SOURCE_DIR) / "docs" / "output.schema.json"));
  std::vector<std::string> required = schema["required"];
  const std::vector<std::vector<std::string>> commands{
      with({"torus", "simulate"}, sim_flags),
      with({"torus", "audit-sign"}, sim_flags),
      {"pdm", "map", "--case", "quadratic", "--lambda", "0.1", "--alpha", "1", "--c1", "1", "--c2", "0", "--x0", "0.2",
       "--dx0", "0", "--t-end", "2", "--dt", "0.01"},
      with({"pdm", "match", "--case", "quadratic", "--a", "1", "--c", "2", "--q1", "1", "--x-min", "-0.5", "--x-max",
            "0.5", "--n", "5"},
           quad_flags),
      with({"quantum", "spectrum", "--model", "quadratic", "--levels", "3", "--grid-n", "800"}, quad_flags),
      with({"quantum", "residual", "--model", "quadratic", "--n", "2"}, quad_flags),
      {"verify", "--suite", "specfun"},
  };
  int i = 0;
  for (const auto& cmd : commands) {
    const auto path = scratch("out" + std::to_string(i++) + ".json");
    const auto r = call(with(cmd, {"--format", "json", "--out", path.string()}));
    ASSERT_LE(r.code, 1) << cmd[0] << " " << cmd[1] << ": " << r.err;
    const auto j = json::parse(slurp(path));
    std::vector<std::string> keys;
    for (const auto& [k, v] : j.items()) {
      keys.push_back(k);
      EXPECT_TRUE(v.is_object()) << k;
    }
    EXPECT_EQ(keys, required);
    for (const auto& [k, v] : j["verdicts"].items()) EXPECT_TRUE(v.is_string() || v.is_boolean()) << k;
  }
}

TEST(CliTest, QuadraticSpectrumJson) {
  const auto r = call(with({"quantum", "spectrum", "--model", "quadratic", "--levels", "6", "--format", "json"}, quad_flags));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  ASSERT_EQ(j["results"]["energies"].size(), 6u);
  for (const auto& name : {"analytic_paper", "analytic_audited"}) {
    ASSERT_EQ(j["results"]["references"][name].size(), 6u);
    ASSERT_EQ(j["results"]["deltas"][name].size(), 6u);
  }
  for (int n = 0; n < 6; ++n) {
    EXPECT_NEAR(j["results"]["energies"][n].get<double>(), n + 0.375, 1e-5);
    EXPECT_NEAR(j["results"]["deltas"]["analytic_paper"][n].get<double>(), 0.125, 1e-5);
  }
  EXPECT_EQ(j["params"]["grid_n"], 8000);

  const auto audited = json::parse(
      call(with({"quantum", "spectrum", "--model", "quadratic", "--levels", "2", "--formula", "audited", "--format", "json"},
                quad_flags))
          .out);
  EXPECT_FALSE(audited["results"]["references"].contains("analytic_paper"));
}

TEST(CliTest, TorusSpectrumNeedsFullPeriod) {
  const std::vector<std::string> t{"quantum", "spectrum", "--model", "torus", "--a", "1", "--c", "2", "--q1", "1", "--q2", "1"};
  EXPECT_EQ(call(with(t, {"--levels", "2", "--grid-n", "200"})).code, 0);
  EXPECT_EQ(call(with(t, {"--domain-lo", "0", "--domain-hi", "3"})).code, 2);
}

TEST(CliTest, AuditSignReference) {
  const auto r = call(with({"torus", "audit-sign"}, {"--a", "1", "--c", "2", "--u0", "0", "--v0", "0.5", "--du0", "0.3",
                                                     "--dv0", "0.1", "--t-end", "100", "--dt", "1e-3"}));
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("verdict: energy"), std::string::npos);
  // No spin: both combinations are constant, inconclusive but not the reference case.
  const auto still = call({"torus", "audit-sign", "--a", "1", "--c", "2", "--u0", "0", "--v0", "0.5", "--du0", "0",
                           "--dv0", "0.1", "--t-end", "5", "--dt", "1e-3"});
  EXPECT_EQ(still.code, 0);
  EXPECT_NE(still.out.find("inconclusive"), std::string::npos);
}

TEST(CliTest, PdmMapFooterAndMatchRows) {
  const auto m = call({"pdm", "map", "--case", "ml", "--lambda", "1", "--omega2", "1", "--c1", "1", "--c2", "0", "--x0",
                       "0.3", "--dx0", "0", "--t-end", "20", "--dt", "1e-3"});
  ASSERT_EQ(m.code, 0) << m.err;
  EXPECT_NE(m.out.find("\nt,x,dx,tau,q,energy\n"), std::string::npos);
  EXPECT_NE(m.out.find("# residual pullback="), std::string::npos);

  const std::vector<std::string> match{"pdm", "match", "--case", "quadratic", "--a", "1", "--c", "2", "--q1", "1",
                                       "--x-min", "-0.5", "--x-max", "0.5", "--n", "5", "--format", "json"};
  const auto all = json::parse(call(with(match, quad_flags)).out);
  EXPECT_EQ(all["results"]["rows"].size(), 20u);
  const auto one = json::parse(call(with(with(match, quad_flags), {"--branch", "3"})).out);
  ASSERT_EQ(one["results"]["rows"].size(), 5u);
  EXPECT_EQ(one["results"]["rows"][0]["q"].size(), 2u);
  EXPECT_LE(one["residuals"]["oracle_identity"].get<double>(), 1e-6);
  EXPECT_EQ(call(with(with(match, quad_flags), {"--branch", "++"})).code, 2);
}

TEST(CliTest, ResidualExitCodes) {
  EXPECT_EQ(call({"quantum", "residual", "--model", "ml", "--nu", "6", "--lambda", "1", "--c1", "1", "--c2", "0"}).code, 0);
  EXPECT_EQ(call({"quantum", "residual", "--model", "ml", "--nu", "2", "--lambda", "1", "--omega2", "1", "--c1", "1",
                  "--c2", "0"})
                .code,
            1);
  EXPECT_EQ(call(with({"quantum", "residual", "--model", "quadratic", "--n", "5"}, quad_flags)).code, 0);
  EXPECT_EQ(call(with({"quantum", "residual", "--model", "quadratic", "--n", "5", "--formula", "paper"}, quad_flags)).code, 1);
  EXPECT_EQ(call(with({"quantum", "residual", "--model", "torus", "--n", "1"}, quad_flags)).code, 2);
}

TEST(CliTest, VerifySuites) {
  const auto s = call({"verify", "--suite", "specfun"});
  EXPECT_EQ(s.code, 0);
  EXPECT_NE(s.out.find("PASS 11"), std::string::npos);
  const auto all = call({"verify", "--suite", "all"});
  EXPECT_EQ(all.code, 0) << all.out;
  EXPECT_NE(all.out.find("ALL PASS"), std::string::npos);
}

}  // namespace
}  // namespace pdmtorus::cli
