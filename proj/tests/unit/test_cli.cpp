#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "ivdep/cli.hpp"
#include "ivdep/rng.hpp"
#include "ivdep/strategies.hpp"

using namespace ivdep;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
  json doc() const { return json::parse(out); }
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Result r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("ivdep_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return (path / name).string();
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kUniform =
    R"({"scenario":{"x_card":2},"p_x":["1/2","1/2"],"p_ab_given_x":[[["1/4","1/4"],["1/4","1/4"]],[["1/4","1/4"],["1/4","1/4"]]]})";

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("eval on the uniform table") {
    TempDir tmp;
    const auto input = tmp.write("u.json", kUniform);
    const auto r = run({"eval", "--input", input, "--ineq", "pearl-00"});
    REQUIRE(r.code == 0);
    const auto d = r.doc();
    CHECK(d["k_value"].get<double>() == 0.5);
    CHECK(d["violated"].get<bool>() == false);
    CHECK(d["schema_version"].get<int>() == cli::kSchemaVersion);
    CHECK(d["command"] == "eval");
    const auto e = run({"--exact", "eval", "--input", input, "--ineq", "pearl-00"});
    CHECK(e.doc()["k_value"] == "1/2");
    CHECK(e.doc()["mode"] == "exact");
  }

  TEST_CASE("eval with an interventional table") {
    TempDir tmp;
    const auto input = tmp.write("u.json", kUniform);
    const auto dos = tmp.write("do.json", R"({"p_b_do_a": [["7/10","3/10"],["1/5","4/5"]]})");
    const auto r = run({"eval", "--exact", "--input", input, "--do", dos, "--ineq", "c1"});
    REQUIRE(r.code == 0);
    CHECK(r.doc()["k_value"] == "5/4");
    CHECK(run({"eval", "--input", input, "--ineq", "c1"}).code == cli::domain_error);
  }

  TEST_CASE("validate reports violations") {
    TempDir tmp;
    const auto ok = run({"validate", "--input", tmp.write("u.json", kUniform)});
    CHECK(ok.code == 0);
    CHECK(ok.doc()["ok"] == true);
    const auto bad = run({"validate", "--input",
                          tmp.write("b.json", R"({"scenario":{"x_card":2},"p_x":[0.5,0.5],"p_ab_given_x":[[[0.5,0.25],[0.25,0.25]],[[0.25,0.25],[0.25,0.25]]]})")});
    CHECK(bad.code == cli::domain_error);
    CHECK(bad.doc()["violations"][0] == "x=0 not normalized");
  }

  TEST_CASE("mindep with certificate") {
    const auto r = run({"mindep", "--ineq", "c1", "--px", "1/2,1/2", "--alpha", "0.1716"});
    REQUIRE(r.code == 0);
    const auto d = r.doc();
    CHECK(d["dependence"].get<double>() == doctest::Approx(0.1144).epsilon(1e-12));
    CHECK(d["certificate"]["ok"] == true);
    CHECK(d["latent_q"].size() == 32);
    const auto e = run({"mindep", "--exact", "--ineq", "c1", "--px", "uniform", "--alpha", "3/10"});
    CHECK(e.doc()["dependence"] == "1/5");
    CHECK(e.doc()["dual"]["u"][0] == "2/3");
  }

  TEST_CASE("mindep writes LP files") {
    TempDir tmp;
    const auto prefix = tmp.file("p");
    REQUIRE(run({"mindep", "--ineq", "pearl-00", "--alpha", "0.2", "--dump-lp", prefix}).code == 0);
    CHECK(slurp(prefix + ".primal.lp").rfind("\\ ivdep linear program", 0) == 0);
    CHECK(slurp(prefix + ".dual.lp").find("Minimize") != std::string::npos);
  }

  TEST_CASE("curve CSV for bonet has slope 2/3") {
    TempDir tmp;
    const auto out = tmp.file("c.csv");
    REQUIRE(run({"curve", "--ineq", "bonet", "--px", "1/3,1/3,1/3", "--out", out}).code == 0);
    std::istringstream in(slurp(out));
    std::string line;
    std::getline(in, line);
    CHECK(line == "alpha,dependence,segment_slope");
    int rows = 0;
    while (std::getline(in, line)) {
      const auto c1 = line.find(',');
      const auto c2 = line.rfind(',');
      const double a = std::stod(line.substr(0, c1));
      const double m = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
      CHECK(std::stod(line.substr(c2 + 1)) == doctest::Approx(2.0 / 3.0));
      CHECK(m == doctest::Approx(2.0 * a / 3.0));
      ++rows;
    }
    CHECK(rows == 50);
  }

  TEST_CASE("adapt and infocost") {
    const auto a = run({"adapt", "--exact", "--ineq", "pearl-00", "--level", "1/10"});
    REQUIRE(a.code == 0);
    CHECK(a.doc()["statement"] == "1 - p(0,0|0) - p(0,1|1) >= -1/10");
    const auto i = run({"infocost", "--kinst", "-0.5", "--witness"});
    REQUIRE(i.code == 0);
    CHECK(i.doc()["bound_bits"].get<double>() == doctest::Approx(0.1887218755).epsilon(1e-9));
    CHECK(i.doc()["witness_mutual_information"].get<double>() ==
          doctest::Approx(i.doc()["bound_bits"].get<double>()).epsilon(1e-12));
    CHECK(run({"infocost", "--kinst", "-2"}).code == cli::domain_error);
  }

  TEST_CASE("identical inputs give byte-identical outputs") {
    const std::vector<std::string> q{"quantum", "--target", "bonet", "--seed", "3", "--px", "uniform"};
    const auto first = run(q);
    REQUIRE(first.code == 0);
    CHECK(first.out == run(q).out);
    CHECK(first.doc()["alpha"].get<double>() == doctest::Approx(1 / std::sqrt(2.0) - 0.5).epsilon(1e-6));
    CHECK(first.doc()["min_dependence"].get<double>() ==
          doctest::Approx((std::sqrt(2.0) - 1) / 3).epsilon(1e-6));

    TempDir tmp;
    const auto latent = tmp.write("l.json", run({"infocost", "--kinst", "-1/4", "--witness", "--exact"}).doc()["witness"].dump());
    const std::vector<std::string> s{"simulate", "--latent", latent, "--n", "1000", "--seed", "9", "--out", tmp.file("a.csv")};
    const auto s1 = run(s);
    REQUIRE(s1.code == 0);
    const std::string csv1 = slurp(tmp.file("a.csv"));
    CHECK(s1.out == run(s).out);
    CHECK(csv1 == slurp(tmp.file("a.csv")));
    auto s3 = s;
    s3[6] = "10";
    CHECK(run(s3).out != s1.out);
    CHECK(s1.doc()["rng"]["algorithm"] == std::string(Rng::algorithm));
  }

  TEST_CASE("simulate converges to the forward distribution") {
    Rng rng(31);
    const Scenario sc{3};
    LatentJoint<double> joint{sc, rng.simplex(num_strategies(sc))};
    TempDir tmp;
    const auto latent = tmp.write("l.json", serialize_latent(joint));
    const long n = 1000000;
    const auto r = run({"simulate", "--latent", latent, "--n", std::to_string(n), "--seed", "4"});
    REQUIRE(r.code == 0);
    const auto counts = r.doc()["counts"];
    const auto expected = forward_distribution(joint);
    for (int x = 0; x < 3; ++x) {
      double nx = 0;
      for (int a = 0; a < 2; ++a) for (int b = 0; b < 2; ++b) nx += counts[x][a][b].get<double>();
      const double px = expected.p_x[static_cast<std::size_t>(x)];
      CHECK(std::abs(nx - n * px) <= 3 * std::sqrt(n * px * (1 - px)));
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          const double p = expected.p(a, b, x);
          CHECK(std::abs(counts[x][a][b].get<double>() - nx * p) <= 3 * std::sqrt(nx * p * (1 - p)) + 1e-9);
        }
      }
    }
  }

  TEST_CASE("ivbeta on a sample file") {
    TempDir tmp;
    const auto f = tmp.write("s.csv", "x,a,b\n0,0,1\n1,1,1\n1,0,1\n1,1,1\n");
    const auto r = run({"ivbeta", "--samples", f});
    REQUIRE(r.code == 0);
    CHECK(r.doc()["beta"].get<double>() == doctest::Approx(0.75));
  }

  TEST_CASE("exit codes") {
    CHECK(run({}).code == cli::usage_error);
    CHECK(run({"bogus"}).code == cli::usage_error);
    CHECK(run({"mindep", "--ineq", "c1"}).code == cli::usage_error);
    CHECK(run({"mindep", "--ineq", "c1", "--px", "a,b", "--alpha", "0.1"}).code == cli::usage_error);
    CHECK(run({"mindep", "--ineq", "nope", "--alpha", "0.1"}).code == cli::usage_error);
    CHECK(run({"mindep", "--ineq", "c1", "--alpha", "3"}).code == cli::domain_error);
    const auto missing = run({"validate", "--input", "/nonexistent/file.json"});
    CHECK(missing.code == cli::domain_error);
    CHECK(missing.err.find("error [") != std::string::npos);
    CHECK(run({"--help"}).code == cli::success);
  }
}
