#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "doctest.h"
#include "mothergraph/cli.hpp"

using namespace mg;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "mothergraph");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mothergraph_cli_" + name);
  fs::remove_all(p);
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string l; std::getline(ss, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("digest and number formatting") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(format_number(1.0 / 3) == "0.333333333333");
  CHECK(format_number(63) == "63");
}

TEST_CASE("graph subcommand") {
  const std::string dir = scratch("graph");
  Run r = run({"graph", "--d", "0", "--m", "2", "--n", "3", "--format", "edges", "--out", dir});
  REQUIRE(r.code == kExitOk);
  const auto edges = lines(slurp(dir + "/edges.csv"));
  CHECK(edges.front() == "u,v,conductance");
  CHECK(edges.size() == 8);  // header + 2^3 - 1 path edges
  const auto manifest = nlohmann::json::parse(slurp(dir + "/manifest.json"));
  CHECK(manifest["subcommand"] == "graph");
  CHECK(manifest["outputs"][0]["sha256"] == sha256_hex(slurp(dir + "/edges.csv")));
  const std::string first = slurp(dir + "/manifest.json");
  REQUIRE(run({"graph", "--d", "0", "--m", "2", "--n", "3", "--format", "edges", "--out", dir}).code == kExitOk);
  CHECK(slurp(dir + "/manifest.json") == first);

  const std::string zero = scratch("graph0");
  REQUIRE(run({"graph", "--d", "1", "--m", "3", "--n", "0", "--out", zero}).code == kExitOk);
  CHECK(fs::exists(zero + "/loops.csv"));
  CHECK_FALSE(fs::exists(zero + "/edges.csv"));

  const std::string dot = scratch("dot");
  REQUIRE(run({"graph", "--d", "0", "--m", "2", "--n", "2", "--format", "dot", "--out", dot}).code == kExitOk);
  CHECK(slurp(dot + "/G_d0_m2_n2.dot").rfind("graph G_d0_m2_n2 {", 0) == 0);

  CHECK(run({"graph", "--d", "0", "--m", "2", "--n", "2", "--format", "svg"}).code == kExitUsage);
  CHECK(run({"graph", "--d", "0", "--m", "9", "--n", "2", "--out", dot}).code == kExitUsage);
}

TEST_CASE("resistance subcommand") {
  const std::string dir = scratch("res");
  Run r = run({"resistance", "--d", "0", "--m", "2", "--pair", "root-antiroot", "--n", "1:6", "--out", dir,
               "--plot-data"});
  REQUIRE(r.code == kExitOk);
  const auto prof = lines(slurp(dir + "/profile.csv"));
  REQUIRE(prof.size() == 7);
  CHECK(prof[0] == "n,value,residual,iters");
  const char* expect[] = {"1", "3", "7", "15", "31", "63"};
  for (int i = 0; i < 6; ++i) CHECK(prof[i + 1].substr(prof[i + 1].find(',') + 1).rfind(std::string(expect[i]) + ",", 0) == 0);
  CHECK(fs::exists(dir + "/profile.dat"));
  CHECK(r.out.find("transience=not-transience-consistent") != std::string::npos);

  const std::string set = scratch("res_set");
  CHECK(run({"resistance", "--d", "0", "--m", "3", "--pair", "set-antiroots", "--n", "1:4", "--out", set}).code ==
        kExitOk);
  CHECK(run({"resistance", "--d", "0", "--m", "2", "--pair", "nope", "--n", "1:3", "--out", set}).code == kExitUsage);
  CHECK(run({"resistance", "--d", "0", "--m", "2", "--n", "5:3", "--out", set}).code == kExitUsage);
  CHECK(run({"resistance", "--d", "3", "--m", "2", "--n", "6", "--tol", "0", "--out", set}).code == kExitSolver);
}

TEST_CASE("flow subcommand") {
  const std::string dir = scratch("flow");
  CHECK(run({"flow", "--d", "3", "--dprime", "0", "--m", "2", "--n", "8", "--gamma", "auto", "--out", dir}).code ==
        kExitUsage);
  const std::string res = scratch("flow_profile");
  REQUIRE(run({"resistance", "--d", "3", "--m", "2", "--n", "1:8", "--out", res}).code == kExitOk);
  Run r = run({"flow", "--d", "3", "--dprime", "0", "--m", "2", "--n", "8", "--gamma", "auto", "--profile",
               res + "/profile.csv", "--out", dir});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find("divergence_ok=true") != std::string::npos);
  CHECK(r.out.find("thompson_ok=true") != std::string::npos);
  CHECK(r.out.find("energy=") != std::string::npos);
  CHECK(r.out.find("rhs=") != std::string::npos);
  CHECK(lines(slurp(dir + "/stages.csv")).front() == "kind,stage,reversed,energy,bound,overlap,sources,targets");
  const Run c = run({"flow", "--d", "3", "--m", "2", "--n", "7", "--gamma", "const:1", "--terminals", "0,5", "--out",
                     scratch("flow_const")});
  CHECK(c.code == kExitOk);
  CHECK(run({"flow", "--d", "3", "--m", "2", "--n", "7", "--gamma", "fast", "--out", dir}).code == kExitUsage);
  CHECK(run({"flow", "--d", "3", "--m", "2", "--n", "7", "--gamma", "const:1", "--terminals", "4,4", "--out", dir})
            .code == kExitUsage);
}

TEST_CASE("walk subcommand") {
  CHECK(run({"walk", "--d", "2", "--m", "2", "--steps", "5", "--trials", "1"}).code == kExitUsage);
  const std::string empty = scratch("walk0");
  REQUIRE(run({"walk", "--d", "4", "--m", "2", "--steps", "10", "--trials", "0", "--seed", "1", "--out", empty})
              .code == kExitOk);
  CHECK(slurp(empty + "/trials.jsonl").empty());

  const std::string w = scratch("walk_weights");
  const Run r = run({"walk", "--d", "2", "--m", "2", "--mode", "schreier", "--steps", "50", "--trials", "4",
                     "--seed", "3", "--weights", "1,1,1,1", "--out", w});
  REQUIRE(r.code == kExitOk);
  CHECK(r.err.find("normalized") != std::string::npos);
  CHECK(lines(slurp(w + "/trials.jsonl")).size() == 4);
  CHECK(run({"walk", "--d", "2", "--m", "2", "--steps", "5", "--trials", "1", "--seed", "1", "--weights", "1,x",
             "--out", w})
            .code == kExitUsage);

  // Golden summary; identical under different thread counts.
  const std::string a = scratch("walk_a"), b = scratch("walk_b");
  REQUIRE(run({"--threads", "1", "walk", "--d", "4", "--m", "2", "--mode", "group", "--steps", "2000", "--trials",
               "200", "--seed", "42", "--out", a})
              .code == kExitOk);
  REQUIRE(run({"--threads", "4", "walk", "--d", "4", "--m", "2", "--mode", "group", "--steps", "2000", "--trials",
               "200", "--seed", "42", "--out", b})
              .code == kExitOk);
  CHECK(slurp(a + "/trials.jsonl") == slurp(b + "/trials.jsonl"));
  CHECK(slurp(a + "/manifest.json") == slurp(b + "/manifest.json"));
  const auto summary = nlohmann::json::parse(slurp(a + "/summary.json"));
  CHECK(summary["trivial"] == 48);
  CHECK(summary["nontrivial"] == 151);
  CHECK(summary["unknown"] == 1);
  const auto first = nlohmann::json::parse(lines(slurp(a + "/trials.jsonl")).front());
  for (const char* key : {"trial", "steps", "verdictTrace", "stabilizationTime", "returns"}) CHECK(first.contains(key));

  const std::string h = scratch("walk_h");
  const Run hr = run({"walk", "--d", "4", "--m", "2", "--mode", "harmonic", "--steps", "300", "--trials", "20",
                      "--seed", "7", "--out", h});
  REQUIRE(hr.code == kExitOk);
  CHECK(hr.out.find("separation=") != std::string::npos);
}

TEST_CASE("degree subcommand") {
  Run r = run({"degree", "--gen", "lam:11:():(01)", "--depth", "10"});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find("degree=2\n") != std::string::npos);
  CHECK(r.out.find("agree=true") != std::string::npos);
  r = run({"degree", "--gen", ""});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("no active states") != std::string::npos);
  r = run({"degree", "--gen", "lam:1x:()"});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("position 5") != std::string::npos);
}

TEST_CASE("resource cap and meta flags") {
  setenv("MOTHERGRAPH_MAX_VERTICES", "100", 1);
  CHECK(run({"graph", "--d", "0", "--m", "2", "--n", "8", "--out", scratch("cap")}).code == kExitCap);
  unsetenv("MOTHERGRAPH_MAX_VERTICES");
  CHECK(run({"--version"}).code == kExitOk);
  CHECK(run({"--help"}).code == kExitOk);
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
}
