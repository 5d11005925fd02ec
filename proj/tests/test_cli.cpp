#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include <json.hpp>

#include "common.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Run {
  int status = 0;
  std::string out;
};

fs::path work_dir() {
  fs::path d = fs::temp_directory_path() / "pfav_test_cli";
  fs::create_directories(d);
  return d;
}

Run run_cli(const std::string& args) {
  fs::path out = work_dir() / "stdout.txt";
  std::string cmd = std::string(PFAV_BINARY) + " " + args + " > " + out.string() + " 2>&1";
  int rc = std::system(cmd.c_str());
  Run r;
  r.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  return r;
}

std::string path(const std::string& name) {
  fs::path p = work_dir() / name;
  fs::remove(p);
  return p.string();
}

json last_json_line(const std::string& s) {
  std::istringstream in(s);
  std::string line, last;
  while (std::getline(in, line))
    if (!line.empty() && line[0] == '{') last = line;
  return json::parse(last);
}

}  // namespace

TEST_CASE("fields lists the configuration") {
  auto r = run_cli("fields");
  CHECK(r.status == 0);
  CHECK(r.out.find("Qzeta5") != std::string::npos);
  CHECK(r.out.find("Qsqrt2") != std::string::npos);
}

TEST_CASE("search-real, table and verify") {
  std::string out = path("real.jsonl");
  auto r = run_cli("search-real --field Qsqrt2 --k 3 --rho0 2 --rmin 1000 --rmax 100000 --out " + out);
  REQUIRE(r.status == 0);
  CHECK(last_json_line(r.out).at("count") == 1346);
  auto t = run_cli("table --in " + out + " --grid 1.5:2:0.5 --predict J --format csv");
  REQUIRE(t.status == 0);
  CHECK(t.out.find("1.5,15,") != std::string::npos);
  CHECK(t.out.find("2.0,1346,") != std::string::npos);
  auto v = run_cli("verify --in " + out);
  CHECK(v.status == 0);

  std::ifstream in(out);
  std::string damaged = path("damaged.jsonl"), line;
  std::ofstream o(damaged);
  bool done = false;
  while (std::getline(in, line)) {
    json j = json::parse(line);
    if (!done && j.value("type", "") == "triple") {
      j["p"] = j["p"].get<std::uint64_t>() + 2;
      done = true;
    }
    o << j.dump() << "\n";
  }
  o.close();
  CHECK(run_cli("verify --in " + damaged).status == 1);
}

TEST_CASE("sharded search-cm merges to the unsharded result") {
  std::string base = "search-cm --field Qzeta5 --k 2 --rho0 3 --rmin 1000 --rmax 6000";
  std::string whole = path("whole.jsonl"), s1 = path("s1.jsonl"), s2 = path("s2.jsonl"), merged = path("m.jsonl");
  auto w = run_cli(base + " --out " + whole);
  REQUIRE(w.status == 0);
  CHECK(run_cli(base + " --shard 1/2 --chunk 500 --out " + s1).status == 0);
  CHECK(run_cli(base + " --shard 2/2 --chunk 500 --out " + s2).status == 0);
  auto m = run_cli("merge --in " + s1 + " --in " + s2 + " --out " + merged);
  REQUIRE(m.status == 0);
  CHECK(last_json_line(m.out).at("count") == last_json_line(w.out).at("count"));
  CHECK(run_cli(base + " --shard 2/2 --chunk 500 --resume --out " + s2).status == 0);

  std::string other = path("other.jsonl");
  CHECK(run_cli("search-cm --field Qzeta5 --k 2 --rho0 2 --rmin 1000 --rmax 6000 --shard 2/2 --out " + other).status ==
        0);
  auto bad = run_cli("merge --in " + s1 + " --in " + other + " --out " + path("bad.jsonl"));
  CHECK(bad.status == 3);
  CHECK(last_json_line(bad.out).at("error").at("kind") == "manifest_mismatch");
}

TEST_CASE("predict and cluster") {
  auto p = run_cli("predict --formula J --field Qsqrt2 --k 3 --rho0 2 --rmin 1000 --rmax 100000 --format jsonl");
  REQUIRE(p.status == 0);
  CHECK(std::stod(last_json_line(p.out).at("value").get<std::string>()) == doctest::Approx(1288.45).epsilon(5e-3));
  auto f = run_cli("predict --formula feasibility --g 2 --k 5 --rho0 2.5 --mode fixed_cm --format jsonl");
  REQUIRE(f.status == 0);
  CHECK(last_json_line(f.out).at("result") == "infinite_expected");
  auto c = run_cli("cluster --field Qzeta7plus --r 1051 --p 307");
  CHECK(c.status == 0);
  CHECK(run_cli("family --name BN --wmin -50 --wmax 50").status == 0);
}

TEST_CASE("usage errors") {
  CHECK(run_cli("search-cm --field Qi").status == 2);
  CHECK(run_cli("search-cm --field Nope --k 2 --rho0 2 --rmin 10 --rmax 20").status != 0);
  CHECK(run_cli("predict --formula asymptote --field Qzeta5 --k 2 --rho0 1 --x 1e6").status != 0);
}
