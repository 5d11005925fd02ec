#include <filesystem>

#include "common.hpp"
#include "pfav/records.hpp"
#include "pfav/search_real.hpp"

using namespace pfav;
namespace fs = std::filesystem;

namespace {

RunManifest manifest(int shard) {
  RunManifest m;
  m.command = "search-cm";
  m.spec = {{"field", "Qi"}, {"k", 3}, {"rho0", "2"}, {"rmin", 100}, {"rmax", 2000}};
  m.shard_index = shard;
  m.shard_count = 2;
  m.code_version = "test";
  m.field_digest = registry().digest();
  m.conventions = default_conventions();
  m.started = "2026-01-01T00:00:00Z";
  return m;
}

fs::path temp_file(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "pfav_test_records";
  fs::create_directories(dir);
  fs::path p = dir / name;
  fs::remove(p);
  return p;
}

SearchResult qi_run(u64 a, u64 b) {
  CmSearchSpec s;
  s.k = 3;
  s.rho0 = 2;
  s.rmin = a;
  s.rmax = b;
  return search_fixed_cm(cm_field(registry(), "Qi"), s);
}

}  // namespace

TEST_CASE("manifest and triple round trips") {
  RunManifest m = manifest(1);
  RunManifest back = manifest_from_json(json::parse(manifest_to_json(m).dump()));
  CHECK(back.same_run(m));
  CHECK(back.shard_index == 1);
  RunManifest other = manifest(2);
  other.started = "later";
  CHECK(other.same_run(m));
  other.spec["k"] = 4;
  CHECK_FALSE(other.same_run(m));

  auto res = qi_run(100, 2000);
  REQUIRE(!res.triples.empty());
  for (const auto& t : res.triples) {
    WeilTriple u = triple_from_json(json::parse(triple_to_json(t).dump()));
    CHECK(!(u < t));
    CHECK(!(t < u));
    CHECK(u.witness == t.witness);
    CHECK(u.source == t.source);
    CHECK(u.rho == doctest::Approx(t.rho).epsilon(1e-6));
  }
}

TEST_CASE("shard files, resume and merge") {
  auto a = qi_run(100, 1000), b = qi_run(1001, 2000), full = qi_run(100, 2000);
  fs::path p1 = temp_file("s1.jsonl"), p2 = temp_file("s2.jsonl");
  {
    ShardWriter w(p1.string(), manifest(1), false);
    w.write(a.triples);
    w.checkpoint(1000);
    w.finish({{"count", a.count()}});
  }
  {
    ShardWriter w(p2.string(), manifest(2), false);
    std::vector<WeilTriple> head, tail;
    for (const auto& t : b.triples) (t.r <= 1500 ? head : tail).push_back(t);
    w.write(head);
    w.checkpoint(1500);
    w.write(tail);  // written after the checkpoint, then interrupted
  }
  {
    ShardWriter w(p2.string(), manifest(2), true);
    REQUIRE(w.resume_point().has_value());
    CHECK(*w.resume_point() == 1500);
    for (const auto& t : w.kept()) CHECK(t.r <= 1500);
    std::vector<WeilTriple> tail;
    for (const auto& t : b.triples)
      if (t.r > 1500) tail.push_back(t);
    w.write(tail);
    w.checkpoint(2000);
    w.finish({{"count", b.count()}});
  }
  CHECK(read_shard(p2.string()).triples.size() == b.triples.size());
  {
    ShardWriter w(p1.string(), manifest(1), true);
    CHECK(w.already_complete());
  }
  RunManifest merged;
  auto m = merge_shards({p1.string(), p2.string(), p1.string()}, &merged);
  CHECK(m.count() == full.count());
  CHECK(merged.same_run(manifest(1)));

  fs::path p3 = temp_file("s3.jsonl");
  RunManifest other = manifest(2);
  other.spec["rho0"] = "3";
  {
    ShardWriter w(p3.string(), other, false);
    w.finish({});
  }
  CHECK_THROWS_AS(merge_shards({p1.string(), p3.string()}), ManifestMismatch);
  CHECK_THROWS_AS(ShardWriter(p2.string(), other, true), ManifestMismatch);
}

TEST_CASE("verify_record checks witnesses") {
  auto res = qi_run(100, 2000);
  for (const auto& t : res.triples) CHECK(verify_record(registry(), t).ok());
  WeilTriple t = res.triples.front();
  t.witness[0] += 1;
  CHECK_FALSE(verify_record(registry(), t).ok());
  t = res.triples.front();
  t.field = "Nope";
  CHECK_FALSE(verify_record(registry(), t).ok());

  RealSearchSpec rs;
  rs.k = 3;
  rs.rho0 = 2;
  rs.rmin = 1000;
  rs.rmax = 5000;
  auto real = search_fixed_real(field("Qsqrt2"), rs);
  REQUIRE(!real.triples.empty());
  for (const auto& u : real.triples) CHECK(verify_record(registry(), u).ok());
  WeilTriple v = real.triples.front();
  v.witness[1] += 1;
  CHECK_FALSE(verify_record(registry(), v).ok());
}

TEST_CASE("grids and tables") {
  auto grid = parse_grid("1.5:2:0.25");
  REQUIRE(grid.size() == 3);
  CHECK(grid[2] == 2);
  CHECK(decimal_label(grid[0]) == "1.5");
  CHECK(decimal_label(mpq_class(2)) == "2.0");
  CHECK(decimal_label(mpq_class(9, 4)) == "2.25");
  CHECK(decimal_label(mpq_class(1, 3)) == "0.333");
  CHECK_THROWS(parse_grid("1:2"));
  CHECK_THROWS(parse_grid("2:1:0.1"));
  std::vector<TableColumn> cols{{"N", {1, 2, 3}}};
  CHECK(emit_table(grid, cols, {1.0, 2.5, 3.25}, "I", "csv") == "rho0,N,I\n1.5,1,1.00\n1.75,2,2.50\n2.0,3,3.25\n");
  std::string md = emit_table(grid, cols, {}, "", "md");
  CHECK(md.rfind("| rho0 | N |\n| --- | --- |\n| 1.5 | 1 |", 0) == 0);
  CHECK_THROWS(emit_table(grid, {{"N", {1}}}, {}, "", "csv"));
}
