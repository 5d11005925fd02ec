// Line-delimited run files: a manifest line, triple records, checkpoints and
// a closing summary. Also shard merging, offline verification and tables.
#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pfav/search_cm.hpp"

namespace pfav {

using json = nlohmann::json;

struct RunManifest {
  std::string command;  // search-cm, search-real or family
  json spec = json::object();
  int shard_index = 1;  // 1-based
  int shard_count = 1;
  std::string code_version;
  std::string field_digest;
  json conventions = json::object();
  std::string started;

  // Equal apart from the shard index and timestamps.
  bool same_run(const RunManifest& o) const;
  CountKey count_key() const;
};

json default_conventions();
json manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const json& j);

json triple_to_json(const WeilTriple& t);
WeilTriple triple_from_json(const json& j);

struct ManifestMismatch : std::runtime_error {
  explicit ManifestMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct ShardFile {
  RunManifest manifest;
  std::vector<WeilTriple> triples;
  std::optional<u64> checkpoint;  // last r fully processed
  std::optional<json> summary;    // present when the shard completed
};

ShardFile read_shard(const std::string& path);

// Appends records to a run file. Opening with resume keeps the records up to
// the last checkpoint of a matching file and reports that checkpoint.
class ShardWriter {
 public:
  ShardWriter(const std::string& path, const RunManifest& manifest, bool resume);
  std::optional<u64> resume_point() const { return resume_point_; }
  bool already_complete() const { return complete_; }
  const std::vector<WeilTriple>& kept() const { return kept_; }
  void write(const std::vector<WeilTriple>& triples);
  void checkpoint(u64 r_done);
  void finish(const json& summary);

 private:
  std::ofstream out_;
  std::optional<u64> resume_point_;
  bool complete_ = false;
  std::vector<WeilTriple> kept_;
};

// Deduplicated union of shards from one run; throws ManifestMismatch.
SearchResult merge_shards(const std::vector<std::string>& paths, RunManifest* manifest = nullptr);

// verify_triple plus the witness checks that need the field.
VerifyReport verify_record(const FieldRegistry& reg, const WeilTriple& t);

struct TableColumn {
  std::string label;
  std::vector<size_t> counts;  // one per grid row
};

// One row per rho0, one column per count series, then the estimate column.
std::string emit_table(const std::vector<mpq_class>& grid, const std::vector<TableColumn>& columns,
                       const std::vector<double>& estimates, const std::string& estimate_label,
                       const std::string& format);

// "a:b:s" with exact rational endpoints and step.
std::vector<mpq_class> parse_grid(const std::string& spec);
// Shortest decimal with at most three places, at least one.
std::string decimal_label(const mpq_class& q);

}  // namespace pfav
