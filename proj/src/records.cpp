#include "pfav/records.hpp"

#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <set>
#include <sstream>

#include "pfav/search_real.hpp"

namespace pfav {

namespace {

std::string rho_string(double rho) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6) << rho;
  return os.str();
}

json strip_volatile(const RunManifest& m) {
  json j = manifest_to_json(m);
  j.erase("shard_index");
  j.erase("started");
  return j;
}

}  // namespace

bool RunManifest::same_run(const RunManifest& o) const { return strip_volatile(*this) == strip_volatile(o); }

CountKey RunManifest::count_key() const { return command == "search-real" ? CountKey::charpoly : CountKey::triple; }

json default_conventions() {
  return {{"r_range", "inclusive on both ends"},
          {"p_bound", "exact: (p^d)^(g*den) <= r^num for rho0 = num/den"},
          {"order_test", "exact multiplicative order"},
          {"count_key_cm", "(r, p, charpoly)"},
          {"count_key_real", "distinct charpoly"}};
}

json manifest_to_json(const RunManifest& m) {
  return {{"type", "manifest"},
          {"command", m.command},
          {"spec", m.spec},
          {"shard_index", m.shard_index},
          {"shard_count", m.shard_count},
          {"code_version", m.code_version},
          {"field_digest", m.field_digest},
          {"conventions", m.conventions},
          {"started", m.started}};
}

RunManifest manifest_from_json(const json& j) {
  if (j.value("type", "") != "manifest") throw std::invalid_argument("first line is not a manifest");
  RunManifest m;
  m.command = j.at("command").get<std::string>();
  m.spec = j.at("spec");
  m.shard_index = j.at("shard_index").get<int>();
  m.shard_count = j.at("shard_count").get<int>();
  m.code_version = j.at("code_version").get<std::string>();
  m.field_digest = j.at("field_digest").get<std::string>();
  m.conventions = j.at("conventions");
  m.started = j.value("started", "");
  return m;
}

json triple_to_json(const WeilTriple& t) {
  json cp = json::array(), wit = json::array();
  for (const auto& c : t.charpoly.c) cp.push_back(c.get_str());
  for (const auto& c : t.witness) wit.push_back(c.get_str());
  return {{"type", "triple"}, {"r", t.r},         {"p", t.p},           {"d", t.d},           {"k", t.k},
          {"g", t.g},         {"rho", rho_string(t.rho)}, {"charpoly", cp}, {"witness", wit}, {"field", t.field},
          {"source", t.source}, {"r_squared", t.r_squared}};
}

WeilTriple triple_from_json(const json& j) {
  WeilTriple t;
  t.r = j.at("r").get<u64>();
  t.p = j.at("p").get<u64>();
  t.d = j.at("d").get<int>();
  t.k = j.at("k").get<int>();
  t.g = j.at("g").get<int>();
  t.rho = std::stod(j.at("rho").get<std::string>());
  std::vector<mpz_class> cp;
  for (const auto& c : j.at("charpoly")) cp.emplace_back(c.get<std::string>(), 10);
  t.charpoly = ZPoly(std::move(cp));
  for (const auto& c : j.at("witness")) t.witness.emplace_back(c.get<std::string>(), 10);
  t.field = j.at("field").get<std::string>();
  t.source = j.at("source").get<std::string>();
  t.r_squared = j.at("r_squared").get<bool>();
  return t;
}

ShardFile read_shard(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  ShardFile sf;
  std::string line;
  bool first = true;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (first) {
      sf.manifest = manifest_from_json(j);
      first = false;
      continue;
    }
    std::string type = j.value("type", "");
    if (type == "triple") sf.triples.push_back(triple_from_json(j));
    else if (type == "checkpoint") sf.checkpoint = j.at("r_done").get<u64>();
    else if (type == "summary") sf.summary = j;
    else throw std::runtime_error(path + ":" + std::to_string(lineno) + ": unknown record type");
  }
  if (first) throw std::runtime_error(path + ": empty run file");
  return sf;
}

ShardWriter::ShardWriter(const std::string& path, const RunManifest& manifest, bool resume) {
  namespace fs = std::filesystem;
  if (resume && fs::exists(path)) {
    ShardFile old = read_shard(path);
    if (!old.manifest.same_run(manifest) || old.manifest.shard_index != manifest.shard_index)
      throw ManifestMismatch("existing file " + path + " belongs to a different run");
    if (old.summary) {
      complete_ = true;
      kept_ = std::move(old.triples);
      return;
    }
    resume_point_ = old.checkpoint;
    for (auto& t : old.triples)
      if (old.checkpoint && t.r <= *old.checkpoint) kept_.push_back(std::move(t));
    std::string tmp = path + ".tmp";
    {
      std::ofstream o(tmp, std::ios::trunc);
      o << manifest_to_json(old.manifest).dump() << "\n";
      for (const auto& t : kept_) o << triple_to_json(t).dump() << "\n";
      if (resume_point_) o << json{{"type", "checkpoint"}, {"r_done", *resume_point_}}.dump() << "\n";
    }
    fs::rename(tmp, path);
    out_.open(path, std::ios::app);
  } else {
    out_.open(path, std::ios::trunc);
    if (out_) out_ << manifest_to_json(manifest).dump() << "\n";
  }
  if (!out_) throw std::runtime_error("cannot write " + path);
}

void ShardWriter::write(const std::vector<WeilTriple>& triples) {
  for (const auto& t : triples) out_ << triple_to_json(t).dump() << "\n";
}

void ShardWriter::checkpoint(u64 r_done) {
  out_ << json{{"type", "checkpoint"}, {"r_done", r_done}}.dump() << "\n";
  out_.flush();
}

void ShardWriter::finish(const json& summary) {
  json s = summary;
  s["type"] = "summary";
  out_ << s.dump() << "\n";
  out_.flush();
}

SearchResult merge_shards(const std::vector<std::string>& paths, RunManifest* manifest) {
  if (paths.empty()) throw std::invalid_argument("no shards to merge");
  std::vector<SearchResult> parts;
  std::optional<RunManifest> ref;
  for (const auto& path : paths) {
    ShardFile sf = read_shard(path);
    if (!ref) ref = sf.manifest;
    else if (!ref->same_run(sf.manifest)) throw ManifestMismatch(path + " comes from a different run");
    SearchResult part;
    part.key = sf.manifest.count_key();
    part.triples = std::move(sf.triples);
    parts.push_back(std::move(part));
  }
  if (manifest) *manifest = *ref;
  SearchResult out = merge_results(std::move(parts));
  out.key = ref->count_key();
  return out;
}

VerifyReport verify_record(const FieldRegistry& reg, const WeilTriple& t) {
  VerifyReport rep = verify_triple(t);
  if (!reg.contains(t.field)) {
    rep.failures.push_back("unknown field " + t.field);
    return rep;
  }
  const FieldDescriptor& F = reg.get(t.field);
  if (static_cast<int>(t.witness.size()) != F.n) {
    rep.failures.push_back("witness has the wrong length");
    return rep;
  }
  mpz_class q;
  mpz_ui_pow_ui(q.get_mpz_t(), t.p, t.d);
  NfElement x = elem(F, t.witness);
  try {
    if (t.source == "real-search") {
      if (char_poly_from_tau(x, q) != t.charpoly) rep.failures.push_back("charpoly does not match tau");
    } else {
      if (!is_weil_number(x, q)) rep.failures.push_back("witness is not a q-Weil number");
      else if (char_poly_of_weil(x) != t.charpoly) rep.failures.push_back("charpoly does not match pi");
      if (norm_mod(x - elem_rational(F, 1), t.r) != 0) rep.failures.push_back("r does not divide N(pi - 1)");
    }
  } catch (const std::exception& e) {
    rep.failures.push_back(std::string("witness check failed: ") + e.what());
  }
  return rep;
}

std::string decimal_label(const mpq_class& q) {
  for (int places = 1; places <= 3; ++places) {
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, places);
    mpq_class s = q * scale;
    if (s.get_den() == 1 || places == 3) {
      mpz_class v = s.get_den() == 1 ? mpz_class(s.get_num()) : mpz_class(s.get_num() / s.get_den());
      bool neg = v < 0;
      if (neg) v = -v;
      std::string digits = v.get_str();
      while (static_cast<int>(digits.size()) <= places) digits = "0" + digits;
      std::string out = digits.substr(0, digits.size() - places) + "." + digits.substr(digits.size() - places);
      return neg ? "-" + out : out;
    }
  }
  return q.get_str();
}

std::vector<mpq_class> parse_grid(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 3) throw std::invalid_argument("grid must be a:b:s");
  mpq_class a = parse_rational(parts[0]), b = parse_rational(parts[1]), s = parse_rational(parts[2]);
  if (s <= 0 || b < a) throw std::invalid_argument("grid needs a <= b and s > 0");
  std::vector<mpq_class> out;
  for (mpq_class x = a; x <= b; x += s) out.push_back(x);
  return out;
}

std::string emit_table(const std::vector<mpq_class>& grid, const std::vector<TableColumn>& columns,
                       const std::vector<double>& estimates, const std::string& estimate_label,
                       const std::string& format) {
  if (format != "csv" && format != "md") throw std::invalid_argument("table format must be csv or md");
  for (const auto& c : columns)
    if (c.counts.size() != grid.size()) throw std::invalid_argument("column " + c.label + " does not match the grid");
  bool est = !estimates.empty();
  if (est && estimates.size() != grid.size()) throw std::invalid_argument("estimates do not match the grid");
  std::vector<std::string> header{"rho0"};
  for (const auto& c : columns) header.push_back(c.label);
  if (est) header.push_back(estimate_label);
  std::vector<std::vector<std::string>> rows;
  for (size_t i = 0; i < grid.size(); ++i) {
    std::vector<std::string> row{decimal_label(grid[i])};
    for (const auto& c : columns) row.push_back(std::to_string(c.counts[i]));
    if (est) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.2f", estimates[i]);
      row.push_back(buf);
    }
    rows.push_back(std::move(row));
  }
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& cells) {
    if (format == "csv") {
      for (size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    } else {
      os << "|";
      for (const auto& c : cells) os << " " << c << " |";
    }
    os << "\n";
  };
  line(header);
  if (format == "md") line(std::vector<std::string>(header.size(), "---"));
  for (const auto& r : rows) line(r);
  return os.str();
}

}  // namespace pfav
