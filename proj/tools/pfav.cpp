#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "pfav/family.hpp"
#include "pfav/heuristics.hpp"
#include "pfav/records.hpp"
#include "pfav/search_real.hpp"

#ifndef PFAV_CONFIG_DIR
#define PFAV_CONFIG_DIR "config"
#endif
#ifndef PFAV_VERSION
#define PFAV_VERSION "dev"
#endif

using namespace pfav;

namespace {

struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

std::string config_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("PFAV_CONFIG_DIR")) return env;
  return PFAV_CONFIG_DIR;
}

std::string now_iso() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

std::pair<int, int> parse_shard(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) throw UsageError("--shard expects i/n");
  int i = std::stoi(s.substr(0, slash)), n = std::stoi(s.substr(slash + 1));
  if (n < 1 || i < 1 || i > n) throw UsageError("--shard needs 1 <= i <= n");
  return {i, n};
}

// Contiguous sub-range i (1-based) of n.
std::pair<u64, u64> shard_range(u64 a, u64 b, int i, int n) {
  u64 width = b - a + 1;
  u64 lo = a + width * static_cast<u64>(i - 1) / static_cast<u64>(n);
  u64 hi = a + width * static_cast<u64>(i) / static_cast<u64>(n) - 1;
  return {lo, hi};
}

json diag_json(const SearchDiagnostics& d) {
  return {{"r_scanned", d.r_scanned},         {"r_skipped_prescreen", d.r_skipped_prescreen},
          {"p_tested", d.p_tested},           {"p_skipped_prescreen", d.p_skipped_prescreen},
          {"index_primes", d.index_primes},   {"ramified", d.ramified},
          {"non_primitive", d.non_primitive}, {"r_squared", d.r_squared},
          {"deferred", d.deferred},           {"seconds", d.seconds}};
}

struct SearchOptions {
  std::string field;
  int k = 2;
  std::string rho0 = "2";
  u64 rmin = 2, rmax = 2;
  int d = 1;
  int threads = 1;
  std::string shard = "1/1";
  std::string out;
  bool resume = false;
  std::string prescreen = "on";
  bool resolvent = false;
  long cm_disc = 0;
  u64 chunk = 0;
};

using ChunkRunner = std::function<SearchResult(u64, u64)>;

int run_chunked(const RunManifest& manifest, const SearchOptions& o, CountKey key, const ChunkRunner& runner) {
  auto [si, sn] = parse_shard(o.shard);
  auto [lo, hi] = shard_range(o.rmin, o.rmax, si, sn);
  SearchResult total;
  total.key = key;
  std::unique_ptr<ShardWriter> writer;
  u64 start = lo;
  if (!o.out.empty()) {
    writer = std::make_unique<ShardWriter>(o.out, manifest, o.resume);
    total.triples = writer->kept();
    if (writer->already_complete()) start = hi + 1;
    else if (writer->resume_point()) start = *writer->resume_point() + 1;
  }
  u64 chunk = o.chunk ? o.chunk : std::max<u64>(1000, (hi - lo + 1) / 64 + 1);
  for (u64 a = start; a <= hi && lo <= hi;) {
    u64 b = std::min(hi, a + chunk - 1);
    SearchResult part = runner(a, b);
    total.diag.add(part.diag);
    if (writer) {
      writer->write(part.triples);
      writer->checkpoint(b);
    }
    for (auto& t : part.triples) total.triples.push_back(std::move(t));
    if (b == hi) break;
    a = b + 1;
  }
  total = merge_results({std::move(total)});
  total.key = key;
  json summary = {{"command", manifest.command},
                  {"shard", o.shard},
                  {"count", total.count()},
                  {"count_key", key == CountKey::charpoly ? "charpoly" : "triple"},
                  {"triples", total.triples.size()},
                  {"diagnostics", diag_json(total.diag)}};
  if (writer && !writer->already_complete()) writer->finish(summary);
  std::cout << summary.dump() << std::endl;
  return 0;
}

RunManifest base_manifest(const std::string& command, const FieldRegistry& reg, const SearchOptions& o) {
  RunManifest m;
  m.command = command;
  auto [si, sn] = parse_shard(o.shard);
  m.shard_index = si;
  m.shard_count = sn;
  m.code_version = PFAV_VERSION;
  m.field_digest = reg.digest();
  m.conventions = default_conventions();
  m.started = now_iso();
  m.spec = {{"field", o.field}, {"k", o.k}, {"rho0", parse_rational(o.rho0).get_str()}, {"rmin", o.rmin},
            {"rmax", o.rmax},   {"d", o.d}};
  return m;
}

void add_search_flags(CLI::App* sub, SearchOptions& o) {
  sub->add_option("--field", o.field, "field name from fields.conf")->required();
  sub->add_option("--k", o.k, "embedding degree")->required();
  sub->add_option("--rho0", o.rho0, "rho bound, exact decimal or fraction")->required();
  sub->add_option("--rmin", o.rmin, "smallest r")->required();
  sub->add_option("--rmax", o.rmax, "largest r")->required();
  sub->add_option("--threads", o.threads, "worker threads");
  sub->add_option("--shard", o.shard, "shard i/n of the r range");
  sub->add_option("--out", o.out, "JSONL output file");
  sub->add_flag("--resume", o.resume, "continue from the last checkpoint in --out");
  sub->add_option("--chunk", o.chunk, "r width between checkpoints");
}

int cmd_search_cm(const FieldRegistry& reg, const SearchOptions& o) {
  if (o.prescreen != "on" && o.prescreen != "off") throw UsageError("--prescreen takes on or off");
  CmField C = cm_field(reg, o.field);
  RunManifest m = base_manifest("search-cm", reg, o);
  m.spec["prescreen"] = o.prescreen == "on";
  m.spec["resolvent_prescreen"] = o.resolvent;
  return run_chunked(m, o, CountKey::triple, [&](u64 a, u64 b) {
    CmSearchSpec s;
    s.k = o.k;
    s.rho0 = parse_rational(o.rho0);
    s.rmin = a;
    s.rmax = b;
    s.prescreen = o.prescreen == "on";
    s.resolvent_prescreen = o.resolvent;
    s.threads = o.threads;
    return search_fixed_cm(C, s);
  });
}

int cmd_search_real(const FieldRegistry& reg, const SearchOptions& o) {
  const FieldDescriptor& K0 = reg.get(o.field);
  RunManifest m = base_manifest("search-real", reg, o);
  m.spec["cm_disc"] = o.cm_disc;
  return run_chunked(m, o, CountKey::charpoly, [&](u64 a, u64 b) {
    RealSearchSpec s;
    s.k = o.k;
    s.rho0 = parse_rational(o.rho0);
    s.rmin = a;
    s.rmax = b;
    s.d = o.d;
    s.threads = o.threads;
    s.cm_disc = o.cm_disc;
    return search_fixed_real(K0, s);
  });
}

std::vector<CompleteFamily> all_families(const FieldRegistry& reg, const std::string& dir) {
  std::vector<CompleteFamily> fams{bn_family(reg)};
  std::ifstream in(dir + "/families.conf");
  if (in) {
    std::stringstream ss;
    ss << in.rdbuf();
    for (auto& f : load_families(reg, ss.str()))
      if (f.name != "BN") fams.push_back(std::move(f));
  }
  return fams;
}

const CompleteFamily& pick_family(const std::vector<CompleteFamily>& fams, const std::string& name) {
  for (const auto& f : fams)
    if (f.name == name) return f;
  throw UsageError("unknown family " + name);
}

void print_estimate(const std::string& format, const std::vector<std::pair<std::string, std::string>>& fields) {
  if (format == "jsonl") {
    json j = json::object();
    for (const auto& [k, v] : fields) j[k] = v;
    std::cout << j.dump() << "\n";
    return;
  }
  std::vector<std::string> h, v;
  for (const auto& [a, b] : fields) {
    h.push_back(a);
    v.push_back(b);
  }
  auto line = [&](const std::vector<std::string>& cells) {
    if (format == "csv") {
      for (size_t i = 0; i < cells.size(); ++i) std::cout << (i ? "," : "") << cells[i];
    } else {
      std::cout << "|";
      for (const auto& c : cells) std::cout << " " << c << " |";
    }
    std::cout << "\n";
  };
  line(h);
  if (format == "md") line(std::vector<std::string>(h.size(), "---"));
  line(v);
}

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pairing-friendly abelian variety parameter search"};
  app.require_subcommand(1);
  std::string cfg;
  app.add_option("--config", cfg, "directory holding fields.conf (default: $PFAV_CONFIG_DIR)");

  SearchOptions scm, sreal;
  auto* c_cm = app.add_subcommand("search-cm", "search triples over a fixed CM field");
  add_search_flags(c_cm, scm);
  c_cm->add_option("--prescreen", scm.prescreen, "residue prescreens on|off");
  c_cm->add_flag("--resolvent-prescreen", scm.resolvent, "use the configured resolvent prescreen");

  auto* c_real = app.add_subcommand("search-real", "search triples over a fixed maximal real subfield");
  add_search_flags(c_real, sreal);
  c_real->add_option("--d", sreal.d, "prime power exponent");
  c_real->add_option("--cm-disc", sreal.cm_disc, "keep tau with tau^2 - 4q = D m^2 (K0 = Q only)");

  std::string fam_name = "BN", fam_out;
  i64 wmin = -500, wmax = 500;
  u64 fam_rmin = 0, fam_rmax = ~0ull;
  auto* c_fam = app.add_subcommand("family", "validate a complete family and enumerate its triples");
  c_fam->add_option("--name", fam_name, "family name (BN built in, more in families.conf)");
  c_fam->add_option("--wmin", wmin);
  c_fam->add_option("--wmax", wmax);
  c_fam->add_option("--rmin", fam_rmin);
  c_fam->add_option("--rmax", fam_rmax);
  c_fam->add_option("--out", fam_out, "JSONL output file");

  std::string formula = "I", pfield, prho = "2", pformat = "csv";
  int pk = 2, pd = 1, pg = 1;
  double pa = 1e3, pb = 1e5, px = 1e6, ptol = 1e-10;
  std::string pmode = "fixed_cm";
  auto* c_pred = app.add_subcommand("predict", "evaluate a heuristic estimate");
  c_pred->add_option("--formula", formula, "I, J, Rpp, density, asymptote, feasibility or family")
      ->check(CLI::IsMember({"I", "J", "Rpp", "density", "asymptote", "feasibility", "family"}));
  c_pred->add_option("--field", pfield);
  c_pred->add_option("--k", pk);
  c_pred->add_option("--rho0", prho);
  c_pred->add_option("--rmin", pa);
  c_pred->add_option("--rmax", pb);
  c_pred->add_option("--d", pd);
  c_pred->add_option("--g", pg, "genus (feasibility)");
  c_pred->add_option("--mode", pmode, "fixed_cm or fixed_real (feasibility)");
  c_pred->add_option("--x", px, "bound for density, asymptote and family estimates");
  c_pred->add_option("--tolerance", ptol, "relative quadrature tolerance");
  c_pred->add_option("--format", pformat)->check(CLI::IsMember({"csv", "md", "jsonl"}));

  std::vector<std::string> tin;
  std::string tgrid = "1.0:2.0:0.1", tpredict = "none", tformat = "csv";
  auto* c_table = app.add_subcommand("table", "cumulative counts over a rho grid");
  c_table->add_option("--in", tin, "run files (one column each)")->required();
  c_table->add_option("--grid", tgrid, "a:b:s");
  c_table->add_option("--predict", tpredict, "none, I or J")->check(CLI::IsMember({"none", "I", "J"}));
  c_table->add_option("--format", tformat)->check(CLI::IsMember({"csv", "md"}));

  std::vector<std::string> vin;
  auto* c_verify = app.add_subcommand("verify", "re-check every record offline");
  c_verify->add_option("--in", vin)->required();

  auto* c_fields = app.add_subcommand("fields", "list configured fields");

  std::vector<std::string> min;
  std::string mout;
  auto* c_merge = app.add_subcommand("merge", "merge shard files of one run");
  c_merge->add_option("--in", min)->required();
  c_merge->add_option("--out", mout)->required();

  std::string cfield;
  u64 cr = 0, cp = 0;
  int cc = -1;
  auto* c_cluster = app.add_subcommand("cluster", "predicted number of charpolys sharing (r, p)");
  c_cluster->add_option("--field", cfield)->required();
  c_cluster->add_option("--r", cr)->required();
  c_cluster->add_option("--p", cp)->required();
  c_cluster->add_option("--C", cc, "degree-one primes above r (default: counted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << json{{"error", {{"kind", "usage"}, {"message", e.what()}}}}.dump() << std::endl;
    return 2;
  }

  try {
    std::string dir = config_dir(cfg);
    FieldRegistry reg = FieldRegistry::load_file(dir + "/fields.conf");

    if (*c_cm) return cmd_search_cm(reg, scm);
    if (*c_real) return cmd_search_real(reg, sreal);

    if (*c_fam) {
      auto fams = all_families(reg, dir);
      const CompleteFamily& fam = pick_family(fams, fam_name);
      FamilyReport rep = validate_family(fam);
      SearchResult res = enumerate_family_triples(fam, wmin, wmax, {fam_rmin, fam_rmax});
      if (!fam_out.empty()) {
        RunManifest m;
        m.command = "family";
        m.spec = {{"family", fam.name}, {"field", fam.K->name}, {"k", fam.k}, {"wmin", wmin}, {"wmax", wmax}};
        m.code_version = PFAV_VERSION;
        m.field_digest = reg.digest();
        m.conventions = default_conventions();
        m.started = now_iso();
        ShardWriter w(fam_out, m, false);
        w.write(res.triples);
        w.finish({{"count", res.triples.size()}});
      }
      json checks = json::object(), wit = json::object();
      for (const auto& [k, v] : rep.checks) checks[k] = to_string(v);
      for (const auto& [k, q] : rep.witnesses) {
        json cs = json::array();
        for (const auto& c : q.c) cs.push_back(c.get_str());
        wit[k] = cs;
      }
      std::cout << json{{"family", fam.name},
                        {"checks", checks},
                        {"witnesses", wit},
                        {"generic_rho", rep.generic_rho.get_str()},
                        {"triples", res.triples.size()}}
                       .dump()
                << std::endl;
      return rep.algebraic_ok() ? 0 : 1;
    }

    if (*c_pred) {
      double rho = parse_rational(prho).get_d();
      if (formula == "I" || formula == "J" || formula == "Rpp") {
        if (pfield.empty()) throw UsageError("--field is required");
        const FieldDescriptor& F = reg.get(pfield);
        HeuristicEstimate e = formula == "I"   ? integral_I(F, pk, rho, pa, pb, ptol)
                              : formula == "J" ? integral_J(F, pk, rho, pa, pb, ptol)
                                               : heuristic_R_prime_power(F, pk, rho, pa, pb, pd, ptol);
        std::vector<std::pair<std::string, std::string>> row{
            {"formula", e.formula_id}, {"field", pfield}, {"k", std::to_string(pk)}, {"rho0", prho},
            {"value", fixed2(e.value)}};
        if (e.literal_value) row.push_back({"literal_value", fixed2(*e.literal_value)});
        char err[64];
        std::snprintf(err, sizeof err, "%.3g", e.quadrature_error);
        row.push_back({"quadrature_error", err});
        for (const auto& [name, v] : e.ingredients) {
          std::ostringstream os;
          os << v;
          row.push_back({name, os.str()});
        }
        print_estimate(pformat, row);
      } else if (formula == "density") {
        if (pfield.empty()) throw UsageError("--field is required");
        print_estimate(pformat, {{"formula", "density"}, {"field", pfield}, {"x", std::to_string(px)},
                                 {"value", fixed2(weil_density_estimate(reg.get(pfield), px))}});
      } else if (formula == "asymptote") {
        if (pfield.empty()) throw UsageError("--field is required");
        print_estimate(pformat, {{"formula", "I_asymptote"}, {"field", pfield}, {"k", std::to_string(pk)}, {"rho0", prho},
                                 {"value", fixed2(I_asymptote(reg.get(pfield), pk, rho, px))}});
      } else if (formula == "feasibility") {
        if (pmode != "fixed_cm" && pmode != "fixed_real") throw UsageError("--mode takes fixed_cm or fixed_real");
        auto r = feasibility(pg, pk, rho, pmode == "fixed_cm" ? FeasibilityMode::fixed_cm : FeasibilityMode::fixed_real, pd);
        print_estimate(pformat, {{"formula", "feasibility"}, {"result", to_string(r.result)}, {"inequality", r.inequality}});
      } else {
        auto fams = all_families(reg, dir);
        const CompleteFamily& fam = pick_family(fams, pfield.empty() ? "BN" : pfield);
        auto e = family_count_estimate(fam, px, 20000);
        print_estimate(pformat, {{"formula", "family"}, {"family", fam.name}, {"x", std::to_string(px)},
                                 {"value", fixed2(e.value)}, {"a_prime", fixed2(e.a_prime)},
                                 {"truncation_error", fixed2(e.truncation_error)}, {"label", e.label}});
      }
      return 0;
    }

    if (*c_table) {
      std::vector<mpq_class> grid = parse_grid(tgrid);
      std::vector<TableColumn> cols;
      std::optional<RunManifest> first;
      for (const auto& path : tin) {
        RunManifest m;
        SearchResult res = merge_shards({path}, &m);
        if (!first) first = m;
        cols.push_back({"k=" + std::to_string(m.spec.value("k", 0)), res.bucket(grid)});
      }
      std::vector<double> est;
      if (tpredict != "none") {
        const FieldDescriptor& F = reg.get(first->spec.at("field").get<std::string>());
        int k = first->spec.at("k").get<int>();
        double a = static_cast<double>(first->spec.at("rmin").get<u64>());
        double b = static_cast<double>(first->spec.at("rmax").get<u64>());
        for (const auto& g : grid)
          est.push_back(tpredict == "I" ? integral_I(F, k, g.get_d(), a, b).value : integral_J(F, k, g.get_d(), a, b).value);
      }
      std::cout << emit_table(grid, cols, est, tpredict, tformat);
      return 0;
    }

    if (*c_verify) {
      u64 checked = 0, failed = 0;
      for (const auto& path : vin) {
        ShardFile sf = read_shard(path);
        for (const auto& t : sf.triples) {
          ++checked;
          VerifyReport rep = verify_record(reg, t);
          if (!rep.ok()) {
            ++failed;
            json f = {{"r", t.r}, {"p", t.p}, {"file", path}, {"failures", rep.failures}};
            std::cerr << f.dump() << "\n";
          }
        }
      }
      std::cout << json{{"checked", checked}, {"failed", failed}}.dump() << std::endl;
      return failed ? 1 : 0;
    }

    if (*c_fields) {
      std::cout << "name,degree,r1,r2,discriminant,w,aut,class_number\n";
      for (const auto& n : reg.names()) {
        const FieldDescriptor& F = reg.get(n);
        std::cout << n << "," << F.n << "," << F.r1 << "," << F.r2 << "," << F.discriminant.get_str() << ","
                  << F.torsion << "," << F.aut_order() << "," << F.class_number << "\n";
      }
      std::cout << "# digest " << reg.digest() << "\n";
      return 0;
    }

    if (*c_merge) {
      RunManifest m;
      SearchResult res = merge_shards(min, &m);
      m.shard_index = 1;
      m.shard_count = 1;
      ShardWriter w(mout, m, false);
      w.write(res.triples);
      w.finish({{"count", res.count()}, {"triples", res.triples.size()}, {"merged_from", min.size()}});
      std::cout << json{{"count", res.count()}, {"triples", res.triples.size()}}.dump() << std::endl;
      return 0;
    }

    if (*c_cluster) {
      const FieldDescriptor& K0 = reg.get(cfield);
      int C = cc >= 0 ? cc : degree_one_prime_count(K0, cr);
      std::cout << json{{"field", cfield}, {"r", cr}, {"p", cp}, {"C", C},
                        {"rho", rho_value(cr, cp, K0.n)}, {"prediction", cluster_prediction(K0, cr, cp, C)}}
                       .dump()
                << std::endl;
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << json{{"error", {{"kind", "usage"}, {"message", e.what()}}}}.dump() << std::endl;
    return 2;
  } catch (const ManifestMismatch& e) {
    std::cerr << json{{"error", {{"kind", "manifest_mismatch"}, {"message", e.what()}}}}.dump() << std::endl;
    return 3;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", {{"kind", "runtime"}, {"message", e.what()}}}}.dump() << std::endl;
    return 4;
  }
  return 0;
}
