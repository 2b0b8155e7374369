// fixrank: command-line front end for the counting and Hecke-moment computations.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "fixrank/core/errors.hpp"
#include "fixrank/core/parallel.hpp"
#include "fixrank/hecke.hpp"
#include "fixrank/version.hpp"
#include "json.hpp"

using json = nlohmann::ordered_json;
using namespace fixrank;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kFailure = 1, kValidation = 2, kCapAbort = 3, kIo = 4 };

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::string field = "Q";
  std::size_t n = 3, m = 2, k = 1, s = 2;
  std::vector<double> T{10};
  std::vector<std::uint64_t> primes{2, 3, 5};
  double cutoff = 50;
  std::uint64_t mc_samples = 0;
  std::uint64_t seed = 0;
  std::string mode = "exact";
  std::string f = "ball:1";
  std::string strategy = "automatic";
  std::string kind = "primitive-zeta";
  std::string matrix;
  std::string format = "json";
  std::string output_dir;
  unsigned threads = 0;
  double cap = 0;
};

// Floats go out at 15 significant digits; the shortest round trip of the rounded value.
json real(double x) {
  if (!std::isfinite(x)) return format_real(x);
  return std::stod(format_real(x));
}

json reals(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(real(x));
  return a;
}

json echo(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  const std::string& cmd = c.command;
  if (cmd != "identity-check") j["field"] = c.field;
  if (cmd == "count-rank") {
    j["n"] = c.n, j["m"] = c.m, j["k"] = c.k, j["T"] = reals(c.T), j["f"] = c.f, j["strategy"] = c.strategy;
  } else if (cmd == "c1-sum") {
    j["n"] = c.n, j["m"] = c.m, j["k"] = c.k, j["f"] = c.f, j["cutoff"] = real(c.cutoff);
    j["mc_samples"] = c.mc_samples, j["seed"] = c.seed;
  } else if (cmd == "schmidt-table") {
    j["m"] = c.m, j["k"] = c.k, j["T"] = reals(c.T);
  } else if (cmd == "hecke-moment") {
    j["n"] = c.n, j["m"] = c.m, j["s"] = c.s, j["primes"] = c.primes, j["f"] = c.f, j["mode"] = c.mode;
    j["cutoff"] = real(c.cutoff), j["mc_samples"] = c.mc_samples, j["seed"] = c.seed;
  } else if (cmd == "identity-check") {
    j["kind"] = c.kind, j["n"] = c.n, j["m"] = c.m, j["cutoff"] = real(c.cutoff);
  } else if (cmd == "factorize") {
    j["matrix"] = c.matrix;
  }
  if (c.cap > 0) j["cap"] = real(c.cap);
  return j;
}

void apply_config_file(const std::string& path, RunConfig& c) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("config file " + path + " is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw ValidationError("config file must hold a JSON object");
  try {
    for (auto& [key, v] : j.items()) {
      if (key == "field") c.field = v.get<std::string>();
      else if (key == "n") c.n = v.get<std::size_t>();
      else if (key == "m") c.m = v.get<std::size_t>();
      else if (key == "k") c.k = v.get<std::size_t>();
      else if (key == "s") c.s = v.get<std::size_t>();
      else if (key == "T") c.T = v.is_array() ? v.get<std::vector<double>>() : std::vector<double>{v.get<double>()};
      else if (key == "primes") c.primes = v.get<std::vector<std::uint64_t>>();
      else if (key == "cutoff") c.cutoff = v.get<double>();
      else if (key == "mc_samples") c.mc_samples = v.get<std::uint64_t>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "mode") c.mode = v.get<std::string>();
      else if (key == "f") c.f = v.get<std::string>();
      else if (key == "strategy") c.strategy = v.get<std::string>();
      else if (key == "kind") c.kind = v.get<std::string>();
      else if (key == "matrix") c.matrix = v.is_string() ? v.get<std::string>() : v.dump();
      else if (key == "format") c.format = v.get<std::string>();
      else if (key == "output_dir") c.output_dir = v.get<std::string>();
      else if (key == "threads") c.threads = v.get<unsigned>();
      else if (key == "cap") c.cap = v.get<double>();
      else throw ValidationError("unknown config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw ValidationError("bad value in config file: " + std::string(e.what()));
  }
}

FieldPtr load_field(const std::string& spec) {
  if (fs::is_regular_file(spec)) return load_field_spec(spec);
  return field_preset(spec);
}

CountStrategy parse_strategy(const std::string& s) {
  if (s == "automatic") return CountStrategy::automatic;
  if (s == "brute") return CountStrategy::brute;
  if (s == "pruned") return CountStrategy::pruned;
  throw ValidationError("unknown strategy '" + s + "' (automatic, brute, pruned)");
}

FieldMatrix parse_matrix(const FieldPtr& field, const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception&) {
    throw ValidationError("--matrix must be a JSON array of rows");
  }
  if (!j.is_array() || j.empty() || !j[0].is_array() || j[0].empty())
    throw ValidationError("--matrix must be a non-empty JSON array of rows");
  const std::size_t rows = j.size(), cols = j[0].size();
  const std::size_t d = field->degree();
  FieldMatrix a(field, rows, cols);
  auto scalar = [](const json& v) {
    if (v.is_string()) return parse_rat(v.get<std::string>());
    if (v.is_number_integer()) return Rat(Int(v.dump()));
    if (v.is_number()) return parse_rat(v.dump());
    throw ValidationError("matrix entries must be numbers, \"p/q\" strings or coordinate arrays");
  };
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) throw ValidationError("ragged --matrix");
    for (std::size_t c = 0; c < cols; ++c) {
      const json& e = j[i][c];
      if (e.is_array()) {
        if (e.size() != d) throw ValidationError("entry needs " + std::to_string(d) + " power-basis coordinates");
        RatVector coords;
        for (const auto& x : e) coords.push_back(scalar(x));
        a.at(i, c) = FieldElement(field, coords);
      } else {
        a.at(i, c) = FieldElement::from_rational(field, scalar(e));
      }
    }
  }
  return a;
}

json field_matrix_json(const FieldMatrix& a) {
  json rows = json::array();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    json r = json::array();
    for (std::size_t j = 0; j < a.cols(); ++j) {
      json e = json::array();
      for (const auto& x : a.at(i, j).coords()) e.push_back(to_string(x));
      r.push_back(a.field()->degree() == 1 ? e[0] : e);
    }
    rows.push_back(r);
  }
  return rows;
}

// Collected output; the caller writes it even when a command stops early.
struct Run {
  RunConfig config;
  FieldPtr field;
  std::vector<json> records;
  std::vector<std::string> csv_columns;

  void add(json item) {
    json r;
    r["schema_version"] = kSchemaVersion;
    r["config"] = echo(config);
    for (auto& [k, v] : item.items()) r[k] = v;
    records.push_back(std::move(r));
  }
};

void run_count_rank(Run& run) {
  const auto& c = run.config;
  const auto f = parse_test_function(c.f);
  const auto strategy = parse_strategy(c.strategy);
  run.csv_columns = {"T", "raw_sum", "exact_count", "normalized", "matrices_seen", "strategy"};
  for (double t : c.T) {
    auto rep = lhs_count(run.field, c.n, c.m, c.k, t, f, strategy);
    json j;
    j["T"] = real(t);
    j["raw_sum"] = real(rep.raw_sum);
    j["exact_count"] = rep.exact_count ? json(rep.exact_count->get_str()) : json(nullptr);
    j["normalized"] = real(rep.normalized);
    j["matrices_seen"] = rep.matrices_seen;
    j["strategy"] = rep.strategy;
    run.add(std::move(j));
  }
}

void run_c1_sum(Run& run) {
  const auto& c = run.config;
  auto est = c1_estimate(run.field, c.n, c.m, c.k, parse_test_function(c.f), c.cutoff, c.mc_samples, c.seed);
  run.csv_columns = {"n", "m", "k", "cutoff", "value", "std_error", "term_count", "tail_estimate", "seed"};
  json j;
  j["n"] = est.n, j["m"] = est.m, j["k"] = est.k, j["cutoff"] = real(est.cutoff);
  j["value"] = real(est.partial_sum);
  j["std_error"] = real(est.std_error);
  j["term_count"] = est.term_count;
  j["tail_estimate"] = real(est.tail_estimate);
  j["seed"] = c.seed;
  run.add(std::move(j));
}

void run_schmidt_table(Run& run) {
  const auto& c = run.config;
  run.csv_columns = {"T", "count", "ratio"};
  double prev = 0;
  for (double t : c.T) {
    const auto count = schmidt_count(run.field, c.k, c.m, t);
    json j;
    j["T"] = real(t);
    j["count"] = count;
    j["ratio"] = prev > 0 ? real(static_cast<double>(count) / prev) : json(nullptr);
    prev = static_cast<double>(count);
    run.add(std::move(j));
  }
}

json stratified_json(const std::optional<StratifiedValue>& s) {
  if (!s) return nullptr;
  return to_string(s->value);
}

void run_hecke_moment(Run& run) {
  const auto& c = run.config;
  check_moment_window(c.n, c.m, c.s);
  const auto g = parse_test_function(c.f);
  const auto spec = parse_moment_mode(c.mode, c.seed);
  run.csv_columns = {"p", "lhs", "stratified", "rhs_limit", "abs_error"};
  auto rows = convergence_table(run.field, c.n, c.m, c.s, g, c.primes, spec, c.cutoff, c.mc_samples);
  for (const auto& r : rows) {
    json j;
    j["p"] = r.p;
    j["root"] = r.root;
    j["n"] = r.n, j["s"] = r.s, j["m"] = r.m;
    j["mode"] = r.mode;
    j["include_zero"] = true;
    j["lhs"] = real(r.lhs.value);
    j["lhs_exact"] = r.lhs.exact ? json(to_string(*r.lhs.exact)) : json(nullptr);
    j["lhs_std_error"] = real(r.lhs.std_error);
    j["stratified"] = r.stratified ? real(to_double(r.stratified->value)) : json(nullptr);
    j["stratified_exact"] = stratified_json(r.stratified);
    j["rhs_limit"] = real(r.rhs_limit);
    j["abs_error"] = real(r.abs_error);
    j["lhs_without_zero"] = real(r.lhs.value_without_zero);
    j["rhs_limit_without_zero"] = real(r.rhs_limit_without_zero);
    j["abs_error_without_zero"] = real(r.abs_error_without_zero);
    j["lattices"] = r.lhs.lattices;
    run.add(std::move(j));
  }
}

void run_identity_check(Run& run) {
  const auto& c = run.config;
  IdentityCheck r;
  if (c.kind == "primitive-zeta") r = primitive_zeta_check(c.n, c.m, c.cutoff);
  else if (c.kind == "koecher") r = koecher_identity_check(c.n, c.m, c.cutoff);
  else throw ValidationError("unknown identity kind '" + c.kind + "' (primitive-zeta, koecher)");
  run.csv_columns = {"kind", "lhs", "rhs", "relative_error", "tail_corrected_error", "term_count"};
  json j;
  j["kind"] = c.kind;
  j["lhs"] = real(r.lhs);
  j["rhs"] = real(r.rhs);
  j["relative_error"] = real(r.relative_error);
  j["tail_corrected_error"] = real(r.tail_corrected_error);
  j["term_count"] = r.term_count;
  run.add(std::move(j));
}

void run_factorize(Run& run) {
  if (run.config.matrix.empty()) throw ValidationError("factorize needs --matrix");
  auto a = parse_matrix(run.field, run.config.matrix);
  auto fz = rank_factorize(a);
  auto p = lambda_of(fz.d);
  run.csv_columns = {"rank", "denominator", "height"};
  json j;
  j["rank"] = fz.d.k();
  j["C"] = field_matrix_json(fz.c);
  j["D"] = field_matrix_json(fz.d.entries);
  j["pivots"] = fz.d.pivot_cols;
  j["denominator"] = p.denominator.get_str();
  j["height_sq"] = to_string(p.height_sq);
  j["height"] = real(p.height);
  run.add(std::move(j));
}

void run_field_info(Run& run) {
  const NumberField& k = *run.field;
  run.csv_columns = {"degree", "discriminant", "index", "fingerprint"};
  json poly = json::array();
  for (const auto& c : k.min_poly()) poly.push_back(c.get_str());
  json j;
  j["degree"] = k.degree();
  j["signature"] = {k.signature().real, k.signature().complex};
  j["min_poly"] = poly;
  j["discriminant"] = k.discriminant().get_str();
  j["index"] = k.index().get_str();
  j["norm_scale"] = k.norm_scale().to_string();
  j["fingerprint"] = k.fingerprint();
  json covol = json::array();
  for (std::size_t r = 1; r <= 3; ++r) covol.push_back(real(ZLattice::ok_power(k, r).height()));
  j["covolume_ok_powers"] = covol;
  run.add(std::move(j));
}

std::string csv_cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

void write_outputs(const Run& run, const std::string& status, const std::string& error, double wall_ms) {
  const fs::path dir = run.config.output_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  const bool csv = run.config.format == "csv";
  const fs::path records = dir / (csv ? "records.csv" : "records.jsonl");
  {
    std::ofstream out(records, std::ios::binary);
    if (!out) throw IoError("cannot write " + records.string());
    if (csv) {
      for (const auto& c : run.csv_columns) out << c << ',';
      out << "schema_version\n";
      for (const auto& r : run.records) {
        for (const auto& c : run.csv_columns) out << csv_cell(r.value(c, json(nullptr))) << ',';
        out << kSchemaVersion << '\n';
      }
    } else {
      for (const auto& r : run.records) out << r.dump() << '\n';
    }
    if (!out) throw IoError("write failed for " + records.string());
  }
  json m;
  m["schema_version"] = kSchemaVersion;
  m["library_version"] = kVersion;
  m["command"] = run.config.command;
  m["status"] = status;
  if (!error.empty()) m["error"] = error;
  m["config"] = echo(run.config);
  m["field_fingerprint"] = run.field ? json(run.field->fingerprint()) : json(nullptr);
  m["format"] = run.config.format;
  m["records_file"] = records.filename().string();
  m["record_count"] = run.records.size();
  m["wall_time_ms"] = real(wall_ms);
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  if (!out) throw IoError("cannot write " + (dir / "manifest.json").string());
  out << m.dump(2) << '\n';
  if (!out) throw IoError("write failed for manifest.json");
}

void add_common(CLI::App* sub, RunConfig& c, std::string& config_path) {
  sub->add_option("--config", config_path, "JSON file; its keys override flags");
  sub->add_option("--field", c.field, "Preset (Q, Q(i), Q(sqrt5), Q(sqrt-3), Q(sqrt2), Q(zeta5)) or field file");
  sub->add_option("--output-dir", c.output_dir, "Output directory (default $FIXRANK_OUTPUT_DIR or fixrank_out)");
  sub->add_option("--format", c.format, "Records format")->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--threads", c.threads, "Worker cap (0 = all cores)");
  sub->add_option("--seed", c.seed, "Master seed");
  sub->add_option("--cap", c.cap, "Enumeration cap on predicted lattice points");
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  std::string config_path;
  CLI::App app{"Fixed-rank integral matrix counts and Hecke-neighbor moments"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  auto* count = app.add_subcommand("count-rank", "Sum of f(A/T) over rank-k integral n x m matrices");
  count->add_option("--n", cfg.n);
  count->add_option("--m", cfg.m);
  count->add_option("--k", cfg.k);
  count->add_option("-T,--T", cfg.T, "One or more scales");
  count->add_option("--f", cfg.f, "ball:R or product_of_balls:R");
  count->add_option("--strategy", cfg.strategy);

  auto* c1 = app.add_subcommand("c1-sum", "Truncated echelon series for the leading constant");
  c1->add_option("--n", cfg.n);
  c1->add_option("--m", cfg.m);
  c1->add_option("--k", cfg.k);
  c1->add_option("--f", cfg.f);
  c1->add_option("--cutoff", cfg.cutoff, "Height cutoff");
  c1->add_option("--mc-samples", cfg.mc_samples);

  auto* schmidt = app.add_subcommand("schmidt-table", "Counts of primitive modules with H <= T");
  schmidt->add_option("--m", cfg.m);
  schmidt->add_option("--k", cfg.k);
  schmidt->add_option("-T,--T", cfg.T);

  auto* hecke = app.add_subcommand("hecke-moment", "Moments over Hecke neighbors and their limit");
  hecke->add_option("--n", cfg.n);
  hecke->add_option("--m", cfg.m);
  hecke->add_option("--s", cfg.s);
  hecke->add_option("--primes", cfg.primes);
  hecke->add_option("--f", cfg.f, "ball:R");
  hecke->add_option("--mode", cfg.mode, "exact or sampled:<count>");
  hecke->add_option("--cutoff", cfg.cutoff, "Height cutoff of the limit series");
  hecke->add_option("--mc-samples", cfg.mc_samples);

  auto* ident = app.add_subcommand("identity-check", "Primitive-zeta and Koecher consistency checks");
  ident->add_option("--kind", cfg.kind)->check(CLI::IsMember({"primitive-zeta", "koecher"}));
  ident->add_option("--n", cfg.n);
  ident->add_option("--m", cfg.m);
  ident->add_option("--cutoff", cfg.cutoff);

  auto* fact = app.add_subcommand("factorize", "Rank factorization A = C D with D echelon");
  fact->add_option("--matrix", cfg.matrix, "JSON rows; entries rational or power-basis coordinate arrays");

  auto* info = app.add_subcommand("field-info", "Invariants of a number field");

  for (auto* sub : {count, c1, schmidt, hecke, ident, fact, info}) add_common(sub, cfg, config_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  Run run;
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  };
  try {
    cfg.command = app.get_subcommands().front()->get_name();
    if (!config_path.empty()) apply_config_file(config_path, cfg);
    if (cfg.output_dir.empty()) {
      const char* env = std::getenv("FIXRANK_OUTPUT_DIR");
      cfg.output_dir = env && *env ? env : "fixrank_out";
    }
    if (cfg.format != "json" && cfg.format != "csv") throw ValidationError("format must be json or csv");
    set_max_threads(cfg.threads);
    if (cfg.cap > 0) set_enumeration_cap(cfg.cap);
    run.config = cfg;
    if (cfg.command != "identity-check") run.field = load_field(cfg.field);

    const std::string& cmd = cfg.command;
    try {
      if (cmd == "count-rank") run_count_rank(run);
      else if (cmd == "c1-sum") run_c1_sum(run);
      else if (cmd == "schmidt-table") run_schmidt_table(run);
      else if (cmd == "hecke-moment") run_hecke_moment(run);
      else if (cmd == "identity-check") run_identity_check(run);
      else if (cmd == "factorize") run_factorize(run);
      else run_field_info(run);
    } catch (const CapExceeded& e) {
      write_outputs(run, "cap_exceeded", e.what(), elapsed());
      std::cerr << "fixrank: enumeration cap exceeded (estimate " << format_real(e.estimate()) << "): " << e.what()
                << "\nfixrank: wrote " << run.records.size() << " partial record(s) to " << cfg.output_dir << '\n';
      return kCapAbort;
    }
    write_outputs(run, "ok", "", elapsed());
    std::cout << "fixrank " << cmd << ": " << run.records.size() << " record(s) written to " << cfg.output_dir
              << '\n';
    for (const auto& r : run.records) {
      json brief = r;
      brief.erase("config");
      brief.erase("schema_version");
      std::cout << brief.dump() << '\n';
    }
    return kOk;
  } catch (const ValidationError& e) {
    std::cerr << "fixrank: invalid input: " << e.what() << '\n';
    return kValidation;
  } catch (const IoError& e) {
    std::cerr << "fixrank: I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "fixrank: " << e.what() << '\n';
    return kFailure;
  }
}
