// ebc — compile, analyze, verify, simulate and benchmark execution-bounded
// chemical reaction networks.
//
// Exit codes: 0 = pass / bounded, 1 = fail / unbounded, 2 = inconclusive /
// resource limit.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ebc/analysis.hpp"
#include "ebc/compile.hpp"
#include "ebc/crn.hpp"
#include "ebc/format.hpp"
#include "ebc/semilinear.hpp"
#include "ebc/simulate.hpp"
#include "ebc/verify.hpp"

using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

struct GridRange {
  long long lo = 0, hi = 0;
};

// "0..8" → {0,...,8}, a single "5" → {5,...,5}
GridRange parse_range(const std::string& s) {
  GridRange r;
  auto dots = s.find("..");
  try {
    if (dots == std::string::npos) {
      r.lo = r.hi = std::stoll(s);
    } else {
      r.lo = std::stoll(s.substr(0, dots));
      r.hi = std::stoll(s.substr(dots + 2));
    }
  } catch (...) {
    throw std::runtime_error("bad range '" + s + "' (expected A..B)");
  }
  if (r.lo < 0 || r.hi < r.lo) throw std::runtime_error("bad range '" + s + "'");
  return r;
}

int cmd_compile(const std::string& spec_path, bool as_pred, bool as_fn, bool all_voting,
                const std::string& out_path) {
  ebc::SpecDocument spec = ebc::parse_spec(slurp(spec_path));
  if (as_pred == as_fn) throw std::runtime_error("choose exactly one of --pred / --fn");
  std::string text;
  if (as_pred) {
    if (!spec.predicate) throw std::runtime_error(spec_path + " does not contain a predicate");
    ebc::CompiledCrd c = ebc::compile_predicate(*spec.predicate);
    if (all_voting) c = ebc::make_all_voting(c);
    text = ebc::print_crn(c.crd);
  } else {
    if (!spec.function) throw std::runtime_error(spec_path + " does not contain a function");
    if (all_voting) throw std::runtime_error("--all-voting applies to predicates only");
    ebc::CompiledCrc c = ebc::compile_function(*spec.function);
    text = ebc::print_crn(c.crc);
  }
  if (out_path.empty() || out_path == "-")
    std::cout << text;
  else
    write_file(out_path, text);
  return 0;
}

int cmd_analyze(const std::string& crn_path, const std::string& format) {
  ebc::CrnDocument doc = ebc::parse_crn(slurp(crn_path));
  const ebc::Crn& crn = doc.network();
  ebc::BoundednessCertificate cert = ebc::find_potential(crn);
  bool bounded = ebc::is_bounded(cert);
  if (format == "json") {
    json j;
    j["bounded"] = bounded;
    if (bounded) {
      auto& pot = std::get<ebc::PotentialFunction>(cert);
      json w = json::object();
      for (int s = 0; s < crn.species_count(); s++) w[crn.name(s)] = pot.weights[s].str();
      j["potential"] = w;
    } else {
      auto& far = std::get<ebc::FarkasWitness>(cert);
      json u = json::array();
      for (auto& k : far.multiplicities) u.push_back(k.str());
      j["witness"] = u;
    }
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << ebc::certificate_to_text(crn, cert);
  }
  return bounded ? 0 : 1;
}

int cmd_verify(const std::string& crn_path, const std::string& spec_path,
               const std::string& inputs, const std::string& format, std::size_t max_configs,
               bool reduce) {
  ebc::CrnDocument doc = ebc::parse_crn(slurp(crn_path));
  ebc::SpecDocument spec = ebc::parse_spec(slurp(spec_path));
  ebc::ExploreLimits limits;
  limits.max_configs = max_configs;
  limits.reduce = reduce;

  std::size_t arity;
  if (doc.kind == ebc::CrnDocument::Kind::Decider) {
    if (!spec.predicate) throw std::runtime_error("decider document needs a predicate spec");
    arity = doc.crd.inputs.size();
    if (arity != spec.predicate->variables.size())
      throw std::runtime_error("input arity mismatch between CRN and spec");
  } else if (doc.kind == ebc::CrnDocument::Kind::Computer) {
    if (!spec.function) throw std::runtime_error("computer document needs a function spec");
    arity = doc.crc.inputs.size();
    if (arity != spec.function->variables.size())
      throw std::runtime_error("input arity mismatch between CRN and spec");
  } else {
    throw std::runtime_error("document declares neither voters nor an output");
  }

  GridRange range = parse_range(inputs);
  std::vector<ebc::Count> x(arity, ebc::Count(range.lo));
  int fails = 0, inconclusive = 0, passes = 0;
  json rows = json::array();
  while (true) {
    ebc::Verdict v = doc.kind == ebc::CrnDocument::Kind::Decider
                         ? ebc::check_stably_decides(doc.crd, *spec.predicate, x, limits)
                         : ebc::check_stably_computes(doc.crc, *spec.function, x, limits);
    std::string point = "(";
    for (std::size_t i = 0; i < x.size(); i++) point += (i ? "," : "") + x[i].str();
    point += ")";
    std::string status = v.kind == ebc::VerdictKind::Pass           ? "pass"
                         : v.kind == ebc::VerdictKind::Fail         ? "FAIL"
                                                                    : "inconclusive";
    if (format == "json") {
      json r;
      r["input"] = point;
      r["status"] = status;
      r["detail"] = v.detail;
      rows.push_back(r);
    } else {
      std::cout << point << "\t" << status << "\t" << v.detail << "\n";
    }
    (v.kind == ebc::VerdictKind::Pass   ? passes
     : v.kind == ebc::VerdictKind::Fail ? fails
                                        : inconclusive)++;
    // odometer
    std::size_t i = 0;
    for (; i < arity; i++) {
      if (x[i] < range.hi) {
        x[i] += 1;
        for (std::size_t j = 0; j < i; j++) x[j] = range.lo;
        break;
      }
    }
    if (i == arity) break;
    if (arity == 0) break;
  }
  if (format == "json") {
    json j;
    j["results"] = rows;
    j["pass"] = passes;
    j["fail"] = fails;
    j["inconclusive"] = inconclusive;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "pass: " << passes << "  fail: " << fails << "  inconclusive: " << inconclusive
              << "\n";
  }
  return fails ? 1 : (inconclusive ? 2 : 0);
}

int cmd_simulate(const std::string& crn_path, const std::string& input, uint64_t seed,
                 double volume, uint64_t max_steps, const std::string& format) {
  ebc::CrnDocument doc = ebc::parse_crn(slurp(crn_path));
  const ebc::Crn& crn = doc.network();
  ebc::Configuration init = ebc::Configuration::of(crn, ebc::parse_count_list(input));
  if (doc.kind == ebc::CrnDocument::Kind::Decider) init = init.plus(doc.crd.context);
  if (doc.kind == ebc::CrnDocument::Kind::Computer) init = init.plus(doc.crc.context);
  if (volume <= 0) volume = init.total().convert_to<double>();
  if (volume <= 0) volume = 1.0;
  try {
    ebc::TrialRecord rec = ebc::run_to_terminal(crn, init, volume, seed, max_steps);
    if (format == "json") {
      json j;
      j["seed"] = seed;
      j["volume"] = volume;
      j["time"] = rec.stabilization_time;
      j["steps"] = rec.steps;
      json term = json::object();
      for (int s = 0; s < crn.species_count(); s++)
        if (rec.terminal.counts[s] != 0) term[crn.name(s)] = rec.terminal.counts[s].str();
      j["terminal"] = term;
      std::cout << j.dump(2) << "\n";
    } else {
      std::cout << "seed: " << seed << "\nvolume: " << volume
                << "\ntime: " << rec.stabilization_time << "\nsteps: " << rec.steps
                << "\nterminal: " << rec.terminal.to_string(crn) << "\n";
    }
  } catch (const ebc::StepLimit& e) {
    std::cerr << "step limit: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

int cmd_bench(const std::string& crn_path, const std::vector<uint64_t>& sizes, uint64_t trials,
              uint64_t seed, const std::string& shape, const std::string& csv_path) {
  ebc::CrnDocument doc = ebc::parse_crn(slurp(crn_path));
  ebc::InputShape s = shape == "balanced" ? ebc::InputShape::Balanced : ebc::InputShape::AllFirst;
  ebc::BenchTable table;
  try {
    if (doc.kind == ebc::CrnDocument::Kind::Decider)
      table = ebc::bench_stabilization(doc.crd, sizes, trials, seed, s);
    else if (doc.kind == ebc::CrnDocument::Kind::Computer)
      table = ebc::bench_stabilization(doc.crc, sizes, trials, seed, s);
    else
      throw std::runtime_error("bench needs a decider or computer document (input: directive)");
  } catch (const ebc::StepLimit& e) {
    std::cerr << "step limit: " << e.what() << "\n";
    return 2;
  }
  std::string csv = ebc::bench_csv(table);
  if (csv_path.empty() || csv_path == "-")
    std::cout << csv;
  else
    write_file(csv_path, csv);
  std::cout << "\n| n | mean_time | mean_time/(n ln n) |\n|---|-----------|-----|\n";
  for (auto& row : table.summary) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "| %llu | %.4f | %.5f |\n", (unsigned long long)row.n,
                  row.mean_time, row.normalized);
    std::cout << buf;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"execution-bounded CRN toolkit"};
  app.require_subcommand(1);
  std::string format = "table";
  app.add_option("--format", format, "output format")->check(CLI::IsMember({"table", "json"}));

  auto* c_compile = app.add_subcommand("compile", "compile a spec into a .crn artifact");
  std::string spec_path, out_path;
  bool as_pred = false, as_fn = false, all_voting = false;
  auto* opt_pred = c_compile->add_option("--pred", spec_path, "predicate spec file");
  c_compile->add_option("--fn", spec_path, "function spec file")->excludes(opt_pred);
  c_compile->add_option("-o,--output", out_path, "output .crn path ('-' for stdout)");
  c_compile->add_flag("--all-voting", all_voting, "convert the decider to all-voting form");
  c_compile->callback([&] {
    as_pred = c_compile->count("--pred") > 0;
    as_fn = c_compile->count("--fn") > 0;
  });

  auto* c_analyze = app.add_subcommand("analyze", "certify (non-)boundedness");
  std::string crn_path;
  c_analyze->add_option("crn", crn_path, "input .crn file")->required();

  auto* c_verify = app.add_subcommand("verify", "check stable computation on an input grid");
  std::string v_crn, v_spec, v_inputs = "0..5";
  std::size_t v_max_configs = 2'000'000;
  bool v_reduce = false;
  c_verify->add_option("crn", v_crn, "input .crn file")->required();
  c_verify->add_option("--spec", v_spec, "spec file with the expected semantics")->required();
  c_verify->add_option("--inputs", v_inputs, "per-variable input range A..B");
  c_verify->add_option("--max-configs", v_max_configs, "exploration budget");
  c_verify->add_flag("--reduce", v_reduce, "terminal-preserving partial order reduction");

  auto* c_sim = app.add_subcommand("simulate", "one stochastic trajectory to a terminal");
  std::string s_crn, s_input;
  uint64_t s_seed = 0, s_max_steps = 10'000'000;
  double s_volume = 0;
  c_sim->add_option("crn", s_crn, "input .crn file")->required();
  c_sim->add_option("--input", s_input, "input counts, e.g. \"3 X1, 5 X2\"")->required();
  c_sim->add_option("--seed", s_seed, "RNG seed")->required();
  c_sim->add_option("--volume", s_volume, "volume (default: initial molecular count)");
  c_sim->add_option("--max-steps", s_max_steps, "step budget");

  auto* c_bench = app.add_subcommand("bench", "stabilization-time benchmark");
  std::string b_crn, b_shape = "all-first", b_csv;
  std::vector<uint64_t> b_sizes;
  uint64_t b_trials = 100, b_seed = 1;
  c_bench->add_option("crn", b_crn, "input .crn file")->required();
  c_bench->add_option("--sizes", b_sizes, "input sizes, ascending")->required();
  c_bench->add_option("--trials", b_trials, "trials per size");
  c_bench->add_option("--seed", b_seed, "master seed");
  c_bench->add_option("--shape", b_shape, "input shape")
      ->check(CLI::IsMember({"all-first", "balanced"}));
  c_bench->add_option("--csv", b_csv, "CSV output path ('-' for stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_compile->parsed()) return cmd_compile(spec_path, as_pred, as_fn, all_voting, out_path);
    if (c_analyze->parsed()) return cmd_analyze(crn_path, format);
    if (c_verify->parsed())
      return cmd_verify(v_crn, v_spec, v_inputs, format, v_max_configs, v_reduce);
    if (c_sim->parsed())
      return cmd_simulate(s_crn, s_input, s_seed, s_volume, s_max_steps, format);
    if (c_bench->parsed()) return cmd_bench(b_crn, b_sizes, b_trials, b_seed, b_shape, b_csv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
