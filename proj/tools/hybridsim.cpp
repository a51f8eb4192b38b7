// hybridsim - run, sweep and verify scenarios; generate graphs.
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "hybrid/errors.hpp"
#include "hybrid/generators.hpp"
#include "hybrid/harness.hpp"

using namespace hybrid;

namespace {

struct Common {
  std::string scenario;
  std::string out_dir = "out";
  unsigned threads = 1;
  bool transcript = false;

  RunOptions options() const {
    RunOptions o;
    o.threads = threads;
    if (transcript) o.transcript_dir = (std::filesystem::path(out_dir) / "transcripts").string();
    return o;
  }
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("scenario", c.scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  sub->add_option("--out-dir", c.out_dir, "Directory for results.csv, ledger.csv and summary.txt");
  sub->add_option("--threads", c.threads, "Runs executed in parallel")->check(CLI::PositiveNumber);
  sub->add_flag("--transcript", c.transcript, "Write per-run message transcripts under <out-dir>/transcripts");
}

bool clean(const RunResult& r) {
  for (const auto& s : r.runs)
    if (!s.ok() || s.violations > 0 || s.drops > 0) return false;
  return true;
}

int cmd_run(const Common& c, bool force_verify) {
  Scenario s = load_scenario(c.scenario);
  if (force_verify) s.verify = true;
  RunResult r = run_scenario(s, c.options());
  write_outputs(c.out_dir, r);
  write_summary(std::cout, r);
  return force_verify && !clean(r) ? 1 : 0;
}

int cmd_sweep(const Common& c) {
  Scenario s = load_scenario(c.scenario);
  SweepResult sw = scaling_sweep(s, c.options());
  write_outputs(c.out_dir, sw.run, &sw);
  write_summary(std::cout, sw.run, &sw);
  return 0;
}

int cmd_gen(const std::string& spec, const std::string& out, std::uint64_t seed) {
  if (spec.rfind("lowerbound:", 0) == 0) {
    std::size_t n = 0;
    double p = 0.0;
    std::stringstream in(spec.substr(11));
    std::string kv;
    while (std::getline(in, kv, ',')) {
      auto eq = kv.find('=');
      if (eq == std::string::npos) throw Error(ErrorKind::Parse, "expected key=value in '" + kv + "'");
      if (kv.substr(0, eq) == "n") n = std::stoull(kv.substr(eq + 1));
      if (kv.substr(0, eq) == "p") p = std::stod(kv.substr(eq + 1));
    }
    auto inst = gen_lower_bound_graph(n, p, seed);
    save_graph(out, inst.graph);
    std::ofstream roles(out + ".roles");
    write_roles(roles, inst);
    return 0;
  }
  GraphSpec gs = parse_graph_spec(spec);
  if (spec.find("seed=") == std::string::npos) gs.seed = seed;
  save_graph(out, gen_random_graph(gs));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid-network distance algorithm simulator"};
  app.require_subcommand(1);

  Common run_c, sweep_c, verify_c;
  auto* run = app.add_subcommand("run", "Execute every run of a scenario");
  add_common(run, run_c);
  auto* sweep = app.add_subcommand("sweep", "Scaling sweep over the scenario sizes; fits a log-log slope");
  add_common(sweep, sweep_c);
  auto* verify = app.add_subcommand("verify", "Run with oracle verification; exit 1 on any violation");
  add_common(verify, verify_c);

  std::string spec, out;
  std::uint64_t seed = 1;
  auto* gen = app.add_subcommand("gen-graph", "Write a generated graph as 'n m' then 'u v w' lines");
  gen->add_option("spec", spec, "e.g. er:n=100,p=0.1,wmax=10 or lowerbound:n=400,p=0.5")->required();
  gen->add_option("out", out, "Output file")->required();
  gen->add_option("--seed", seed, "Seed when the spec has none");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(run_c, false);
    if (*sweep) return cmd_sweep(sweep_c);
    if (*verify) return cmd_run(verify_c, true);
    if (*gen) return cmd_gen(spec, out, seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
