// harness.hpp - scenario files, batch runs, verification and scaling sweeps
//
// A scenario is a flat key=value file ('#' starts a comment). Each run is one
// (graph, size, seed) triple with its own graph, network and ledger, so runs
// are independent and may execute on several threads. Output rows are always
// ordered by run index, which keeps results.csv and ledger.csv byte-stable.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hybrid/engine.hpp"

namespace hybrid {

struct Scenario {
  std::string name = "scenario";
  std::string algorithm;
  std::vector<std::string> graphs;    // generator specs, "lowerbound:n=..,p=.." or "file:<path>"
  std::vector<std::size_t> sizes;     // overrides n (or the token count, see sweep_over)
  std::vector<std::uint64_t> seeds{1};
  bool verify = true;

  double x = 2.0 / 3.0;
  double y = 1.0 / 3.0;
  double epsilon = 0.5;
  std::size_t sources = 0;          // |U|; 0 means ceil(n^y)
  std::string source_mode = "random";  // random | spread
  std::optional<std::uint32_t> source;  // single-source algorithms; random when unset
  double h_const = 2.0;
  double gamma_const = 4.0;
  double sampler_const = 2.0;
  double theta = 1.0;
  double reassign_k = 1.0;
  double td_const = 3.0;
  unsigned max_retries = 4;
  std::optional<double> density;     // ER only: p = density * ln n / n
  std::optional<double> tail_frac;   // lollipop only: tail = tail_frac * n
  std::size_t tokens = 0;            // token-dissemination: k; 0 means n
  std::string sweep_over = "n";      // n | tokens
  std::string sweep_metric = "total";  // total, or a ledger phase label
};

// Throws Error(Parse) naming the origin and line.
Scenario parse_scenario(std::istream& in, const std::string& origin = "<input>");
Scenario load_scenario(const std::string& path);
const std::vector<std::string>& known_algorithms();

struct PhaseRow {
  std::string phase;
  PhaseTotals totals;
};

struct SeedRun {
  std::size_t index = 0;
  std::size_t graph_index = 0;
  std::string graph;  // resolved spec
  std::size_t size = 0;
  std::size_t n = 0;
  std::size_t m = 0;
  std::uint64_t seed = 0;
  std::string status = "ok";  // ok, or the error text
  std::uint64_t rounds = 0;
  unsigned retries = 0;
  unsigned tiered_retries = 0;
  std::size_t skeleton_size = 0;
  unsigned hop_radius = 0;
  double max_error = 0.0;
  std::uint64_t violations = 0;
  std::uint64_t drops = 0;
  unsigned gamma = 0;
  std::uint32_t max_send = 0;
  std::uint32_t max_recv = 0;
  std::map<std::string, double> extra;
  std::vector<PhaseRow> phases;
  double wall_seconds = 0.0;  // not written to the CSV files

  bool ok() const { return status == "ok"; }
};

struct RunResult {
  Scenario scenario;
  std::vector<SeedRun> runs;
  double wall_seconds = 0.0;
};

struct RunOptions {
  unsigned threads = 1;
  std::string transcript_dir;  // empty: no transcripts
};

RunResult run_scenario(const Scenario& s, const RunOptions& opts = {});

struct SweepRow {
  std::size_t size = 0;
  double median = 0.0;
  std::size_t runs = 0;
};

struct SweepResult {
  RunResult run;
  std::vector<SweepRow> table;
  double slope = 0.0;                   // least squares of log median vs log size
  std::optional<double> slope_polylog;  // with a log log term, 4+ sizes only
};

// Needs at least 3 sizes and 3 seeds.
SweepResult scaling_sweep(const Scenario& s, const RunOptions& opts = {});

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);
// Coefficient a of log y = a log x + b log log x + c.
double polylog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct TranscriptAudit {
  std::uint64_t rounds = 0;
  std::uint32_t max_send = 0;  // delivered global words from one node in one round
  std::uint32_t max_recv = 0;
  bool within(unsigned gamma) const { return max_send <= gamma && max_recv <= gamma; }
};
TranscriptAudit audit_transcript(std::istream& in);

void write_results_csv(std::ostream& out, const RunResult& r);
void write_ledger_csv(std::ostream& out, const RunResult& r);
void write_summary(std::ostream& out, const RunResult& r, const SweepResult* sweep = nullptr);
void write_sweep_csv(std::ostream& out, const SweepResult& s);
// results.csv, ledger.csv, summary.txt (and sweep.csv) under dir.
void write_outputs(const std::string& dir, const RunResult& r, const SweepResult* sweep = nullptr);

}  // namespace hybrid
