/*
 * Copyright 2026 The pqfl Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// pqfl: run / harvest / bench / inspect.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pqfl/config.hpp"
#include "pqfl/io.hpp"
#include "pqfl/simnet.hpp"

namespace {

using namespace pqfl;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  std::string transcript_path;
  std::string report_path;
  std::string format = "csv";
  bool strict = false;
  bool harvest = false;
  bool timings = false;
  std::size_t reps = 3;
};

sim::ScenarioConfig load_config(const Options& o) {
  sim::ScenarioConfig c = sim::load_scenario_config(o.config_path);
  if (o.seed) c.seed = *o.seed;
  return c;
}

// Writes to `path`, or to stdout when path is empty.
template <class Fn>
void write_output(const std::string& path, Fn&& fn) {
  if (path.empty()) {
    fn(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io::IoError("cannot open " + path + " for writing");
  fn(out);
  out.close();
  if (!out) throw io::IoError("failed writing " + path);
}

io::MetricsFormat parse_format(const std::string& f) {
  return f == "json" ? io::MetricsFormat::kJson : io::MetricsFormat::kCsv;
}

io::LoadedTranscripts read_transcripts(const Options& o) {
  std::ifstream in(o.transcript_path, std::ios::binary);
  if (!in) throw io::IoError("cannot open transcript " + o.transcript_path);
  io::LoadOptions lo;
  lo.strict = o.strict;
  if (!o.config_path.empty()) lo.expected_hash = sim::config_hash(load_config(o));
  io::LoadedTranscripts loaded = io::load_transcripts(in, lo);
  for (const std::string& w : loaded.warnings) std::cerr << "warning: " << w << '\n';
  return loaded;
}

void print_harvest(const adversary::DecryptionReport& r) {
  std::cout << "harvest: recovered " << r.recovered << "/" << r.total_messages << " messages (" << r.method << ")\n";
}

int cmd_run(const Options& o) {
  const sim::ScenarioConfig cfg = load_config(o);
  const sim::ScenarioResult result = sim::run_scenario(cfg);

  io::MetricsWriteOptions wo;
  wo.include_timings = o.timings;
  write_output(o.out_path, [&](std::ostream& os) { io::write_metrics(result.metrics, parse_format(o.format), os, wo); });
  if (!o.transcript_path.empty()) {
    write_output(o.transcript_path,
                 [&](std::ostream& os) { io::dump_transcripts(result.transcripts, sim::config_hash(cfg), os); });
  }

  io::ReportInput report{cfg, result.metrics, std::nullopt, std::nullopt};
  if (o.harvest) {
    report.harvest = adversary::harvest_decrypt(result.transcripts, adversary::QuantumOracle{});
    print_harvest(*report.harvest);
  }
  if (!o.report_path.empty()) write_output(o.report_path, [&](std::ostream& os) { io::emit_report(report, os); });
  if (!o.out_path.empty()) {
    std::cerr << "final accuracy " << result.metrics.final_accuracy << " after " << result.metrics.rounds.size()
              << " rounds\n";
  }
  return 0;
}

int cmd_harvest(const Options& o) {
  const io::LoadedTranscripts loaded = read_transcripts(o);
  const adversary::DecryptionReport r = adversary::harvest_decrypt(loaded.transcripts, adversary::QuantumOracle{});
  print_harvest(r);
  if (!o.report_path.empty() || !o.out_path.empty()) {
    io::ReportInput report;
    if (!o.config_path.empty()) report.config = load_config(o);
    report.harvest = r;
    write_output(o.report_path.empty() ? o.out_path : o.report_path,
                 [&](std::ostream& os) { io::emit_report(report, os); });
  }
  return 0;
}

int cmd_bench(const Options& o) {
  const sim::ScenarioConfig cfg = load_config(o);
  const auto rows = sim::bench_comparisons(cfg, o.reps);

  write_output(o.out_path, [&](std::ostream& os) {
    if (o.format == "json") {
      nlohmann::json doc = nlohmann::json::array();
      for (const auto& row : rows) {
        doc.push_back({{"comparison", row.name},
                       {"base_median_s", row.report.base_median_s},
                       {"variant_median_s", row.report.variant_median_s},
                       {"ratio", row.report.ratio},
                       {"base_s", row.report.base_s},
                       {"variant_s", row.report.variant_s}});
      }
      os << doc.dump(2) << '\n';
    } else {
      os << "comparison,base_median_s,variant_median_s,ratio\n";
      for (const auto& row : rows) {
        char line[256];
        std::snprintf(line, sizeof line, "%s,%.9g,%.9g,%.9g\n", row.name.c_str(), row.report.base_median_s,
                      row.report.variant_median_s, row.report.ratio);
        os << line;
      }
      os << "# reference (not asserted): published overhead 18.7%, published alpha 0.22\n";
    }
  });
  if (!o.report_path.empty()) {
    io::ReportInput report{cfg, {}, rows.front().report, std::nullopt};
    write_output(o.report_path, [&](std::ostream& os) { io::emit_report(report, os); });
  }
  return 0;
}

int cmd_inspect(const Options& o) {
  const io::LoadedTranscripts loaded = read_transcripts(o);
  std::cout << "config hash " << to_hex(loaded.config_hash) << ", " << loaded.transcripts.size() << " rounds\n";
  io::describe_transcripts(loaded.transcripts, std::cout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Post-quantum federated learning simulator"};
  app.require_subcommand(1);
  Options o;
  std::uint64_t seed = 0;

  auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "Override the config seed")->each([&](const std::string&) { o.seed = seed; });
  };
  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  };

  CLI::App* run = app.add_subcommand("run", "Run a scenario and write metrics");
  run->add_option("--config", o.config_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
  add_seed(run);
  run->add_option("--out", o.out_path, "Metrics file (stdout if omitted)");
  add_format(run);
  run->add_option("--transcript", o.transcript_path, "Write the wire transcript here");
  run->add_option("--report", o.report_path, "Write a markdown report here");
  run->add_flag("--harvest", o.harvest, "Replay the transcript through the eavesdropper");
  run->add_flag("--timings", o.timings, "Include wall-clock phase timings in the metrics");

  CLI::App* harvest = app.add_subcommand("harvest", "Replay a recorded transcript through the order-finding oracle");
  harvest->add_option("--transcript", o.transcript_path, "Transcript file")->required()->check(CLI::ExistingFile);
  harvest->add_option("--config", o.config_path, "Scenario JSON to check the transcript hash against")
      ->check(CLI::ExistingFile);
  add_seed(harvest);
  harvest->add_flag("--strict", o.strict, "Treat a config-hash mismatch as an error");
  harvest->add_option("--out,--report", o.report_path, "Write a markdown report here");

  CLI::App* bench = app.add_subcommand("bench", "Measure phase B+C overhead of the post-quantum suite");
  bench->add_option("--config", o.config_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
  add_seed(bench);
  bench->add_option("--out", o.out_path, "Results file (stdout if omitted)");
  add_format(bench);
  bench->add_option("--reps", o.reps, "Repetitions per configuration")->check(CLI::PositiveNumber);
  bench->add_option("--report", o.report_path, "Write a markdown report here");

  CLI::App* inspect = app.add_subcommand("inspect", "Pretty-print a transcript");
  inspect->add_option("--transcript", o.transcript_path, "Transcript file")->required()->check(CLI::ExistingFile);
  inspect->add_option("--config", o.config_path, "Scenario JSON to check the transcript hash against")
      ->check(CLI::ExistingFile);
  add_seed(inspect);
  inspect->add_flag("--strict", o.strict, "Treat a config-hash mismatch as an error");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (run->parsed()) return cmd_run(o);
    if (harvest->parsed()) return cmd_harvest(o);
    if (bench->parsed()) return cmd_bench(o);
    if (inspect->parsed()) return cmd_inspect(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
