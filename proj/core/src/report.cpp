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

#include <cstdio>
#include <ostream>

#include "pqfl/config.hpp"
#include "pqfl/io.hpp"

namespace pqfl::io {
namespace {

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string rule_text(const agg::AggRule& r) {
  switch (r.kind) {
    case agg::AggKind::kMean:
      return "mean";
    case agg::AggKind::kSum:
      return "sum";
    case agg::AggKind::kTrimmedMean:
      return "trimmed mean (" + fixed(r.trim_fraction, 2) + ")";
    case agg::AggKind::kKrum:
      return "krum (f=" + std::to_string(r.krum_f) + ")";
  }
  return "?";
}

std::string clip_text(const agg::ClipPolicy& c) {
  switch (c.mode) {
    case agg::ClipMode::kNone:
      return "none";
    case agg::ClipMode::kStatic:
      return "static " + fixed(c.threshold);
    case agg::ClipMode::kAdaptivePercentile:
      return "adaptive p" + fixed(c.percentile, 1);
  }
  return "?";
}

}  // namespace

void emit_report(const ReportInput& in, std::ostream& out) {
  out << "# pqfl scenario report\n\n";

  if (in.config) {
    const sim::ScenarioConfig& c = *in.config;
    out << "## Scenario\n\n"
        << "| setting | value |\n|---|---|\n"
        << "| crypto suite | " << sim::suite_key(c.suite) << " |\n"
        << "| clients | " << c.n_clients << " |\n"
        << "| rounds | " << c.rounds << " |\n"
        << "| aggregation | " << rule_text(c.agg_rule) << " |\n"
        << "| clipping | " << clip_text(c.clip) << " |\n"
        << "| differential privacy | "
        << (c.dp.enabled ? "epsilon " + fixed(c.dp.epsilon, 3) + " per round" : std::string("off")) << " |\n"
        << "| attackers | " << c.attack.attacker_ids.size() << " |\n"
        << "| seed | " << c.seed << " |\n"
        << "| config hash | `" << to_hex(sim::config_hash(c)) << "` |\n\n";
  }

  out << "## Convergence\n\n";
  if (in.metrics.rounds.empty()) {
    out << "No rounds recorded.\n\n";
  } else {
    out << "| round | loss | accuracy | contributors | excluded | bytes |\n|---|---|---|---|---|---|\n";
    for (const sim::RoundMetrics& r : in.metrics.rounds) {
      out << "| " << r.round << " | " << fixed(r.loss) << " | " << fixed(r.accuracy) << " | " << r.contributors
          << " | " << r.excluded << " | " << r.bytes << " |\n";
    }
    out << "\nFinal held-out accuracy: " << fixed(in.metrics.final_accuracy) << " [^ref]\n\n";
  }
  if (in.metrics.total_epsilon > 0.0) {
    out << "Privacy spend (basic composition): epsilon " << fixed(in.metrics.total_epsilon, 3) << ", delta "
        << in.metrics.total_delta << "\n\n";
  }

  out << "## Overhead\n\n";
  if (in.overhead) {
    out << "Phase B+C wall time, median of " << in.overhead->base_s.size() << " runs: base "
        << fixed(in.overhead->base_median_s, 6) << " s, variant " << fixed(in.overhead->variant_median_s, 6)
        << " s.\n\nOverhead ratio: " << fixed(in.overhead->ratio) << " [^ref]\n\n";
  } else if (in.metrics.overhead_ratio) {
    out << "Overhead ratio: " << fixed(*in.metrics.overhead_ratio) << " [^ref]\n\n";
  } else {
    out << "Not measured in this run (use `pqfl bench`).\n\n";
  }

  if (in.harvest) {
    out << "## Harvest now, decrypt later\n\n"
        << "Eavesdropper replay: recovered " << in.harvest->recovered << "/" << in.harvest->total_messages
        << " messages.\n\nMethod: " << in.harvest->method << "\n\n";
  }

  out << "[^ref]: Published reference figures, shown for context only and not asserted by any test: "
         "18.7% latency overhead for the post-quantum pipeline and 97.6% threat-detection accuracy.\n";
  if (!out) throw IoError("failed to write report");
}

}  // namespace pqfl::io
