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

#include <json.hpp>

#include "pqfl/io.hpp"

namespace pqfl::io {
namespace {

using nlohmann::json;

// %.17g round-trips every double.
std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

wire::PhaseTimings visible(const wire::PhaseTimings& t, const MetricsWriteOptions& opt) {
  return opt.include_timings ? t : wire::PhaseTimings{};
}

}  // namespace

void write_metrics(const sim::Metrics& metrics, MetricsFormat format, std::ostream& out,
                   const MetricsWriteOptions& options) {
  if (format == MetricsFormat::kCsv) {
    out << "round,loss,accuracy,contributors,excluded,bytes,phaseA_s,phaseB_s,phaseC_s\n";
    for (const sim::RoundMetrics& r : metrics.rounds) {
      const wire::PhaseTimings t = visible(r.timings, options);
      out << r.round << ',' << num(r.loss) << ',' << num(r.accuracy) << ',' << r.contributors << ',' << r.excluded
          << ',' << r.bytes << ',' << num(t.local_training_s) << ',' << num(t.submission_s) << ','
          << num(t.aggregation_s) << '\n';
    }
    out << "# final accuracy=" << num(metrics.final_accuracy)
        << " overhead_ratio=" << (metrics.overhead_ratio ? num(*metrics.overhead_ratio) : "na")
        << " total_epsilon=" << num(metrics.total_epsilon) << " total_delta=" << num(metrics.total_delta) << '\n';
  } else {
    json rounds = json::array();
    for (const sim::RoundMetrics& r : metrics.rounds) {
      const wire::PhaseTimings t = visible(r.timings, options);
      rounds.push_back({{"round", r.round},
                        {"loss", r.loss},
                        {"accuracy", r.accuracy},
                        {"contributors", r.contributors},
                        {"excluded", r.excluded},
                        {"bytes", r.bytes},
                        {"phaseA_s", t.local_training_s},
                        {"phaseB_s", t.submission_s},
                        {"phaseC_s", t.aggregation_s}});
    }
    json fin = {{"accuracy", metrics.final_accuracy},
                {"overhead_ratio", nullptr},
                {"total_epsilon", metrics.total_epsilon},
                {"total_delta", metrics.total_delta}};
    if (metrics.overhead_ratio) fin["overhead_ratio"] = *metrics.overhead_ratio;
    out << json{{"rounds", rounds}, {"final", fin}}.dump(2) << '\n';
  }
  if (!out) throw IoError("failed to write metrics");
}

sim::Metrics read_metrics_json(std::string_view text) {
  try {
    const json doc = json::parse(text.begin(), text.end());
    sim::Metrics m;
    for (const json& r : doc.at("rounds")) {
      sim::RoundMetrics rm;
      rm.round = r.at("round").get<std::uint32_t>();
      rm.loss = r.at("loss").get<double>();
      rm.accuracy = r.at("accuracy").get<double>();
      rm.contributors = r.at("contributors").get<std::size_t>();
      rm.excluded = r.at("excluded").get<std::size_t>();
      rm.bytes = r.at("bytes").get<std::uint64_t>();
      rm.timings.local_training_s = r.at("phaseA_s").get<double>();
      rm.timings.submission_s = r.at("phaseB_s").get<double>();
      rm.timings.aggregation_s = r.at("phaseC_s").get<double>();
      m.rounds.push_back(rm);
    }
    const json& fin = doc.at("final");
    m.final_accuracy = fin.at("accuracy").get<double>();
    if (!fin.at("overhead_ratio").is_null()) m.overhead_ratio = fin.at("overhead_ratio").get<double>();
    m.total_epsilon = fin.at("total_epsilon").get<double>();
    m.total_delta = fin.at("total_delta").get<double>();
    return m;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed metrics JSON: ") + e.what());
  }
}

}  // namespace pqfl::io
