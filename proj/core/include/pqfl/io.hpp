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

// Metrics files, transcript files, and the markdown summary report.

#ifndef PQFL_IO_HPP_
#define PQFL_IO_HPP_

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pqfl/adversary.hpp"
#include "pqfl/bytes.hpp"
#include "pqfl/simnet.hpp"
#include "pqfl/wire.hpp"

namespace pqfl::io {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class MetricsFormat { kCsv, kJson };

struct MetricsWriteOptions {
  // Wall-clock phase timings vary run to run. Off by default so that
  // repeated runs produce byte-identical files; the columns then read 0.
  bool include_timings = false;
};

// CSV: round,loss,accuracy,contributors,excluded,bytes,phaseA_s,phaseB_s,phaseC_s
// then a "# final ..." trailer line. JSON mirrors sim::Metrics.
void write_metrics(const sim::Metrics& metrics, MetricsFormat format, std::ostream& out,
                   const MetricsWriteOptions& options = {});
sim::Metrics read_metrics_json(std::string_view text);

// Transcript file:
//   "PQFLTR1" || config hash (32) || transcript count u32
//   per transcript: round u32 || message count u32 || records
//   per record:     phase u8 || sender u32 || length u32 || bytes
// Timings are not stored.
inline constexpr std::string_view kTranscriptMagic = "PQFLTR1";

Bytes encode_transcripts(std::span<const wire::RoundTranscript> transcripts, const Seed32& config_hash);
void dump_transcripts(std::span<const wire::RoundTranscript> transcripts, const Seed32& config_hash,
                      std::ostream& out);

struct LoadedTranscripts {
  Seed32 config_hash{};
  std::vector<wire::RoundTranscript> transcripts;
  std::vector<std::string> warnings;
};

struct LoadOptions {
  std::optional<Seed32> expected_hash;
  bool strict = false;  // hash mismatch is an error instead of a warning
};

// Throws IoError on bad magic or a truncated/garbled record; the message
// names the record index.
LoadedTranscripts decode_transcripts(ByteView bytes, const LoadOptions& options = {});
LoadedTranscripts load_transcripts(std::istream& in, const LoadOptions& options = {});

struct ReportInput {
  std::optional<sim::ScenarioConfig> config;
  sim::Metrics metrics;
  std::optional<sim::OverheadReport> overhead;
  std::optional<adversary::DecryptionReport> harvest;
};

void emit_report(const ReportInput& input, std::ostream& out);

// One line per message; used by `inspect`.
void describe_transcripts(std::span<const wire::RoundTranscript> transcripts, std::ostream& out);

}  // namespace pqfl::io

#endif  // PQFL_IO_HPP_
