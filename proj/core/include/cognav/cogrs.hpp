#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace cognav {

// One model token with its natural-log probability (always <= 0).
struct TokenLogProb {
  std::string text;
  double logprob = 0.0;
};

// Half-open token index range [start, end).
struct TokenSpan {
  std::size_t start = 0;
  std::size_t end = 0;

  bool operator==(const TokenSpan&) const = default;
};

// A scored training sample: token stream plus the decision-critical spans.
// Spans must be sorted, non-overlapping, in bounds, and non-empty as a set.
struct TokenLogProbRecord {
  std::string sample_id;
  std::vector<TokenLogProb> tokens;
  std::vector<TokenSpan> critical_spans;
};

// Closed perplexity interval used for rejection sampling.
struct PerplexityBand {
  double tau_min = 0.0;
  double tau_max = 0.0;
};

// Throws ConfigError unless 0 < tau_min < tau_max.
void validate(const PerplexityBand& band);

// Throws SchemaError on span invariant violations; EmptySpansError if no spans.
void validate(const TokenLogProbRecord& record);

// exp(-(sum of logprobs over all critical-span tokens) / N) where N is the
// total critical token count. Validates the record first.
double span_perplexity(const TokenLogProbRecord& record);

struct KeptSample {
  std::string sample_id;
  double ppl = 0.0;

  bool operator==(const KeptSample&) const = default;
};

// Band filter outcome. kept is sorted by sample_id; kept.size() + below +
// above equals the number of input records.
struct FilterOutcome {
  std::vector<KeptSample> kept;
  std::size_t below = 0;
  std::size_t above = 0;
};

// Keeps exactly the records with tau_min <= ppl <= tau_max.
FilterOutcome filter_band(const std::vector<TokenLogProbRecord>& records,
                          const PerplexityBand& band);

// Auto band from the corpus: nearest-rank 40th and 90th percentiles of the
// given perplexities. Throws ConfigError on an empty input or when the two
// percentiles coincide (degenerate distribution).
PerplexityBand percentile_band(std::vector<double> ppls);

// Best-effort span marker: finds occurrences of plan-schema key names
// ("lm", "sem", "dir", "dist", "h", quoted) in the concatenated token text
// and returns the merged token ranges covering them. May return no spans.
std::vector<TokenSpan> mark_critical_spans(const std::vector<TokenLogProb>& tokens);

// Parses one JSON-lines record; rejects unknown keys and invalid invariants.
TokenLogProbRecord parse_record_line(const std::string& line);

}  // namespace cognav
