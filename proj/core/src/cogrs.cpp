#include "cognav/cogrs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cognav/errors.hpp"
#include "json_schema.hpp"

namespace cognav {

void validate(const PerplexityBand& band) {
  if (!(band.tau_min > 0.0) || !std::isfinite(band.tau_min)) {
    throw ConfigError("must be a finite value > 0", "tau_min");
  }
  if (!(band.tau_max > band.tau_min) || !std::isfinite(band.tau_max)) {
    throw ConfigError("must be finite and > tau_min", "tau_max");
  }
}

void validate(const TokenLogProbRecord& record) {
  for (std::size_t i = 0; i < record.tokens.size(); ++i) {
    const double lp = record.tokens[i].logprob;
    if (!std::isfinite(lp) || lp > 0.0) {
      throw SchemaError("must be a finite value <= 0",
                        "tokens[" + std::to_string(i) + "].logprob");
    }
  }
  if (record.critical_spans.empty()) {
    throw EmptySpansError("record '" + record.sample_id + "' has no critical spans");
  }
  std::size_t prev_end = 0;
  for (std::size_t i = 0; i < record.critical_spans.size(); ++i) {
    const TokenSpan& s = record.critical_spans[i];
    const std::string path = "critical_spans[" + std::to_string(i) + "]";
    if (s.start >= s.end) throw SchemaError("span must satisfy start < end", path);
    if (s.end > record.tokens.size()) throw SchemaError("span exceeds token count", path);
    if (i > 0 && s.start < prev_end) {
      throw SchemaError("spans must be sorted and non-overlapping", path);
    }
    prev_end = s.end;
  }
}

double span_perplexity(const TokenLogProbRecord& record) {
  validate(record);
  double sum = 0.0;
  std::size_t n = 0;
  for (const TokenSpan& s : record.critical_spans) {
    for (std::size_t i = s.start; i < s.end; ++i) sum += record.tokens[i].logprob;
    n += s.end - s.start;
  }
  return std::exp(-sum / static_cast<double>(n));
}

FilterOutcome filter_band(const std::vector<TokenLogProbRecord>& records,
                          const PerplexityBand& band) {
  validate(band);
  FilterOutcome out;
  for (const TokenLogProbRecord& r : records) {
    const double ppl = span_perplexity(r);
    if (ppl < band.tau_min) {
      ++out.below;
    } else if (ppl > band.tau_max) {
      ++out.above;
    } else {
      out.kept.push_back({r.sample_id, ppl});
    }
  }
  std::sort(out.kept.begin(), out.kept.end(),
            [](const KeptSample& a, const KeptSample& b) { return a.sample_id < b.sample_id; });
  return out;
}

namespace {

// Nearest-rank percentile over a sorted sample: value at rank ceil(p/100 * n).
double nearest_rank(const std::vector<double>& sorted, double p) {
  const double n = static_cast<double>(sorted.size());
  std::size_t rank = static_cast<std::size_t>(std::ceil(p / 100.0 * n));
  if (rank < 1) rank = 1;
  if (rank > sorted.size()) rank = sorted.size();
  return sorted[rank - 1];
}

}  // namespace

PerplexityBand percentile_band(std::vector<double> ppls) {
  if (ppls.empty()) throw ConfigError("cannot derive a band from zero perplexities");
  std::sort(ppls.begin(), ppls.end());
  PerplexityBand band;
  band.tau_min = nearest_rank(ppls, 40.0);
  band.tau_max = nearest_rank(ppls, 90.0);
  if (!(band.tau_min < band.tau_max)) {
    throw ConfigError("perplexity distribution too concentrated: P40 == P90");
  }
  validate(band);
  return band;
}

std::vector<TokenSpan> mark_critical_spans(const std::vector<TokenLogProb>& tokens) {
  std::string text;
  std::vector<std::size_t> starts(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    starts[i] = text.size();
    text += tokens[i].text;
  }

  static const char* kNeedles[] = {"\"lm\"", "\"sem\"", "\"dir\"", "\"dist\"", "\"h\""};
  std::vector<TokenSpan> spans;
  for (const char* needle : kNeedles) {
    const std::string pat = needle;
    std::size_t pos = 0;
    while ((pos = text.find(pat, pos)) != std::string::npos) {
      const std::size_t a = pos;
      const std::size_t b = pos + pat.size();
      // Token i covers [starts[i], starts[i] + len); find the covering range.
      std::size_t first = tokens.size();
      std::size_t last = 0;
      for (std::size_t i = 0; i < tokens.size(); ++i) {
        const std::size_t tb = starts[i] + tokens[i].text.size();
        if (tb > a && starts[i] < b && starts[i] != tb) {
          first = std::min(first, i);
          last = std::max(last, i + 1);
        }
      }
      if (first < last) spans.push_back({first, last});
      pos = b;
    }
  }
  std::sort(spans.begin(), spans.end(), [](const TokenSpan& a, const TokenSpan& b) {
    if (a.start != b.start) return a.start < b.start;
    return a.end < b.end;
  });
  std::vector<TokenSpan> merged;
  for (const TokenSpan& s : spans) {
    if (!merged.empty() && s.start <= merged.back().end) {
      merged.back().end = std::max(merged.back().end, s.end);
    } else {
      merged.push_back(s);
    }
  }
  return merged;
}

TokenLogProbRecord parse_record_line(const std::string& line) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what(), "<line>");
  }
  detail::require_object(doc, "<line>");
  detail::reject_unknown_keys(doc, {"sample_id", "tokens", "critical_spans"}, "<line>");

  TokenLogProbRecord record;
  record.sample_id = detail::require_string(doc, "sample_id", "<line>");
  const nlohmann::json& jtokens = detail::require_field(doc, "tokens", "<line>");
  detail::require_array(jtokens, "tokens");
  for (std::size_t i = 0; i < jtokens.size(); ++i) {
    const std::string path = "tokens[" + std::to_string(i) + "]";
    const nlohmann::json& jt = jtokens[i];
    detail::require_object(jt, path);
    detail::reject_unknown_keys(jt, {"text", "logprob"}, path);
    TokenLogProb tok;
    tok.text = detail::require_string(jt, "text", path);
    tok.logprob = detail::require_number(jt, "logprob", path);
    record.tokens.push_back(std::move(tok));
  }
  const nlohmann::json& jspans = detail::require_field(doc, "critical_spans", "<line>");
  detail::require_array(jspans, "critical_spans");
  for (std::size_t i = 0; i < jspans.size(); ++i) {
    const std::string path = "critical_spans[" + std::to_string(i) + "]";
    const nlohmann::json& js = jspans[i];
    if (!js.is_array() || js.size() != 2) {
      throw SchemaError("expected a [start, end) pair", path);
    }
    const std::int64_t start = detail::as_integer(js[0], path + "[0]");
    const std::int64_t end = detail::as_integer(js[1], path + "[1]");
    if (start < 0 || end < 0) throw SchemaError("span indices must be non-negative", path);
    record.critical_spans.push_back(
        {static_cast<std::size_t>(start), static_cast<std::size_t>(end)});
  }
  validate(record);
  return record;
}

}  // namespace cognav
