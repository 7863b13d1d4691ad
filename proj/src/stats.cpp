#include "subs/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_set>

#include <json.hpp>

namespace subs {

void LengthStat::add(std::size_t value) {
  ++count;
  sum += value;
  max = std::max(max, value);
}

void LengthStat::merge(const LengthStat& other) {
  count += other.count;
  sum += other.sum;
  max = std::max(max, other.max);
}

void StatsReport::merge(const StatsReport& o) {
  n_augmented += o.n_augmented;
  utterance.merge(o.utterance);
  program.merge(o.program);
  program_symbols.merge(o.program_symbols);
  utterance_segment.merge(o.utterance_segment);
  program_segment.merge(o.program_segment);
  program_segment_symbols.merge(o.program_segment_symbols);
  segment.merge(o.segment);
}

StatsReport complexity_stats(std::span<const AugmentedExample> aug, std::size_t n_train) {
  StatsReport r;
  r.n_train = n_train;
  for (const AugmentedExample& a : aug) {
    if (!a.provenance || !a.provenance->program_path)
      throw Error(ErrorCode::missing_provenance, "augmented example '" + a.id + "' has no provenance");
    const Provenance& p = *a.provenance;
    const Program& inserted = subprogram_at(a.program, *p.program_path);
    ++r.n_augmented;
    r.utterance.add(a.tokens.size());
    r.program.add(program_token_length(a.program));
    r.program_symbols.add(program_symbol_count(a.program));
    r.utterance_segment.add(p.donor_span.size());
    r.program_segment.add(program_token_length(inserted));
    r.program_segment_symbols.add(program_symbol_count(inserted));
    r.segment.add(p.donor_span.size());
    r.segment.add(program_token_length(inserted));
  }
  return r;
}

namespace {

double round2(double x) { return std::round(x * 100.0) / 100.0; }

struct Column {
  const char* avg_key;
  const char* max_key;
  const LengthStat StatsReport::*stat;
};

constexpr Column kColumns[] = {
    {"avg_att_l", "max_att_l", &StatsReport::utterance},
    {"avg_prg_l", "max_prg_l", &StatsReport::program},
    {"avg_prg_l_symbols", "max_prg_l_symbols", &StatsReport::program_symbols},
    {"avg_seg_l", "max_seg_l", &StatsReport::segment},
    {"avg_att_seg_l", "max_att_seg_l", &StatsReport::utterance_segment},
    {"avg_prg_seg_l", "max_prg_seg_l", &StatsReport::program_segment},
    {"avg_prg_seg_l_symbols", "max_prg_seg_l_symbols", &StatsReport::program_segment_symbols},
};

}  // namespace

std::string stats_to_json(const StatsReport& r) {
  nlohmann::ordered_json j;
  j["n_train"] = r.n_train;
  j["n_augmented"] = r.n_augmented;
  for (const Column& c : kColumns) {
    const LengthStat& s = r.*c.stat;
    j[c.avg_key] = round2(s.average());
    j[c.max_key] = s.max;
  }
  return j.dump(2);
}

std::string stats_to_table(const StatsReport& r) {
  std::string out;
  char line[128];
  std::snprintf(line, sizeof line, "%-24s %10zu\n", "training instances", r.n_train);
  out += line;
  std::snprintf(line, sizeof line, "%-24s %10zu\n", "augmented instances", r.n_augmented);
  out += line;
  for (const Column& c : kColumns) {
    const LengthStat& s = r.*c.stat;
    std::snprintf(line, sizeof line, "%-24s %10.2f\n", c.avg_key, s.average());
    out += line;
    std::snprintf(line, sizeof line, "%-24s %10zu\n", c.max_key, s.max);
    out += line;
  }
  return out;
}

void write_report(const StatsReport& r, const std::filesystem::path& path) {
  write_text_file(path, stats_to_json(r) + "\n");
}

std::string Recovery::to_string() const {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%zu/%zu (%.2f%%)", hits, total, fraction * 100.0);
  return buf;
}

Recovery test_recovery(std::span<const AugmentedExample> aug, std::span<const ExampleRecord> test) {
  std::unordered_set<std::string> keys;
  for (const AugmentedExample& a : aug) keys.insert(pair_key(a.tokens, a.program));
  Recovery r;
  r.total = test.size();
  for (const ExampleRecord& t : test)
    if (keys.contains(pair_key(tokenize_utterance(t.utterance), t.program))) ++r.hits;
  r.fraction = r.total ? static_cast<double>(r.hits) / static_cast<double>(r.total) : 0.0;
  return r;
}

}  // namespace subs
