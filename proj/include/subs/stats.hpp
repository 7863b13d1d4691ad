#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "subs/corpus_io.hpp"
#include "subs/engine.hpp"

namespace subs {

struct LengthStat {
  std::size_t count = 0;
  std::size_t sum = 0;
  std::size_t max = 0;

  void add(std::size_t value);
  void merge(const LengthStat& other);
  double average() const noexcept { return count ? static_cast<double>(sum) / count : 0.0; }
};

// Complexity of an augmented set. Program lengths count "(", ")" and "," as
// tokens; the *_symbols variants count constants only.
struct StatsReport {
  std::size_t n_train = 0;
  std::size_t n_augmented = 0;
  LengthStat utterance;          // att l
  LengthStat program;            // prg l
  LengthStat program_symbols;
  LengthStat utterance_segment;  // att seg l
  LengthStat program_segment;    // prg seg l
  LengthStat program_segment_symbols;
  // Utterance and program segments pooled together (seg l).
  LengthStat segment;

  void merge(const StatsReport& other);
};

// Throws MissingProvenance for records without provenance or program path.
StatsReport complexity_stats(std::span<const AugmentedExample> aug, std::size_t n_train = 0);

// Averages rounded to two decimals; keys follow the augmented-data complexity
// table (avg_att_l, max_att_l, avg_prg_l, ...).
std::string stats_to_json(const StatsReport& r);
std::string stats_to_table(const StatsReport& r);
void write_report(const StatsReport& r, const std::filesystem::path& path);

struct Recovery {
  std::size_t hits = 0;
  std::size_t total = 0;
  double fraction = 0.0;

  // "3351/4476 (74.87%)"
  std::string to_string() const;
};

Recovery test_recovery(std::span<const AugmentedExample> aug, std::span<const ExampleRecord> test);

}  // namespace subs
