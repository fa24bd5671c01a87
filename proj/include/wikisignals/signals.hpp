#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "wikisignals/seedset.hpp"
#include "wikisignals/title.hpp"

namespace wikisignals {

enum class SignalKind { LeadLink, Category, P31 };

std::string_view to_string(SignalKind kind);
SignalKind signal_kind_from_string(std::string_view s);

// Per-signal article counts for one seed set. counts[k] is the number of set
// members carrying key k at least once; the denominator is the set size, so
// shares may sum above 100%.
struct FrequencyTable {
  SignalKind kind = SignalKind::LeadLink;
  std::string set_name;
  std::uint64_t denominator = 0;
  std::map<std::string, std::uint64_t> counts;

  bool operator==(const FrequencyTable&) const = default;
};

// Streaming tally: feed each article once with its key list; keys are
// deduplicated within the article before counting. Articles outside the set
// contribute nothing. In strict mode a repeated article raises
// DuplicateArticleError. A partial builder (one worker's share of a page
// partition) starts at denominator 0 and counts each covered member once,
// so partial denominators add up under merge; a full builder pins the
// denominator to the set size.
class TallyBuilder {
 public:
  TallyBuilder(const SeedSet& set, SignalKind kind, bool strict = false, bool partial = false);

  void add_article(const Title& article, const std::vector<std::string>& keys);
  FrequencyTable take();
  const FrequencyTable& table() const { return table_; }

 private:
  const SeedSet* set_;
  bool strict_;
  bool partial_;
  FrequencyTable table_;
  std::unordered_set<Title, TitleHash> seen_;  // strict or partial mode
};

FrequencyTable tally(const SeedSet& set,
                     const std::vector<std::pair<Title, std::vector<std::string>>>& per_article_keys,
                     SignalKind kind, bool strict = false);

// Pointwise sum over tables with the same kind, set name and disjoint
// article coverage; denominators add. Associative and commutative.
FrequencyTable merge(const FrequencyTable& a, const FrequencyTable& b);

struct CoverageStat {
  std::string key;
  std::uint64_t in_set = 0;
  std::uint64_t global = 0;

  bool has_ratio() const { return global > 0; }
  double ratio() const { return static_cast<double>(in_set) / static_cast<double>(global); }
};

CoverageStat coverage(const std::string& key, const FrequencyTable& set_table,
                      const FrequencyTable& global_table);

struct TopEntry {
  std::string key;
  std::uint64_t count = 0;
  std::string share;  // "38.54%"
};

// Top k rows, count descending, ties by ascending key. Deterministic.
std::vector<TopEntry> top_k(const FrequencyTable& table, std::size_t k);

// count/denominator as a percentage, two decimals, half-up, computed in
// integer arithmetic. "null" when denominator is zero.
std::string render_percent(std::uint64_t count, std::uint64_t denominator);

// TSV: header "key\tcount\tshare", rows in top_k order, LF endings.
void write_table_tsv(std::ostream& out, const FrequencyTable& table);
// JSON carries kind, set name and denominator and round-trips.
void write_table_json(std::ostream& out, const FrequencyTable& table);
FrequencyTable read_table_json(std::istream& in);
FrequencyTable read_table_json_file(const std::string& path);

// TSV: header "key\tin_set\tglobal\tratio"; ratio rendered as a percentage
// or "null" when the global count is zero.
void write_coverage_tsv(std::ostream& out, const std::vector<CoverageStat>& stats);

}  // namespace wikisignals
