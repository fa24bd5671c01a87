#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wikisignals/seedset.hpp"
#include "wikisignals/signals.hpp"
#include "wikisignals/title.hpp"

namespace wikisignals {

// One Wikidata item: QID, enwiki sitelink (normalized) and the item-valued
// statements of the configured properties. Deprecated-rank statements are
// excluded; values are deduplicated.
struct EntityRecord {
  std::string qid;
  std::optional<Title> enwiki_title;
  std::vector<std::string> p31_values;
  std::map<std::string, std::vector<std::string>> extra_claims;  // configured non-P31 properties
};

// Parses one line of the line-delimited JSON entity dump. Array brackets and
// trailing commas are tolerated; bracket-only lines and non-item entities
// yield nullopt. Malformed JSON raises MalformedJsonError with the line
// number.
std::optional<EntityRecord> parse_entity_line(std::string_view line,
                                              const std::vector<std::string>& properties = {"P31"},
                                              std::size_t line_no = 0);

// enwiki title -> entity. On duplicate sitelink titles the entity with the
// numerically smaller QID wins, independent of insertion order, and a
// warning is counted.
struct SitelinkIndex {
  std::unordered_map<Title, EntityRecord, TitleHash> by_title;
  std::size_t duplicate_warnings = 0;

  void add(EntityRecord record);
  void merge(SitelinkIndex&& other);
  const EntityRecord* find(const Title& title) const;
};

// Line-by-line entity stream over a dump file or caller-supplied stream.
// In lenient mode malformed lines are counted and skipped; in strict mode
// they raise MalformedJsonError.
class EntityStream {
 public:
  EntityStream(const std::string& path, std::vector<std::string> properties = {"P31"},
               bool strict = false);
  EntityStream(std::unique_ptr<std::istream> input, std::vector<std::string> properties = {"P31"},
               bool strict = false);
  ~EntityStream();
  EntityStream(EntityStream&&) noexcept;
  EntityStream& operator=(EntityStream&&) noexcept;

  std::optional<EntityRecord> next();
  std::size_t malformed_lines() const { return malformed_lines_; }

 private:
  std::unique_ptr<std::istream> input_;
  std::vector<std::string> properties_;
  bool strict_ = false;
  std::size_t line_no_ = 0;
  std::size_t malformed_lines_ = 0;
};

SitelinkIndex build_sitelink_index(EntityStream& entities);

// Share of set members carrying each P31 value. Members missing from the
// index (or missing P31) stay in the denominator.
FrequencyTable p31_distribution(const SeedSet& set, const SitelinkIndex& index);

}  // namespace wikisignals
