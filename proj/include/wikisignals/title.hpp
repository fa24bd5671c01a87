#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

namespace wikisignals {

inline constexpr int kNsMain = 0;
inline constexpr int kNsTalk = 1;
inline constexpr int kNsFile = 6;
inline constexpr int kNsTemplate = 10;
inline constexpr int kNsCategory = 14;

// A normalized page identifier. `name` carries no underscores, no fragment,
// no leading/trailing whitespace, single internal spaces, first scalar
// uppercased.
struct Title {
  int ns = kNsMain;
  std::string name;

  auto operator<=>(const Title&) const = default;
};

struct TitleHash {
  std::size_t operator()(const Title& t) const {
    return std::hash<std::string>()(t.name) ^ (std::hash<int>()(t.ns) << 1);
  }
};

// Namespace prefix table. Lookup is case-insensitive on the whole prefix
// (MediaWiki convention: "category:X" and "Category:X" are the same page).
class NamespaceTable {
 public:
  // Standard English Wikipedia namespaces plus common aliases.
  static const NamespaceTable& enwiki_default();

  void add(std::string prefix, int ns);
  std::optional<int> lookup(std::string_view prefix) const;
  const std::string& canonical_prefix(int ns) const;  // "" for main

 private:
  std::unordered_map<std::string, int> by_prefix_;     // lowercased key
  std::unordered_map<int, std::string> by_namespace_;  // first added wins
};

// Interlanguage / interwiki prefixes ("fr", "wikt", "commons", ...). These
// are link-routing prefixes, not namespaces, and links carrying them never
// resolve to local articles.
bool is_interwiki_prefix(std::string_view prefix);

// Decodes the common named HTML entities plus numeric (&#nnn; / &#xhh;)
// references to UTF-8. Unknown entities are left as written.
std::string decode_html_entities(std::string_view text);

// Uppercases the first Unicode scalar using the simple case mapping for
// ASCII, Latin-1, Latin Extended-A, Greek and Cyrillic; other scripts are
// left unchanged.
std::string uppercase_first_scalar(std::string_view text);

// Shared name-part normalization: underscores to spaces, whitespace runs
// collapsed, trimmed, first scalar uppercased. Returns "" for blank input.
std::string normalize_name_part(std::string_view raw);

// Full title normalization: entity decoding, fragment stripping, namespace
// prefix resolution, name-part normalization. Returns nullopt when nothing
// remains (blank input, bare fragment, bare prefix).
std::optional<Title> try_normalize_title(
    std::string_view raw,
    const NamespaceTable& namespaces = NamespaceTable::enwiki_default());

// Throwing variant; raises EmptyTitleError where try_normalize_title would
// return nullopt.
Title normalize_title(
    std::string_view raw,
    const NamespaceTable& namespaces = NamespaceTable::enwiki_default());

// "Dune (novel)", "Talk:Dune (novel)", "Category:Fantasy". Inverse of
// try_normalize_title for every normalized title.
std::string to_string(const Title& title,
                      const NamespaceTable& namespaces = NamespaceTable::enwiki_default());

}  // namespace wikisignals
