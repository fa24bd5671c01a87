#include "wikisignals/title.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <unordered_set>

#include "wikisignals/errors.hpp"

namespace wikisignals {

namespace {

bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Decodes one UTF-8 scalar at `pos`. Returns the codepoint and advances
// `pos`; invalid sequences decode as a single byte.
std::uint32_t decode_utf8(std::string_view s, std::size_t& pos) {
  unsigned char c = static_cast<unsigned char>(s[pos]);
  if (c < 0x80) {
    pos += 1;
    return c;
  }
  auto cont = [&](std::size_t i) {
    return i < s.size() && (static_cast<unsigned char>(s[i]) & 0xC0) == 0x80;
  };
  if ((c & 0xE0) == 0xC0 && cont(pos + 1)) {
    std::uint32_t cp = (c & 0x1Fu) << 6 | (static_cast<unsigned char>(s[pos + 1]) & 0x3Fu);
    pos += 2;
    return cp;
  }
  if ((c & 0xF0) == 0xE0 && cont(pos + 1) && cont(pos + 2)) {
    std::uint32_t cp = (c & 0x0Fu) << 12 | (static_cast<unsigned char>(s[pos + 1]) & 0x3Fu) << 6 |
                       (static_cast<unsigned char>(s[pos + 2]) & 0x3Fu);
    pos += 3;
    return cp;
  }
  if ((c & 0xF8) == 0xF0 && cont(pos + 1) && cont(pos + 2) && cont(pos + 3)) {
    std::uint32_t cp = (c & 0x07u) << 18 | (static_cast<unsigned char>(s[pos + 1]) & 0x3Fu) << 12 |
                       (static_cast<unsigned char>(s[pos + 2]) & 0x3Fu) << 6 |
                       (static_cast<unsigned char>(s[pos + 3]) & 0x3Fu);
    pos += 4;
    return cp;
  }
  pos += 1;
  return c;
}

void encode_utf8(std::uint32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Simple uppercase mapping for ASCII, Latin-1, Latin Extended-A, Greek and
// Cyrillic. Other scripts map to themselves.
std::uint32_t simple_upper(std::uint32_t cp) {
  if (cp >= 'a' && cp <= 'z') return cp - 0x20;
  if (cp >= 0xE0 && cp <= 0xFE && cp != 0xF7) return cp - 0x20;
  if (cp == 0xFF) return 0x178;
  if (cp == 0x131) return 'I';
  if (cp == 0x17F) return 'S';
  if (cp >= 0x100 && cp < 0x138) return (cp % 2 == 1) ? cp - 1 : cp;
  if (cp >= 0x139 && cp < 0x149) return (cp % 2 == 0) ? cp - 1 : cp;
  if (cp >= 0x14A && cp < 0x178) return (cp % 2 == 1) ? cp - 1 : cp;
  if (cp >= 0x17A && cp < 0x17F) return (cp % 2 == 0) ? cp - 1 : cp;
  if (cp == 0x3C2) return 0x3A3;  // final sigma
  if (cp >= 0x3B1 && cp <= 0x3CB && cp != 0x3C2) return cp - 0x20;
  if (cp >= 0x430 && cp <= 0x44F) return cp - 0x20;
  if (cp >= 0x450 && cp <= 0x45F) return cp - 0x50;
  return cp;
}

std::optional<std::uint32_t> parse_numeric_entity(std::string_view body) {
  if (body.empty()) return std::nullopt;
  std::uint32_t cp = 0;
  if (body[0] == 'x' || body[0] == 'X') {
    if (body.size() < 2) return std::nullopt;
    for (char c : body.substr(1)) {
      if (c >= '0' && c <= '9') cp = cp * 16 + (c - '0');
      else if (c >= 'a' && c <= 'f') cp = cp * 16 + (c - 'a' + 10);
      else if (c >= 'A' && c <= 'F') cp = cp * 16 + (c - 'A' + 10);
      else return std::nullopt;
      if (cp > 0x10FFFF) return std::nullopt;
    }
  } else {
    for (char c : body) {
      if (c < '0' || c > '9') return std::nullopt;
      cp = cp * 10 + (c - '0');
      if (cp > 0x10FFFF) return std::nullopt;
    }
  }
  if (cp == 0 || (cp >= 0xD800 && cp <= 0xDFFF)) return std::nullopt;
  return cp;
}

std::string decode_entities_once(std::string_view text) {
  static const std::unordered_map<std::string, std::uint32_t> named = {
      {"amp", '&'},   {"lt", '<'},    {"gt", '>'},     {"quot", '"'},
      {"apos", '\''}, {"nbsp", 0xA0}, {"ndash", 0x2013}, {"mdash", 0x2014},
  };
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '&') {
      out.push_back(text[i++]);
      continue;
    }
    std::size_t semi = text.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 32) {
      out.push_back(text[i++]);
      continue;
    }
    std::string_view body = text.substr(i + 1, semi - i - 1);
    std::optional<std::uint32_t> cp;
    if (!body.empty() && body[0] == '#') {
      cp = parse_numeric_entity(body.substr(1));
    } else {
      auto it = named.find(std::string(body));
      if (it != named.end()) cp = it->second;
    }
    if (cp) {
      encode_utf8(*cp, out);
      i = semi + 1;
    } else {
      out.push_back(text[i++]);
    }
  }
  return out;
}

// Whitespace for title purposes: ASCII whitespace plus U+00A0.
bool skip_title_space(std::string_view s, std::size_t& i) {
  if (is_ascii_space(s[i])) {
    ++i;
    return true;
  }
  if (static_cast<unsigned char>(s[i]) == 0xC2 && i + 1 < s.size() &&
      static_cast<unsigned char>(s[i + 1]) == 0xA0) {
    i += 2;
    return true;
  }
  return false;
}

}  // namespace

void NamespaceTable::add(std::string prefix, int ns) {
  by_namespace_.emplace(ns, prefix);  // first wins: canonical form
  by_prefix_[ascii_lower(prefix)] = ns;
}

std::optional<int> NamespaceTable::lookup(std::string_view prefix) const {
  auto it = by_prefix_.find(ascii_lower(prefix));
  if (it == by_prefix_.end()) return std::nullopt;
  return it->second;
}

const std::string& NamespaceTable::canonical_prefix(int ns) const {
  static const std::string empty;
  auto it = by_namespace_.find(ns);
  return it == by_namespace_.end() ? empty : it->second;
}

const NamespaceTable& NamespaceTable::enwiki_default() {
  static const NamespaceTable table = [] {
    NamespaceTable t;
    t.add("Talk", 1);
    t.add("User", 2);
    t.add("User talk", 3);
    t.add("Wikipedia", 4);
    t.add("Project", 4);
    t.add("WP", 4);
    t.add("Wikipedia talk", 5);
    t.add("Project talk", 5);
    t.add("File", 6);
    t.add("Image", 6);
    t.add("File talk", 7);
    t.add("Image talk", 7);
    t.add("MediaWiki", 8);
    t.add("MediaWiki talk", 9);
    t.add("Template", 10);
    t.add("Template talk", 11);
    t.add("Help", 12);
    t.add("Help talk", 13);
    t.add("Category", 14);
    t.add("Category talk", 15);
    t.add("Portal", 100);
    t.add("Portal talk", 101);
    t.add("Draft", 118);
    t.add("Draft talk", 119);
    t.add("Module", 828);
    t.add("Module talk", 829);
    t.add("Special", -1);
    t.add("Media", -2);
    return t;
  }();
  return table;
}

bool is_interwiki_prefix(std::string_view prefix) {
  static const std::unordered_set<std::string> prefixes = {
      // Wikipedia language editions (the larger ones).
      "aa", "ab", "af", "als", "am", "an", "ar", "arz", "as", "ast", "az", "azb",
      "ba", "bar", "be", "bg", "bn", "bo", "br", "bs", "ca", "ce", "ceb", "ckb",
      "cs", "cv", "cy", "da", "de", "el", "en", "eo", "es", "et", "eu", "fa",
      "fi", "fo", "fr", "fy", "ga", "gd", "gl", "gu", "he", "hi", "hr", "ht",
      "hu", "hy", "ia", "id", "io", "is", "it", "ja", "jv", "ka", "kk", "km",
      "kn", "ko", "ku", "ky", "la", "lb", "li", "lmo", "lt", "lv", "mg", "min",
      "mk", "ml", "mn", "mr", "ms", "my", "nap", "nds", "ne", "nl", "nn", "no",
      "oc", "or", "pa", "pl", "pms", "pnb", "ps", "pt", "ro", "ru", "sa", "scn",
      "sco", "sh", "si", "simple", "sk", "sl", "sq", "sr", "su", "sv", "sw",
      "ta", "te", "tg", "th", "tl", "tr", "tt", "uk", "ur", "uz", "vec", "vi",
      "vo", "wa", "war", "yi", "yo", "zh", "zh-min-nan", "zh-yue",
      // Sister projects and common interwiki shortcuts.
      "w", "wikt", "wiktionary", "n", "wikinews", "b", "wikibooks", "q",
      "wikiquote", "s", "wikisource", "species", "wikispecies", "v",
      "wikiversity", "voy", "wikivoyage", "wmf", "foundation", "commons", "c",
      "m", "meta", "metawikipedia", "incubator", "mw", "phab", "phabricator",
      "d", "wikidata", "wikitech", "toollabs", "iarchive", "arxiv", "doi",
      "oeis",
  };
  return prefixes.contains(ascii_lower(prefix));
}

std::string decode_html_entities(std::string_view text) {
  // Decoding to a fixed point keeps title normalization idempotent on
  // double-encoded input. Every decode strictly shrinks the string, so the
  // loop terminates.
  std::string cur(text);
  for (;;) {
    std::string next = decode_entities_once(cur);
    if (next == cur) return cur;
    cur = std::move(next);
  }
}

std::string uppercase_first_scalar(std::string_view text) {
  if (text.empty()) return {};
  std::size_t pos = 0;
  std::uint32_t cp = decode_utf8(text, pos);
  std::string out;
  out.reserve(text.size());
  encode_utf8(simple_upper(cp), out);
  out.append(text.substr(pos));
  return out;
}

std::string normalize_name_part(std::string_view raw) {
  std::string collapsed;
  collapsed.reserve(raw.size());
  std::size_t i = 0;
  bool pending_space = false;
  while (i < raw.size()) {
    if (raw[i] == '_') {
      ++i;
      pending_space = true;
      continue;
    }
    if (skip_title_space(raw, i)) {
      pending_space = true;
      continue;
    }
    if (pending_space && !collapsed.empty()) collapsed.push_back(' ');
    pending_space = false;
    collapsed.push_back(raw[i++]);
  }
  return uppercase_first_scalar(collapsed);
}

std::optional<Title> try_normalize_title(std::string_view raw, const NamespaceTable& namespaces) {
  std::string decoded = decode_html_entities(raw);
  std::string_view text = decoded;
  if (std::size_t hash = text.find('#'); hash != std::string_view::npos) {
    text = text.substr(0, hash);
  }

  // Trim, then strip a single leading colon (the forced-link form).
  std::size_t begin = 0;
  while (begin < text.size()) {
    std::size_t next = begin;
    if (text[next] == '_') {
      begin = next + 1;
    } else if (skip_title_space(text, next)) {
      begin = next;
    } else {
      break;
    }
  }
  text = text.substr(begin);
  if (!text.empty() && text[0] == ':') text = text.substr(1);

  int ns = kNsMain;
  std::string_view name_part = text;
  if (std::size_t colon = text.find(':'); colon != std::string_view::npos) {
    std::string prefix = normalize_name_part(text.substr(0, colon));
    if (auto found = namespaces.lookup(prefix)) {
      ns = *found;
      name_part = text.substr(colon + 1);
    }
  }

  std::string name = normalize_name_part(name_part);
  if (name.empty()) return std::nullopt;
  // A name still starting with ':' (input like "::X" or "Category::X") is
  // not a valid title and would break normalize/to_string round-trips.
  if (name[0] == ':') return std::nullopt;
  return Title{ns, std::move(name)};
}

Title normalize_title(std::string_view raw, const NamespaceTable& namespaces) {
  auto title = try_normalize_title(raw, namespaces);
  if (!title) throw EmptyTitleError("empty title: \"" + std::string(raw) + "\"");
  return *title;
}

std::string to_string(const Title& title, const NamespaceTable& namespaces) {
  if (title.ns == kNsMain) return title.name;
  const std::string& prefix = namespaces.canonical_prefix(title.ns);
  if (prefix.empty()) return title.name;
  return prefix + ":" + title.name;
}

}  // namespace wikisignals
