#include "wikisignals/wikidata.hpp"

#include <json.hpp>

#include <boost/iostreams/device/file.hpp>
#include <boost/iostreams/filter/bzip2.hpp>
#include <boost/iostreams/filtering_stream.hpp>

#include <algorithm>
#include <charconv>
#include <filesystem>

#include "wikisignals/errors.hpp"
#include "wikisignals/signals.hpp"

namespace io = boost::iostreams;
using nlohmann::json;

namespace wikisignals {

namespace {

std::unique_ptr<std::istream> open_entity_file(const std::string& path) {
  if (!std::filesystem::exists(path)) throw FileNotFoundError(path);
  io::file_source file(path, std::ios::in | std::ios::binary);
  if (!file.is_open()) throw FileNotFoundError(path);
  auto stream = std::make_unique<io::filtering_istream>();
  if (path.ends_with(".bz2")) stream->push(io::bzip2_decompressor());
  stream->push(file);
  return stream;
}

bool well_formed_qid(std::string_view qid) {
  if (qid.size() < 2 || qid[0] != 'Q') return false;
  return std::all_of(qid.begin() + 1, qid.end(),
                     [](char c) { return c >= '0' && c <= '9'; });
}

// Numeric QID order; malformed ids sort after well-formed ones.
bool qid_less(std::string_view a, std::string_view b) {
  bool wa = well_formed_qid(a), wb = well_formed_qid(b);
  if (wa != wb) return wa;
  if (!wa) return a < b;
  std::uint64_t na = 0, nb = 0;
  std::from_chars(a.data() + 1, a.data() + a.size(), na);
  std::from_chars(b.data() + 1, b.data() + b.size(), nb);
  return na < nb;
}

// Item values of one property's statements, deprecated rank excluded.
std::vector<std::string> statement_values(const json& claims, const std::string& property) {
  std::vector<std::string> values;
  auto it = claims.find(property);
  if (it == claims.end() || !it->is_array()) return values;
  for (const json& statement : *it) {
    if (!statement.is_object()) continue;
    if (statement.value("rank", "normal") == "deprecated") continue;
    auto snak = statement.find("mainsnak");
    if (snak == statement.end() || !snak->is_object()) continue;
    if (snak->value("snaktype", "") != "value") continue;
    auto datavalue = snak->find("datavalue");
    if (datavalue == snak->end() || !datavalue->is_object()) continue;
    if (datavalue->value("type", "") != "wikibase-entityid") continue;
    auto value = datavalue->find("value");
    if (value == datavalue->end() || !value->is_object()) continue;
    std::string id = value->value("id", "");
    if (id.empty() && value->contains("numeric-id")) {
      id = "Q" + std::to_string(value->at("numeric-id").get<std::uint64_t>());
    }
    if (id.empty()) continue;
    if (std::find(values.begin(), values.end(), id) == values.end()) {
      values.push_back(std::move(id));
    }
  }
  return values;
}

}  // namespace

std::optional<EntityRecord> parse_entity_line(std::string_view line,
                                              const std::vector<std::string>& properties,
                                              std::size_t line_no) {
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!line.empty() && is_space(line.front())) line.remove_prefix(1);
  while (!line.empty() && is_space(line.back())) line.remove_suffix(1);
  if (!line.empty() && line.back() == ',') line.remove_suffix(1);
  while (!line.empty() && is_space(line.back())) line.remove_suffix(1);
  if (line.empty() || line == "[" || line == "]") return std::nullopt;

  json doc = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw MalformedJsonError("unparseable entity line", line_no);
  }
  try {
    if (doc.value("type", "") != "item") return std::nullopt;
    EntityRecord record;
    record.qid = doc.value("id", "");
    if (!well_formed_qid(record.qid)) return std::nullopt;

    if (auto sitelinks = doc.find("sitelinks"); sitelinks != doc.end() && sitelinks->is_object()) {
      if (auto enwiki = sitelinks->find("enwiki"); enwiki != sitelinks->end() && enwiki->is_object()) {
        record.enwiki_title = try_normalize_title(enwiki->value("title", ""));
      }
    }
    if (auto claims = doc.find("claims"); claims != doc.end() && claims->is_object()) {
      for (const std::string& property : properties) {
        std::vector<std::string> values = statement_values(*claims, property);
        if (property == "P31") {
          record.p31_values = std::move(values);
        } else if (!values.empty()) {
          record.extra_claims.emplace(property, std::move(values));
        }
      }
    }
    return record;
  } catch (const json::exception& e) {
    throw MalformedJsonError(std::string("unexpected entity shape: ") + e.what(), line_no);
  }
}

void SitelinkIndex::add(EntityRecord record) {
  if (!record.enwiki_title) return;
  Title key = *record.enwiki_title;
  auto [it, inserted] = by_title.try_emplace(std::move(key), std::move(record));
  if (inserted) return;
  ++duplicate_warnings;
  if (qid_less(record.qid, it->second.qid)) {
    it->second = std::move(record);
  }
}

void SitelinkIndex::merge(SitelinkIndex&& other) {
  duplicate_warnings += other.duplicate_warnings;
  for (auto& [title, record] : other.by_title) {
    add(std::move(record));
  }
  other.by_title.clear();
}

const EntityRecord* SitelinkIndex::find(const Title& title) const {
  auto it = by_title.find(title);
  return it == by_title.end() ? nullptr : &it->second;
}

EntityStream::EntityStream(const std::string& path, std::vector<std::string> properties,
                           bool strict)
    : EntityStream(open_entity_file(path), std::move(properties), strict) {}

EntityStream::EntityStream(std::unique_ptr<std::istream> input,
                           std::vector<std::string> properties, bool strict)
    : input_(std::move(input)), properties_(std::move(properties)), strict_(strict) {}

EntityStream::~EntityStream() = default;
EntityStream::EntityStream(EntityStream&&) noexcept = default;
EntityStream& EntityStream::operator=(EntityStream&&) noexcept = default;

std::optional<EntityRecord> EntityStream::next() {
  std::string line;
  while (std::getline(*input_, line)) {
    ++line_no_;
    try {
      if (auto record = parse_entity_line(line, properties_, line_no_)) {
        return record;
      }
    } catch (const MalformedJsonError&) {
      if (strict_) throw;
      ++malformed_lines_;
    }
  }
  return std::nullopt;
}

SitelinkIndex build_sitelink_index(EntityStream& entities) {
  SitelinkIndex index;
  while (auto record = entities.next()) {
    index.add(std::move(*record));
  }
  return index;
}

FrequencyTable p31_distribution(const SeedSet& set, const SitelinkIndex& index) {
  TallyBuilder builder(set, SignalKind::P31);
  static const std::vector<std::string> kNoValues;
  for (const Title& member : set.members) {
    const EntityRecord* record = index.find(member);
    builder.add_article(member, record ? record->p31_values : kNoValues);
  }
  return builder.take();
}

}  // namespace wikisignals
