#include "wikisignals/signals.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>

#include "wikisignals/errors.hpp"

using nlohmann::ordered_json;

namespace wikisignals {

std::string_view to_string(SignalKind kind) {
  switch (kind) {
    case SignalKind::LeadLink: return "lead_link";
    case SignalKind::Category: return "category";
    case SignalKind::P31: return "p31";
  }
  return "lead_link";
}

SignalKind signal_kind_from_string(std::string_view s) {
  if (s == "lead_link") return SignalKind::LeadLink;
  if (s == "category") return SignalKind::Category;
  if (s == "p31") return SignalKind::P31;
  throw ConfigError("unknown signal kind \"" + std::string(s) + "\"");
}

TallyBuilder::TallyBuilder(const SeedSet& set, SignalKind kind, bool strict, bool partial)
    : set_(&set), strict_(strict), partial_(partial) {
  table_.kind = kind;
  table_.set_name = set.name;
  table_.denominator = partial ? 0 : set.members.size();
}

void TallyBuilder::add_article(const Title& article, const std::vector<std::string>& keys) {
  if (!set_->members.contains(article)) return;
  if ((strict_ || partial_) && !seen_.insert(article).second) {
    if (strict_) {
      throw DuplicateArticleError("article \"" + to_string(article) + "\" seen twice");
    }
    return;
  }
  if (partial_) ++table_.denominator;
  std::set<std::string_view> unique(keys.begin(), keys.end());
  for (std::string_view key : unique) {
    ++table_.counts[std::string(key)];
  }
}

FrequencyTable TallyBuilder::take() {
  seen_.clear();
  return std::move(table_);
}

FrequencyTable tally(const SeedSet& set,
                     const std::vector<std::pair<Title, std::vector<std::string>>>& per_article_keys,
                     SignalKind kind, bool strict) {
  TallyBuilder builder(set, kind, strict);
  for (const auto& [article, keys] : per_article_keys) {
    builder.add_article(article, keys);
  }
  return builder.take();
}

FrequencyTable merge(const FrequencyTable& a, const FrequencyTable& b) {
  if (a.kind != b.kind || a.set_name != b.set_name) {
    throw KindMismatchError("cannot merge \"" + std::string(to_string(a.kind)) + "/" +
                            a.set_name + "\" with \"" + std::string(to_string(b.kind)) + "/" +
                            b.set_name + "\"");
  }
  FrequencyTable result = a;
  result.denominator += b.denominator;
  for (const auto& [key, count] : b.counts) {
    result.counts[key] += count;
  }
  return result;
}

CoverageStat coverage(const std::string& key, const FrequencyTable& set_table,
                      const FrequencyTable& global_table) {
  if (set_table.kind != global_table.kind) {
    throw KindMismatchError("coverage tables disagree on signal kind");
  }
  CoverageStat stat;
  stat.key = key;
  if (auto it = set_table.counts.find(key); it != set_table.counts.end()) {
    stat.in_set = it->second;
  }
  if (auto it = global_table.counts.find(key); it != global_table.counts.end()) {
    stat.global = it->second;
  }
  return stat;
}

std::vector<TopEntry> top_k(const FrequencyTable& table, std::size_t k) {
  std::vector<TopEntry> entries;
  entries.reserve(table.counts.size());
  for (const auto& [key, count] : table.counts) {
    entries.push_back(TopEntry{key, count, {}});
  }
  std::sort(entries.begin(), entries.end(), [](const TopEntry& a, const TopEntry& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.key < b.key;
  });
  if (entries.size() > k) entries.resize(k);
  for (TopEntry& entry : entries) {
    entry.share = render_percent(entry.count, table.denominator);
  }
  return entries;
}

std::string render_percent(std::uint64_t count, std::uint64_t denominator) {
  if (denominator == 0) return "null";
  std::uint64_t scaled = count * 10000;
  std::uint64_t q = scaled / denominator;
  std::uint64_t r = scaled % denominator;
  if (2 * r >= denominator) ++q;
  char buf[48];
  std::snprintf(buf, sizeof buf, "%llu.%02llu%%",
                static_cast<unsigned long long>(q / 100),
                static_cast<unsigned long long>(q % 100));
  return buf;
}

void write_table_tsv(std::ostream& out, const FrequencyTable& table) {
  out << "key\tcount\tshare\n";
  for (const TopEntry& entry : top_k(table, table.counts.size())) {
    out << entry.key << '\t' << entry.count << '\t' << entry.share << '\n';
  }
}

void write_table_json(std::ostream& out, const FrequencyTable& table) {
  ordered_json doc;
  doc["kind"] = to_string(table.kind);
  doc["set_name"] = table.set_name;
  doc["denominator"] = table.denominator;
  ordered_json counts = ordered_json::object();
  for (const auto& [key, count] : table.counts) {
    counts[key] = count;
  }
  doc["counts"] = std::move(counts);
  out << doc.dump(2) << '\n';
}

FrequencyTable read_table_json(std::istream& in) {
  ordered_json doc = ordered_json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw MalformedJsonError("unparseable table file", 0);
  }
  FrequencyTable table;
  table.kind = signal_kind_from_string(doc.value("kind", ""));
  table.set_name = doc.value("set_name", "");
  table.denominator = doc.value("denominator", std::uint64_t{0});
  if (auto counts = doc.find("counts"); counts != doc.end() && counts->is_object()) {
    for (const auto& [key, count] : counts->items()) {
      table.counts[key] = count.get<std::uint64_t>();
    }
  }
  return table;
}

FrequencyTable read_table_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileNotFoundError(path);
  return read_table_json(in);
}

void write_coverage_tsv(std::ostream& out, const std::vector<CoverageStat>& stats) {
  out << "key\tin_set\tglobal\tratio\n";
  for (const CoverageStat& stat : stats) {
    out << stat.key << '\t' << stat.in_set << '\t' << stat.global << '\t'
        << render_percent(stat.in_set, stat.global) << '\n';
  }
}

}  // namespace wikisignals
