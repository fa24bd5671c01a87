#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "wikisignals/dump_ingest.hpp"
#include "wikisignals/title.hpp"

namespace wikisignals {

// Predicate on a banner template parameter, e.g. fantasy-task-force=yes.
struct RequiredParam {
  std::string key;
  std::vector<std::string> accepted;  // empty = the yes-like defaults

  bool matches(const struct Template& tmpl) const;
  static const std::vector<std::string>& yes_like_defaults();
};

struct WikiProjectSpec {
  std::string set_name;
  std::vector<std::string> banner_templates;  // normalized template names
  std::optional<RequiredParam> required_param;
};

// A named set of main-namespace article titles, post redirect resolution.
struct SeedSet {
  std::string name;
  std::set<Title> members;
};

// Set names of all specs whose banner appears on the talk page (nested
// banners inside shell wrappers included) with a satisfied parameter
// predicate. Two specs may share a set_name to express alternative banners.
std::set<std::string> match_banners(std::string_view talk_wikitext,
                                    const std::vector<WikiProjectSpec>& specs);

using RedirectMap = std::unordered_map<Title, Title, TitleHash>;

// Streams main-namespace pages into a normalized-title redirect map.
class RedirectMapBuilder {
 public:
  void add(const PageRecord& page);
  RedirectMap take() { return std::move(map_); }

 private:
  RedirectMap map_;
};

RedirectMap build_redirect_map(DumpReader& pages);

struct Resolution {
  Title title;
  bool flagged = false;  // hop limit reached (covers cycles)
};

Resolution resolve(const Title& title, const RedirectMap& redirects, int max_hops = 5);

struct SeedBuildResult {
  std::vector<SeedSet> sets;  // one per distinct set_name, spec order
  SeedSet union_set;
  std::size_t cycle_warnings = 0;
};

// Accumulates seed sets from talk pages. `universe`, when given, is the set
// of existing main-namespace article titles; talk pages whose subject is
// absent from it contribute nothing. Partial builders merge.
class SeedSetBuilder {
 public:
  SeedSetBuilder(std::vector<WikiProjectSpec> specs, const RedirectMap* redirects,
                 const std::unordered_set<Title, TitleHash>* universe = nullptr,
                 std::string union_name = "union");

  void add_talk_page(const PageRecord& page);
  void merge(SeedSetBuilder&& other);
  SeedBuildResult take();

 private:
  std::vector<WikiProjectSpec> specs_;
  const RedirectMap* redirects_;
  const std::unordered_set<Title, TitleHash>* universe_;
  std::string union_name_;
  std::vector<SeedSet> sets_;
  std::size_t cycle_warnings_ = 0;
};

SeedBuildResult build_seed_sets(DumpReader& talk_pages,
                                const std::vector<WikiProjectSpec>& specs,
                                const RedirectMap& redirects,
                                const std::unordered_set<Title, TitleHash>* universe = nullptr,
                                std::string union_name = "union");

SeedSet make_union(std::string name, const std::vector<SeedSet>& sets);

}  // namespace wikisignals
