#include "wikisignals/seedset.hpp"

#include <algorithm>
#include <cctype>

#include "wikisignals/wikitext.hpp"

namespace wikisignals {

namespace {

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

}  // namespace

const std::vector<std::string>& RequiredParam::yes_like_defaults() {
  static const std::vector<std::string> kDefaults = {"yes", "y", "1", "true"};
  return kDefaults;
}

bool RequiredParam::matches(const Template& tmpl) const {
  const TemplateParam* param = tmpl.find_param(key);
  if (!param) return false;
  const std::vector<std::string>& values = accepted.empty() ? yes_like_defaults() : accepted;
  return std::any_of(values.begin(), values.end(),
                     [&](const std::string& v) { return iequals(v, param->value); });
}

std::set<std::string> match_banners(std::string_view talk_wikitext,
                                    const std::vector<WikiProjectSpec>& specs) {
  std::set<std::string> matched;
  std::string stripped = strip_noise(talk_wikitext);
  for (const Template& tmpl : parse_templates(stripped)) {
    for (const WikiProjectSpec& spec : specs) {
      if (matched.contains(spec.set_name)) continue;
      bool name_hit = std::any_of(
          spec.banner_templates.begin(), spec.banner_templates.end(),
          [&](const std::string& banner) { return iequals(banner, tmpl.name); });
      if (!name_hit) continue;
      if (spec.required_param && !spec.required_param->matches(tmpl)) continue;
      matched.insert(spec.set_name);
    }
  }
  return matched;
}

void RedirectMapBuilder::add(const PageRecord& page) {
  if (page.ns != kNsMain || !page.redirect_target) return;
  auto from = try_normalize_title(page.title);
  auto to = try_normalize_title(*page.redirect_target);
  if (!from || !to || from->ns != kNsMain) return;
  if (*from == *to) return;
  map_.emplace(std::move(*from), std::move(*to));
}

RedirectMap build_redirect_map(DumpReader& pages) {
  RedirectMapBuilder builder;
  while (auto page = pages.next_page()) {
    builder.add(*page);
  }
  return builder.take();
}

Resolution resolve(const Title& title, const RedirectMap& redirects, int max_hops) {
  Resolution result{title, false};
  for (int hop = 0; hop < max_hops; ++hop) {
    auto it = redirects.find(result.title);
    if (it == redirects.end()) return result;
    result.title = it->second;
  }
  result.flagged = redirects.contains(result.title);
  return result;
}

SeedSetBuilder::SeedSetBuilder(std::vector<WikiProjectSpec> specs, const RedirectMap* redirects,
                               const std::unordered_set<Title, TitleHash>* universe,
                               std::string union_name)
    : specs_(std::move(specs)),
      redirects_(redirects),
      universe_(universe),
      union_name_(std::move(union_name)) {
  for (const WikiProjectSpec& spec : specs_) {
    bool known = std::any_of(sets_.begin(), sets_.end(),
                             [&](const SeedSet& s) { return s.name == spec.set_name; });
    if (!known) sets_.push_back(SeedSet{spec.set_name, {}});
  }
}

void SeedSetBuilder::add_talk_page(const PageRecord& page) {
  if (page.ns != kNsTalk || page.redirect_target) return;
  std::set<std::string> matched = match_banners(page.wikitext, specs_);
  if (matched.empty()) return;

  auto talk = try_normalize_title(page.title);
  if (!talk || talk->ns != kNsTalk) return;
  Title subject{kNsMain, talk->name};
  if (redirects_) {
    Resolution resolution = resolve(subject, *redirects_);
    if (resolution.flagged) {
      ++cycle_warnings_;
      return;
    }
    subject = std::move(resolution.title);
  }
  if (subject.ns != kNsMain) return;
  if (universe_ && !universe_->contains(subject)) return;

  for (SeedSet& set : sets_) {
    if (matched.contains(set.name)) set.members.insert(subject);
  }
}

void SeedSetBuilder::merge(SeedSetBuilder&& other) {
  for (SeedSet& set : sets_) {
    for (SeedSet& theirs : other.sets_) {
      if (theirs.name != set.name) continue;
      set.members.merge(theirs.members);
      break;
    }
  }
  cycle_warnings_ += other.cycle_warnings_;
}

SeedBuildResult SeedSetBuilder::take() {
  SeedBuildResult result;
  result.union_set = make_union(union_name_, sets_);
  result.sets = std::move(sets_);
  result.cycle_warnings = cycle_warnings_;
  return result;
}

SeedBuildResult build_seed_sets(DumpReader& talk_pages,
                                const std::vector<WikiProjectSpec>& specs,
                                const RedirectMap& redirects,
                                const std::unordered_set<Title, TitleHash>* universe,
                                std::string union_name) {
  SeedSetBuilder builder(specs, &redirects, universe, std::move(union_name));
  while (auto page = talk_pages.next_page()) {
    builder.add_talk_page(*page);
  }
  return builder.take();
}

SeedSet make_union(std::string name, const std::vector<SeedSet>& sets) {
  SeedSet result{std::move(name), {}};
  for (const SeedSet& set : sets) {
    result.members.insert(set.members.begin(), set.members.end());
  }
  return result;
}

}  // namespace wikisignals
