#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wikisignals/title.hpp"

namespace wikisignals {

struct TemplateParam {
  std::optional<std::string> key;  // absent for positional parameters
  std::string value;
};

// One parsed {{...}} transclusion. Spans are byte ranges into the text the
// template was parsed from; nested templates nest their spans.
struct Template {
  std::string name;  // normalized like a title name
  std::vector<TemplateParam> params;
  std::size_t begin = 0;
  std::size_t end = 0;

  const TemplateParam* find_param(std::string_view key) const;
};

// One extracted article link with the byte span of its [[...]] construct
// and the raw (pre-normalization) target text.
struct WikiLink {
  Title title;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string raw_target;
};

struct LeadSlice {
  std::string text;                  // original wikitext up to the boundary
  std::vector<Template> templates;   // templates whose span starts in the lead
  std::vector<Title> links;          // prose links plus infobox parameter links
};

// Raw target of a leading #REDIRECT [[...]] directive, if any.
std::optional<std::string> detect_redirect_target(std::string_view wikitext);

// Normalized redirect target. Malformed directives yield nullopt.
std::optional<Title> detect_redirect(std::string_view wikitext);

// Blanks HTML comments and the interior of <nowiki>, <pre>, <source> and
// <syntaxhighlight> regions with spaces. Output length equals input length,
// so spans computed on the result map back to the original text.
std::string strip_noise(std::string_view wikitext);

// Matches {{...}} with MediaWiki brace-run semantics ({{{...}}} parameter
// constructs bind first). Pipes inside nested [[...]] or {{...}} do not
// split parameters. Unbalanced openers yield no template. Input is expected
// to be noise-stripped. Result is ordered by span start.
std::vector<Template> parse_templates(std::string_view text);

// Article-namespace link targets in order of appearance, duplicates kept.
// Category, file, interwiki and other non-main-namespace links are skipped.
// Input is expected to be noise-stripped.
std::vector<Title> extract_wikilinks(std::string_view text);

// Span-carrying variant of extract_wikilinks.
std::vector<WikiLink> extract_wikilinks_spans(std::string_view text);

// Category assignments ([[Category:X]] / [[Category:X|sortkey]]) anywhere in
// the page, first occurrence order, duplicates removed. The [[:Category:X]]
// colon form is a link, not an assignment, and is not reported. Strips noise
// itself.
std::vector<Title> extract_categories(std::string_view wikitext);

// Lead section: everything before the first level-2 heading line outside
// templates, comments and nowiki regions. Links cover lead prose plus the
// parameter values of lead infobox templates; other lead templates
// contribute no links. Strips noise itself.
LeadSlice extract_lead(std::string_view wikitext);

// True when the first word of a normalized template name is "Infobox".
bool is_infobox_name(std::string_view tmpl_name);

}  // namespace wikisignals
