#include "wikisignals/wikitext.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

namespace wikisignals {

namespace {

bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

std::string_view trim_view(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_ascii_space(s[b])) ++b;
  while (e > b && is_ascii_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

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

bool istarts_with(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && iequals(s.substr(0, prefix.size()), prefix);
}

struct StripResult {
  std::string text;
  std::vector<bool> blanked;  // per byte: replaced with a space
};

// Regions whose interior is opaque to the parser. Comments are blanked
// whole; tag regions keep their delimiting tags visible.
StripResult strip_noise_masked(std::string_view wikitext) {
  static constexpr std::string_view kTags[] = {"nowiki", "pre", "source", "syntaxhighlight"};
  StripResult result;
  result.text.assign(wikitext);
  result.blanked.assign(wikitext.size(), false);

  auto blank = [&](std::size_t from, std::size_t to) {
    for (std::size_t i = from; i < to && i < result.text.size(); ++i) {
      result.text[i] = ' ';
      result.blanked[i] = true;
    }
  };

  std::size_t i = 0;
  while (i < wikitext.size()) {
    if (wikitext[i] != '<') {
      ++i;
      continue;
    }
    std::string_view rest = wikitext.substr(i);
    if (rest.starts_with("<!--")) {
      std::size_t close = wikitext.find("-->", i + 4);
      if (close == std::string_view::npos) {
        blank(i, wikitext.size());
        break;
      }
      blank(i, close + 3);
      i = close + 3;
      continue;
    }
    bool matched = false;
    for (std::string_view tag : kTags) {
      if (rest.size() < tag.size() + 2 || !iequals(rest.substr(1, tag.size()), tag)) continue;
      char after = rest[1 + tag.size()];
      if (after != '>' && after != '/' && !is_ascii_space(after)) continue;
      std::size_t open_end = wikitext.find('>', i + 1);
      if (open_end == std::string_view::npos) {
        ++i;
        break;
      }
      matched = true;
      if (wikitext[open_end - 1] == '/') {  // self-closing, no interior
        i = open_end + 1;
        break;
      }
      // Find the matching close tag, tolerating internal whitespace.
      std::size_t scan = open_end + 1;
      std::size_t close_begin = std::string_view::npos, close_end = std::string_view::npos;
      while (scan < wikitext.size()) {
        std::size_t lt = wikitext.find("</", scan);
        if (lt == std::string_view::npos) break;
        std::size_t p = lt + 2;
        while (p < wikitext.size() && is_ascii_space(wikitext[p])) ++p;
        if (p + tag.size() <= wikitext.size() && iequals(wikitext.substr(p, tag.size()), tag)) {
          std::size_t q = p + tag.size();
          while (q < wikitext.size() && is_ascii_space(wikitext[q])) ++q;
          if (q < wikitext.size() && wikitext[q] == '>') {
            close_begin = lt;
            close_end = q + 1;
            break;
          }
        }
        scan = lt + 2;
      }
      if (close_begin == std::string_view::npos) {
        blank(open_end + 1, wikitext.size());
        i = wikitext.size();
      } else {
        blank(open_end + 1, close_begin);
        i = close_end;
      }
      break;
    }
    if (!matched) ++i;
  }
  return result;
}

std::string normalize_template_name(std::string_view raw) {
  std::string name = normalize_name_part(raw);
  if (istarts_with(name, "template:")) {
    name = normalize_name_part(std::string_view(name).substr(9));
  }
  return name;
}

// Splits template content on top-level pipes; nested {{...}}, {{{...}}} and
// [[...]] shield their pipes. Returns segment boundaries as offsets.
std::vector<std::pair<std::size_t, std::size_t>> split_top_level(std::string_view content) {
  std::vector<std::pair<std::size_t, std::size_t>> segments;
  int brace_depth = 0;
  int link_depth = 0;
  std::size_t seg_begin = 0;
  std::size_t i = 0;
  while (i < content.size()) {
    char c = content[i];
    if (c == '{') {
      std::size_t run = 0;
      while (i + run < content.size() && content[i + run] == '{') ++run;
      if (run >= 2) ++brace_depth;
      i += std::max<std::size_t>(run, 1);
    } else if (c == '}') {
      std::size_t run = 0;
      while (i + run < content.size() && content[i + run] == '}') ++run;
      if (run >= 2 && brace_depth > 0) --brace_depth;
      i += std::max<std::size_t>(run, 1);
    } else if (c == '[' && i + 1 < content.size() && content[i + 1] == '[') {
      ++link_depth;
      i += 2;
    } else if (c == ']' && i + 1 < content.size() && content[i + 1] == ']') {
      if (link_depth > 0) --link_depth;
      i += 2;
    } else if (c == '|' && brace_depth == 0 && link_depth == 0) {
      segments.emplace_back(seg_begin, i);
      seg_begin = i + 1;
      ++i;
    } else {
      ++i;
    }
  }
  segments.emplace_back(seg_begin, content.size());
  return segments;
}

// First top-level '=' within one parameter segment, or npos.
std::size_t find_key_split(std::string_view segment) {
  int brace_depth = 0;
  int link_depth = 0;
  std::size_t i = 0;
  while (i < segment.size()) {
    char c = segment[i];
    if (c == '{') {
      std::size_t run = 0;
      while (i + run < segment.size() && segment[i + run] == '{') ++run;
      if (run >= 2) ++brace_depth;
      i += std::max<std::size_t>(run, 1);
    } else if (c == '}') {
      std::size_t run = 0;
      while (i + run < segment.size() && segment[i + run] == '}') ++run;
      if (run >= 2 && brace_depth > 0) --brace_depth;
      i += std::max<std::size_t>(run, 1);
    } else if (c == '[' && i + 1 < segment.size() && segment[i + 1] == '[') {
      ++link_depth;
      i += 2;
    } else if (c == ']' && i + 1 < segment.size() && segment[i + 1] == ']') {
      if (link_depth > 0) --link_depth;
      i += 2;
    } else if (c == '=' && brace_depth == 0 && link_depth == 0) {
      return i;
    } else {
      ++i;
    }
  }
  return std::string_view::npos;
}

Template build_template(std::string_view text, std::size_t span_begin, std::size_t span_end) {
  Template tmpl;
  tmpl.begin = span_begin;
  tmpl.end = span_end;
  std::string_view content = text.substr(span_begin + 2, span_end - span_begin - 4);
  auto segments = split_top_level(content);
  tmpl.name = normalize_template_name(content.substr(segments[0].first,
                                                     segments[0].second - segments[0].first));
  for (std::size_t s = 1; s < segments.size(); ++s) {
    std::string_view seg = content.substr(segments[s].first, segments[s].second - segments[s].first);
    TemplateParam param;
    std::size_t eq = find_key_split(seg);
    if (eq != std::string_view::npos) {
      param.key = std::string(trim_view(seg.substr(0, eq)));
      param.value = std::string(trim_view(seg.substr(eq + 1)));
    } else {
      param.value = std::string(seg);
    }
    tmpl.params.push_back(std::move(param));
  }
  return tmpl;
}

// Link target validity: MediaWiki titles cannot contain these.
bool valid_link_target(std::string_view target) {
  if (trim_view(target).empty()) return false;
  for (char c : target) {
    if (c == '[' || c == ']' || c == '{' || c == '}' || c == '<' || c == '>' || c == '\n') {
      return false;
    }
  }
  return true;
}

enum class LinkClass { Article, CategoryAssignment, File, Interwiki, OtherNamespace, Invalid };

struct RawLink {
  LinkClass cls = LinkClass::Invalid;
  Title title;  // Article / CategoryAssignment / OtherNamespace
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string raw_target;
  std::size_t rest_begin = 0;  // offset of text after the first pipe, or == end
};

LinkClass classify(std::string_view raw_target, Title& out_title) {
  std::string_view target = trim_view(raw_target);
  bool forced = false;
  if (!target.empty() && target[0] == ':') {
    forced = true;
    target = trim_view(target.substr(1));
  }
  if (std::size_t colon = target.find(':'); colon != std::string_view::npos) {
    std::string_view prefix = trim_view(target.substr(0, colon));
    if (!NamespaceTable::enwiki_default().lookup(prefix) && is_interwiki_prefix(prefix)) {
      return LinkClass::Interwiki;
    }
  }
  auto title = try_normalize_title(raw_target);
  if (!title) return LinkClass::Invalid;
  out_title = *title;
  if (title->ns == kNsMain) return LinkClass::Article;
  if (title->ns == kNsFile) return LinkClass::File;
  if (title->ns == kNsCategory) {
    return forced ? LinkClass::OtherNamespace : LinkClass::CategoryAssignment;
  }
  return LinkClass::OtherNamespace;
}

// Scans [[...]] constructs, recursing into regions that can carry nested
// links (file captions, malformed outer constructs).
void scan_links(std::string_view text, std::size_t base, std::vector<RawLink>& out) {
  std::size_t i = 0;
  while (i + 1 < text.size()) {
    if (!(text[i] == '[' && text[i + 1] == '[')) {
      ++i;
      continue;
    }
    // Find the matching ]] with nesting.
    int depth = 1;
    std::size_t j = i + 2;
    while (j < text.size()) {
      if (j + 1 < text.size() && text[j] == '[' && text[j + 1] == '[') {
        ++depth;
        j += 2;
      } else if (j + 1 < text.size() && text[j] == ']' && text[j + 1] == ']') {
        --depth;
        j += 2;
        if (depth == 0) break;
      } else {
        ++j;
      }
    }
    if (depth != 0) {  // unclosed: treat this [[ as literal
      i += 2;
      continue;
    }
    std::string_view inner = text.substr(i + 2, j - 2 - (i + 2));
    // First pipe at inner link depth zero separates target from the rest.
    std::size_t pipe = std::string_view::npos;
    {
      int d = 0;
      std::size_t p = 0;
      while (p < inner.size()) {
        if (p + 1 < inner.size() && inner[p] == '[' && inner[p + 1] == '[') {
          ++d;
          p += 2;
        } else if (p + 1 < inner.size() && inner[p] == ']' && inner[p + 1] == ']') {
          if (d > 0) --d;
          p += 2;
        } else if (inner[p] == '|' && d == 0) {
          pipe = p;
          break;
        } else {
          ++p;
        }
      }
    }
    std::string_view target = pipe == std::string_view::npos ? inner : inner.substr(0, pipe);
    RawLink link;
    link.begin = base + i;
    link.end = base + j;
    link.raw_target = std::string(target);
    link.rest_begin = pipe == std::string_view::npos ? link.end : base + i + 2 + pipe + 1;
    if (!valid_link_target(target)) {
      link.cls = LinkClass::Invalid;
      out.push_back(link);
      // The construct is not a link; anything inside it still can be.
      scan_links(inner, base + i + 2, out);
    } else {
      link.cls = classify(target, link.title);
      out.push_back(link);
      if (link.cls == LinkClass::File && pipe != std::string_view::npos) {
        // File captions carry ordinary prose links.
        scan_links(inner.substr(pipe + 1), base + i + 2 + pipe + 1, out);
      }
    }
    i = j;
  }
}

std::vector<RawLink> scan_all_links(std::string_view text) {
  std::vector<RawLink> links;
  scan_links(text, 0, links);
  std::sort(links.begin(), links.end(),
            [](const RawLink& a, const RawLink& b) { return a.begin < b.begin; });
  return links;
}

// Heading level of the line starting at `pos`, or 0. Level is the smaller of
// the leading and trailing '=' runs; lines with no content between the runs
// do not count.
int heading_level(std::string_view text, std::size_t pos, std::size_t* line_end_out) {
  std::size_t line_end = text.find('\n', pos);
  if (line_end == std::string_view::npos) line_end = text.size();
  if (line_end_out) *line_end_out = line_end;
  std::string_view line = trim_view(text.substr(pos, line_end - pos));
  if (line.size() < 2 || line[0] != '=') return 0;
  std::size_t lead = 0;
  while (lead < line.size() && line[lead] == '=') ++lead;
  std::size_t tail = 0;
  while (tail < line.size() && line[line.size() - 1 - tail] == '=') ++tail;
  if (lead + tail >= line.size()) return 0;  // nothing between the runs
  return static_cast<int>(std::min(lead, tail));
}

}  // namespace

const TemplateParam* Template::find_param(std::string_view key) const {
  for (const auto& p : params) {
    if (p.key && iequals(*p.key, key)) return &p;
  }
  return nullptr;
}

std::optional<std::string> detect_redirect_target(std::string_view wikitext) {
  std::size_t i = 0;
  while (i < wikitext.size() && is_ascii_space(wikitext[i])) ++i;
  if (i >= wikitext.size() || wikitext[i] != '#') return std::nullopt;
  ++i;
  static constexpr std::string_view kKeyword = "redirect";
  if (wikitext.size() - i < kKeyword.size() ||
      !iequals(wikitext.substr(i, kKeyword.size()), kKeyword)) {
    return std::nullopt;
  }
  i += kKeyword.size();
  while (i < wikitext.size() && (is_ascii_space(wikitext[i]) || wikitext[i] == ':')) ++i;
  if (i + 1 >= wikitext.size() || wikitext[i] != '[' || wikitext[i + 1] != '[') {
    return std::nullopt;
  }
  i += 2;
  std::size_t close = wikitext.find("]]", i);
  if (close == std::string_view::npos) return std::nullopt;
  std::string_view inner = wikitext.substr(i, close - i);
  if (std::size_t pipe = inner.find('|'); pipe != std::string_view::npos) {
    inner = inner.substr(0, pipe);
  }
  if (!valid_link_target(inner)) return std::nullopt;
  return std::string(trim_view(inner));
}

std::optional<Title> detect_redirect(std::string_view wikitext) {
  auto target = detect_redirect_target(wikitext);
  if (!target) return std::nullopt;
  return try_normalize_title(*target);
}

std::string strip_noise(std::string_view wikitext) {
  return strip_noise_masked(wikitext).text;
}

std::vector<Template> parse_templates(std::string_view text) {
  struct OpenRun {
    std::size_t start;  // index of the first '{' in the run
    std::size_t len;    // braces not yet consumed
  };
  std::vector<OpenRun> stack;
  std::vector<Template> templates;

  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == '{') {
      std::size_t run = 0;
      while (i + run < text.size() && text[i + run] == '{') ++run;
      if (run >= 2) stack.push_back({i, run});
      i += run;
    } else if (c == '}') {
      std::size_t run = 0;
      while (i + run < text.size() && text[i + run] == '}') ++run;
      std::size_t close = i;  // left edge of the unconsumed closers
      std::size_t remaining = run;
      while (remaining >= 2 && !stack.empty()) {
        OpenRun& top = stack.back();
        if (top.len >= 3 && remaining >= 3) {
          // {{{...}}} parameter construct: binds first, emits nothing.
          top.len -= 3;
          remaining -= 3;
          close += 3;
        } else {
          std::size_t open_brace = top.start + top.len - 2;
          templates.push_back(build_template(text, open_brace, close + 2));
          top.len -= 2;
          remaining -= 2;
          close += 2;
        }
        if (top.len < 2) stack.pop_back();
      }
      i += run;
    } else {
      ++i;
    }
  }
  std::sort(templates.begin(), templates.end(),
            [](const Template& a, const Template& b) { return a.begin < b.begin; });
  return templates;
}

std::vector<WikiLink> extract_wikilinks_spans(std::string_view text) {
  std::vector<WikiLink> result;
  for (RawLink& raw : scan_all_links(text)) {
    if (raw.cls != LinkClass::Article) continue;
    result.push_back(WikiLink{std::move(raw.title), raw.begin, raw.end, std::move(raw.raw_target)});
  }
  return result;
}

std::vector<Title> extract_wikilinks(std::string_view text) {
  std::vector<Title> titles;
  for (WikiLink& link : extract_wikilinks_spans(text)) {
    titles.push_back(std::move(link.title));
  }
  return titles;
}

std::vector<Title> extract_categories(std::string_view wikitext) {
  std::string stripped = strip_noise(wikitext);
  std::vector<Title> result;
  std::set<Title> seen;
  for (RawLink& raw : scan_all_links(stripped)) {
    if (raw.cls != LinkClass::CategoryAssignment) continue;
    if (seen.insert(raw.title).second) result.push_back(std::move(raw.title));
  }
  return result;
}

bool is_infobox_name(std::string_view tmpl_name) {
  std::string_view first = tmpl_name.substr(0, tmpl_name.find(' '));
  return iequals(first, "Infobox");
}

LeadSlice extract_lead(std::string_view wikitext) {
  StripResult stripped = strip_noise_masked(wikitext);
  std::string_view text = stripped.text;
  std::vector<Template> templates = parse_templates(text);

  auto inside_template = [&](std::size_t pos) {
    for (const Template& t : templates) {
      if (t.begin <= pos && pos < t.end) return true;
      if (t.begin > pos) break;
    }
    return false;
  };

  // Boundary: first level-2 heading at a line start outside every template.
  // Bytes blanked out of comments or nowiki regions do not break the
  // line-start requirement; literal leading spaces do.
  std::size_t boundary = text.size();
  std::size_t line_begin = 0;
  while (line_begin < text.size()) {
    std::size_t line_end = text.find('\n', line_begin);
    if (line_end == std::string_view::npos) line_end = text.size();
    std::size_t p = line_begin;
    while (p < line_end && text[p] == ' ' && stripped.blanked[p]) ++p;
    if (p < line_end && text[p] == '=' && !inside_template(p)) {
      if (heading_level(text, p, nullptr) == 2) {
        boundary = line_begin;
        break;
      }
    }
    line_begin = line_end + 1;
  }

  LeadSlice lead;
  lead.text = std::string(wikitext.substr(0, boundary));
  for (const Template& t : templates) {
    if (t.begin < boundary) lead.templates.push_back(t);
  }

  // Prose links: lead text with all template spans blanked.
  std::string prose(text.substr(0, boundary));
  for (const Template& t : lead.templates) {
    std::size_t hi = std::min(t.end, boundary);
    for (std::size_t k = t.begin; k < hi; ++k) prose[k] = ' ';
  }
  std::map<std::size_t, Title> by_position;
  for (WikiLink& link : extract_wikilinks_spans(prose)) {
    by_position.emplace(link.begin, std::move(link.title));
  }
  // Infobox templates contribute the links inside their parameter values.
  for (const Template& t : lead.templates) {
    if (!is_infobox_name(t.name)) continue;
    std::string_view span = text.substr(t.begin, std::min(t.end, boundary) - t.begin);
    for (WikiLink& link : extract_wikilinks_spans(span)) {
      by_position.emplace(t.begin + link.begin, std::move(link.title));
    }
  }
  for (auto& [pos, title] : by_position) {
    lead.links.push_back(std::move(title));
  }
  return lead;
}

}  // namespace wikisignals
