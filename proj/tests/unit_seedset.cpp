#include <doctest.h>

#include <string>
#include <vector>

#include "test_util.hpp"
#include "wikisignals/seedset.hpp"

using namespace wikisignals;
using namespace testutil;

namespace {

std::vector<WikiProjectSpec> three_specs() {
  return {
      WikiProjectSpec{"Science Fiction", {"WikiProject Science Fiction"}, {}},
      WikiProjectSpec{"Fantasy",
                      {"WikiProject Novels"},
                      RequiredParam{"fantasy-task-force", {}}},
      WikiProjectSpec{"Science Fiction Novels",
                      {"WikiProject Novels"},
                      RequiredParam{"sf-task-force", {}}},
  };
}

}  // namespace

TEST_CASE("banner matching") {
  auto specs = three_specs();
  CHECK(match_banners("{{WikiProject Science Fiction|class=B}}", specs) ==
        std::set<std::string>{"Science Fiction"});
  CHECK(match_banners("{{WikiProject Novels|fantasy-task-force=yes}}", specs) ==
        std::set<std::string>{"Fantasy"});
  CHECK(match_banners("{{WikiProject Novels|fantasy-task-force=no}}", specs).empty());
  CHECK(match_banners("{{WikiProject Novels}}", specs).empty());
  CHECK(match_banners("Just prose, no banners.", specs).empty());
}

TEST_CASE("yes-like parameter values are case-insensitive") {
  auto specs = three_specs();
  for (const char* value : {"yes", "Yes", "YES", "y", "1", "true", "True"}) {
    CHECK(match_banners("{{WikiProject Novels|fantasy-task-force=" + std::string(value) + "}}",
                        specs) == std::set<std::string>{"Fantasy"});
  }
  for (const char* value : {"no", "0", "false", "maybe", ""}) {
    CHECK(match_banners("{{WikiProject Novels|fantasy-task-force=" + std::string(value) + "}}",
                        specs)
              .empty());
  }
}

TEST_CASE("banners nested in a shell template are found") {
  auto specs = three_specs();
  std::string shell =
      "{{WikiProject banner shell|1=\n"
      "{{WikiProject Science Fiction|class=B}}\n"
      "{{WikiProject Novels|sf-task-force=yes|fantasy-task-force=no}}\n"
      "}}";
  CHECK(match_banners(shell, specs) ==
        std::set<std::string>{"Science Fiction", "Science Fiction Novels"});
}

TEST_CASE("one set may be fed by alternative banner names") {
  std::vector<WikiProjectSpec> specs = {
      WikiProjectSpec{"Science Fiction", {"WikiProject Science Fiction", "WPSF"}, {}},
  };
  CHECK(match_banners("{{WPSF}}", specs) == std::set<std::string>{"Science Fiction"});
  CHECK(match_banners("{{wikiproject science fiction}}", specs) ==
        std::set<std::string>{"Science Fiction"});
}

TEST_CASE("banners hidden in comments do not match") {
  auto specs = three_specs();
  CHECK(match_banners("<!-- {{WikiProject Science Fiction}} -->", specs).empty());
}

TEST_CASE("redirect map construction") {
  std::string xml = dump_xml({
      page_xml(1, 0, "Dune (book)", "#REDIRECT [[Dune (novel)]]", "Dune (novel)"),
      page_xml(2, 0, "Dune (novel)", "The novel."),
      page_xml(3, 0, "Dune book", "#REDIRECT [[Dune (novel)]]", "Dune (novel)"),
      page_xml(4, 1, "Talk:Ignored", "#REDIRECT [[Talk:Other]]", "Talk:Other"),
  });
  DumpReader reader = reader_over(xml);
  RedirectMap map = build_redirect_map(reader);
  REQUIRE(map.size() == 2);
  CHECK(map.at(Title{kNsMain, "Dune (book)"}) == Title{kNsMain, "Dune (novel)"});
  CHECK(map.at(Title{kNsMain, "Dune book"}) == Title{kNsMain, "Dune (novel)"});
  CHECK(!map.contains(Title{kNsMain, "Dune (novel)"}));
}

TEST_CASE("resolution follows chains and flags cycles") {
  RedirectMap map;
  map[Title{kNsMain, "A"}] = Title{kNsMain, "B"};
  map[Title{kNsMain, "B"}] = Title{kNsMain, "C"};

  SUBCASE("chains resolve to their end") {
    Resolution r = resolve(Title{kNsMain, "A"}, map);
    CHECK(r.title == Title{kNsMain, "C"});
    CHECK(!r.flagged);
  }
  SUBCASE("unmapped titles resolve to themselves") {
    Resolution r = resolve(Title{kNsMain, "Z"}, map);
    CHECK(r.title == Title{kNsMain, "Z"});
    CHECK(!r.flagged);
  }
  SUBCASE("cycles are flagged at the hop limit") {
    map[Title{kNsMain, "C"}] = Title{kNsMain, "A"};
    Resolution r = resolve(Title{kNsMain, "A"}, map, 5);
    CHECK(r.flagged);
    CHECK(map.contains(r.title));
  }
  SUBCASE("chains longer than the hop limit are flagged") {
    map[Title{kNsMain, "C"}] = Title{kNsMain, "D"};
    map[Title{kNsMain, "D"}] = Title{kNsMain, "E"};
    Resolution r = resolve(Title{kNsMain, "A"}, map, 2);
    CHECK(r.flagged);
    CHECK(r.title == Title{kNsMain, "C"});
  }
}

namespace {

// Articles A..E exist; B' redirects to B. Talk pages tag:
//   SF: A, B (via redirect subject B'), Fantasy: B, C, SFN: C, D.
std::string articles_fixture() {
  return dump_xml({
      page_xml(1, 0, "Article A", "text"),
      page_xml(2, 0, "Article B", "text"),
      page_xml(3, 0, "Article C", "text"),
      page_xml(4, 0, "Article D", "text"),
      page_xml(5, 0, "Article E", "text"),
      page_xml(6, 0, "Article B (old name)", "#REDIRECT [[Article B]]", "Article B"),
  });
}

std::string talk_fixture() {
  return dump_xml({
      page_xml(101, 1, "Talk:Article A", "{{WikiProject Science Fiction|class=B}}"),
      page_xml(102, 1, "Talk:Article B (old name)", "{{WikiProject Science Fiction}}"),
      page_xml(103, 1, "Talk:Article B", "{{WikiProject Novels|fantasy-task-force=yes}}"),
      page_xml(104, 1, "Talk:Article C",
               "{{WikiProject Novels|fantasy-task-force=yes|sf-task-force=yes}}"),
      page_xml(105, 1, "Talk:Article D", "{{WikiProject Novels|sf-task-force=1}}"),
      page_xml(106, 1, "Talk:Nonexistent Article", "{{WikiProject Science Fiction}}"),
      page_xml(107, 1, "Talk:Article E", "{{WikiProject Novels|fantasy-task-force=no}}"),
  });
}

}  // namespace

TEST_CASE("seed sets build from talk banners with redirect resolution") {
  DumpReader articles = reader_over(articles_fixture());
  RedirectMap redirects = build_redirect_map(articles);

  std::unordered_set<Title, TitleHash> universe;
  DumpReader again = reader_over(articles_fixture());
  while (auto page = again.next_page()) {
    if (page->ns == 0) universe.insert(normalize_title(page->title));
  }

  DumpReader talk = reader_over(talk_fixture());
  SeedBuildResult result = build_seed_sets(talk, three_specs(), redirects, &universe, "union");

  REQUIRE(result.sets.size() == 3);
  const SeedSet& sf = result.sets[0];
  const SeedSet& fantasy = result.sets[1];
  const SeedSet& sfn = result.sets[2];

  // The redirect subject resolved to its target; the target, not the
  // redirect, is the member.
  CHECK(sf.members == std::set<Title>{Title{kNsMain, "Article A"}, Title{kNsMain, "Article B"}});
  CHECK(fantasy.members ==
        std::set<Title>{Title{kNsMain, "Article B"}, Title{kNsMain, "Article C"}});
  CHECK(sfn.members ==
        std::set<Title>{Title{kNsMain, "Article C"}, Title{kNsMain, "Article D"}});

  // Sizes {2,2,2} with two shared titles -> union 4.
  CHECK(result.union_set.members.size() == 4);
  CHECK(result.union_set.name == "union");
  CHECK(result.cycle_warnings == 0);

  for (const SeedSet& set : result.sets) {
    for (const Title& member : set.members) {
      CHECK(member.ns == kNsMain);
      CHECK(!redirects.contains(member));
    }
  }
}

TEST_CASE("partitioned seed building merges to the sequential result") {
  DumpReader articles = reader_over(articles_fixture());
  RedirectMap redirects = build_redirect_map(articles);

  DumpReader sequential_talk = reader_over(talk_fixture());
  SeedBuildResult sequential =
      build_seed_sets(sequential_talk, three_specs(), redirects, nullptr, "union");

  SeedSetBuilder left(three_specs(), &redirects, nullptr, "union");
  SeedSetBuilder right(three_specs(), &redirects, nullptr, "union");
  DumpReader talk = reader_over(talk_fixture());
  bool flip = false;
  while (auto page = talk.next_page()) {
    (flip ? left : right).add_talk_page(*page);
    flip = !flip;
  }
  left.merge(std::move(right));
  SeedBuildResult merged = left.take();

  REQUIRE(merged.sets.size() == sequential.sets.size());
  for (std::size_t i = 0; i < merged.sets.size(); ++i) {
    CHECK(merged.sets[i].name == sequential.sets[i].name);
    CHECK(merged.sets[i].members == sequential.sets[i].members);
  }
  CHECK(merged.union_set.members == sequential.union_set.members);
}

TEST_CASE("universe filtering drops talk pages of nonexistent subjects") {
  DumpReader articles = reader_over(articles_fixture());
  RedirectMap redirects = build_redirect_map(articles);
  std::unordered_set<Title, TitleHash> universe{Title{kNsMain, "Article A"}};

  DumpReader talk = reader_over(talk_fixture());
  SeedBuildResult result = build_seed_sets(talk, three_specs(), redirects, &universe, "union");
  CHECK(result.sets[0].members == std::set<Title>{Title{kNsMain, "Article A"}});
  CHECK(result.sets[1].members.empty());
  CHECK(result.sets[2].members.empty());
}

TEST_CASE("redirect cycles on talk subjects are flagged, not included") {
  RedirectMap redirects;
  redirects[Title{kNsMain, "Loop A"}] = Title{kNsMain, "Loop B"};
  redirects[Title{kNsMain, "Loop B"}] = Title{kNsMain, "Loop A"};

  SeedSetBuilder builder(three_specs(), &redirects, nullptr, "union");
  PageRecord talk;
  talk.page_id = 1;
  talk.ns = 1;
  talk.title = "Talk:Loop A";
  talk.wikitext = "{{WikiProject Science Fiction}}";
  builder.add_talk_page(talk);
  SeedBuildResult result = builder.take();
  CHECK(result.sets[0].members.empty());
  CHECK(result.cycle_warnings == 1);
}

TEST_CASE("union arithmetic matches inclusion-exclusion") {
  std::vector<SeedSet> sets(3);
  sets[0].name = "a";
  sets[1].name = "b";
  sets[2].name = "c";
  for (int i = 0; i < 10; ++i) sets[0].members.insert(Title{kNsMain, "A" + std::to_string(i)});
  for (int i = 0; i < 10; ++i) sets[1].members.insert(Title{kNsMain, "B" + std::to_string(i)});
  // c shares 4 titles with a and 2 with b.
  for (int i = 0; i < 4; ++i) sets[2].members.insert(Title{kNsMain, "A" + std::to_string(i)});
  for (int i = 0; i < 2; ++i) sets[2].members.insert(Title{kNsMain, "B" + std::to_string(i)});
  sets[2].members.insert(Title{kNsMain, "C0"});

  SeedSet u = make_union("u", sets);
  std::size_t sum = sets[0].members.size() + sets[1].members.size() + sets[2].members.size();
  CHECK(sum == 27);
  CHECK(u.members.size() == 21);
  CHECK(sum - u.members.size() == 6);
}
