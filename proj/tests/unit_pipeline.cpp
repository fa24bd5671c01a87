#include <doctest.h>

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "test_util.hpp"
#include "wikisignals/errors.hpp"
#include "wikisignals/pipeline.hpp"
#include "wikisignals/signals.hpp"

using namespace wikisignals;
using namespace testutil;
namespace fs = std::filesystem;

TEST_CASE("slugify") {
  CHECK(slugify("Science Fiction") == "science_fiction");
  CHECK(slugify("SF/F baseline") == "sf_f_baseline");
  CHECK(slugify("  --hello--  ") == "hello");
  CHECK(slugify("a//b") == "a_b");
  CHECK(slugify("ALL CAPS 42") == "all_caps_42");
  CHECK(slugify("///") == "unnamed");
  CHECK(slugify("") == "unnamed");
}

TEST_CASE("file checksums match the published FNV-1a vectors") {
  TempDir dir;
  CHECK(fnv1a64_file(dir.file("empty", "")) == "cbf29ce484222325");
  CHECK(fnv1a64_file(dir.file("a", "a")) == "af63dc4c8601ec8c");
  CHECK(fnv1a64_file(dir.file("foobar", "foobar")) == "85944171f73967e8");
  CHECK_THROWS_AS((void)fnv1a64_file((dir.path / "absent").string()), FileNotFoundError);
}

TEST_CASE("config loading") {
  TempDir dir;
  dir.file("articles.xml", dump_xml({}));
  dir.file("entities.json", "[]");
  std::string config_path = dir.file("config.json", R"({
    "articles_dump": "articles.xml",
    "wikidata_dump": "entities.json",
    "output_dir": "out",
    "top_k": 5,
    "workers": 2,
    "union_name": "SF/F baseline",
    "projects": [
      {"set_name": "Science Fiction",
       "banner_templates": ["Template:WikiProject Science Fiction"]},
      {"set_name": "Fantasy",
       "banner_templates": ["wikiProject_Novels"],
       "required_param": {"key": "fantasy-task-force"}}
    ]
  })");

  PipelineConfig config = PipelineConfig::load(config_path);
  CHECK(config.articles_dump == (dir.path / "articles.xml").string());
  CHECK(config.talk_dump == config.articles_dump);  // defaults to the articles dump
  CHECK(config.wikidata_dump == (dir.path / "entities.json").string());
  CHECK(config.top_k == 5);
  CHECK(config.workers == 2);
  CHECK(config.strict == false);
  CHECK(config.properties == std::vector<std::string>{"P31"});
  REQUIRE(config.projects.size() == 2);
  CHECK(config.projects[0].banner_templates ==
        std::vector<std::string>{"WikiProject Science Fiction"});
  CHECK(config.projects[1].banner_templates == std::vector<std::string>{"WikiProject Novels"});
  REQUIRE(config.projects[1].required_param.has_value());
  CHECK(config.projects[1].required_param->key == "fantasy-task-force");
  CHECK(config.projects[1].required_param->accepted.empty());
  CHECK_NOTHROW(config.validate(/*need_wikidata=*/true));

  SUBCASE("missing file") {
    CHECK_THROWS_AS((void)PipelineConfig::load((dir.path / "nope.json").string()),
                    FileNotFoundError);
  }
  SUBCASE("invalid JSON") {
    CHECK_THROWS_AS((void)PipelineConfig::load(dir.file("bad.json", "{nope")), ConfigError);
  }
  SUBCASE("validation failures") {
    PipelineConfig broken = config;
    broken.articles_dump = (dir.path / "absent.xml").string();
    CHECK_THROWS_AS(broken.validate(false), ConfigError);

    broken = config;
    broken.top_k = 0;
    CHECK_THROWS_AS(broken.validate(false), ConfigError);

    broken = config;
    broken.workers = 0;
    CHECK_THROWS_AS(broken.validate(false), ConfigError);

    broken = config;
    broken.projects[0].set_name.clear();
    CHECK_THROWS_AS(broken.validate(false), ConfigError);

    broken = config;
    broken.projects[0].banner_templates.clear();
    CHECK_THROWS_AS(broken.validate(false), ConfigError);

    broken = config;
    broken.projects[1].required_param->key.clear();
    CHECK_THROWS_AS(broken.validate(false), ConfigError);

    broken = config;
    broken.wikidata_dump.clear();
    CHECK_THROWS_AS(broken.validate(true), ConfigError);
    CHECK_NOTHROW(broken.validate(false));
  }
}

namespace {

std::string articles_xml() {
  return dump_xml({
      page_xml(1, 0, "Dune (novel)",
               "{{Infobox book\n| author = [[Frank Herbert]]\n}}\n"
               "'''Dune''' is a [[science fiction]] novel by [[Frank Herbert]].\n\n"
               "== Plot ==\nDesert stuff with [[Fantasy|fantastic]] politics.\n\n"
               "[[Category:Science fiction novels]]\n[[Category:1965 novels]]\n"),
      page_xml(2, 0, "Solaris (novel)",
               "'''Solaris''' is a [[science fiction]] novel by [[Stanis\xC5\x82"
               "aw Lem]].\n\n== Reception ==\nWell received.\n\n"
               "[[Category:Science fiction novels]]\n[[Category:Polish novels]]\n"),
      page_xml(3, 0, "A Wizard of Earthsea",
               "A [[fantasy]] novel by [[Ursula K. Le Guin]].\n\n"
               "[[Category:Fantasy novels]]\n"),
      page_xml(4, 0, "The Dispossessed",
               "An [[SF]] novel by [[Ursula K. Le Guin]].\n\n== Themes ==\nAnarchism.\n\n"
               "[[Category:Science fiction novels]]\n"),
      page_xml(5, 0, "Frank Herbert",
               "Author of [[Dune (novel)|Dune]].\n\n"
               "[[Category:American science fiction writers]]\n"),
      page_xml(6, 0, "Ursula K. Le Guin",
               "Author of [[A Wizard of Earthsea]] and [[The Dispossessed]].\n\n"
               "[[Category:American science fiction writers]]\n"),
      page_xml(7, 0, "Stanis\xC5\x82"
                     "aw Lem",
               "Author of [[Solaris (novel)|Solaris]].\n"),
      page_xml(8, 0, "Science fiction", "A genre.\n"),
      page_xml(9, 0, "Fantasy", "Another genre.\n"),
      page_xml(10, 0, "SF", "#REDIRECT [[Science fiction]]", "Science fiction"),
  });
}

std::string talk_xml() {
  return dump_xml({
      page_xml(101, 1, "Talk:Dune (novel)",
               "{{WikiProject Science Fiction|class=FA}}\n"
               "{{WikiProject Novels|sf-task-force=yes}}\n"),
      page_xml(102, 1, "Talk:Solaris (novel)", "{{WikiProject Science Fiction}}\n"),
      page_xml(103, 1, "Talk:A Wizard of Earthsea",
               "{{WikiProject Novels|fantasy-task-force=yes}}\n"),
      page_xml(104, 1, "Talk:The Dispossessed",
               "{{WikiProject banner shell|1=\n"
               "{{WikiProject Science Fiction|class=B}}\n"
               "{{WikiProject Novels|sf-task-force=y}}\n"
               "}}\n"),
  });
}

std::string entity_line(const std::string& qid, const std::string& enwiki,
                        const std::string& p31) {
  return R"({"type":"item","id":")" + qid +
         R"(","claims":{"P31":[{"mainsnak":{"snaktype":"value","datavalue":)"
         R"({"type":"wikibase-entityid","value":{"id":")" +
         p31 + R"("}}},"rank":"normal"}]},"sitelinks":{"enwiki":{"site":"enwiki","title":")" +
         enwiki + R"("}}})";
}

std::string wikidata_json() {
  return "[\n" + entity_line("Q1", "Dune (novel)", "Q7725634") + ",\n" +
         entity_line("Q2", "Solaris (novel)", "Q7725634") + ",\n" +
         entity_line("Q3", "A Wizard of Earthsea", "Q7725634") + ",\n" +
         entity_line("Q4", "Frank Herbert", "Q5") + "\n]\n";
}

std::string fixture_config_json(int workers) {
  return R"({
    "articles_dump": "articles.xml",
    "talk_dump": "talk.xml",
    "wikidata_dump": "entities.json",
    "workers": )" +
         std::to_string(workers) + R"(,
    "union_name": "SF/F baseline",
    "projects": [
      {"set_name": "Science Fiction",
       "banner_templates": ["WikiProject Science Fiction"]},
      {"set_name": "Fantasy",
       "banner_templates": ["WikiProject Novels"],
       "required_param": {"key": "fantasy-task-force"}},
      {"set_name": "Science Fiction Novels",
       "banner_templates": ["WikiProject Novels"],
       "required_param": {"key": "sf-task-force"}}
    ]
  })";
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    files[fs::relative(entry.path(), root).string()] = read_file(entry.path().string());
  }
  return files;
}

}  // namespace

TEST_CASE("seeds and signals stages produce the expected files") {
  TempDir dir;
  dir.file("articles.xml", articles_xml());
  dir.file("talk.xml", talk_xml());
  dir.file("entities.json", wikidata_json());
  std::string config_path = dir.file("config.json", fixture_config_json(1));

  PipelineConfig config = PipelineConfig::load(config_path);
  config.output_dir = (dir.path / "out").string();
  REQUIRE(cmd_seeds(config) == 0);

  fs::path seeds = dir.path / "out" / "seeds";
  CHECK(read_file((seeds / "science_fiction.txt").string()) ==
        "Dune (novel)\nSolaris (novel)\nThe Dispossessed\n");
  CHECK(read_file((seeds / "fantasy.txt").string()) == "A Wizard of Earthsea\n");
  CHECK(read_file((seeds / "science_fiction_novels.txt").string()) ==
        "Dune (novel)\nThe Dispossessed\n");
  CHECK(read_file((seeds / "sf_f_baseline.txt").string()) ==
        "A Wizard of Earthsea\nDune (novel)\nSolaris (novel)\nThe Dispossessed\n");
  std::string summary = read_file((seeds / "summary.txt").string());
  CHECK(summary.find("Science Fiction: 3") != std::string::npos);
  CHECK(summary.find("Fantasy: 1") != std::string::npos);
  CHECK(summary.find("Science Fiction Novels: 2") != std::string::npos);
  CHECK(summary.find("SF/F baseline (union): 4") != std::string::npos);
  CHECK(summary.find("duplicate overlap: 2") != std::string::npos);
  CHECK(read_file((seeds / "redirects.tsv").string()) == "from\tto\nSF\tScience fiction\n");
  CHECK(fs::exists(seeds / "manifest.json"));

  REQUIRE(cmd_signals(config) == 0);
  fs::path signals = dir.path / "out" / "signals";

  FrequencyTable sf_lead = read_table_json_file((signals / "science_fiction.lead_link.json").string());
  CHECK(sf_lead.denominator == 3);
  CHECK(sf_lead.counts.at("Science fiction") == 3);  // [[SF]] resolved through the redirect
  CHECK(sf_lead.counts.at("Frank Herbert") == 1);
  CHECK(sf_lead.counts.at("Stanisław Lem") == 1);
  CHECK(sf_lead.counts.at("Ursula K. Le Guin") == 1);
  CHECK(!sf_lead.counts.contains("Fantasy"));  // linked below the first heading only

  FrequencyTable sf_cat = read_table_json_file((signals / "science_fiction.category.json").string());
  CHECK(sf_cat.denominator == 3);
  CHECK(sf_cat.counts.at("Science fiction novels") == 3);
  CHECK(sf_cat.counts.at("1965 novels") == 1);

  FrequencyTable global_cat = read_table_json_file((signals / "global.category.json").string());
  CHECK(global_cat.denominator == 9);  // every non-redirect article
  CHECK(global_cat.counts.at("Science fiction novels") == 3);
  CHECK(global_cat.counts.at("American science fiction writers") == 2);

  FrequencyTable sf_p31 = read_table_json_file((signals / "science_fiction.p31.json").string());
  CHECK(sf_p31.denominator == 3);
  CHECK(sf_p31.counts.at("Q7725634") == 2);  // The Dispossessed has no entity
  CHECK(sf_p31.counts.size() == 1);

  FrequencyTable union_p31 = read_table_json_file((signals / "sf_f_baseline.p31.json").string());
  CHECK(union_p31.denominator == 4);
  CHECK(union_p31.counts.at("Q7725634") == 3);

  std::string sf_cat_tsv = read_file((signals / "science_fiction.category.tsv").string());
  CHECK(sf_cat_tsv.substr(0, sf_cat_tsv.find('\n')) == "key\tcount\tshare");
  CHECK(sf_cat_tsv.find("Science fiction novels\t3\t100.00%") != std::string::npos);

  SUBCASE("coverage and plotdata read the stage outputs") {
    std::string keys_path = dir.file("keys.txt", "Science fiction novels\nFantasy novels\nNope\n");
    std::string coverage_path = (dir.path / "out" / "coverage.tsv").string();
    REQUIRE(cmd_coverage(config, (signals / "science_fiction.category.json").string(),
                         (signals / "global.category.json").string(), keys_path,
                         coverage_path) == 0);
    CHECK(read_file(coverage_path) ==
          "key\tin_set\tglobal\tratio\n"
          "Science fiction novels\t3\t3\t100.00%\n"
          "Fantasy novels\t0\t1\t0.00%\n"
          "Nope\t0\t0\tnull\n");

    std::string plot_path = (dir.path / "out" / "plot.tsv").string();
    REQUIRE(cmd_plotdata(config, (signals / "science_fiction.category.json").string(), 2,
                         plot_path) == 0);
    CHECK(read_file(plot_path) ==
          "key\tcount\tshare\n"
          "Science fiction novels\t3\t100.00%\n"
          "1965 novels\t1\t33.33%\n");
  }
}

TEST_CASE("worker count does not change any output byte") {
  TempDir dir;
  dir.file("articles.xml", articles_xml());
  dir.file("talk.xml", talk_xml());
  dir.file("entities.json", wikidata_json());
  std::string config_path = dir.file("config.json", fixture_config_json(1));

  PipelineConfig one = PipelineConfig::load(config_path);
  one.output_dir = (dir.path / "out1").string();
  one.workers = 1;
  REQUIRE(cmd_seeds(one) == 0);
  REQUIRE(cmd_signals(one) == 0);

  PipelineConfig three = one;
  three.output_dir = (dir.path / "out3").string();
  three.workers = 3;
  REQUIRE(cmd_seeds(three) == 0);
  REQUIRE(cmd_signals(three) == 0);

  auto tree_one = read_tree(dir.path / "out1");
  auto tree_three = read_tree(dir.path / "out3");
  REQUIRE(tree_one.size() == tree_three.size());
  for (const auto& [name, content] : tree_one) {
    INFO("file ", name);
    REQUIRE(tree_three.contains(name));
    CHECK(tree_three.at(name) == content);
  }
}

TEST_CASE("a config without projects warns and writes empty seed outputs") {
  TempDir dir;
  dir.file("articles.xml", dump_xml({page_xml(1, 0, "Lone", "text")}));
  std::string config_path = dir.file("config.json", R"({
    "articles_dump": "articles.xml",
    "union_name": "SF/F baseline",
    "projects": []
  })");

  PipelineConfig config = PipelineConfig::load(config_path);
  config.output_dir = (dir.path / "out").string();
  CHECK(cmd_seeds(config) == 0);
  fs::path seeds = dir.path / "out" / "seeds";
  CHECK(read_file((seeds / "sf_f_baseline.txt").string()).empty());
  std::string manifest = read_file((seeds / "manifest.json").string());
  CHECK(manifest.find("no_project_specs") != std::string::npos);
}
