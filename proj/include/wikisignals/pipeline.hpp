#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "wikisignals/seedset.hpp"

namespace wikisignals {

struct PipelineConfig {
  std::string articles_dump;
  std::string talk_dump;     // may equal articles_dump
  std::string wikidata_dump;
  std::vector<WikiProjectSpec> projects;
  std::vector<std::string> properties = {"P31"};
  std::string output_dir = "out";
  int top_k = 20;
  bool strict = false;
  int workers = 1;
  std::string union_name = "SF/F baseline";

  static PipelineConfig load(const std::string& path);
  // Checks referenced paths exist and numeric fields are in range.
  void validate(bool need_wikidata = true) const;
};

// Warning counters summarized at the end of a stage and recorded in its
// manifest. Warnings never change the exit status in lenient mode.
using WarningCounts = std::map<std::string, std::uint64_t>;

// seeds: per-project and union title lists, redirect map, summary, manifest.
int cmd_seeds(const PipelineConfig& config);

// signals: lead_link/category/p31 frequency tables (TSV + JSON) for each
// seed set and the global corpus. seeds_dir defaults to <output_dir>/seeds.
int cmd_signals(const PipelineConfig& config, const std::string& seeds_dir = "");

// coverage: one CoverageStat row per key in keys_file (one key per line)
// computed from a set table and a global table produced by cmd_signals.
int cmd_coverage(const PipelineConfig& config, const std::string& set_table_path,
                 const std::string& global_table_path, const std::string& keys_file,
                 const std::string& out_path);

// plotdata: top-k rows of a table in columnar TSV form.
int cmd_plotdata(const PipelineConfig& config, const std::string& table_file, int k,
                 const std::string& out_path);

// Filesystem-safe slug for a set name: lowercased, non-alphanumerics
// collapsed to single underscores.
std::string slugify(const std::string& name);

// Streamed FNV-1a 64-bit checksum of a file, as 16 hex digits.
std::string fnv1a64_file(const std::string& path);

}  // namespace wikisignals
