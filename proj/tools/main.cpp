#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "wikisignals/errors.hpp"
#include "wikisignals/pipeline.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string output_dir;
  int workers = 0;
  bool strict = false;
  bool lenient = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool config_required) {
  auto* config = cmd->add_option("-c,--config", flags.config_path,
                                 "Pipeline config file (JSON)");
  if (config_required) config->required();
  cmd->add_option("-o,--output-dir", flags.output_dir, "Output directory override");
  cmd->add_option("-j,--workers", flags.workers, "Worker thread count override");
  cmd->add_flag("--strict", flags.strict, "Fail on recoverable input problems");
  cmd->add_flag("--lenient", flags.lenient, "Count recoverable input problems as warnings");
}

wikisignals::PipelineConfig make_config(const CommonFlags& flags) {
  wikisignals::PipelineConfig config;
  if (!flags.config_path.empty()) {
    config = wikisignals::PipelineConfig::load(flags.config_path);
  }
  if (!flags.output_dir.empty()) config.output_dir = flags.output_dir;
  if (flags.workers > 0) config.workers = flags.workers;
  if (flags.strict) config.strict = true;
  if (flags.lenient) config.strict = false;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wikipedia dump signal extraction pipeline"};
  app.require_subcommand(1);

  CommonFlags seeds_flags;
  auto* seeds = app.add_subcommand(
      "seeds", "Build per-project seed sets and their union from talk-page banners");
  add_common(seeds, seeds_flags, /*config_required=*/true);

  CommonFlags signals_flags;
  std::string seeds_dir;
  auto* signals = app.add_subcommand(
      "signals", "Compute lead-link, category and P31 frequency tables per seed set");
  add_common(signals, signals_flags, /*config_required=*/true);
  signals->add_option("--seeds-dir", seeds_dir, "Directory holding the seed title lists");

  CommonFlags coverage_flags;
  std::string set_table, global_table, keys_file, coverage_out;
  auto* coverage = app.add_subcommand(
      "coverage", "Compute in-set/global coverage ratios for a list of keys");
  add_common(coverage, coverage_flags, /*config_required=*/false);
  coverage->add_option("--set-table", set_table, "Set frequency table (JSON)")->required();
  coverage->add_option("--global-table", global_table, "Global frequency table (JSON)")
      ->required();
  coverage->add_option("--keys", keys_file, "Key list, one per line")->required();
  coverage->add_option("--out", coverage_out, "Output TSV path")->required();

  CommonFlags plot_flags;
  std::string table_file, plot_out;
  int top_k = 0;
  auto* plotdata = app.add_subcommand("plotdata", "Emit top-k rows of a table for plotting");
  add_common(plotdata, plot_flags, /*config_required=*/false);
  plotdata->add_option("--table", table_file, "Frequency table (JSON)")->required();
  plotdata->add_option("-k,--top-k", top_k, "Row count (default: config top_k)");
  plotdata->add_option("--out", plot_out, "Output TSV path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (seeds->parsed()) {
      return wikisignals::cmd_seeds(make_config(seeds_flags));
    }
    if (signals->parsed()) {
      return wikisignals::cmd_signals(make_config(signals_flags), seeds_dir);
    }
    if (coverage->parsed()) {
      return wikisignals::cmd_coverage(make_config(coverage_flags), set_table, global_table,
                                       keys_file, coverage_out);
    }
    if (plotdata->parsed()) {
      return wikisignals::cmd_plotdata(make_config(plot_flags), table_file, top_k, plot_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
