#include "wikisignals/pipeline.hpp"

#include <json.hpp>

#include <boost/iostreams/device/file.hpp>
#include <boost/iostreams/filter/bzip2.hpp>
#include <boost/iostreams/filtering_stream.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <thread>
#include <utility>

#include "wikisignals/dump_ingest.hpp"
#include "wikisignals/errors.hpp"
#include "wikisignals/signals.hpp"
#include "wikisignals/wikidata.hpp"
#include "wikisignals/wikitext.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace wikisignals {

namespace {

constexpr std::size_t kPageBatch = 16;
constexpr std::size_t kLineBatch = 256;
constexpr std::size_t kQueueCapacity = 64;

// Single-producer multi-consumer queue with backpressure and abort.
template <typename T>
class BoundedQueue {
 public:
  explicit BoundedQueue(std::size_t capacity) : capacity_(capacity) {}

  bool push(T item) {
    std::unique_lock lock(mutex_);
    not_full_.wait(lock, [&] { return items_.size() < capacity_ || closed_; });
    if (closed_) return false;
    items_.push_back(std::move(item));
    not_empty_.notify_one();
    return true;
  }

  bool pop(T& out) {
    std::unique_lock lock(mutex_);
    not_empty_.wait(lock, [&] { return !items_.empty() || closed_; });
    if (items_.empty()) return false;
    out = std::move(items_.front());
    items_.pop_front();
    not_full_.notify_one();
    return true;
  }

  void close() {
    std::lock_guard lock(mutex_);
    closed_ = true;
    not_empty_.notify_all();
    not_full_.notify_all();
  }

  void abort() {
    std::lock_guard lock(mutex_);
    closed_ = true;
    items_.clear();
    not_empty_.notify_all();
    not_full_.notify_all();
  }

 private:
  std::mutex mutex_;
  std::condition_variable not_full_;
  std::condition_variable not_empty_;
  std::deque<T> items_;
  std::size_t capacity_;
  bool closed_ = false;
};

// First exception wins; the rest of the stage winds down.
class FailureLatch {
 public:
  void capture() {
    std::lock_guard lock(mutex_);
    if (!error_) error_ = std::current_exception();
    failed_.store(true, std::memory_order_relaxed);
  }
  bool failed() const { return failed_.load(std::memory_order_relaxed); }
  void rethrow_if_failed() {
    std::lock_guard lock(mutex_);
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::mutex mutex_;
  std::exception_ptr error_;
  std::atomic<bool> failed_{false};
};

// Runs process(worker_id, page) over every page of the dump. With one
// worker everything stays on the calling thread. With several, a
// multistream dump is split by index chunks, anything else is fanned out
// through a bounded queue fed by a reader thread.
void for_each_page(const DumpSource& source, int workers,
                   const std::function<void(int, PageRecord&&)>& process) {
  if (workers <= 1) {
    DumpReader reader = open_dump(source);
    while (auto page = reader.next_page()) {
      process(0, std::move(*page));
    }
    return;
  }

  FailureLatch failure;
  if (source.compression == Compression::Bz2Multistream && source.index_path) {
    auto offsets = multistream_chunk_offsets(read_multistream_index(*source.index_path));
    if (offsets.empty()) return;
    std::atomic<std::size_t> next{0};
    auto run = [&](int worker_id) {
      try {
        for (;;) {
          std::size_t i = next.fetch_add(1);
          if (i >= offsets.size() || failure.failed()) return;
          std::uint64_t begin = offsets[i];
          std::uint64_t end = i + 1 < offsets.size() ? offsets[i + 1] : end_of_file;
          DumpReader reader = open_dump_chunk(source, begin, end);
          while (auto page = reader.next_page()) {
            if (failure.failed()) return;
            process(worker_id, std::move(*page));
          }
        }
      } catch (...) {
        failure.capture();
      }
    };
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) threads.emplace_back(run, w);
    for (auto& t : threads) t.join();
    failure.rethrow_if_failed();
    return;
  }

  BoundedQueue<std::vector<PageRecord>> queue(kQueueCapacity);
  auto consume = [&](int worker_id) {
    try {
      std::vector<PageRecord> batch;
      while (queue.pop(batch)) {
        for (PageRecord& page : batch) {
          process(worker_id, std::move(page));
        }
      }
    } catch (...) {
      failure.capture();
      queue.abort();
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) threads.emplace_back(consume, w);
  try {
    DumpReader reader = open_dump(source);
    std::vector<PageRecord> batch;
    batch.reserve(kPageBatch);
    while (auto page = reader.next_page()) {
      if (failure.failed()) break;
      batch.push_back(std::move(*page));
      if (batch.size() >= kPageBatch) {
        if (!queue.push(std::move(batch))) break;
        batch = {};
        batch.reserve(kPageBatch);
      }
    }
    if (!batch.empty() && !failure.failed()) queue.push(std::move(batch));
  } catch (...) {
    failure.capture();
  }
  queue.close();
  for (auto& t : threads) t.join();
  failure.rethrow_if_failed();
}

std::unique_ptr<std::istream> open_text_input(const std::string& path) {
  namespace io = boost::iostreams;
  if (!fs::exists(path)) throw FileNotFoundError(path);
  io::file_source file(path, std::ios::in | std::ios::binary);
  if (!file.is_open()) throw FileNotFoundError(path);
  auto stream = std::make_unique<io::filtering_istream>();
  if (path.ends_with(".bz2")) stream->push(io::bzip2_decompressor());
  stream->push(file);
  return stream;
}

// Runs process(worker_id, line_no, line) over every line of a text file,
// decompressing bz2 by extension.
void for_each_line(const std::string& path, int workers,
                   const std::function<void(int, std::size_t, std::string&&)>& process) {
  if (workers <= 1) {
    auto input = open_text_input(path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(*input, line)) {
      process(0, ++line_no, std::move(line));
      line.clear();
    }
    return;
  }

  using Batch = std::vector<std::pair<std::size_t, std::string>>;
  BoundedQueue<Batch> queue(kQueueCapacity);
  FailureLatch failure;
  auto consume = [&](int worker_id) {
    try {
      Batch batch;
      while (queue.pop(batch)) {
        for (auto& [line_no, line] : batch) {
          process(worker_id, line_no, std::move(line));
        }
      }
    } catch (...) {
      failure.capture();
      queue.abort();
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) threads.emplace_back(consume, w);
  try {
    auto input = open_text_input(path);
    Batch batch;
    batch.reserve(kLineBatch);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(*input, line)) {
      if (failure.failed()) break;
      batch.emplace_back(++line_no, std::move(line));
      line.clear();
      if (batch.size() >= kLineBatch) {
        if (!queue.push(std::move(batch))) break;
        batch = Batch{};
        batch.reserve(kLineBatch);
      }
    }
    if (!batch.empty() && !failure.failed()) queue.push(std::move(batch));
  } catch (...) {
    failure.capture();
  }
  queue.close();
  for (auto& t : threads) t.join();
  failure.rethrow_if_failed();
}

std::string strip_template_prefix(std::string name) {
  constexpr std::string_view kPrefix = "template:";
  if (name.size() > kPrefix.size()) {
    bool hit = true;
    for (std::size_t i = 0; i < kPrefix.size(); ++i) {
      if (std::tolower(static_cast<unsigned char>(name[i])) != kPrefix[i]) {
        hit = false;
        break;
      }
    }
    if (hit) return normalize_name_part(std::string_view(name).substr(kPrefix.size()));
  }
  return name;
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
  out.close();
  if (!out) throw Error("write failed for " + path.string());
}

struct Manifest {
  std::string stage;
  std::map<std::string, std::string> inputs;   // basename -> checksum
  std::map<std::string, std::string> outputs;  // relative name -> checksum
  WarningCounts warnings;

  void add_input(const std::string& path) {
    inputs[fs::path(path).filename().string()] = fnv1a64_file(path);
  }
  void add_output(const fs::path& dir, const std::string& name) {
    outputs[name] = fnv1a64_file((dir / name).string());
  }
  void write(const fs::path& dir) const {
    ordered_json doc;
    doc["stage"] = stage;
    doc["inputs"] = ordered_json::object();
    for (const auto& [name, sum] : inputs) doc["inputs"][name] = sum;
    doc["outputs"] = ordered_json::object();
    for (const auto& [name, sum] : outputs) doc["outputs"][name] = sum;
    doc["warnings"] = ordered_json::object();
    for (const auto& [name, count] : warnings) doc["warnings"][name] = count;
    write_text_file(dir / "manifest.json", doc.dump(2) + "\n");
  }
};

void report_warnings(const std::string& stage, const WarningCounts& warnings) {
  for (const auto& [name, count] : warnings) {
    if (count > 0) {
      std::cerr << stage << ": warning: " << name << " = " << count << "\n";
    }
  }
}

std::vector<std::string> distinct_set_names(const std::vector<WikiProjectSpec>& projects) {
  std::vector<std::string> names;
  for (const WikiProjectSpec& spec : projects) {
    if (std::find(names.begin(), names.end(), spec.set_name) == names.end()) {
      names.push_back(spec.set_name);
    }
  }
  return names;
}

SeedSet load_seed_file(const std::string& name, const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileNotFoundError(path.string());
  SeedSet set{name, {}};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (auto title = try_normalize_title(line); title && title->ns == kNsMain) {
      set.members.insert(std::move(*title));
    }
  }
  return set;
}

}  // namespace

std::string slugify(const std::string& name) {
  std::string slug;
  bool pending_sep = false;
  for (unsigned char c : name) {
    if (std::isalnum(c)) {
      if (pending_sep && !slug.empty()) slug += '_';
      pending_sep = false;
      slug += static_cast<char>(std::tolower(c));
    } else {
      pending_sep = true;
    }
  }
  return slug.empty() ? "unnamed" : slug;
}

std::string fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileNotFoundError(path);
  std::uint64_t hash = 14695981039346656037ULL;
  char buffer[64 * 1024];
  for (;;) {
    in.read(buffer, sizeof buffer);
    std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      hash ^= static_cast<unsigned char>(buffer[i]);
      hash *= 1099511628211ULL;
    }
    if (got < static_cast<std::streamsize>(sizeof buffer)) break;
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(hash));
  return out;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileNotFoundError(path);
  json doc = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw ConfigError("config file " + path + " is not valid JSON");
  }
  PipelineConfig config;
  try {
    config.articles_dump = doc.value("articles_dump", "");
    config.talk_dump = doc.value("talk_dump", config.articles_dump);
    config.wikidata_dump = doc.value("wikidata_dump", "");
    config.output_dir = doc.value("output_dir", config.output_dir);
    config.top_k = doc.value("top_k", config.top_k);
    config.strict = doc.value("strict", config.strict);
    config.workers = doc.value("workers", config.workers);
    config.union_name = doc.value("union_name", config.union_name);
    if (doc.contains("properties")) {
      config.properties = doc.at("properties").get<std::vector<std::string>>();
    }
    for (const json& project : doc.value("projects", json::array())) {
      WikiProjectSpec spec;
      spec.set_name = project.value("set_name", "");
      for (const json& banner : project.value("banner_templates", json::array())) {
        spec.banner_templates.push_back(
            strip_template_prefix(normalize_name_part(banner.get<std::string>())));
      }
      if (project.contains("required_param")) {
        const json& rp = project.at("required_param");
        RequiredParam param;
        param.key = rp.value("key", "");
        for (const json& v : rp.value("accepted", json::array())) {
          param.accepted.push_back(v.get<std::string>());
        }
        spec.required_param = std::move(param);
      }
      config.projects.push_back(std::move(spec));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field has the wrong shape: ") + e.what());
  }

  // Relative dump paths resolve against the config file's directory.
  fs::path base = fs::path(path).parent_path();
  auto rebase = [&](std::string& p) {
    if (!p.empty() && fs::path(p).is_relative()) p = (base / p).string();
  };
  rebase(config.articles_dump);
  rebase(config.talk_dump);
  rebase(config.wikidata_dump);
  return config;
}

void PipelineConfig::validate(bool need_wikidata) const {
  if (articles_dump.empty() || !fs::exists(articles_dump)) {
    throw ConfigError("articles_dump missing or not found: \"" + articles_dump + "\"");
  }
  if (talk_dump.empty() || !fs::exists(talk_dump)) {
    throw ConfigError("talk_dump missing or not found: \"" + talk_dump + "\"");
  }
  if (need_wikidata && (wikidata_dump.empty() || !fs::exists(wikidata_dump))) {
    throw ConfigError("wikidata_dump missing or not found: \"" + wikidata_dump + "\"");
  }
  if (top_k < 1) throw ConfigError("top_k must be at least 1");
  if (workers < 1) throw ConfigError("workers must be at least 1");
  for (const WikiProjectSpec& spec : projects) {
    if (spec.set_name.empty()) throw ConfigError("project with empty set_name");
    if (spec.banner_templates.empty()) {
      throw ConfigError("project \"" + spec.set_name + "\" lists no banner templates");
    }
    if (spec.required_param && spec.required_param->key.empty()) {
      throw ConfigError("project \"" + spec.set_name + "\" has a required_param without a key");
    }
  }
}

int cmd_seeds(const PipelineConfig& config) {
  config.validate(/*need_wikidata=*/false);
  fs::path out_dir = fs::path(config.output_dir) / "seeds";
  fs::create_directories(out_dir);

  Manifest manifest;
  manifest.stage = "seeds";
  manifest.add_input(config.articles_dump);
  manifest.add_input(config.talk_dump);

  if (config.projects.empty()) {
    std::cerr << "seeds: warning: no project specs configured, writing empty outputs\n";
    manifest.warnings["no_project_specs"] = 1;
    std::string union_file = slugify(config.union_name) + ".txt";
    write_text_file(out_dir / union_file, "");
    write_text_file(out_dir / "summary.txt",
                    config.union_name + " (union): 0\nduplicate overlap: 0\ncycle warnings: 0\n");
    manifest.add_output(out_dir, union_file);
    manifest.add_output(out_dir, "summary.txt");
    manifest.write(out_dir);
    return 0;
  }

  // Pass A: articles dump -> redirect map + universe of existing titles.
  DumpSource articles = DumpSource::from_path(config.articles_dump);
  std::vector<RedirectMapBuilder> redirect_parts(static_cast<std::size_t>(config.workers));
  std::vector<std::unordered_set<Title, TitleHash>> universe_parts(
      static_cast<std::size_t>(config.workers));
  for_each_page(articles, config.workers, [&](int worker, PageRecord&& page) {
    if (page.ns != kNsMain) return;
    if (auto title = try_normalize_title(page.title); title && title->ns == kNsMain) {
      universe_parts[static_cast<std::size_t>(worker)].insert(std::move(*title));
    }
    redirect_parts[static_cast<std::size_t>(worker)].add(page);
  });
  RedirectMap redirects = redirect_parts[0].take();
  std::unordered_set<Title, TitleHash> universe = std::move(universe_parts[0]);
  for (std::size_t w = 1; w < redirect_parts.size(); ++w) {
    RedirectMap part = redirect_parts[w].take();
    redirects.merge(part);
    universe.merge(universe_parts[w]);
  }

  // Pass B: talk dump -> per-project seed sets.
  DumpSource talk = DumpSource::from_path(config.talk_dump);
  std::vector<SeedSetBuilder> seed_parts;
  seed_parts.reserve(static_cast<std::size_t>(config.workers));
  for (int w = 0; w < config.workers; ++w) {
    seed_parts.emplace_back(config.projects, &redirects, &universe, config.union_name);
  }
  for_each_page(talk, config.workers, [&](int worker, PageRecord&& page) {
    seed_parts[static_cast<std::size_t>(worker)].add_talk_page(page);
  });
  for (std::size_t w = 1; w < seed_parts.size(); ++w) {
    seed_parts[0].merge(std::move(seed_parts[w]));
  }
  SeedBuildResult result = seed_parts[0].take();

  // Outputs: one sorted title list per set, the union, the redirect map,
  // and a human-readable summary.
  std::size_t member_sum = 0;
  std::string summary;
  for (const SeedSet& set : result.sets) {
    std::string body;
    for (const Title& title : set.members) {
      body += to_string(title);
      body += '\n';
    }
    std::string file = slugify(set.name) + ".txt";
    write_text_file(out_dir / file, body);
    manifest.add_output(out_dir, file);
    member_sum += set.members.size();
    summary += set.name + ": " + std::to_string(set.members.size()) + "\n";
  }
  {
    std::string body;
    for (const Title& title : result.union_set.members) {
      body += to_string(title);
      body += '\n';
    }
    std::string file = slugify(result.union_set.name) + ".txt";
    write_text_file(out_dir / file, body);
    manifest.add_output(out_dir, file);
  }
  summary += result.union_set.name + " (union): " +
             std::to_string(result.union_set.members.size()) + "\n";
  summary += "duplicate overlap: " +
             std::to_string(member_sum - result.union_set.members.size()) + "\n";
  summary += "cycle warnings: " + std::to_string(result.cycle_warnings) + "\n";
  write_text_file(out_dir / "summary.txt", summary);
  manifest.add_output(out_dir, "summary.txt");

  {
    std::map<Title, Title> sorted(redirects.begin(), redirects.end());
    std::string body = "from\tto\n";
    for (const auto& [from, to] : sorted) {
      body += to_string(from) + "\t" + to_string(to) + "\n";
    }
    write_text_file(out_dir / "redirects.tsv", body);
    manifest.add_output(out_dir, "redirects.tsv");
  }

  manifest.warnings["redirect_cycles"] = result.cycle_warnings;
  manifest.write(out_dir);
  report_warnings("seeds", manifest.warnings);
  std::cout << summary;
  return 0;
}

int cmd_signals(const PipelineConfig& config, const std::string& seeds_dir_arg) {
  config.validate(/*need_wikidata=*/true);
  fs::path seeds_dir = seeds_dir_arg.empty()
                           ? fs::path(config.output_dir) / "seeds"
                           : fs::path(seeds_dir_arg);
  fs::path out_dir = fs::path(config.output_dir) / "signals";
  fs::create_directories(out_dir);

  Manifest manifest;
  manifest.stage = "signals";
  manifest.add_input(config.articles_dump);
  manifest.add_input(config.wikidata_dump);

  // Seed sets from the seeds stage, plus the whole-corpus "global" set
  // collected in pass 1 below.
  std::vector<SeedSet> sets;
  for (const std::string& name : distinct_set_names(config.projects)) {
    fs::path file = seeds_dir / (slugify(name) + ".txt");
    sets.push_back(load_seed_file(name, file));
    manifest.add_input(file.string());
  }
  {
    fs::path file = seeds_dir / (slugify(config.union_name) + ".txt");
    sets.push_back(load_seed_file(config.union_name, file));
    manifest.add_input(file.string());
  }

  // Pass 1: redirect map (for resolving link targets) and the global set of
  // all existing non-redirect articles.
  DumpSource articles = DumpSource::from_path(config.articles_dump);
  std::vector<RedirectMapBuilder> redirect_parts(static_cast<std::size_t>(config.workers));
  std::vector<std::set<Title>> global_parts(static_cast<std::size_t>(config.workers));
  for_each_page(articles, config.workers, [&](int worker, PageRecord&& page) {
    if (page.ns != kNsMain) return;
    if (page.redirect_target) {
      redirect_parts[static_cast<std::size_t>(worker)].add(page);
      return;
    }
    if (auto title = try_normalize_title(page.title); title && title->ns == kNsMain) {
      global_parts[static_cast<std::size_t>(worker)].insert(std::move(*title));
    }
  });
  RedirectMap redirects = redirect_parts[0].take();
  SeedSet global{"global", std::move(global_parts[0])};
  for (std::size_t w = 1; w < redirect_parts.size(); ++w) {
    RedirectMap part = redirect_parts[w].take();
    redirects.merge(part);
    global.members.merge(global_parts[w]);
  }
  sets.push_back(std::move(global));

  // Pass 2: per-article lead links and categories, tallied per set by
  // per-worker partial tables.
  struct WorkerTallies {
    std::vector<TallyBuilder> lead;
    std::vector<TallyBuilder> category;
    std::unordered_set<Title, TitleHash> processed;  // strict mode
    std::uint64_t cycle_warnings = 0;
  };
  std::vector<WorkerTallies> tally_parts;
  tally_parts.reserve(static_cast<std::size_t>(config.workers));
  for (int w = 0; w < config.workers; ++w) {
    WorkerTallies part;
    for (const SeedSet& set : sets) {
      part.lead.emplace_back(set, SignalKind::LeadLink, /*strict=*/false, /*partial=*/true);
      part.category.emplace_back(set, SignalKind::Category, /*strict=*/false, /*partial=*/true);
    }
    tally_parts.push_back(std::move(part));
  }

  for_each_page(articles, config.workers, [&](int worker, PageRecord&& page) {
    if (page.ns != kNsMain || page.redirect_target) return;
    auto title = try_normalize_title(page.title);
    if (!title || title->ns != kNsMain) return;
    WorkerTallies& part = tally_parts[static_cast<std::size_t>(worker)];
    if (config.strict && !part.processed.insert(*title).second) {
      throw DuplicateArticleError("article \"" + to_string(*title) + "\" appears twice");
    }

    std::vector<std::string> lead_keys;
    for (const Title& target : extract_lead(page.wikitext).links) {
      Resolution resolution = resolve(target, redirects);
      if (resolution.flagged) {
        ++part.cycle_warnings;
        continue;
      }
      if (resolution.title.ns != kNsMain) continue;
      lead_keys.push_back(resolution.title.name);
    }
    std::vector<std::string> category_keys;
    for (const Title& category : extract_categories(page.wikitext)) {
      category_keys.push_back(category.name);
    }
    for (std::size_t s = 0; s < part.lead.size(); ++s) {
      part.lead[s].add_article(*title, lead_keys);
      part.category[s].add_article(*title, category_keys);
    }
  });

  if (config.strict && config.workers > 1) {
    std::unordered_set<Title, TitleHash> all;
    for (WorkerTallies& part : tally_parts) {
      for (const Title& title : part.processed) {
        if (!all.insert(title).second) {
          throw DuplicateArticleError("article \"" + to_string(title) + "\" appears twice");
        }
      }
    }
  }

  WarningCounts warnings;
  std::vector<FrequencyTable> lead_tables;
  std::vector<FrequencyTable> category_tables;
  for (std::size_t s = 0; s < sets.size(); ++s) {
    FrequencyTable lead = tally_parts[0].lead[s].take();
    FrequencyTable category = tally_parts[0].category[s].take();
    for (std::size_t w = 1; w < tally_parts.size(); ++w) {
      lead = merge(lead, tally_parts[w].lead[s].take());
      category = merge(category, tally_parts[w].category[s].take());
    }
    // Partial denominators add up to the number of set members whose page
    // was seen; members absent from the dump still belong in the share
    // denominator, so pin it to the set size.
    lead.denominator = sets[s].members.size();
    category.denominator = sets[s].members.size();
    lead_tables.push_back(std::move(lead));
    category_tables.push_back(std::move(category));
  }
  for (const WorkerTallies& part : tally_parts) {
    warnings["link_redirect_cycles"] += part.cycle_warnings;
  }

  // Pass 3: Wikidata entity stream -> sitelink index -> P31 tables.
  std::vector<SitelinkIndex> index_parts(static_cast<std::size_t>(config.workers));
  std::vector<std::uint64_t> malformed_parts(static_cast<std::size_t>(config.workers), 0);
  for_each_line(config.wikidata_dump, config.workers,
                [&](int worker, std::size_t line_no, std::string&& line) {
                  try {
                    if (auto record = parse_entity_line(line, config.properties, line_no)) {
                      index_parts[static_cast<std::size_t>(worker)].add(std::move(*record));
                    }
                  } catch (const MalformedJsonError&) {
                    if (config.strict) throw;
                    ++malformed_parts[static_cast<std::size_t>(worker)];
                  }
                });
  SitelinkIndex index = std::move(index_parts[0]);
  for (std::size_t w = 1; w < index_parts.size(); ++w) {
    index.merge(std::move(index_parts[w]));
  }
  for (std::uint64_t count : malformed_parts) {
    warnings["malformed_entity_lines"] += count;
  }
  warnings["duplicate_sitelinks"] = index.duplicate_warnings;

  // Write every table.
  auto write_tables = [&](const FrequencyTable& table) {
    std::string base = slugify(table.set_name) + "." + std::string(to_string(table.kind));
    {
      std::ofstream out(out_dir / (base + ".tsv"), std::ios::binary | std::ios::trunc);
      write_table_tsv(out, table);
      if (!out) throw Error("cannot write " + (out_dir / (base + ".tsv")).string());
    }
    {
      std::ofstream out(out_dir / (base + ".json"), std::ios::binary | std::ios::trunc);
      write_table_json(out, table);
      if (!out) throw Error("cannot write " + (out_dir / (base + ".json")).string());
    }
    manifest.add_output(out_dir, base + ".tsv");
    manifest.add_output(out_dir, base + ".json");
  };
  for (std::size_t s = 0; s < sets.size(); ++s) {
    write_tables(lead_tables[s]);
    write_tables(category_tables[s]);
    write_tables(p31_distribution(sets[s], index));
  }

  manifest.warnings = warnings;
  manifest.write(out_dir);
  report_warnings("signals", warnings);
  std::cout << "signals: wrote " << manifest.outputs.size() << " files for " << sets.size()
            << " sets\n";
  return 0;
}

int cmd_coverage(const PipelineConfig& config, const std::string& set_table_path,
                 const std::string& global_table_path, const std::string& keys_file,
                 const std::string& out_path) {
  (void)config;
  FrequencyTable set_table = read_table_json_file(set_table_path);
  FrequencyTable global_table = read_table_json_file(global_table_path);

  std::ifstream keys_in(keys_file, std::ios::binary);
  if (!keys_in) throw FileNotFoundError(keys_file);
  std::vector<CoverageStat> stats;
  std::string line;
  while (std::getline(keys_in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    stats.push_back(coverage(line, set_table, global_table));
  }

  fs::path out_file(out_path);
  if (out_file.has_parent_path()) fs::create_directories(out_file.parent_path());
  std::ofstream out(out_file, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + out_path);
  write_coverage_tsv(out, stats);
  if (!out) throw Error("write failed for " + out_path);
  return 0;
}

int cmd_plotdata(const PipelineConfig& config, const std::string& table_file, int k,
                 const std::string& out_path) {
  if (k < 1) k = config.top_k;
  if (k < 1) throw ConfigError("plotdata needs k >= 1");
  FrequencyTable table = read_table_json_file(table_file);

  fs::path out_file(out_path);
  if (out_file.has_parent_path()) fs::create_directories(out_file.parent_path());
  std::ofstream out(out_file, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + out_path);
  out << "key\tcount\tshare\n";
  for (const TopEntry& entry : top_k(table, static_cast<std::size_t>(k))) {
    out << entry.key << '\t' << entry.count << '\t' << entry.share << '\n';
  }
  if (!out) throw Error("write failed for " + out_path);
  return 0;
}

}  // namespace wikisignals
