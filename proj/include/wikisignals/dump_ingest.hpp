#pragma once

#include <cstdint>
#include <istream>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace wikisignals {

// One page from an export dump, latest revision only. Immutable after
// construction and safe to hand across threads.
struct PageRecord {
  std::int64_t page_id = 0;
  int ns = 0;
  std::string title;  // raw, as stored in the dump
  std::optional<std::string> redirect_target;
  std::string wikitext;
};

enum class Compression { None, Bz2, Bz2Multistream };

struct DumpSource {
  std::string path;
  Compression compression = Compression::None;
  std::optional<std::string> index_path;  // multistream only

  // Sniffs compression from the file name: "*-multistream*.bz2" when an
  // index file sits next to it, plain bz2 otherwise, else uncompressed.
  static DumpSource from_path(std::string path);
};

struct MultistreamIndexEntry {
  std::uint64_t offset = 0;
  std::int64_t page_id = 0;
  std::string title;
};

// Parses the standard "offset:page_id:title" index. Entries come back in
// file order; offsets are checked to be non-decreasing.
std::vector<MultistreamIndexEntry> read_multistream_index(const std::string& index_path);

// Distinct stream offsets in ascending order, for chunked parallel reads.
std::vector<std::uint64_t> multistream_chunk_offsets(
    const std::vector<MultistreamIndexEntry>& index);

// Pull-style page stream over an export dump. Memory use is bounded by a
// constant times the largest single page regardless of dump size. A reader
// is single-owner; open one reader per thread.
class DumpReader {
 public:
  explicit DumpReader(const DumpSource& source);
  // Reads a caller-supplied stream. With fragment=true the input is a bare
  // sequence of <page> elements (a multistream chunk) rather than a full
  // export document.
  explicit DumpReader(std::unique_ptr<std::istream> input, bool fragment = false);
  ~DumpReader();

  DumpReader(DumpReader&&) noexcept;
  DumpReader& operator=(DumpReader&&) noexcept;
  DumpReader(const DumpReader&) = delete;
  DumpReader& operator=(const DumpReader&) = delete;

  // Next page in document order, or nullopt at end of stream.
  std::optional<PageRecord> next_page();

  // Export schema version ("0.11"), empty until the root element is seen
  // and always empty in fragment mode.
  const std::string& schema_version() const;

  // Namespace keys declared in <siteinfo>, empty when absent.
  const std::set<int>& declared_namespaces() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

DumpReader open_dump(const DumpSource& source);

// Opens one multistream chunk: the bz2 stream starting at byte_begin and
// ending at byte_end (use end_of_file for the final chunk).
inline constexpr std::uint64_t end_of_file = ~std::uint64_t{0};
DumpReader open_dump_chunk(const DumpSource& source, std::uint64_t byte_begin,
                           std::uint64_t byte_end = end_of_file);

}  // namespace wikisignals
