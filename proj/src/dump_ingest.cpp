#include "wikisignals/dump_ingest.hpp"

#include <expat.h>

#include <boost/iostreams/device/file.hpp>
#include <boost/iostreams/filter/bzip2.hpp>
#include <boost/iostreams/filtering_stream.hpp>
#include <boost/iostreams/restrict.hpp>

#include <charconv>
#include <cstring>
#include <deque>
#include <filesystem>
#include <fstream>

#include "wikisignals/errors.hpp"
#include "wikisignals/wikitext.hpp"

namespace io = boost::iostreams;

namespace wikisignals {

namespace {

constexpr std::size_t kReadChunk = 64 * 1024;

bool parse_int64(std::string_view s, std::int64_t& out) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\n' || s.front() == '\t' ||
                        s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\n' || s.back() == '\t' ||
                        s.back() == '\r')) {
    s.remove_suffix(1);
  }
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

bool parse_uint64(std::string_view s, std::uint64_t& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

bool supported_schema(std::string_view version) {
  return version == "0.8" || version == "0.9" || version == "0.10" || version == "0.11";
}

std::unique_ptr<std::istream> make_stream(const std::string& path, Compression compression,
                                          std::uint64_t byte_begin, std::uint64_t byte_end) {
  if (!std::filesystem::exists(path)) {
    throw FileNotFoundError(path);
  }
  io::file_source file(path, std::ios::in | std::ios::binary);
  if (!file.is_open()) {
    throw FileNotFoundError(path);
  }
  auto stream = std::make_unique<io::filtering_istream>();
  if (compression != Compression::None) {
    stream->push(io::bzip2_decompressor());
  }
  if (byte_begin != 0 || byte_end != end_of_file) {
    std::int64_t length =
        byte_end == end_of_file ? -1 : static_cast<std::int64_t>(byte_end - byte_begin);
    stream->push(io::restrict(file, static_cast<std::int64_t>(byte_begin), length));
  } else {
    stream->push(file);
  }
  return stream;
}

}  // namespace

DumpSource DumpSource::from_path(std::string path) {
  DumpSource source;
  source.path = std::move(path);
  if (!source.path.ends_with(".bz2")) {
    return source;
  }
  source.compression = Compression::Bz2;
  if (source.path.find("multistream") == std::string::npos) {
    return source;
  }
  std::string stem = source.path;
  if (stem.ends_with(".xml.bz2")) {
    stem.resize(stem.size() - 8);
  } else {
    stem.resize(stem.size() - 4);
  }
  for (const char* suffix : {"-index.txt", "-index.txt.bz2"}) {
    std::string candidate = stem + suffix;
    if (std::filesystem::exists(candidate)) {
      source.compression = Compression::Bz2Multistream;
      source.index_path = std::move(candidate);
      break;
    }
  }
  return source;
}

std::vector<MultistreamIndexEntry> read_multistream_index(const std::string& index_path) {
  Compression compression =
      index_path.ends_with(".bz2") ? Compression::Bz2 : Compression::None;
  auto stream = make_stream(index_path, compression, 0, end_of_file);

  std::vector<MultistreamIndexEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(*stream, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::size_t first = line.find(':');
    std::size_t second = first == std::string::npos ? std::string::npos
                                                    : line.find(':', first + 1);
    if (second == std::string::npos) {
      throw MalformedIndexError("expected offset:page_id:title", line_no);
    }
    MultistreamIndexEntry entry;
    if (!parse_uint64(std::string_view(line).substr(0, first), entry.offset)) {
      throw MalformedIndexError("non-numeric offset", line_no);
    }
    if (!parse_int64(std::string_view(line).substr(first + 1, second - first - 1),
                     entry.page_id)) {
      throw MalformedIndexError("non-numeric page id", line_no);
    }
    entry.title = line.substr(second + 1);
    if (!entries.empty() && entry.offset < entries.back().offset) {
      throw MalformedIndexError("offset decreased", line_no);
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

std::vector<std::uint64_t> multistream_chunk_offsets(
    const std::vector<MultistreamIndexEntry>& index) {
  std::vector<std::uint64_t> offsets;
  for (const auto& entry : index) {
    if (offsets.empty() || entry.offset != offsets.back()) {
      offsets.push_back(entry.offset);
    }
  }
  return offsets;
}

struct DumpReader::Impl {
  std::unique_ptr<std::istream> input;
  XML_Parser parser = nullptr;
  bool fragment = false;

  bool prologue_fed = false;
  bool root_seen = false;
  bool root_closed = false;
  bool parse_finished = false;

  std::string version;
  std::set<int> namespaces;

  std::deque<PageRecord> ready;
  std::optional<std::string> schema_error;
  std::optional<std::string> structural_error;

  int depth = 0;
  bool in_page = false;
  bool in_revision = false;
  bool in_namespaces = false;
  PageRecord current;
  bool have_page_id = false;
  int revision_count = 0;

  std::string* capture = nullptr;
  std::string ns_text;
  std::string id_text;

  ~Impl() {
    if (parser) XML_ParserFree(parser);
  }

  void fail_schema(std::string msg) {
    if (!schema_error && !structural_error) schema_error = std::move(msg);
    XML_StopParser(parser, XML_FALSE);
  }

  void fail_structure(std::string msg) {
    if (!schema_error && !structural_error) structural_error = std::move(msg);
    XML_StopParser(parser, XML_FALSE);
  }

  static const char* find_attr(const char** attrs, const char* key) {
    for (int i = 0; attrs[i]; i += 2) {
      if (std::strcmp(attrs[i], key) == 0) return attrs[i + 1];
    }
    return nullptr;
  }

  void on_start(const char* name, const char** attrs) {
    int element_depth = depth++;
    capture = nullptr;
    if (element_depth == 0) {
      root_seen = true;
      if (std::strcmp(name, "mediawiki") != 0) {
        fail_schema(std::string("root element is <") + name + ">, expected <mediawiki>");
        return;
      }
      if (!fragment) {
        const char* v = find_attr(attrs, "version");
        if (v) {
          version = v;
        } else if (const char* xmlns = find_attr(attrs, "xmlns")) {
          std::string_view ns(xmlns);
          if (std::size_t pos = ns.find("export-"); pos != std::string_view::npos) {
            ns.remove_prefix(pos + 7);
            if (std::size_t slash = ns.find('/'); slash != std::string_view::npos) {
              ns = ns.substr(0, slash);
            }
            version = std::string(ns);
          }
        }
        if (!supported_schema(version)) {
          fail_schema("unsupported export schema version \"" + version + "\"");
        }
      }
      return;
    }
    if (element_depth == 1 && std::strcmp(name, "page") == 0) {
      in_page = true;
      current = PageRecord{};
      have_page_id = false;
      revision_count = 0;
      return;
    }
    if (in_page) {
      if (std::strcmp(name, "revision") == 0 && element_depth == 2) {
        if (++revision_count > 1) {
          fail_schema("page \"" + current.title +
                      "\" has multiple revisions; only single-revision dumps are supported");
          return;
        }
        in_revision = true;
        return;
      }
      if (!in_revision && element_depth == 2) {
        if (std::strcmp(name, "title") == 0) {
          capture = &current.title;
        } else if (std::strcmp(name, "ns") == 0) {
          ns_text.clear();
          capture = &ns_text;
        } else if (std::strcmp(name, "id") == 0 && !have_page_id) {
          id_text.clear();
          capture = &id_text;
        } else if (std::strcmp(name, "redirect") == 0) {
          if (const char* target = find_attr(attrs, "title")) {
            current.redirect_target = target;
          }
        }
        return;
      }
      if (in_revision && element_depth == 3 && std::strcmp(name, "text") == 0) {
        capture = &current.wikitext;
      }
      return;
    }
    if (std::strcmp(name, "namespaces") == 0 && element_depth == 2) {
      in_namespaces = true;
      return;
    }
    if (in_namespaces && std::strcmp(name, "namespace") == 0) {
      if (const char* key = find_attr(attrs, "key")) {
        std::int64_t value = 0;
        if (parse_int64(key, value)) namespaces.insert(static_cast<int>(value));
      }
    }
  }

  void on_end(const char* name) {
    int element_depth = --depth;
    if (capture) {
      if (capture == &ns_text) {
        std::int64_t value = 0;
        if (!parse_int64(ns_text, value)) {
          fail_structure("page \"" + current.title + "\" has non-numeric <ns>");
        } else {
          current.ns = static_cast<int>(value);
        }
      } else if (capture == &id_text) {
        std::int64_t value = 0;
        if (!parse_int64(id_text, value)) {
          fail_structure("page \"" + current.title + "\" has non-numeric <id>");
        } else {
          current.page_id = value;
          have_page_id = true;
        }
      }
      capture = nullptr;
    }
    if (element_depth == 0) {
      root_closed = true;
      return;
    }
    if (in_revision && element_depth == 2 && std::strcmp(name, "revision") == 0) {
      in_revision = false;
      return;
    }
    if (in_page && element_depth == 1 && std::strcmp(name, "page") == 0) {
      in_page = false;
      if (current.page_id <= 0) {
        fail_structure("page \"" + current.title + "\" has missing or non-positive id");
        return;
      }
      if (!namespaces.empty() && !namespaces.contains(current.ns)) {
        fail_structure("page \"" + current.title + "\" declares namespace " +
                       std::to_string(current.ns) + " absent from <siteinfo>");
        return;
      }
      if (!current.redirect_target) {
        current.redirect_target = detect_redirect_target(current.wikitext);
      }
      ready.push_back(std::move(current));
      current = PageRecord{};
      return;
    }
    if (in_namespaces && std::strcmp(name, "namespaces") == 0) {
      in_namespaces = false;
    }
  }

  void on_text(const char* data, int len) {
    if (capture) capture->append(data, static_cast<std::size_t>(len));
  }

  void feed(const char* data, std::size_t len, bool final) {
    if (parse_finished || schema_error || structural_error) return;
    if (XML_Parse(parser, data, static_cast<int>(len), final ? XML_TRUE : XML_FALSE) ==
        XML_STATUS_ERROR) {
      if (!schema_error && !structural_error) {
        structural_error = std::string("XML parse error at line ") +
                           std::to_string(XML_GetCurrentLineNumber(parser)) + ": " +
                           XML_ErrorString(XML_GetErrorCode(parser));
      }
      parse_finished = true;
    }
    if (final) parse_finished = true;
  }

  // Reads one chunk of input into the parser; sets parse_finished at end.
  void pump() {
    if (fragment && !prologue_fed) {
      prologue_fed = true;
      static constexpr std::string_view kRoot = "<mediawiki>";
      feed(kRoot.data(), kRoot.size(), false);
      return;
    }
    char buffer[kReadChunk];
    std::streamsize got = 0;
    try {
      input->read(buffer, sizeof buffer);
      got = input->gcount();
    } catch (const std::exception& e) {
      if (!schema_error && !structural_error) {
        structural_error = std::string("read failed: ") + e.what();
      }
      parse_finished = true;
      return;
    }
    if (got > 0) {
      feed(buffer, static_cast<std::size_t>(got), false);
    }
    if (got < static_cast<std::streamsize>(sizeof buffer)) {
      if (input->bad()) {
        if (!schema_error && !structural_error) structural_error = "stream read error";
        parse_finished = true;
        return;
      }
      if (fragment && !root_closed && !schema_error && !structural_error) {
        static constexpr std::string_view kCloser = "</mediawiki>";
        feed(kCloser.data(), kCloser.size(), false);
      }
      feed("", 0, true);
    }
  }

  void throw_pending() {
    if (schema_error) throw UnsupportedSchemaError(*schema_error);
    if (structural_error) throw MalformedXmlError(*structural_error);
  }
};

DumpReader::DumpReader(const DumpSource& source)
    : DumpReader(make_stream(source.path, source.compression, 0, end_of_file), false) {}

DumpReader::DumpReader(std::unique_ptr<std::istream> input, bool fragment)
    : impl_(std::make_unique<Impl>()) {
  impl_->input = std::move(input);
  impl_->fragment = fragment;
  impl_->parser = XML_ParserCreate(nullptr);
  if (!impl_->parser) throw Error("failed to create XML parser");
  XML_SetUserData(impl_->parser, impl_.get());
  XML_SetElementHandler(
      impl_->parser,
      [](void* user, const XML_Char* name, const XML_Char** attrs) {
        static_cast<Impl*>(user)->on_start(name, attrs);
      },
      [](void* user, const XML_Char* name) { static_cast<Impl*>(user)->on_end(name); });
  XML_SetCharacterDataHandler(impl_->parser, [](void* user, const XML_Char* data, int len) {
    static_cast<Impl*>(user)->on_text(data, len);
  });
}

DumpReader::~DumpReader() = default;
DumpReader::DumpReader(DumpReader&&) noexcept = default;
DumpReader& DumpReader::operator=(DumpReader&&) noexcept = default;

std::optional<PageRecord> DumpReader::next_page() {
  Impl& impl = *impl_;
  for (;;) {
    if (!impl.ready.empty()) {
      PageRecord page = std::move(impl.ready.front());
      impl.ready.pop_front();
      return page;
    }
    impl.throw_pending();
    if (impl.parse_finished) return std::nullopt;
    impl.pump();
  }
}

const std::string& DumpReader::schema_version() const { return impl_->version; }

const std::set<int>& DumpReader::declared_namespaces() const { return impl_->namespaces; }

DumpReader open_dump(const DumpSource& source) { return DumpReader(source); }

DumpReader open_dump_chunk(const DumpSource& source, std::uint64_t byte_begin,
                           std::uint64_t byte_end) {
  return DumpReader(make_stream(source.path, source.compression, byte_begin, byte_end),
                    true);
}

}  // namespace wikisignals
