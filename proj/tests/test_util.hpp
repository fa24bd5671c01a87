#pragma once

#include <boost/iostreams/device/back_inserter.hpp>
#include <boost/iostreams/filter/bzip2.hpp>
#include <boost/iostreams/filtering_stream.hpp>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "wikisignals/dump_ingest.hpp"

namespace testutil {

inline std::string xml_escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string page_xml(long long id, int ns, const std::string& title,
                            const std::string& text, const std::string& redirect = "") {
  std::string xml = "  <page>\n    <title>" + xml_escape(title) + "</title>\n    <ns>" +
                    std::to_string(ns) + "</ns>\n    <id>" + std::to_string(id) + "</id>\n";
  if (!redirect.empty()) {
    xml += "    <redirect title=\"" + xml_escape(redirect) + "\" />\n";
  }
  xml += "    <revision>\n      <id>" + std::to_string(id * 100) +
         "</id>\n      <text>" + xml_escape(text) + "</text>\n    </revision>\n  </page>\n";
  return xml;
}

inline std::string siteinfo_xml() {
  return "  <siteinfo>\n    <sitename>Testwiki</sitename>\n    <namespaces>\n"
         "      <namespace key=\"0\" />\n      <namespace key=\"1\">Talk</namespace>\n"
         "      <namespace key=\"6\">File</namespace>\n"
         "      <namespace key=\"14\">Category</namespace>\n"
         "    </namespaces>\n  </siteinfo>\n";
}

inline std::string dump_header(const std::string& version = "0.11") {
  return "<mediawiki xmlns=\"http://www.mediawiki.org/xml/export-" + version +
         "/\" version=\"" + version + "\" xml:lang=\"en\">\n";
}

inline std::string dump_xml(const std::vector<std::string>& pages,
                            const std::string& version = "0.11") {
  std::string xml = dump_header(version) + siteinfo_xml();
  for (const std::string& page : pages) xml += page;
  xml += "</mediawiki>\n";
  return xml;
}

inline wikisignals::DumpReader reader_over(const std::string& xml, bool fragment = false) {
  return wikisignals::DumpReader(std::make_unique<std::istringstream>(xml), fragment);
}

inline std::string bz2_compress(const std::string& data) {
  namespace io = boost::iostreams;
  std::string out;
  io::filtering_ostream os;
  os.push(io::bzip2_compressor());
  os.push(io::back_inserter(out));
  os.write(data.data(), static_cast<std::streamsize>(data.size()));
  io::close(os);
  return out;
}

// Self-cleaning scratch directory for fixture files.
struct TempDir {
  std::filesystem::path path;
  TempDir() {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("wikisignals_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name, const std::string& content) const {
    std::filesystem::path p = path / name;
    std::ofstream out(p, std::ios::binary);
    out << content;
    return p.string();
  }
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace testutil
