#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wikisignals {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FileNotFoundError : public Error {
 public:
  explicit FileNotFoundError(const std::string& path)
      : Error("cannot open file: " + path) {}
};

// Unrecoverable structural error in an XML dump.
class MalformedXmlError : public Error {
 public:
  using Error::Error;
};

// Export schema version outside the supported range, or input that is not a
// MediaWiki export at all (including multi-revision history dumps).
class UnsupportedSchemaError : public Error {
 public:
  using Error::Error;
};

class MalformedIndexError : public Error {
 public:
  MalformedIndexError(const std::string& msg, std::size_t line_no)
      : Error(msg + " at line " + std::to_string(line_no)), line_no_(line_no) {}
  std::size_t line_no() const { return line_no_; }

 private:
  std::size_t line_no_;
};

class MalformedJsonError : public Error {
 public:
  MalformedJsonError(const std::string& msg, std::size_t line_no)
      : Error(msg + " at line " + std::to_string(line_no)), line_no_(line_no) {}
  std::size_t line_no() const { return line_no_; }

 private:
  std::size_t line_no_;
};

class EmptyTitleError : public Error {
 public:
  using Error::Error;
};

class KindMismatchError : public Error {
 public:
  using Error::Error;
};

class DuplicateArticleError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace wikisignals
