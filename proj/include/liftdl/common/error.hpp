#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace liftdl {

/// Base of every error raised by the library. Each stage of the pipeline
/// throws a subclass so that drivers can name the failing stage.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Syntax error inside a single-line text (feature expressions). `offset` is
/// the byte offset of the offending token.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class UnknownFeatureError : public Error {
 public:
  UnknownFeatureError(const std::string& name, std::size_t offset)
      : Error("unknown feature '" + name + "' at offset " + std::to_string(offset)),
        name_(name),
        offset_(offset) {}

  const std::string& name() const noexcept { return name_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::string name_;
  std::size_t offset_;
};

/// Error located in a multi-line source file.
class SourceError : public Error {
 public:
  SourceError(const std::string& file, std::size_t line, std::size_t column,
              const std::string& what)
      : Error(format(file, line, column, what)), file_(file), line_(line), column_(column) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& file, std::size_t line, std::size_t column,
                            const std::string& what) {
    std::string out = file.empty() ? std::string("<input>") : file;
    out += ':' + std::to_string(line);
    if (column != 0) out += ':' + std::to_string(column);
    return out + ": " + what;
  }

  std::string file_;
  std::size_t line_;
  std::size_t column_;
};

}  // namespace liftdl
