#pragma once

#include <stdexcept>
#include <string>

namespace topola {

/// Failure category; the CLI maps these onto its exit codes.
enum class ErrorKind {
  kConfig,   // bad parameter or precondition
  kParse,    // malformed input file
  kIo,       // filesystem failure
  kNumeric,  // factorization or solve failed
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void throw_config(const std::string& what);
[[noreturn]] void throw_parse(const std::string& what);
[[noreturn]] void throw_io(const std::string& what);
[[noreturn]] void throw_numeric(const std::string& what);

}  // namespace topola
