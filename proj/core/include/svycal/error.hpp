#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace svycal {

// All library failures carry a stable machine token, optionally tagged with
// the originating formula site, e.g. "singular-calibration[lr]". what() is
// "<code>: <detail>" on a single line.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& detail)
      : std::runtime_error(code + ": " + detail), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

[[noreturn]] inline void fail(const std::string& code, const std::string& detail) {
  throw Error(code, detail);
}

}  // namespace svycal
