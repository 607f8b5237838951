#pragma once

// Subcommand drivers behind the chrtc executable. Each returns what would be
// written to stdout and stderr plus the exit status, so tests can run them
// in-process.

#include <cstddef>
#include <string>

#include "chrtc/engine.hpp"

namespace chrtc::cli {

enum class Format { text, records };

struct Options {
  std::size_t fuel = kDefaultFuel;
  bool kind_constraints = false;
  bool strict_ambiguity = false;
  bool trace = false;
  Format format = Format::text;
};

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int declaration = 1;  // parse, scope or declaration error
inline constexpr int type = 2;         // type or signature error
inline constexpr int ambiguity = 3;    // only under strict ambiguity
inline constexpr int inconclusive = 4;
}  // namespace exit_code

struct Result {
  int exit_code = exit_code::ok;
  std::string out;
  std::string err;
};

Result cmd_infer(const std::string& source, const Options& options = {});
Result cmd_rules(const std::string& source, const Options& options = {});
Result cmd_confluence(const std::string& source, const Options& options = {});
Result cmd_derive(const std::string& source, const std::string& goal,
                  const Options& options = {});

/// Full command line handling; `argv[0]` is the program name.
int main(int argc, char** argv);

}  // namespace chrtc::cli
