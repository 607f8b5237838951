#include "chrtc/syntax.hpp"

#include <fmt/format.h>

namespace chrtc {

std::string SourceLoc::str() const {
  if (line == 0) return "?";
  return fmt::format("{}:{}", line, column);
}

}  // namespace chrtc
