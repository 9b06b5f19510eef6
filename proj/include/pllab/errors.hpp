#pragma once

#include <stdexcept>
#include <string>

namespace pllab {

// Caller mistakes: bad dimensions, non-finite input, malformed descriptors
// or configuration documents.
class usage_error : public std::invalid_argument {
 public:
  explicit usage_error(const std::string& what) : std::invalid_argument(what) {}
};

// A Clarke-hull query that cannot be answered exactly from the available
// witnesses.  Raised instead of silently underestimating the hull.
class hull_undecidable_error : public std::runtime_error {
 public:
  explicit hull_undecidable_error(const std::string& what) : std::runtime_error(what) {}
};

// Broken internal contract; indicates a bug, not bad input.
class internal_error : public std::logic_error {
 public:
  explicit internal_error(const std::string& what) : std::logic_error(what) {}
};

}  // namespace pllab
