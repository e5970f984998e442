#pragma once

#include <stdexcept>
#include <string>

namespace graphadv {

/// Invalid or degenerate input data (bad files, empty graphs, bad specs).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument combination supplied by a caller.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace graphadv
