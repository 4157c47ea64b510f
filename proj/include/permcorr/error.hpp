#pragma once

#include <stdexcept>
#include <string>

namespace permcorr {

enum class Errc {
  io,          // unreadable input
  parse,       // malformed input content
  too_small,   // fewer data points than required
  nonfinite,   // NaN or infinity in the data
  degenerate,  // zero variance where a correlation is needed
  range,       // argument outside its valid range
  too_large,   // size exceeds an enumeration cap
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace permcorr
