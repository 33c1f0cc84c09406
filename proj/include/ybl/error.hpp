#pragma once

#include <stdexcept>
#include <string>

namespace ybl {

enum class Errc {
  dimension_unsupported,
  pole_dimension,
  divergent,
  index_range,
  certification_failed,
  empty_range,
  non_symmetric,
  non_spd,
  non_finite,
  spec_invalid,
  invalid_argument,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc c, const std::string& what) : std::runtime_error(what), code_(c) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc c, const std::string& what) { throw Error(c, what); }

}  // namespace ybl
