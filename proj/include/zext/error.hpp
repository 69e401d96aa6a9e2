#pragma once

#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

namespace zext {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input exceeds a configured size cap (brute force, LP export, ...).
class TooLarge : public Error {
 public:
  TooLarge(const std::string& what, double count) : Error(what), count_(count) {}
  double count() const noexcept { return count_; }

 private:
  double count_;
};

namespace detail {

template <class... Args>
std::string concat(Args&&... args) {
  std::ostringstream os;
  (os << ... << std::forward<Args>(args));
  return os.str();
}

}  // namespace detail

template <class... Args>
[[noreturn]] void fail(Args&&... args) {
  throw Error(detail::concat(std::forward<Args>(args)...));
}

}  // namespace zext
