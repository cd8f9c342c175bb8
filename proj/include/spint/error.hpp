#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spint {

/// Violated precondition on user-supplied parameters or data.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A location outside the grid's domain. `index` is the offending point's
/// position in the input list when known.
class OutOfDomain : public std::out_of_range {
 public:
  explicit OutOfDomain(const std::string& what, std::size_t index = npos)
      : std::out_of_range(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::size_t index_;
};

/// A numerical result that cannot be represented (for example an infinite
/// divergence).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace spint
