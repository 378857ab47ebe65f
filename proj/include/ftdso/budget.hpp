#pragma once

#include <stdexcept>

namespace ftdso {

// A configured size or work limit was hit. The CLI maps this to exit code 3.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ftdso
