#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace kikuchi {

/// y = A x for a square operator known only through its action.
using Apply = std::function<void(std::span<const double> x, std::span<double> y)>;

struct SymmetricOperator {
  std::size_t dim = 0;
  Apply apply;
};

/// rows x cols operator with both directions available.
struct RectangularOperator {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Apply apply;            // length cols -> length rows
  Apply apply_transpose;  // length rows -> length cols
};

}  // namespace kikuchi
