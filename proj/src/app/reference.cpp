#include "gyrolev/app/reference.hpp"

#include <array>
#include <string>

#include "gyrolev/core/errors.hpp"

namespace gyrolev::app {
namespace {

// Rows 3 and 4 are the same particle in two cooldowns.
constexpr std::array<ReferenceRow, 4> kRows{{
    {1, 31.2, 0.4, 591.0, 18.0, 0.33, 0.04, 1.11, 0.14},
    {2, 23.6, 0.2, 675.0, 20.0, 0.62, 0.02, 1.19, 0.04},
    {3, 19.0, 0.2, 574.0, 17.0, 0.88, 0.05, 1.10, 0.07},
    {4, 18.8, 0.2, 581.0, 16.0, 0.86, 0.03, 1.16, 0.04},
}};

}  // namespace

std::span<const ReferenceRow> reference_rows() { return kRows; }

const ReferenceRow& reference_row(int row) {
  for (const auto& r : kRows)
    if (r.row == row) return r;
  throw ConfigError("no reference row " + std::to_string(row) + " (expected 1-4)");
}

}  // namespace gyrolev::app
