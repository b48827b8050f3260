#pragma once

#include <cstdint>
#include <vector>

namespace slca {

using ClassId = std::uint32_t;

/// Sorted, duplicate-free set of class ids.
using ClassSet = std::vector<ClassId>;

}  // namespace slca
