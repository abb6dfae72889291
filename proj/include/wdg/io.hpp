#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "wdg/space.hpp"

namespace wdg {

/// Legacy ASCII VTK (v3.0) of discontinuous fields: every triangle gets its own
/// three corner points carrying the element-local corner values.
void write_vtk_fields(std::ostream& os, const DgSpace& space,
                      const std::vector<std::pair<std::string, const FieldVector*>>& fields,
                      double time);

}  // namespace wdg
