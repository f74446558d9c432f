#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tncert/group.h"
#include "tncert/resolution.h"

namespace tncert {

// trivial, cyclic:<n>, z, z2, s3, free:<k>
PresentationPtr preset_presentation(std::string_view name);

// The complex used for a preset: periodic resolutions for cyclic groups, the
// presentation complex otherwise, extended to a resolution for finite groups.
// The top degree is at least min_top_degree.
ChainComplexData preset_complex(std::string_view name, int min_top_degree = 0);

// Complex for a user presentation: full-ball resolution for finite backends,
// presentation complex for infinite ones.
ChainComplexData complex_for(const PresentationPtr& p, int min_top_degree = 0);

std::vector<std::string> preset_names();

}  // namespace tncert
