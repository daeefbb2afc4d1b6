#pragma once

namespace dengue {

inline constexpr const char* kArtifactVersion = "0.1.0";

}
