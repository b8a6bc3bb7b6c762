#pragma once

#include <Eigen/Core>

namespace dftrap {

using Vec3 = Eigen::Vector3d;

enum class Axis { x = 0, y = 1, z = 2 };

inline int index(Axis a) { return static_cast<int>(a); }
const char* to_string(Axis a);

}  // namespace dftrap
