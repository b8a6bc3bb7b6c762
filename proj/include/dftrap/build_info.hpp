#pragma once

#include <string>
#include <utility>
#include <vector>

namespace dftrap {

/// Library and dependency versions as (name, version) pairs, for run manifests.
std::vector<std::pair<std::string, std::string>> build_info();

}  // namespace dftrap
