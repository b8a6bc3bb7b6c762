#include "dftrap/build_info.hpp"

#include <Eigen/Core>
#include <boost/version.hpp>
#include <fftw3.h>
#include <fmt/core.h>
#include <omp.h>

#ifndef DFTRAP_VERSION
#define DFTRAP_VERSION "unknown"
#endif

namespace dftrap {

std::vector<std::pair<std::string, std::string>> build_info() {
  return {
      {"dftrap", DFTRAP_VERSION},
      {"compiler", __VERSION__},
      {"eigen", fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION)},
      {"fmt", fmt::format("{}.{}.{}", FMT_VERSION / 10000, FMT_VERSION / 100 % 100, FMT_VERSION % 100)},
      {"boost", fmt::format("{}.{}.{}", BOOST_VERSION / 100000, BOOST_VERSION / 100 % 1000, BOOST_VERSION % 100)},
      {"fftw", fftw_version},
      {"openmp", fmt::format("{}", _OPENMP)},
  };
}

}  // namespace dftrap
