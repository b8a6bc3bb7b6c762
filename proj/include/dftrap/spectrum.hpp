#pragma once

#include <vector>

#include "dftrap/dynamics.hpp"

namespace dftrap::spectrum {

struct AmplitudeSpectrum {
  std::vector<double> freq_hz;
  std::vector<double> amplitude;  // single-sided, same unit as the input signal
};

/// Hann-windowed single-sided amplitude spectrum of a uniformly sampled signal.
AmplitudeSpectrum amplitude_spectrum(const std::vector<double>& signal, double sample_interval);

/// Spectrum of one coordinate of one particle from a trajectory record.
AmplitudeSpectrum trajectory_spectrum(const dynamics::TrajectoryRecord& rec, Axis axis,
                                      std::size_t particle = 0);

/// Frequency of the strongest line above f_min, refined by a parabola through the
/// log-amplitudes of the peak bin and its neighbours.
double dominant_frequency(const AmplitudeSpectrum& s, double f_min_hz = 0.0);

}  // namespace dftrap::spectrum
