#include "dftrap/spectrum.hpp"

#include <cmath>
#include <mutex>

#include <fftw3.h>

#include "dftrap/constants.hpp"
#include "dftrap/errors.hpp"

namespace dftrap::spectrum {

namespace {
// FFTW's planner is not re-entrant
std::mutex g_plan_mutex;
}

AmplitudeSpectrum amplitude_spectrum(const std::vector<double>& signal, double sample_interval) {
  const std::size_t n = signal.size();
  if (n < 8) throw InsufficientDataError("spectrum: need at least 8 samples");
  if (!(sample_interval > 0.0)) throw DomainError("spectrum: sample interval must be positive");

  const std::size_t nout = n / 2 + 1;
  double* in = fftw_alloc_real(n);
  fftw_complex* out = fftw_alloc_complex(nout);
  fftw_plan plan;
  {
    std::lock_guard lock(g_plan_mutex);
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE);
  }
  double wsum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double w = 0.5 - 0.5 * std::cos(constants::two_pi * k / n);
    in[k] = w * signal[k];
    wsum += w;
  }
  fftw_execute(plan);

  AmplitudeSpectrum s;
  s.freq_hz.resize(nout);
  s.amplitude.resize(nout);
  const double df = 1.0 / (n * sample_interval);
  for (std::size_t k = 0; k < nout; ++k) {
    s.freq_hz[k] = k * df;
    const double mag = std::hypot(out[k][0], out[k][1]);
    s.amplitude[k] = (k == 0 ? 1.0 : 2.0) * mag / wsum;
  }
  {
    std::lock_guard lock(g_plan_mutex);
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);
  return s;
}

AmplitudeSpectrum trajectory_spectrum(const dynamics::TrajectoryRecord& rec, Axis axis, std::size_t particle) {
  if (rec.times.size() < 8) throw InsufficientDataError("spectrum: record too short");
  if (particle >= rec.particle_count) throw DomainError("spectrum: particle index out of range");
  std::vector<double> x(rec.samples.size());
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = rec.samples[k].r[particle][index(axis)];
  const double dt = (rec.times.back() - rec.times.front()) / (rec.times.size() - 1);
  return amplitude_spectrum(x, dt);
}

double dominant_frequency(const AmplitudeSpectrum& s, double f_min_hz) {
  std::size_t best = 0;
  double amax = -1.0;
  for (std::size_t k = 1; k + 1 < s.amplitude.size(); ++k) {
    if (s.freq_hz[k] < f_min_hz) continue;
    if (s.amplitude[k] > amax) {
      amax = s.amplitude[k];
      best = k;
    }
  }
  if (best == 0) throw InsufficientDataError("spectrum: no interior peak");
  const double l = std::log(s.amplitude[best - 1]);
  const double c = std::log(s.amplitude[best]);
  const double r = std::log(s.amplitude[best + 1]);
  const double denom = l - 2.0 * c + r;
  const double shift = denom != 0.0 ? 0.5 * (l - r) / denom : 0.0;
  const double df = s.freq_hz[1] - s.freq_hz[0];
  return s.freq_hz[best] + shift * df;
}

}  // namespace dftrap::spectrum
