#include <cmath>
#include <numbers>

#include "musup/dsp.hpp"
#include "musup/error.hpp"

namespace musup::dsp {
namespace {

using cplx = std::complex<double>;

enum class Kind { lowpass, highpass };

// Analog Butterworth poles for cutoff `wc` (rad/s), left half plane, in conjugate order:
// pole k and pole order-1-k are conjugates; for odd order the middle pole is real.
std::vector<cplx> analog_poles(int order, double wc, Kind kind) {
  std::vector<cplx> poles;
  poles.reserve(static_cast<std::size_t>(order));
  for (int k = 0; k < order; ++k) {
    const double theta = std::numbers::pi * (2.0 * k + order + 1) / (2.0 * order);
    const cplx p = std::polar(1.0, theta);
    // High-pass: s -> wc / s maps the unit-circle prototype pole p to wc * conj(p).
    poles.push_back(kind == Kind::lowpass ? wc * p : wc / p);
  }
  return poles;
}

void append_sections(BiquadCascade& cascade, int order, double cutoff_hz, double fs, Kind kind) {
  const double k2 = 2.0 * fs;
  const double wc = k2 * std::tan(std::numbers::pi * cutoff_hz / fs);  // prewarped
  const auto poles = analog_poles(order, wc, kind);
  const auto bilinear = [k2](cplx s) { return (k2 + s) / (k2 - s); };
  const double zero_sign = kind == Kind::lowpass ? 1.0 : -1.0;

  for (int k = 0; k < order / 2; ++k) {
    const cplx z = bilinear(poles[static_cast<std::size_t>(k)]);
    Biquad s;
    s.a1 = -2.0 * z.real();
    s.a2 = std::norm(z);
    s.b0 = 1.0;
    s.b1 = 2.0 * zero_sign;
    s.b2 = 1.0;
    // Unity gain at DC (low-pass) or Nyquist (high-pass).
    cascade.gain *= kind == Kind::lowpass ? (1.0 + s.a1 + s.a2) / 4.0 : (1.0 - s.a1 + s.a2) / 4.0;
    cascade.sections.push_back(s);
  }
  if (order % 2 == 1) {
    const double z = bilinear(poles[static_cast<std::size_t>(order / 2)]).real();
    Biquad s;
    s.a1 = -z;
    s.b0 = 1.0;
    s.b1 = zero_sign;
    cascade.gain *= kind == Kind::lowpass ? (1.0 - z) / 2.0 : (1.0 + z) / 2.0;
    cascade.sections.push_back(s);
  }
}

}  // namespace

void FilterSpec::validate() const {
  if (order < 1) throw ConfigError("filter order must be >= 1");
  if (!(sample_rate > 0.0)) throw ConfigError("filter sample rate must be positive");
  if (!(low_cut_hz > 0.0 && low_cut_hz < high_cut_hz && high_cut_hz < sample_rate / 2.0)) {
    throw ConfigError("filter cutoffs must satisfy 0 < low < high < fs/2 (got " +
                      std::to_string(low_cut_hz) + ", " + std::to_string(high_cut_hz) +
                      ", fs=" + std::to_string(sample_rate) + ")");
  }
}

std::complex<double> Biquad::response(std::complex<double> z) const {
  const cplx zi = 1.0 / z;
  return (b0 + zi * (b1 + zi * b2)) / (1.0 + zi * (a1 + zi * a2));
}

double Biquad::max_pole_modulus() const {
  // Roots of z^2 + a1 z + a2.
  const cplx disc = std::sqrt(cplx(a1 * a1 - 4.0 * a2, 0.0));
  const cplx r1 = (-a1 + disc) / 2.0;
  const cplx r2 = (-a1 - disc) / 2.0;
  return std::max(std::abs(r1), std::abs(r2));
}

std::complex<double> BiquadCascade::response(double freq_hz, double sample_rate) const {
  const cplx z = std::polar(1.0, 2.0 * std::numbers::pi * freq_hz / sample_rate);
  cplx h = gain;
  for (const auto& s : sections) h *= s.response(z);
  return h;
}

double BiquadCascade::max_pole_modulus() const {
  double m = 0.0;
  for (const auto& s : sections) m = std::max(m, s.max_pole_modulus());
  return m;
}

BiquadCascade design_butterworth_bandpass(const FilterSpec& spec) {
  spec.validate();
  BiquadCascade cascade;
  append_sections(cascade, spec.order, spec.low_cut_hz, spec.sample_rate, Kind::highpass);
  append_sections(cascade, spec.order, spec.high_cut_hz, spec.sample_rate, Kind::lowpass);
  return cascade;
}

std::vector<double> filter_signal(const BiquadCascade& cascade, std::span<const double> signal) {
  std::vector<double> y(signal.begin(), signal.end());
  for (auto& v : y) v *= cascade.gain;
  for (const auto& s : cascade.sections) {
    double s1 = 0.0;
    double s2 = 0.0;
    for (auto& v : y) {
      const double x = v;
      const double out = s.b0 * x + s1;
      s1 = s.b1 * x - s.a1 * out + s2;
      s2 = s.b2 * x - s.a2 * out;
      v = out;
    }
  }
  return y;
}

MultichannelRecord apply_filter(const BiquadCascade& cascade, const MultichannelRecord& record) {
  const std::size_t n = record.n_samples();
  const std::size_t m = record.n_channels();
  std::vector<double> out(n * m);
  for (std::size_t c = 0; c < m; ++c) {
    const auto y = filter_signal(cascade, record.channel(c));
    for (std::size_t i = 0; i < n; ++i) out[i * m + c] = y[i];
  }
  return MultichannelRecord(std::move(out), n, record.sample_rate(), record.channel_names());
}

}  // namespace musup::dsp
