/* Copyright 2026 The TDP Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "tdp/preprocess.hpp"

#include <fftw3.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <numbers>
#include <sstream>

#include "tdp/bytes.hpp"
#include "tdp/errors.hpp"
#include "tdp/weight_io.hpp"

namespace tdp {

namespace {

// The FFTW planner is not thread-safe; execution with new-array calls is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

constexpr std::string_view kSpectrogramMagic = "TDPS";
constexpr std::uint32_t kSpectrogramVersion = 1;

}  // namespace

std::vector<double> tukey_window(int n, double alpha) {
  if (n < 2) throw ParameterError("window length must be >= 2");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ParameterError("Tukey alpha must be in [0, 1]");
  std::vector<double> w(static_cast<std::size_t>(n), 1.0);
  if (alpha == 0.0) return w;
  const double pi = std::numbers::pi;
  for (int k = 0; k < n; ++k) {
    const double x = static_cast<double>(k) / (n - 1);  // in [0, 1]
    if (x < alpha / 2) {
      w[k] = 0.5 * (1 + std::cos(pi * (2 * x / alpha - 1)));
    } else if (x > 1 - alpha / 2) {
      w[k] = 0.5 * (1 + std::cos(pi * (2 * x / alpha - 2 / alpha + 1)));
    }
  }
  // Exact mirror symmetry regardless of rounding in x.
  for (int k = 0; k < n / 2; ++k) w[n - 1 - k] = w[k];
  return w;
}

struct PowerSpectrum::Fft {
  fftw_plan plan = nullptr;
  int n = 0;
};

PowerSpectrum::PowerSpectrum(int n, double alpha, double sample_rate)
    : n_(n), sample_rate_(sample_rate), window_(tukey_window(n, alpha)),
      fft_(std::make_unique<Fft>()) {
  if (sample_rate <= 0) throw ParameterError("sample rate must be positive");
  window_power_ = 0.0;
  for (double v : window_) window_power_ += v * v;

  double* in = fftw_alloc_real(static_cast<std::size_t>(n));
  fftw_complex* out = fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1));
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fft_->plan = fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE);
  }
  fft_->n = n;
  fftw_free(in);
  fftw_free(out);
  if (fft_->plan == nullptr) throw ParameterError("FFT planning failed");
}

PowerSpectrum::~PowerSpectrum() {
  if (fft_ && fft_->plan) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fft_->plan);
  }
}

std::vector<double> PowerSpectrum::operator()(std::span<const float> frame) const {
  if (frame.size() != static_cast<std::size_t>(n_)) {
    throw DimensionError("power spectrum expects " + std::to_string(n_) +
                         " samples, got " + std::to_string(frame.size()));
  }
  const int bins = n_ / 2 + 1;
  double* in = fftw_alloc_real(static_cast<std::size_t>(n_));
  fftw_complex* out = fftw_alloc_complex(static_cast<std::size_t>(bins));
  for (int i = 0; i < n_; ++i) in[i] = window_[i] * frame[i];
  fftw_execute_dft_r2c(fft_->plan, in, out);

  std::vector<double> psd(static_cast<std::size_t>(bins));
  const double scale = 1.0 / (sample_rate_ * window_power_);
  for (int k = 0; k < bins; ++k) {
    const double p = (out[k][0] * out[k][0] + out[k][1] * out[k][1]) * scale;
    const bool edge = k == 0 || (n_ % 2 == 0 && k == bins - 1);
    psd[k] = edge ? p : 2 * p;
  }
  fftw_free(in);
  fftw_free(out);
  return psd;
}

std::vector<double> power_spectrum(std::span<const float> frame) {
  static const PowerSpectrum spectrum;
  return spectrum(frame);
}

Filterbank::Filterbank(int filters, int spectrum_bins)
    : filters_(filters), spectrum_bins_(spectrum_bins) {
  if (filters < 2 || spectrum_bins < filters) {
    throw ParameterError("filterbank needs >= 2 filters and at least as many bins");
  }
  weights_.assign(static_cast<std::size_t>(filters) * spectrum_bins, 0.0);
  const double first = 1.0;
  const double last = spectrum_bins - 1;
  const double spacing = (last - first) / (filters - 1);
  for (int m = 0; m < filters; ++m) {
    const double centre = first + m * spacing;
    double sum = 0.0;
    for (int k = 0; k < spectrum_bins; ++k) {
      double w = 1.0 - std::fabs(k - centre) / spacing;
      if (w < 1e-12) w = 0.0;
      weights_[static_cast<std::size_t>(m) * spectrum_bins + k] = w;
      sum += w;
    }
    for (int k = 0; k < spectrum_bins; ++k) {
      weights_[static_cast<std::size_t>(m) * spectrum_bins + k] /= sum;
    }
  }
}

std::vector<double> Filterbank::apply(std::span<const double> spectrum) const {
  if (spectrum.size() != static_cast<std::size_t>(spectrum_bins_)) {
    throw DimensionError("filterbank expects " + std::to_string(spectrum_bins_) + " bins");
  }
  std::vector<double> out(static_cast<std::size_t>(filters_), 0.0);
  for (int m = 0; m < filters_; ++m) {
    const double* w = weights_.data() + static_cast<std::size_t>(m) * spectrum_bins_;
    double acc = 0.0;
    for (int k = 0; k < spectrum_bins_; ++k) acc += w[k] * spectrum[k];
    out[m] = acc;
  }
  return out;
}

std::vector<double> filterbank_64(std::span<const double> spectrum) {
  static const Filterbank bank;
  return bank.apply(spectrum);
}

std::vector<float> log_compress(std::span<const double> energies) {
  std::vector<float> out;
  out.reserve(energies.size());
  for (double e : energies) {
    if (!(e >= 0.0)) throw DomainError("log compression of negative energy");
    out.push_back(static_cast<float>(std::log(e + kLogFloor)));
  }
  return out;
}

double acquisition_time(int columns, int sample_rate, int segment, int stride) {
  if (columns < 1) throw ParameterError("need at least one column");
  return (segment + static_cast<double>(columns - 1) * stride) / sample_rate;
}

std::int64_t column_count(std::int64_t samples) {
  if (samples < kSegmentSize) return 0;
  return (samples - kSegmentSize) / kSegmentStride + 1;
}

Segmenter::Segmenter(int segment, int stride) : segment_(segment), stride_(stride) {
  if (segment < 1 || stride < 1 || stride > segment) {
    throw ParameterError("segmenter needs 1 <= stride <= segment");
  }
  buffer_.reserve(2 * static_cast<std::size_t>(segment));
}

SpectrogramPipeline::SpectrogramPipeline() = default;

SpectrogramColumn SpectrogramPipeline::column(std::int64_t index,
                                              std::span<const float> frame) const {
  SpectrogramColumn col;
  col.frame_index = index;
  col.start_sample = index * kSegmentStride;
  col.values = log_compress(filterbank_.apply(spectrum_(frame)));
  return col;
}

std::vector<SpectrogramColumn> SpectrogramPipeline::push(std::span<const float> samples) {
  std::vector<SpectrogramColumn> out;
  segmenter_.push(samples, [&](std::int64_t index, std::span<const float> frame) {
    out.push_back(column(index, frame));
  });
  return out;
}

Tensor3 compute_spectrogram(std::span<const float> samples) {
  SpectrogramPipeline pipeline;
  const auto columns = pipeline.push(samples);
  Tensor3 out(static_cast<int>(columns.size()), kFilterBins, 1);
  for (std::size_t t = 0; t < columns.size(); ++t) {
    for (int f = 0; f < kFilterBins; ++f) out.at(static_cast<int>(t), f, 0) = columns[t].values[f];
  }
  return out;
}

std::vector<float> decode_samples(std::span<const std::uint8_t> bytes, SampleFormat format) {
  const std::size_t width = format == SampleFormat::kFloat32 ? 4 : 3;
  if (bytes.size() % width != 0) {
    throw FormatError("sample stream of " + std::to_string(bytes.size()) +
                      " bytes is not a multiple of " + std::to_string(width));
  }
  std::vector<float> out;
  out.reserve(bytes.size() / width);
  ByteReader r(bytes);
  while (r.remaining() > 0) {
    if (format == SampleFormat::kFloat32) {
      const float v = r.f32("sample");
      if (!std::isfinite(v)) throw FormatError("non-finite sample");
      out.push_back(v);
    } else {
      const auto b = r.take(3, "sample");
      std::int32_t v = b[0] | (b[1] << 8) | (b[2] << 16);
      if (v & 0x800000) v -= 0x1000000;
      out.push_back(static_cast<float>(v));
    }
  }
  return out;
}

std::vector<float> read_samples(const std::filesystem::path& path, SampleFormat format) {
  return decode_samples(read_file_bytes(path), format);
}

std::vector<std::uint8_t> encode_samples(std::span<const float> samples, SampleFormat format) {
  ByteWriter w;
  for (float s : samples) {
    if (format == SampleFormat::kFloat32) {
      w.f32(s);
    } else {
      const long v = std::lround(std::clamp(s, -8388608.0f, 8388607.0f));
      const auto u = static_cast<std::uint32_t>(v) & 0xFFFFFFu;
      w.u8(static_cast<std::uint8_t>(u));
      w.u8(static_cast<std::uint8_t>(u >> 8));
      w.u8(static_cast<std::uint8_t>(u >> 16));
    }
  }
  return std::move(w.bytes());
}

std::vector<std::uint8_t> encode_spectrogram(const Tensor3& spec) {
  if (spec.c_len() != 1) throw DimensionError("spectrogram must have one channel");
  ByteWriter w;
  w.raw(kSpectrogramMagic);
  w.u32(kSpectrogramVersion);
  w.u32(static_cast<std::uint32_t>(spec.t_len()));
  w.u32(static_cast<std::uint32_t>(spec.f_len()));
  for (float v : spec.data()) w.f32(v);
  return std::move(w.bytes());
}

Tensor3 decode_spectrogram(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (r.str(4, "magic") != kSpectrogramMagic) throw FormatError("bad magic, not a TDPS file");
  const std::uint32_t version = r.u32("version");
  if (version != kSpectrogramVersion) {
    throw FormatError("unsupported spectrogram version " + std::to_string(version));
  }
  const std::uint32_t t = r.u32("T");
  const std::uint32_t f = r.u32("F");
  if (f == 0 || t > (1u << 24) || f > (1u << 16)) throw FormatError("implausible spectrogram extent");
  if (r.remaining() != static_cast<std::size_t>(t) * f * 4) {
    throw FormatError("spectrogram payload size does not match header");
  }
  std::vector<float> data(static_cast<std::size_t>(t) * f);
  for (float& v : data) v = r.f32("payload");
  return Tensor3(static_cast<int>(t), static_cast<int>(f), 1, std::move(data));
}

std::string spectrogram_csv(const Tensor3& spec) {
  std::string out;
  char buf[32];
  for (int t = 0; t < spec.t_len(); ++t) {
    for (int f = 0; f < spec.f_len(); ++f) {
      // 9 significant digits round-trip any float.
      std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(spec.at(t, f, 0)));
      if (f > 0) out += ',';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

Tensor3 parse_spectrogram_csv(std::string_view text) {
  std::vector<float> data;
  int rows = 0;
  int width = -1;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    int count = 0;
    std::size_t p = 0;
    while (p <= line.size()) {
      std::size_t comma = line.find(',', p);
      if (comma == std::string_view::npos) comma = line.size();
      std::string field(line.substr(p, comma - p));
      char* end = nullptr;
      const float v = std::strtof(field.c_str(), &end);
      if (field.empty() || end != field.c_str() + field.size() || !std::isfinite(v)) {
        throw FormatError("bad spectrogram CSV value '" + field + "' on row " +
                          std::to_string(rows));
      }
      data.push_back(v);
      ++count;
      p = comma + 1;
    }
    if (width >= 0 && count != width) throw FormatError("ragged spectrogram CSV");
    width = count;
    ++rows;
  }
  if (rows == 0) throw FormatError("empty spectrogram CSV");
  return Tensor3(rows, width, 1, std::move(data));
}

Tensor3 read_spectrogram(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  if (bytes.size() >= 4 && std::string_view(reinterpret_cast<const char*>(bytes.data()), 4) ==
                               kSpectrogramMagic) {
    return decode_spectrogram(bytes);
  }
  return parse_spectrogram_csv(
      std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

}  // namespace tdp
