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

// Raw 1 ksps samples -> 64-bin log-power spectrogram columns.
//
//   segment (1024 samples, stride 512)
//   -> Tukey window (alpha 0.25)
//   -> one-sided PSD: |X_k|^2 / (fs * sum w^2), bins 1..511 doubled
//   -> 64 linear triangular filters, unit weight sum
//   -> ln(x + 1e-10)
//
// Whatever produces trained weights must use the same chain; the scaling and
// filter shapes are part of the model contract.

#ifndef TDP_PREPROCESS_HPP_
#define TDP_PREPROCESS_HPP_

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tdp/tensor.hpp"

namespace tdp {

inline constexpr int kSampleRate = 1000;
inline constexpr int kSegmentSize = 1024;
inline constexpr int kSegmentStride = 512;
inline constexpr int kSpectrumBins = kSegmentSize / 2 + 1;
inline constexpr int kFilterBins = 64;
inline constexpr double kTukeyAlpha = 0.25;
inline constexpr double kLogFloor = 1e-10;

// Symmetric tapered-cosine window. alpha = 0 is rectangular, alpha = 1 Hann.
std::vector<double> tukey_window(int n, double alpha);

// Windowed one-sided power spectral density of a real frame.
class PowerSpectrum {
 public:
  explicit PowerSpectrum(int n = kSegmentSize, double alpha = kTukeyAlpha,
                         double sample_rate = kSampleRate);
  ~PowerSpectrum();
  PowerSpectrum(const PowerSpectrum&) = delete;
  PowerSpectrum& operator=(const PowerSpectrum&) = delete;

  int size() const { return n_; }
  const std::vector<double>& window() const { return window_; }

  // `frame` must hold size() samples; returns size()/2 + 1 values.
  // Safe to call concurrently.
  std::vector<double> operator()(std::span<const float> frame) const;

 private:
  struct Fft;
  int n_;
  double sample_rate_;
  double window_power_;
  std::vector<double> window_;
  std::unique_ptr<Fft> fft_;
};

// Default 1024-point, alpha 0.25, 1 ksps spectrum.
std::vector<double> power_spectrum(std::span<const float> frame);

// Triangular filters with linearly spaced centres from bin 1 to the last bin
// and 50% overlap, each normalised to unit weight sum.
class Filterbank {
 public:
  explicit Filterbank(int filters = kFilterBins, int spectrum_bins = kSpectrumBins);

  int filters() const { return filters_; }
  int spectrum_bins() const { return spectrum_bins_; }
  double weight(int filter, int bin) const {
    return weights_[static_cast<std::size_t>(filter) * spectrum_bins_ + bin];
  }

  std::vector<double> apply(std::span<const double> spectrum) const;

 private:
  int filters_;
  int spectrum_bins_;
  std::vector<double> weights_;  // filters x bins
};

std::vector<double> filterbank_64(std::span<const double> spectrum);

// ln(x + 1e-10); negative energies throw DomainError.
std::vector<float> log_compress(std::span<const double> energies);

// Seconds of signal needed for `columns` spectrogram columns.
double acquisition_time(int columns, int sample_rate = kSampleRate,
                        int segment = kSegmentSize, int stride = kSegmentStride);

// Columns produced by `samples` samples.
std::int64_t column_count(std::int64_t samples);

struct SpectrogramColumn {
  std::vector<float> values;  // kFilterBins log energies
  std::int64_t frame_index = 0;
  std::int64_t start_sample = 0;
};

// Strided segmentation over a 2N double buffer. Emits one frame per 512 new
// samples once 1024 have arrived, independent of how input is chunked.
class Segmenter {
 public:
  Segmenter(int segment = kSegmentSize, int stride = kSegmentStride);

  // Calls `on_frame(frame_index, frame)` for every completed segment.
  template <typename F>
  void push(std::span<const float> samples, F&& on_frame) {
    while (!samples.empty()) {
      const std::size_t room = buffer_.capacity() - buffer_.size();
      const std::size_t n = std::min(room, samples.size());
      buffer_.insert(buffer_.end(), samples.begin(), samples.begin() + n);
      samples = samples.subspan(n);
      while (buffer_.size() >= static_cast<std::size_t>(segment_)) {
        on_frame(frames_, std::span<const float>(buffer_.data(), segment_));
        ++frames_;
        buffer_.erase(buffer_.begin(), buffer_.begin() + stride_);
      }
    }
  }

  std::int64_t frames() const { return frames_; }

 private:
  int segment_;
  int stride_;
  std::vector<float> buffer_;
  std::int64_t frames_ = 0;
};

// Segmenter + spectrum + filterbank + log, fed incrementally.
class SpectrogramPipeline {
 public:
  SpectrogramPipeline();

  std::vector<SpectrogramColumn> push(std::span<const float> samples);
  SpectrogramColumn column(std::int64_t index, std::span<const float> frame) const;

 private:
  Segmenter segmenter_;
  PowerSpectrum spectrum_;
  Filterbank filterbank_;
};

// Whole-signal convenience: T x 64 x 1 tensor, T = column_count(samples).
Tensor3 compute_spectrogram(std::span<const float> samples);

enum class SampleFormat { kFloat32, kInt24 };

// Headerless little-endian samples. A byte count that is not a multiple of
// the sample width throws FormatError. 24-bit values keep their integer scale.
std::vector<float> decode_samples(std::span<const std::uint8_t> bytes, SampleFormat format);
std::vector<float> read_samples(const std::filesystem::path& path, SampleFormat format);
std::vector<std::uint8_t> encode_samples(std::span<const float> samples, SampleFormat format);

// Spectrogram files. Binary: "TDPS" | u32 version (=1) | u32 T | u32 F, then
// T*F little-endian f32 values, one column after the other. CSV: one column
// per line, F comma-separated values.
std::vector<std::uint8_t> encode_spectrogram(const Tensor3& spec);
Tensor3 decode_spectrogram(std::span<const std::uint8_t> bytes);
std::string spectrogram_csv(const Tensor3& spec);
Tensor3 parse_spectrogram_csv(std::string_view text);

// Reads either encoding, chosen by the magic bytes.
Tensor3 read_spectrogram(const std::filesystem::path& path);

}  // namespace tdp

#endif  // TDP_PREPROCESS_HPP_
