#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace satsynth {

/// Interleaved row-major image; `channels` is 1 or 3 (4 only when loading).
template <typename T>
struct Image {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<T> data;

  Image() = default;
  Image(int w, int h, int c, T fill = T{})
      : width(w), height(h), channels(c),
        data(static_cast<std::size_t>(w) * h * c, fill) {}

  std::size_t index(int row, int col, int ch = 0) const {
    return (static_cast<std::size_t>(row) * width + col) * channels + ch;
  }
  T& at(int row, int col, int ch = 0) { return data[index(row, col, ch)]; }
  const T& at(int row, int col, int ch = 0) const { return data[index(row, col, ch)]; }
  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }

  bool operator==(const Image&) const = default;
};

/// Linear-light image, finite and non-negative.
using ImageF = Image<double>;
using ByteImage = Image<std::uint8_t>;
using FloatImage = Image<float>;

}  // namespace satsynth
