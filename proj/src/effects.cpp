#include "satsynth/effects.hpp"

#include "satsynth/error.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace satsynth {

namespace {

std::vector<double> gaussian_kernel(double sigma) {
  const int half = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * half + 1);
  double sum = 0.0;
  for (int i = -half; i <= half; ++i) {
    k[i + half] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += k[i + half];
  }
  for (double& w : k) w /= sum;
  return k;
}

// Zero-padded separable convolution.
ImageF blur(const ImageF& src, double sigma) {
  if (sigma <= 0.0) return src;
  const std::vector<double> k = gaussian_kernel(sigma);
  const int half = static_cast<int>(k.size() / 2);
  ImageF tmp(src.width, src.height, src.channels);
  for (int row = 0; row < src.height; ++row) {
    for (int col = 0; col < src.width; ++col) {
      for (int c = 0; c < src.channels; ++c) {
        double acc = 0.0;
        for (int i = -half; i <= half; ++i) {
          const int x = col + i;
          if (x >= 0 && x < src.width) acc += k[i + half] * src.at(row, x, c);
        }
        tmp.at(row, col, c) = acc;
      }
    }
  }
  ImageF out(src.width, src.height, src.channels);
  for (int row = 0; row < src.height; ++row) {
    for (int col = 0; col < src.width; ++col) {
      for (int c = 0; c < src.channels; ++c) {
        double acc = 0.0;
        for (int i = -half; i <= half; ++i) {
          const int y = row + i;
          if (y >= 0 && y < src.height) acc += k[i + half] * tmp.at(y, col, c);
        }
        out.at(row, col, c) = acc;
      }
    }
  }
  return out;
}

}  // namespace

ImageF apply_bloom(const ImageF& img, double threshold, double intensity, double radius) {
  if (radius < 0.0) throw Error(ErrorCode::kInvalidArgument, "bloom radius must be >= 0");
  if (intensity == 0.0) return img;
  ImageF bright(img.width, img.height, img.channels);
  bool any = false;
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    bright.data[i] = std::max(img.data[i] - threshold, 0.0);
    any = any || bright.data[i] > 0.0;
  }
  if (!any) return img;
  const ImageF glow = blur(bright, radius);
  ImageF out = img;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += intensity * glow.data[i];
  return out;
}

ImageF apply_color_adjust(const ImageF& img, double saturation, double contrast,
                          double temperature_shift) {
  if (img.channels != 3) {
    throw Error(ErrorCode::kInvalidArgument, "color adjustment needs a 3-channel image");
  }
  ImageF out = img;
  for (std::size_t p = 0; p < out.pixel_count(); ++p) {
    double* px = &out.data[3 * p];
    if (temperature_shift != 0.0) {
      px[0] *= 1.0 + temperature_shift;
      px[2] *= 1.0 - temperature_shift;
    }
    if (contrast != 1.0) {
      for (int c = 0; c < 3; ++c) {
        const double encoded = std::pow(std::max(px[c], 0.0), 1.0 / kGamma);
        const double stretched = std::max(0.0, 0.5 + contrast * (encoded - 0.5));
        px[c] = std::pow(stretched, kGamma);
      }
    }
    if (saturation != 1.0) {
      const double luma = kLumaR * px[0] + kLumaG * px[1] + kLumaB * px[2];
      for (int c = 0; c < 3; ++c) px[c] = luma + saturation * (px[c] - luma);
    }
    for (int c = 0; c < 3; ++c) px[c] = std::max(px[c], 0.0);
  }
  return out;
}

ImageF apply_noise(const ImageF& img, const NoiseParams& noise, std::uint64_t seed,
                   std::uint64_t frame_key) {
  if (noise.gaussian_sigma == 0.0 && noise.shot_gain == 0.0) return img;
  ImageF out = img;
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    Rng rng = Rng::derive(seed, StreamDomain::kNoise, frame_key, i);
    const double x = img.data[i];
    const double read = noise.gaussian_sigma * rng.normal();
    const double shot = std::sqrt(noise.shot_gain * std::max(x, 0.0)) * rng.normal();
    out.data[i] = std::max(0.0, x + read + shot);
  }
  return out;
}

ImageF to_grayscale(const ImageF& img) {
  if (img.channels == 1) return img;
  if (img.channels != 3) throw Error(ErrorCode::kInvalidArgument, "grayscale needs 3 channels");
  ImageF out(img.width, img.height, 1);
  for (std::size_t p = 0; p < img.pixel_count(); ++p) {
    out.data[p] = kLumaR * img.data[3 * p] + kLumaG * img.data[3 * p + 1] +
                  kLumaB * img.data[3 * p + 2];
  }
  return out;
}

std::uint8_t encode_8bit(double linear) {
  const double clamped = std::isnan(linear) ? 0.0 : std::clamp(linear, 0.0, 1.0);
  const double encoded = std::pow(clamped, 1.0 / kGamma);
  return static_cast<std::uint8_t>(std::lround(255.0 * encoded));
}

ByteImage encode_8bit(const ImageF& img) {
  ByteImage out(img.width, img.height, img.channels);
  for (std::size_t i = 0; i < img.data.size(); ++i) out.data[i] = encode_8bit(img.data[i]);
  return out;
}

ImageF apply_effects(const ImageF& linear, const SensorEffects& e, bool grayscale,
                     std::uint64_t seed, std::uint64_t frame_key) {
  ImageF img = linear;
  if (e.bloom.enabled) img = apply_bloom(img, e.bloom.threshold, e.bloom.intensity, e.bloom.radius);
  if (e.color.enabled && img.channels == 3) {
    img = apply_color_adjust(img, e.color.saturation, e.color.contrast, e.color.temperature_shift);
  }
  if (e.noise.enabled) img = apply_noise(img, e.noise, seed, frame_key);
  if (grayscale) img = to_grayscale(img);
  return img;
}

}  // namespace satsynth
