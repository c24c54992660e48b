#pragma once

#include "satsynth/image.hpp"
#include "satsynth/rng.hpp"
#include "satsynth/scene.hpp"

#include <cstdint>

namespace satsynth {

/// out = img + intensity * G(max(img - threshold, 0)), with G a separable
/// Gaussian of sigma = radius truncated at 3 sigma and renormalized. Pixels
/// outside the image contribute nothing.
ImageF apply_bloom(const ImageF& img, double threshold, double intensity, double radius);

/// Temperature (R *= 1 + t, B *= 1 - t), then contrast about 0.5 in the
/// gamma-encoded domain, then saturation as a lerp from luma. Stages at
/// their neutral value are skipped, so neutral parameters return `img`
/// unchanged. Throws kInvalidArgument for 1-channel images.
ImageF apply_color_adjust(const ImageF& img, double saturation, double contrast,
                          double temperature_shift);

/// out = max(0, x + N(0, sigma^2) + N(0, gain * x)) per element, each element
/// drawing from its own stream keyed by (seed, frame_key, element index).
ImageF apply_noise(const ImageF& img, const NoiseParams& noise, std::uint64_t seed,
                   std::uint64_t frame_key);

/// Rec. 709 luma on linear light; 1-channel input is returned unchanged.
ImageF to_grayscale(const ImageF& img);

/// Clamp to [0, 1], gamma 1/2.2, round half away from zero.
ByteImage encode_8bit(const ImageF& img);
std::uint8_t encode_8bit(double linear);

inline constexpr double kLumaR = 0.2126;
inline constexpr double kLumaG = 0.7152;
inline constexpr double kLumaB = 0.0722;
inline constexpr double kGamma = 2.2;

/// Fixed pipeline: bloom -> color adjust -> noise -> grayscale (optional).
/// Disabled blocks are skipped.
ImageF apply_effects(const ImageF& linear, const SensorEffects& effects, bool grayscale,
                     std::uint64_t seed, std::uint64_t frame_key);

}  // namespace satsynth
