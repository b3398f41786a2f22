// Copyright 2026 The wae Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef WAE_IMAGE_HPP
#define WAE_IMAGE_HPP

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Core>

#include "wae/error.hpp"
#include "wae/rng.hpp"

namespace wae {

/// Dense raster, row-major with interleaved channels (1 = grayscale,
/// 3 = RGB). Pixel values are raw [0,255] straight off disk and [0,1] once
/// normalized; the augmentation pipeline operates on normalized buffers.
struct ImageBuffer {
    int height = 0;
    int width = 0;
    int channels = 1;
    Eigen::ArrayXd pixels; // height * width * channels entries

    static ImageBuffer constant(int height, int width, int channels, double value);

    double& at(int y, int x, int c) {
        return pixels[(static_cast<Eigen::Index>(y) * width + x) * channels + c];
    }
    double at(int y, int x, int c) const {
        return pixels[(static_cast<Eigen::Index>(y) * width + x) * channels + c];
    }
};

/// Random-augmentation ranges: rotation in +-rotation_deg degrees, shifts as
/// fractions of each dimension, shear angle in +-shear_deg degrees, zoom in
/// [1-zoom_frac, 1+zoom_frac], brightness multiplier in
/// [brightness_lo, brightness_hi]. Out-of-bounds samples reflect at edges.
struct AugmentConfig {
    double rotation_deg = 5.0;
    double shift_frac = 0.05;
    double shear_deg = 0.05;
    double zoom_frac = 0.05;
    double brightness_lo = 0.9;
    double brightness_hi = 1.1;

    /// Throws DomainError when a range is negative or the brightness
    /// interval is nonpositive or unordered.
    void validate() const;
};

/// One concrete draw from an AugmentConfig.
struct AugmentParams {
    double angle_deg = 0.0;
    double dx = 0.0; // pixels
    double dy = 0.0; // pixels
    double shear_deg = 0.0;
    double zoom = 1.0;
    double brightness = 1.0;
};

/// Maps any integer index onto [0, size) by edge-inclusive mirroring:
/// -1 -> 0, -2 -> 1, size -> size-1, size+1 -> size-2.
std::int64_t reflect_index(std::int64_t i, std::int64_t size);

/// Divides raw 8-bit-range values by 255. Throws DomainError if any pixel is
/// outside [0,255].
ImageBuffer normalize(const ImageBuffer& raw);

/// Bilinear resample with pixel-center alignment:
/// src = (dst + 0.5) * (in/out) - 0.5, edge taps clamped.
ImageBuffer resize_bilinear(const ImageBuffer& img, int out_height, int out_width);

/// Uniform draw of every augmentation parameter, in a fixed order, from the
/// given stream. Shift ranges scale with the target image dimensions.
AugmentParams sample_params(const AugmentConfig& cfg, int image_height, int image_width,
                            Rng& rng);

/// One composed affine warp (rotation * shear * zoom about the image center,
/// then translation), inverse-mapped per output pixel with bilinear sampling
/// and reflected out-of-bounds taps, followed by brightness scaling clamped
/// to [0,1]. Input must be normalized.
ImageBuffer apply_augment(const ImageBuffer& img, const AugmentParams& params);

/// count_per_image augmented variants of each input, each drawn from an
/// independent substream of `seed`; output order is input order with
/// variants consecutive.
std::vector<ImageBuffer> augment_batch(const std::vector<ImageBuffer>& images,
                                       const AugmentConfig& cfg, std::uint64_t seed,
                                       int count_per_image);

/// Binary PGM (P5, 1 channel) / PPM (P6, 3 channels) with maxval 255.
/// Reader returns raw values in [0,255]; writer rounds half-up to bytes and
/// emits a single whitespace-separated header line followed by raw bytes.
ImageBuffer read_netpbm(const std::filesystem::path& path);
void write_netpbm(const std::filesystem::path& path, const ImageBuffer& img);

} // namespace wae

#endif // WAE_IMAGE_HPP
