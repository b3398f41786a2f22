// Copyright 2026 The wae Authors
// SPDX-License-Identifier: Apache-2.0

#include "wae/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <string>

#include <Eigen/Dense>

namespace wae {

namespace {

constexpr double kDegToRad = 0.017453292519943295;

void check_dims(int height, int width, int channels) {
    if (height < 1 || width < 1) {
        throw DomainError("image dimensions must be positive, got " + std::to_string(height) +
                          "x" + std::to_string(width));
    }
    if (channels != 1 && channels != 3) {
        throw DomainError("image must have 1 or 3 channels, got " + std::to_string(channels));
    }
}

} // namespace

ImageBuffer ImageBuffer::constant(int height, int width, int channels, double value) {
    check_dims(height, width, channels);
    ImageBuffer img;
    img.height = height;
    img.width = width;
    img.channels = channels;
    img.pixels = Eigen::ArrayXd::Constant(
        static_cast<Eigen::Index>(height) * width * channels, value);
    return img;
}

void AugmentConfig::validate() const {
    if (rotation_deg < 0.0 || shift_frac < 0.0 || shear_deg < 0.0 || zoom_frac < 0.0) {
        throw DomainError("augmentation ranges must be nonnegative");
    }
    if (!(brightness_lo > 0.0) || brightness_hi < brightness_lo) {
        throw DomainError("brightness interval must be positive and ordered");
    }
}

std::int64_t reflect_index(std::int64_t i, std::int64_t size) {
    const std::int64_t period = 2 * size;
    std::int64_t p = i % period;
    if (p < 0) p += period;
    return p < size ? p : period - 1 - p;
}

ImageBuffer normalize(const ImageBuffer& raw) {
    check_dims(raw.height, raw.width, raw.channels);
    if ((raw.pixels < 0.0).any() || (raw.pixels > 255.0).any()) {
        throw DomainError("normalize expects pixel values in [0,255]");
    }
    ImageBuffer out = raw;
    out.pixels = raw.pixels / 255.0;
    return out;
}

ImageBuffer resize_bilinear(const ImageBuffer& img, int out_height, int out_width) {
    check_dims(img.height, img.width, img.channels);
    check_dims(out_height, out_width, img.channels);

    ImageBuffer out;
    out.height = out_height;
    out.width = out_width;
    out.channels = img.channels;
    out.pixels.resize(static_cast<Eigen::Index>(out_height) * out_width * img.channels);

    const double scale_y = static_cast<double>(img.height) / out_height;
    const double scale_x = static_cast<double>(img.width) / out_width;
    const auto clamp_y = [&](std::int64_t y) {
        return std::clamp<std::int64_t>(y, 0, img.height - 1);
    };
    const auto clamp_x = [&](std::int64_t x) {
        return std::clamp<std::int64_t>(x, 0, img.width - 1);
    };

    for (int oy = 0; oy < out_height; ++oy) {
        const double sy = (oy + 0.5) * scale_y - 0.5;
        const auto y0 = static_cast<std::int64_t>(std::floor(sy));
        const double fy = sy - static_cast<double>(y0);
        const int ya = static_cast<int>(clamp_y(y0));
        const int yb = static_cast<int>(clamp_y(y0 + 1));
        for (int ox = 0; ox < out_width; ++ox) {
            const double sx = (ox + 0.5) * scale_x - 0.5;
            const auto x0 = static_cast<std::int64_t>(std::floor(sx));
            const double fx = sx - static_cast<double>(x0);
            const int xa = static_cast<int>(clamp_x(x0));
            const int xb = static_cast<int>(clamp_x(x0 + 1));
            for (int c = 0; c < img.channels; ++c) {
                const double top = (1.0 - fx) * img.at(ya, xa, c) + fx * img.at(ya, xb, c);
                const double bottom = (1.0 - fx) * img.at(yb, xa, c) + fx * img.at(yb, xb, c);
                out.at(oy, ox, c) = (1.0 - fy) * top + fy * bottom;
            }
        }
    }
    return out;
}

AugmentParams sample_params(const AugmentConfig& cfg, int image_height, int image_width,
                            Rng& rng) {
    cfg.validate();
    AugmentParams p;
    p.angle_deg = rng.uniform(-cfg.rotation_deg, cfg.rotation_deg);
    p.dx = rng.uniform(-cfg.shift_frac * image_width, cfg.shift_frac * image_width);
    p.dy = rng.uniform(-cfg.shift_frac * image_height, cfg.shift_frac * image_height);
    p.shear_deg = rng.uniform(-cfg.shear_deg, cfg.shear_deg);
    p.zoom = rng.uniform(1.0 - cfg.zoom_frac, 1.0 + cfg.zoom_frac);
    p.brightness = rng.uniform(cfg.brightness_lo, cfg.brightness_hi);
    return p;
}

ImageBuffer apply_augment(const ImageBuffer& img, const AugmentParams& params) {
    check_dims(img.height, img.width, img.channels);
    if ((img.pixels < 0.0).any() || (img.pixels > 1.0).any()) {
        throw DomainError("apply_augment expects a normalized image (values in [0,1])");
    }

    const double theta = params.angle_deg * kDegToRad;
    const double phi = params.shear_deg * kDegToRad;
    Eigen::Matrix2d rotation;
    rotation << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    Eigen::Matrix2d shear;
    shear << 1.0, std::tan(phi), 0.0, 1.0;
    const Eigen::Matrix2d forward = params.zoom * (rotation * shear);
    const Eigen::Matrix2d inverse = forward.inverse();

    const double cx = (img.width - 1) * 0.5;
    const double cy = (img.height - 1) * 0.5;

    ImageBuffer out;
    out.height = img.height;
    out.width = img.width;
    out.channels = img.channels;
    out.pixels.resize(img.pixels.size());

    for (int oy = 0; oy < img.height; ++oy) {
        for (int ox = 0; ox < img.width; ++ox) {
            const double vx = ox - cx - params.dx;
            const double vy = oy - cy - params.dy;
            const double sx = inverse(0, 0) * vx + inverse(0, 1) * vy + cx;
            const double sy = inverse(1, 0) * vx + inverse(1, 1) * vy + cy;

            const auto x0 = static_cast<std::int64_t>(std::floor(sx));
            const auto y0 = static_cast<std::int64_t>(std::floor(sy));
            const double fx = sx - static_cast<double>(x0);
            const double fy = sy - static_cast<double>(y0);
            const int xa = static_cast<int>(reflect_index(x0, img.width));
            const int xb = static_cast<int>(reflect_index(x0 + 1, img.width));
            const int ya = static_cast<int>(reflect_index(y0, img.height));
            const int yb = static_cast<int>(reflect_index(y0 + 1, img.height));

            for (int c = 0; c < img.channels; ++c) {
                const double top = (1.0 - fx) * img.at(ya, xa, c) + fx * img.at(ya, xb, c);
                const double bottom = (1.0 - fx) * img.at(yb, xa, c) + fx * img.at(yb, xb, c);
                out.at(oy, ox, c) = (1.0 - fy) * top + fy * bottom;
            }
        }
    }

    out.pixels = (out.pixels * params.brightness).min(1.0).max(0.0);
    return out;
}

std::vector<ImageBuffer> augment_batch(const std::vector<ImageBuffer>& images,
                                       const AugmentConfig& cfg, std::uint64_t seed,
                                       int count_per_image) {
    cfg.validate();
    if (count_per_image < 0) {
        throw DomainError("count_per_image must be nonnegative");
    }
    const Rng root(seed);
    std::vector<ImageBuffer> out;
    out.reserve(images.size() * static_cast<std::size_t>(count_per_image));
    for (std::size_t i = 0; i < images.size(); ++i) {
        for (int k = 0; k < count_per_image; ++k) {
            Rng stream = root.substream(static_cast<std::uint64_t>(i) *
                                            static_cast<std::uint64_t>(count_per_image) +
                                        static_cast<std::uint64_t>(k));
            const AugmentParams params =
                sample_params(cfg, images[i].height, images[i].width, stream);
            out.push_back(apply_augment(images[i], params));
        }
    }
    return out;
}

namespace {

int read_header_int(std::istream& in, const std::filesystem::path& path) {
    // Skips whitespace and '#' comment lines between header tokens.
    int ch = in.peek();
    while (ch == '#' || std::isspace(ch)) {
        if (ch == '#') {
            std::string comment;
            std::getline(in, comment);
        } else {
            in.get();
        }
        ch = in.peek();
    }
    int value = 0;
    if (!(in >> value)) {
        throw FormatError("truncated netpbm header in " + path.string());
    }
    return value;
}

} // namespace

ImageBuffer read_netpbm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open " + path.string());
    }
    std::string magic;
    in >> magic;
    int channels = 0;
    if (magic == "P5") {
        channels = 1;
    } else if (magic == "P6") {
        channels = 3;
    } else {
        throw FormatError("unsupported netpbm magic '" + magic + "' in " + path.string());
    }
    const int width = read_header_int(in, path);
    const int height = read_header_int(in, path);
    const int maxval = read_header_int(in, path);
    if (width < 1 || height < 1) {
        throw FormatError("invalid dimensions in " + path.string());
    }
    if (maxval != 255) {
        throw FormatError("unsupported maxval " + std::to_string(maxval) + " in " +
                          path.string() + " (only 255)");
    }
    in.get(); // single whitespace byte after the header

    const std::size_t count =
        static_cast<std::size_t>(width) * static_cast<std::size_t>(height) *
        static_cast<std::size_t>(channels);
    std::vector<unsigned char> bytes(count);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(count));
    if (static_cast<std::size_t>(in.gcount()) != count) {
        throw FormatError("truncated pixel data in " + path.string());
    }

    ImageBuffer img;
    img.height = height;
    img.width = width;
    img.channels = channels;
    img.pixels.resize(static_cast<Eigen::Index>(count));
    for (std::size_t i = 0; i < count; ++i) {
        img.pixels[static_cast<Eigen::Index>(i)] = static_cast<double>(bytes[i]);
    }
    return img;
}

void write_netpbm(const std::filesystem::path& path, const ImageBuffer& img) {
    check_dims(img.height, img.width, img.channels);
    if ((img.pixels < 0.0).any() || (img.pixels > 255.0).any()) {
        throw DomainError("write_netpbm expects pixel values in [0,255]");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw FormatError("cannot open " + path.string() + " for writing");
    }
    out << (img.channels == 1 ? "P5" : "P6") << ' ' << img.width << ' ' << img.height
        << ' ' << 255 << '\n';
    std::vector<unsigned char> bytes(static_cast<std::size_t>(img.pixels.size()));
    for (Eigen::Index i = 0; i < img.pixels.size(); ++i) {
        // Half-up rounding; values are already range-checked.
        bytes[static_cast<std::size_t>(i)] =
            static_cast<unsigned char>(std::llround(img.pixels[i]));
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw FormatError("failed writing pixel data to " + path.string());
    }
}

} // namespace wae
