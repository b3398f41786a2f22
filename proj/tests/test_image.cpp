// Copyright 2026 The wae Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "support/reference.hpp"
#include "support/subprocess.hpp"
#include "wae/image.hpp"
#include "wae/rng.hpp"

using wae::AugmentConfig;
using wae::AugmentParams;
using wae::DomainError;
using wae::FormatError;
using wae::ImageBuffer;
using wae::testing::reference_warp;
using wae::testing::ScopedTempDir;

namespace {

ImageBuffer random_image(int height, int width, int channels, std::uint64_t seed) {
    ImageBuffer img = ImageBuffer::constant(height, width, channels, 0.0);
    wae::Rng rng(seed);
    for (Eigen::Index i = 0; i < img.pixels.size(); ++i) {
        img.pixels[i] = rng.next_double();
    }
    return img;
}

AugmentConfig zero_config() {
    AugmentConfig cfg;
    cfg.rotation_deg = 0.0;
    cfg.shift_frac = 0.0;
    cfg.shear_deg = 0.0;
    cfg.zoom_frac = 0.0;
    cfg.brightness_lo = 1.0;
    cfg.brightness_hi = 1.0;
    return cfg;
}

bool same_pixels(const ImageBuffer& a, const ImageBuffer& b) {
    return a.height == b.height && a.width == b.width && a.channels == b.channels &&
           (a.pixels == b.pixels).all();
}

double max_abs_diff(const ImageBuffer& a, const ImageBuffer& b) {
    return (a.pixels - b.pixels).abs().maxCoeff();
}

} // namespace

TEST_SUITE("image") {

TEST_CASE("normalize divides by 255 and validates the range") {
    ImageBuffer raw = ImageBuffer::constant(2, 2, 1, 0.0);
    raw.at(0, 0, 0) = 255.0;
    raw.at(0, 1, 0) = 51.0;
    raw.at(1, 0, 0) = 0.0;
    raw.at(1, 1, 0) = 127.5;
    const ImageBuffer norm = wae::normalize(raw);
    CHECK(norm.at(0, 0, 0) == 1.0);
    CHECK(norm.at(0, 1, 0) == 0.2);
    CHECK(norm.at(1, 0, 0) == 0.0);
    CHECK(norm.at(1, 1, 0) == 0.5);

    ImageBuffer toobig = ImageBuffer::constant(1, 1, 1, 256.0);
    CHECK_THROWS_AS(wae::normalize(toobig), DomainError);
    ImageBuffer negative = ImageBuffer::constant(1, 1, 1, -1.0);
    CHECK_THROWS_AS(wae::normalize(negative), DomainError);
}

TEST_CASE("reflect_index mirrors edge-inclusively") {
    CHECK(wae::reflect_index(0, 4) == 0);
    CHECK(wae::reflect_index(3, 4) == 3);
    CHECK(wae::reflect_index(-1, 4) == 0);
    CHECK(wae::reflect_index(-2, 4) == 1);
    CHECK(wae::reflect_index(4, 4) == 3);
    CHECK(wae::reflect_index(5, 4) == 2);
    CHECK(wae::reflect_index(7, 4) == 0);
    CHECK(wae::reflect_index(-1, 1) == 0);
    CHECK(wae::reflect_index(1, 1) == 0);

    // Period 2*size, in-range identity, and agreement with the iterative
    // folding oracle over a wide index range.
    for (std::int64_t size : {1, 2, 3, 7}) {
        for (std::int64_t i = -20; i <= 20; ++i) {
            const std::int64_t r = wae::reflect_index(i, size);
            CHECK(r >= 0);
            CHECK(r < size);
            CHECK(r == wae::testing::reflect_fold(i, size));
            CHECK(wae::reflect_index(i + 2 * size, size) == r);
            if (i >= 0 && i < size) CHECK(r == i);
        }
    }
}

TEST_CASE("resize_bilinear to the same size is bit-identical") {
    const ImageBuffer img = random_image(5, 7, 3, 41);
    const ImageBuffer out = wae::resize_bilinear(img, 5, 7);
    CHECK(same_pixels(img, out));
}

TEST_CASE("resize_bilinear preserves constant images") {
    const ImageBuffer img = ImageBuffer::constant(4, 6, 1, 0.37);
    for (const auto [h, w] : {std::pair{2, 3}, std::pair{9, 13}, std::pair{1, 1}}) {
        const ImageBuffer out = wae::resize_bilinear(img, h, w);
        CHECK(out.height == h);
        CHECK(out.width == w);
        CHECK((out.pixels - 0.37).abs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("resize_bilinear averages the checkerboard down to its mean") {
    ImageBuffer img = ImageBuffer::constant(2, 2, 1, 0.0);
    img.at(0, 1, 0) = 1.0;
    img.at(1, 0, 0) = 1.0;
    const ImageBuffer out = wae::resize_bilinear(img, 1, 1);
    REQUIRE(out.pixels.size() == 1);
    CHECK(out.at(0, 0, 0) == 0.5);
}

TEST_CASE("resize_bilinear upscales a ramp with clamped edge taps") {
    ImageBuffer img = ImageBuffer::constant(1, 2, 1, 0.0);
    img.at(0, 1, 0) = 1.0;
    const ImageBuffer out = wae::resize_bilinear(img, 1, 4);
    REQUIRE(out.pixels.size() == 4);
    CHECK(out.at(0, 0, 0) == 0.0);   // src -0.25, clamped
    CHECK(out.at(0, 1, 0) == 0.25);
    CHECK(out.at(0, 2, 0) == 0.75);
    CHECK(out.at(0, 3, 0) == 1.0);   // src 1.25, clamped
}

TEST_CASE("sample_params draws every field from its configured range") {
    AugmentConfig cfg; // defaults: 5 deg, 0.05, 0.05, 0.05, [0.9, 1.1]
    wae::Rng rng(42);
    double angle_sum = 0.0;
    double zoom_sum = 0.0;
    double brightness_sum = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const AugmentParams p = wae::sample_params(cfg, 40, 20, rng);
        CHECK(p.angle_deg >= -5.0);
        CHECK(p.angle_deg < 5.0);
        CHECK(p.dx >= -1.0); // 0.05 * width 20
        CHECK(p.dx < 1.0);
        CHECK(p.dy >= -2.0); // 0.05 * height 40
        CHECK(p.dy < 2.0);
        CHECK(p.shear_deg >= -0.05);
        CHECK(p.shear_deg < 0.05);
        CHECK(p.zoom >= 0.95);
        CHECK(p.zoom < 1.05);
        CHECK(p.brightness >= 0.9);
        CHECK(p.brightness < 1.1);
        angle_sum += p.angle_deg;
        zoom_sum += p.zoom;
        brightness_sum += p.brightness;
    }
    CHECK(std::abs(angle_sum / n) < 0.2);
    CHECK(std::abs(zoom_sum / n - 1.0) < 0.01);
    CHECK(std::abs(brightness_sum / n - 1.0) < 0.01);
}

TEST_CASE("sample_params is deterministic and collapses for zero ranges") {
    AugmentConfig cfg;
    wae::Rng a(7);
    wae::Rng b(7);
    const AugmentParams pa = wae::sample_params(cfg, 10, 10, a);
    const AugmentParams pb = wae::sample_params(cfg, 10, 10, b);
    CHECK(pa.angle_deg == pb.angle_deg);
    CHECK(pa.dx == pb.dx);
    CHECK(pa.dy == pb.dy);
    CHECK(pa.shear_deg == pb.shear_deg);
    CHECK(pa.zoom == pb.zoom);
    CHECK(pa.brightness == pb.brightness);

    wae::Rng c(7);
    const AugmentParams identity = wae::sample_params(zero_config(), 10, 10, c);
    CHECK(identity.angle_deg == 0.0);
    CHECK(identity.dx == 0.0);
    CHECK(identity.dy == 0.0);
    CHECK(identity.shear_deg == 0.0);
    CHECK(identity.zoom == 1.0);
    CHECK(identity.brightness == 1.0);
}

TEST_CASE("AugmentConfig::validate rejects bad ranges") {
    AugmentConfig cfg;
    cfg.rotation_deg = -1.0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = AugmentConfig{};
    cfg.brightness_lo = 0.0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = AugmentConfig{};
    cfg.brightness_lo = 1.2;
    cfg.brightness_hi = 0.9;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    CHECK_NOTHROW(AugmentConfig{}.validate());
}

TEST_CASE("apply_augment with identity parameters is bit-exact") {
    for (const auto [h, w] : {std::pair{5, 5}, std::pair{4, 6}, std::pair{1, 3}}) {
        const ImageBuffer img = random_image(h, w, 1, 43);
        const ImageBuffer out = wae::apply_augment(img, AugmentParams{});
        CHECK(same_pixels(img, out));
    }
    const ImageBuffer rgb = random_image(6, 4, 3, 44);
    CHECK(same_pixels(rgb, wae::apply_augment(rgb, AugmentParams{})));
}

TEST_CASE("apply_augment scales brightness and clamps to [0,1]") {
    const ImageBuffer half = ImageBuffer::constant(3, 3, 1, 0.5);
    AugmentParams p;
    p.brightness = 1.1;
    CHECK((wae::apply_augment(half, p).pixels == 0.55).all());

    const ImageBuffer bright = ImageBuffer::constant(3, 3, 1, 0.95);
    CHECK((wae::apply_augment(bright, p).pixels == 1.0).all());

    p.brightness = 0.5;
    CHECK((wae::apply_augment(half, p).pixels == 0.25).all());
}

TEST_CASE("apply_augment translation shifts content with reflected fill") {
    // Single bright pixel at (2,2) in a 5x5 image, shifted one pixel right:
    // the output must light up only (2,3).
    ImageBuffer img = ImageBuffer::constant(5, 5, 1, 0.0);
    img.at(2, 2, 0) = 1.0;
    AugmentParams p;
    p.dx = 1.0;
    const ImageBuffer out = wae::apply_augment(img, p);
    for (int y = 0; y < 5; ++y) {
        for (int x = 0; x < 5; ++x) {
            CHECK(out.at(y, x, 0) == (y == 2 && x == 3 ? 1.0 : 0.0));
        }
    }
}

TEST_CASE("apply_augment matches the reference warp") {
    const ImageBuffer gray = random_image(9, 7, 1, 45);
    const ImageBuffer rgb = random_image(8, 11, 3, 46);

    std::vector<AugmentParams> cases;
    AugmentParams p;
    p.angle_deg = 30.0;
    cases.push_back(p); // pure rotation
    p = AugmentParams{};
    p.shear_deg = 10.0;
    cases.push_back(p); // pure shear
    p = AugmentParams{};
    p.zoom = 1.25;
    cases.push_back(p); // pure zoom
    p = AugmentParams{};
    p.dx = 1.7;
    p.dy = -2.3;
    cases.push_back(p); // pure shift
    p.angle_deg = -12.5;
    p.shear_deg = 4.0;
    p.zoom = 0.85;
    p.brightness = 1.07;
    cases.push_back(p); // everything at once

    for (const auto& params : cases) {
        CAPTURE(params.angle_deg);
        CAPTURE(params.zoom);
        CHECK(max_abs_diff(wae::apply_augment(gray, params), reference_warp(gray, params)) <
              1e-9);
        CHECK(max_abs_diff(wae::apply_augment(rgb, params), reference_warp(rgb, params)) <
              1e-9);
    }

    // Randomized parameter draws stay in agreement too.
    AugmentConfig cfg;
    cfg.rotation_deg = 25.0;
    cfg.shift_frac = 0.2;
    cfg.shear_deg = 15.0;
    cfg.zoom_frac = 0.3;
    wae::Rng rng(47);
    for (int trial = 0; trial < 25; ++trial) {
        const AugmentParams draw = wae::sample_params(cfg, gray.height, gray.width, rng);
        CHECK(max_abs_diff(wae::apply_augment(gray, draw), reference_warp(gray, draw)) < 1e-9);
    }
}

TEST_CASE("apply_augment keeps outputs inside [0,1]") {
    const ImageBuffer img = random_image(12, 12, 1, 48);
    AugmentConfig cfg;
    cfg.rotation_deg = 40.0;
    cfg.shift_frac = 0.3;
    cfg.shear_deg = 20.0;
    cfg.zoom_frac = 0.4;
    cfg.brightness_lo = 0.5;
    cfg.brightness_hi = 1.5;
    wae::Rng rng(49);
    for (int trial = 0; trial < 30; ++trial) {
        const AugmentParams p = wae::sample_params(cfg, img.height, img.width, rng);
        const ImageBuffer out = wae::apply_augment(img, p);
        CHECK((out.pixels >= 0.0).all());
        CHECK((out.pixels <= 1.0).all());
    }
}

TEST_CASE("apply_augment rejects unnormalized input") {
    const ImageBuffer raw = ImageBuffer::constant(2, 2, 1, 3.0);
    CHECK_THROWS_AS(wae::apply_augment(raw, AugmentParams{}), DomainError);
}

TEST_CASE("augment_batch is deterministic and shaped as promised") {
    const std::vector<ImageBuffer> inputs{random_image(6, 6, 1, 50), random_image(6, 6, 1, 51)};
    AugmentConfig cfg;
    const auto first = wae::augment_batch(inputs, cfg, 99, 3);
    const auto second = wae::augment_batch(inputs, cfg, 99, 3);
    REQUIRE(first.size() == 6);
    REQUIRE(second.size() == 6);
    for (std::size_t i = 0; i < first.size(); ++i) {
        CHECK(same_pixels(first[i], second[i]));
    }

    // A different seed changes the draws.
    const auto reseeded = wae::augment_batch(inputs, cfg, 100, 3);
    bool any_diff = false;
    for (std::size_t i = 0; i < first.size(); ++i) {
        if (!same_pixels(first[i], reseeded[i])) any_diff = true;
    }
    CHECK(any_diff);

    // Variants of image 0 do not depend on what follows it in the batch.
    const auto solo = wae::augment_batch({inputs[0]}, cfg, 99, 3);
    REQUIRE(solo.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(same_pixels(solo[k], first[k]));
    }

    CHECK(wae::augment_batch(inputs, cfg, 99, 0).empty());

    // Zero-range config reproduces the inputs exactly.
    const auto copies = wae::augment_batch(inputs, zero_config(), 7, 2);
    CHECK(same_pixels(copies[0], inputs[0]));
    CHECK(same_pixels(copies[1], inputs[0]));
    CHECK(same_pixels(copies[2], inputs[1]));
    CHECK(same_pixels(copies[3], inputs[1]));
}

TEST_CASE("netpbm round-trips integer-valued buffers") {
    ScopedTempDir dir;
    ImageBuffer gray = ImageBuffer::constant(3, 2, 1, 0.0);
    for (Eigen::Index i = 0; i < gray.pixels.size(); ++i) {
        gray.pixels[i] = static_cast<double>(40 * i);
    }
    const auto pgm = dir.file("img.pgm");
    wae::write_netpbm(pgm, gray);
    const ImageBuffer back = wae::read_netpbm(pgm);
    CHECK(same_pixels(gray, back));

    ImageBuffer rgb = ImageBuffer::constant(2, 2, 3, 0.0);
    for (Eigen::Index i = 0; i < rgb.pixels.size(); ++i) {
        rgb.pixels[i] = static_cast<double>(255 - 20 * i);
    }
    const auto ppm = dir.file("img.ppm");
    wae::write_netpbm(ppm, rgb);
    CHECK(same_pixels(rgb, wae::read_netpbm(ppm)));
}

TEST_CASE("write_netpbm rounds half up to bytes") {
    ScopedTempDir dir;
    ImageBuffer img = ImageBuffer::constant(1, 4, 1, 0.0);
    img.at(0, 0, 0) = 0.4;
    img.at(0, 1, 0) = 0.5;
    img.at(0, 2, 0) = 254.5;
    img.at(0, 3, 0) = 127.2;
    const auto path = dir.file("round.pgm");
    wae::write_netpbm(path, img);
    const ImageBuffer back = wae::read_netpbm(path);
    CHECK(back.at(0, 0, 0) == 0.0);
    CHECK(back.at(0, 1, 0) == 1.0);
    CHECK(back.at(0, 2, 0) == 255.0);
    CHECK(back.at(0, 3, 0) == 127.0);
}

TEST_CASE("read_netpbm accepts comments and flexible whitespace") {
    ScopedTempDir dir;
    const auto path = dir.file("weird.pgm");
    std::ofstream out(path, std::ios::binary);
    out << "P5\n# a comment line\n 2 # trailing comment\n1\n255\n";
    out.put(static_cast<char>(7));
    out.put(static_cast<char>(200));
    out.close();
    const ImageBuffer img = wae::read_netpbm(path);
    CHECK(img.height == 1);
    CHECK(img.width == 2);
    CHECK(img.channels == 1);
    CHECK(img.at(0, 0, 0) == 7.0);
    CHECK(img.at(0, 1, 0) == 200.0);
}

TEST_CASE("read_netpbm rejects malformed files") {
    ScopedTempDir dir;
    const auto write_bytes = [&](const std::string& name, const std::string& data) {
        const auto path = dir.file(name);
        std::ofstream out(path, std::ios::binary);
        out << data;
        return path;
    };
    CHECK_THROWS_AS(wae::read_netpbm(dir.file("missing.pgm")), FormatError);
    CHECK_THROWS_AS(wae::read_netpbm(write_bytes("magic.pgm", "P4 1 1 255\nx")), FormatError);
    CHECK_THROWS_AS(wae::read_netpbm(write_bytes("maxval.pgm", "P5 1 1 65535\nxx")),
                    FormatError);
    CHECK_THROWS_AS(wae::read_netpbm(write_bytes("short.pgm", "P5 2 2 255\nab")), FormatError);
    CHECK_THROWS_AS(wae::read_netpbm(write_bytes("header.pgm", "P5 2")), FormatError);
    CHECK_THROWS_AS(wae::read_netpbm(write_bytes("dims.pgm", "P5 0 1 255\n")), FormatError);
}

TEST_CASE("write_netpbm validates its input") {
    ScopedTempDir dir;
    const ImageBuffer out_of_range = ImageBuffer::constant(1, 1, 1, 300.0);
    CHECK_THROWS_AS(wae::write_netpbm(dir.file("x.pgm"), out_of_range), DomainError);
    ImageBuffer bad_channels = ImageBuffer::constant(1, 1, 1, 0.0);
    bad_channels.channels = 2;
    CHECK_THROWS_AS(wae::write_netpbm(dir.file("y.pgm"), bad_channels), DomainError);
}

} // TEST_SUITE
