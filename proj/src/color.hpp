// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the reswd project.

#pragma once

#include "optimize.hpp"

#include <array>
#include <span>
#include <string>
#include <vector>

namespace reswd {

/// Rec. 709 luma weights.
inline constexpr std::array<double, 3> kLumaWeights = {0.2126, 0.7152, 0.0722};

double luma(std::span<const double, 3> rgb);

/// ASC CDL: per-channel slope/offset/power and a scalar saturation.
struct CdlParams {
    std::array<double, 3> slope = {1.0, 1.0, 1.0};
    std::array<double, 3> offset = {0.0, 0.0, 0.0};
    std::array<double, 3> power = {1.0, 1.0, 1.0};
    double saturation = 1.0;

    static CdlParams identity() { return {}; }
    void validate() const;
    /// [slope(3), offset(3), power(3), saturation]
    std::array<double, 10> to_array() const;
    static CdlParams from_array(std::span<const double, 10> v);

    bool operator==(const CdlParams &) const = default;
};

/// H x W x 3 interleaved RGB. Values are sRGB-encoded unless `linear`.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;
    bool linear = false;

    RgbImage() = default;
    RgbImage(int w, int h);

    std::size_t pixel_count() const noexcept {
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }
    std::span<double, 3> px(std::size_t i) {
        return std::span<double, 3>(pixels.data() + 3 * i, 3);
    }
    std::span<const double, 3> px(std::size_t i) const {
        return std::span<const double, 3>(pixels.data() + 3 * i, 3);
    }
    bool empty() const noexcept { return pixels.empty(); }
    /// Copy with every channel clamped to [0, 1].
    RgbImage clamped() const;
};

/// L* in [0, 100], a*, b* unbounded.
struct LabImage {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;
};

/// Per-pixel CDL with optional Jacobian d out / d [slope, offset, power, sat]
/// (row-major 3 x 10). s*x + o is clamped at 0 before the power, with zero
/// gradient through the clamp; the output is not clamped.
void cdl_pixel(std::span<const double, 3> rgb, const CdlParams &cdl, std::span<double, 3> out,
               double *jacobian = nullptr);

/// CDL over a whole image; result is unclamped (clamp at write-out).
RgbImage apply_cdl(const RgbImage &img, const CdlParams &cdl);

/// sRGB (D65) -> CIELAB, optional 3 x 3 row-major Jacobian d lab / d rgb.
void srgb_to_lab_pixel(std::span<const double, 3> rgb, std::span<double, 3> lab,
                       double *jacobian = nullptr);
void lab_to_srgb_pixel(std::span<const double, 3> lab, std::span<double, 3> rgb);

LabImage srgb_to_lab(const RgbImage &img);
RgbImage lab_to_srgb(const LabImage &img);

/// Aspect-preserving area-average downscale so max(w, h) <= max_dim.
RgbImage resize_max_dim(const RgbImage &img, int max_dim = 128);

/// Peak signal-to-noise ratio in dB of clamped images; +inf when identical.
double psnr(const RgbImage &a, const RgbImage &b);

std::string cdl_xml_write(const CdlParams &cdl);
/// Throws Error(Input) naming the offending node.
CdlParams cdl_xml_read(const std::string &text);

/// 8- or 16-bit PNG (gray, RGB, palette; alpha dropped) to [0, 1] RGB.
RgbImage read_png(const std::string &path);
/// Writes the clamped image with 8 or 16 bits per channel.
void write_png(const std::string &path, const RgbImage &img, int bit_depth = 8);

/// Lab(CDL(source)) as a function of unconstrained parameters
/// [log slope(3), offset(3), log power(3), saturation]; saturation enters
/// as max(value, 0).
class CdlLabTransform : public ParametricTransform {
public:
    explicit CdlLabTransform(const RgbImage &source);

    std::size_t num_params() const override { return 10; }
    SampleSet apply(std::span<const double> params) const override;
    std::vector<double> pullback(std::span<const double> params,
                                 const SampleSet &grad_out) const override;

    static std::vector<double> encode(const CdlParams &cdl);
    static CdlParams decode(std::span<const double> params);

private:
    RgbImage source_;
};

struct ColorMatchOptions {
    int steps = 150;
    int max_dim = 128;
    OptimizerSpec optimizer{OptimizerSpec::Kind::Adam, 2e-2};
    Method method = Method::Reswd;
};

struct ColorMatchResult {
    CdlParams cdl;
    MatchReport report;
};

ColorMatchResult color_match(const RgbImage &source, const RgbImage &reference,
                             const ReswdConfig &cfg, const ColorMatchOptions &opts = {});

SampleSet lab_samples(const RgbImage &img);

}  // namespace reswd
