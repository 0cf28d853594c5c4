// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the reswd project.

#include "color.hpp"

#include "error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace reswd {

double luma(std::span<const double, 3> rgb) {
    return kLumaWeights[0] * rgb[0] + kLumaWeights[1] * rgb[1] + kLumaWeights[2] * rgb[2];
}

void CdlParams::validate() const {
    for (int c = 0; c < 3; ++c) {
        require(slope[c] > 0.0 && std::isfinite(slope[c]), "CDL: slope must be positive");
        require(power[c] > 0.0 && std::isfinite(power[c]), "CDL: power must be positive");
        require(std::isfinite(offset[c]), "CDL: offset must be finite");
    }
    require(saturation >= 0.0 && std::isfinite(saturation), "CDL: saturation must be >= 0");
}

std::array<double, 10> CdlParams::to_array() const {
    return {slope[0],  slope[1], slope[2], offset[0], offset[1],
            offset[2], power[0], power[1], power[2],  saturation};
}

CdlParams CdlParams::from_array(std::span<const double, 10> v) {
    CdlParams p;
    for (int c = 0; c < 3; ++c) {
        p.slope[c] = v[c];
        p.offset[c] = v[3 + c];
        p.power[c] = v[6 + c];
    }
    p.saturation = v[9];
    return p;
}

RgbImage::RgbImage(int w, int h) : width(w), height(h) {
    require(w >= 1 && h >= 1, "RgbImage: width and height must be >= 1");
    pixels.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3, 0.0);
}

RgbImage RgbImage::clamped() const {
    RgbImage out = *this;
    for (double &v : out.pixels)
        v = std::clamp(v, 0.0, 1.0);
    return out;
}

void cdl_pixel(std::span<const double, 3> rgb, const CdlParams &cdl, std::span<double, 3> out,
               double *jacobian) {
    double g[3], dg_ds[3], dg_do[3], dg_dp[3];
    for (int c = 0; c < 3; ++c) {
        const double pre = cdl.slope[c] * rgb[c] + cdl.offset[c];
        const double v = pre > 0.0 ? pre : 0.0;
        g[c] = std::pow(v, cdl.power[c]);
        if (jacobian) {
            if (v > 0.0) {
                const double d = cdl.power[c] * std::pow(v, cdl.power[c] - 1.0);
                dg_ds[c] = d * rgb[c];
                dg_do[c] = d;
                dg_dp[c] = g[c] * std::log(v);
            } else {
                dg_ds[c] = dg_do[c] = dg_dp[c] = 0.0;
            }
        }
    }
    const double lam = cdl.saturation;
    const double l = luma(std::span<const double, 3>(g, 3));
    // lam * g + (1 - lam) * L keeps lam == 1 bit-exact
    for (int c = 0; c < 3; ++c)
        out[c] = lam * g[c] + (1.0 - lam) * l;
    if (!jacobian)
        return;
    for (int c = 0; c < 3; ++c) {
        double *row = jacobian + 10 * c;
        for (int k = 0; k < 3; ++k) {
            const double dout_dg = (c == k ? lam : 0.0) + (1.0 - lam) * kLumaWeights[k];
            row[k] = dout_dg * dg_ds[k];
            row[3 + k] = dout_dg * dg_do[k];
            row[6 + k] = dout_dg * dg_dp[k];
        }
        row[9] = g[c] - l;
    }
}

RgbImage apply_cdl(const RgbImage &img, const CdlParams &cdl) {
    cdl.validate();
    RgbImage out = img;
    for (std::size_t i = 0; i < img.pixel_count(); ++i)
        cdl_pixel(img.px(i), cdl, out.px(i));
    return out;
}

namespace {

// IEC 61966-2-1 linear sRGB -> XYZ (D65).
constexpr double kM[3][3] = {{0.4124564, 0.3575761, 0.1804375},
                             {0.2126729, 0.7151522, 0.0721750},
                             {0.0193339, 0.1191920, 0.9503041}};

// Reference white = M * (1, 1, 1) so that RGB white lands on the L* axis.
constexpr double kWhite[3] = {kM[0][0] + kM[0][1] + kM[0][2], kM[1][0] + kM[1][1] + kM[1][2],
                              kM[2][0] + kM[2][1] + kM[2][2]};

constexpr double kDelta = 6.0 / 29.0;

struct Inverse3 {
    double m[3][3];
    Inverse3() {
        const double det = kM[0][0] * (kM[1][1] * kM[2][2] - kM[1][2] * kM[2][1]) -
                           kM[0][1] * (kM[1][0] * kM[2][2] - kM[1][2] * kM[2][0]) +
                           kM[0][2] * (kM[1][0] * kM[2][1] - kM[1][1] * kM[2][0]);
        m[0][0] = (kM[1][1] * kM[2][2] - kM[1][2] * kM[2][1]) / det;
        m[0][1] = (kM[0][2] * kM[2][1] - kM[0][1] * kM[2][2]) / det;
        m[0][2] = (kM[0][1] * kM[1][2] - kM[0][2] * kM[1][1]) / det;
        m[1][0] = (kM[1][2] * kM[2][0] - kM[1][0] * kM[2][2]) / det;
        m[1][1] = (kM[0][0] * kM[2][2] - kM[0][2] * kM[2][0]) / det;
        m[1][2] = (kM[0][2] * kM[1][0] - kM[0][0] * kM[1][2]) / det;
        m[2][0] = (kM[1][0] * kM[2][1] - kM[1][1] * kM[2][0]) / det;
        m[2][1] = (kM[0][1] * kM[2][0] - kM[0][0] * kM[2][1]) / det;
        m[2][2] = (kM[0][0] * kM[1][1] - kM[0][1] * kM[1][0]) / det;
    }
};

const Inverse3 &inverse_m() {
    static const Inverse3 inv;
    return inv;
}

double decode(double c) { return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4); }

double decode_deriv(double c) {
    return c <= 0.04045 ? 1.0 / 12.92 : 2.4 / 1.055 * std::pow((c + 0.055) / 1.055, 1.4);
}

double encode(double l) {
    return l <= 0.0031308 ? 12.92 * l : 1.055 * std::pow(l, 1.0 / 2.4) - 0.055;
}

double lab_f(double t) {
    return t > kDelta * kDelta * kDelta ? std::cbrt(t) : t / (3.0 * kDelta * kDelta) + 4.0 / 29.0;
}

double lab_f_deriv(double t) {
    if (t > kDelta * kDelta * kDelta) {
        const double r = std::cbrt(t);
        return 1.0 / (3.0 * r * r);
    }
    return 1.0 / (3.0 * kDelta * kDelta);
}

double lab_f_inv(double f) {
    return f > kDelta ? f * f * f : 3.0 * kDelta * kDelta * (f - 4.0 / 29.0);
}

}  // namespace

void srgb_to_lab_pixel(std::span<const double, 3> rgb, std::span<double, 3> lab, double *jacobian) {
    const double lin[3] = {decode(rgb[0]), decode(rgb[1]), decode(rgb[2])};
    double t[3], f[3];
    for (int r = 0; r < 3; ++r) {
        t[r] = (kM[r][0] * lin[0] + kM[r][1] * lin[1] + kM[r][2] * lin[2]) / kWhite[r];
        f[r] = lab_f(t[r]);
    }
    lab[0] = 116.0 * f[1] - 16.0;
    lab[1] = 500.0 * (f[0] - f[1]);
    lab[2] = 200.0 * (f[1] - f[2]);
    if (!jacobian)
        return;
    // d lab / d t, then d t / d rgb = diag(1/white) M diag(decode')
    double df[3];
    for (int r = 0; r < 3; ++r)
        df[r] = lab_f_deriv(t[r]);
    const double dlab_dt[3][3] = {{0.0, 116.0 * df[1], 0.0},
                                  {500.0 * df[0], -500.0 * df[1], 0.0},
                                  {0.0, 200.0 * df[1], -200.0 * df[2]}};
    double dt_drgb[3][3];
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            dt_drgb[r][c] = kM[r][c] / kWhite[r] * decode_deriv(rgb[c]);
    for (int i = 0; i < 3; ++i)
        for (int c = 0; c < 3; ++c) {
            double acc = 0.0;
            for (int r = 0; r < 3; ++r)
                acc += dlab_dt[i][r] * dt_drgb[r][c];
            jacobian[3 * i + c] = acc;
        }
}

void lab_to_srgb_pixel(std::span<const double, 3> lab, std::span<double, 3> rgb) {
    const double fy = (lab[0] + 16.0) / 116.0;
    const double fx = fy + lab[1] / 500.0;
    const double fz = fy - lab[2] / 200.0;
    const double xyz[3] = {kWhite[0] * lab_f_inv(fx), kWhite[1] * lab_f_inv(fy),
                           kWhite[2] * lab_f_inv(fz)};
    const auto &inv = inverse_m();
    for (int c = 0; c < 3; ++c)
        rgb[c] = encode(inv.m[c][0] * xyz[0] + inv.m[c][1] * xyz[1] + inv.m[c][2] * xyz[2]);
}

LabImage srgb_to_lab(const RgbImage &img) {
    LabImage out{img.width, img.height, std::vector<double>(img.pixels.size())};
    for (std::size_t i = 0; i < img.pixel_count(); ++i)
        srgb_to_lab_pixel(img.px(i), std::span<double, 3>(out.pixels.data() + 3 * i, 3));
    return out;
}

RgbImage lab_to_srgb(const LabImage &img) {
    RgbImage out(img.width, img.height);
    for (std::size_t i = 0; i < out.pixel_count(); ++i)
        lab_to_srgb_pixel(std::span<const double, 3>(img.pixels.data() + 3 * i, 3), out.px(i));
    return out;
}

namespace {

// Area-average resampling of `n_in` cells onto `n_out` cells.
struct BoxTap {
    int first;
    std::vector<double> weights;
};

std::vector<BoxTap> box_taps(int n_in, int n_out) {
    std::vector<BoxTap> taps(static_cast<std::size_t>(n_out));
    const double scale = static_cast<double>(n_in) / n_out;
    for (int o = 0; o < n_out; ++o) {
        const double lo = o * scale, hi = (o + 1) * scale;
        const int first = static_cast<int>(std::floor(lo));
        const int last = std::min(n_in - 1, static_cast<int>(std::ceil(hi)) - 1);
        BoxTap &t = taps[static_cast<std::size_t>(o)];
        t.first = first;
        for (int i = first; i <= last; ++i) {
            const double overlap = std::min(hi, i + 1.0) - std::max(lo, static_cast<double>(i));
            t.weights.push_back(std::max(overlap, 0.0) / scale);
        }
    }
    return taps;
}

}  // namespace

RgbImage resize_max_dim(const RgbImage &img, int max_dim) {
    require(max_dim >= 1, "resize_max_dim: max_dim must be >= 1");
    require(!img.empty(), "resize_max_dim: empty image");
    const int longest = std::max(img.width, img.height);
    if (longest <= max_dim)
        return img;
    const double s = static_cast<double>(max_dim) / longest;
    const int ow = std::max(1, static_cast<int>(std::lround(img.width * s)));
    const int oh = std::max(1, static_cast<int>(std::lround(img.height * s)));

    const auto tx = box_taps(img.width, ow);
    const auto ty = box_taps(img.height, oh);
    // horizontal pass into a (height x ow) buffer, then vertical
    std::vector<double> tmp(static_cast<std::size_t>(img.height) * ow * 3, 0.0);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < ow; ++x) {
            const BoxTap &t = tx[static_cast<std::size_t>(x)];
            double *dst = &tmp[(static_cast<std::size_t>(y) * ow + x) * 3];
            for (std::size_t k = 0; k < t.weights.size(); ++k) {
                const double *src =
                    &img.pixels[(static_cast<std::size_t>(y) * img.width + t.first + k) * 3];
                for (int c = 0; c < 3; ++c)
                    dst[c] += t.weights[k] * src[c];
            }
        }
    RgbImage out(ow, oh);
    out.linear = img.linear;
    for (int y = 0; y < oh; ++y) {
        const BoxTap &t = ty[static_cast<std::size_t>(y)];
        for (int x = 0; x < ow; ++x) {
            double *dst = &out.pixels[(static_cast<std::size_t>(y) * ow + x) * 3];
            for (std::size_t k = 0; k < t.weights.size(); ++k) {
                const double *src = &tmp[((t.first + k) * static_cast<std::size_t>(ow) + x) * 3];
                for (int c = 0; c < 3; ++c)
                    dst[c] += t.weights[k] * src[c];
            }
        }
    }
    return out;
}

double psnr(const RgbImage &a, const RgbImage &b) {
    require(a.width == b.width && a.height == b.height, "psnr: image sizes differ");
    require(!a.empty(), "psnr: empty image");
    double se = 0.0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i) {
        const double d = std::clamp(a.pixels[i], 0.0, 1.0) - std::clamp(b.pixels[i], 0.0, 1.0);
        se += d * d;
    }
    const double mse = se / static_cast<double>(a.pixels.size());
    if (mse == 0.0)
        return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

SampleSet lab_samples(const RgbImage &img) {
    require(!img.empty(), "lab_samples: empty image");
    const LabImage lab = srgb_to_lab(img);
    return SampleSet(img.pixel_count(), 3, lab.pixels);
}

CdlLabTransform::CdlLabTransform(const RgbImage &source) : source_(source) {
    require(!source.empty(), "CdlLabTransform: empty source image");
}

std::vector<double> CdlLabTransform::encode(const CdlParams &cdl) {
    cdl.validate();
    std::vector<double> p(10);
    for (int c = 0; c < 3; ++c) {
        p[c] = std::log(cdl.slope[c]);
        p[3 + c] = cdl.offset[c];
        p[6 + c] = std::log(cdl.power[c]);
    }
    p[9] = cdl.saturation;
    return p;
}

CdlParams CdlLabTransform::decode(std::span<const double> params) {
    require(params.size() == 10, "CdlLabTransform: expected 10 parameters");
    CdlParams cdl;
    for (int c = 0; c < 3; ++c) {
        cdl.slope[c] = std::exp(params[c]);
        cdl.offset[c] = params[3 + c];
        cdl.power[c] = std::exp(params[6 + c]);
    }
    cdl.saturation = std::max(params[9], 0.0);
    return cdl;
}

SampleSet CdlLabTransform::apply(std::span<const double> params) const {
    const CdlParams cdl = decode(params);
    std::vector<double> out(source_.pixels.size());
    double graded[3];
    for (std::size_t i = 0; i < source_.pixel_count(); ++i) {
        cdl_pixel(source_.px(i), cdl, std::span<double, 3>(graded, 3));
        srgb_to_lab_pixel(std::span<const double, 3>(graded, 3),
                          std::span<double, 3>(out.data() + 3 * i, 3));
    }
    SampleSet s(source_.pixel_count(), 3);
    std::copy(out.begin(), out.end(), s.values().begin());
    return s;
}

std::vector<double> CdlLabTransform::pullback(std::span<const double> params,
                                              const SampleSet &grad_out) const {
    require(grad_out.n_points() == source_.pixel_count() && grad_out.dim() == 3,
            "CdlLabTransform: gradient shape differs from the source image");
    const CdlParams cdl = decode(params);
    double graded[3], lab[3], j_cdl[30], j_lab[9];
    std::array<double, 10> g{};
    for (std::size_t i = 0; i < source_.pixel_count(); ++i) {
        const auto go = grad_out.row(i);
        if (go[0] == 0.0 && go[1] == 0.0 && go[2] == 0.0)
            continue;
        cdl_pixel(source_.px(i), cdl, std::span<double, 3>(graded, 3), j_cdl);
        srgb_to_lab_pixel(std::span<const double, 3>(graded, 3), std::span<double, 3>(lab, 3),
                          j_lab);
        // v = go^T J_lab, then g += v^T J_cdl
        double v[3];
        for (int c = 0; c < 3; ++c)
            v[c] = go[0] * j_lab[c] + go[1] * j_lab[3 + c] + go[2] * j_lab[6 + c];
        for (int k = 0; k < 10; ++k)
            g[k] += v[0] * j_cdl[k] + v[1] * j_cdl[10 + k] + v[2] * j_cdl[20 + k];
    }
    std::vector<double> out(10);
    for (int c = 0; c < 3; ++c) {
        out[c] = g[c] * cdl.slope[c];
        out[3 + c] = g[3 + c];
        out[6 + c] = g[6 + c] * cdl.power[c];
    }
    out[9] = params[9] > 0.0 ? g[9] : 0.0;
    return out;
}

ColorMatchResult color_match(const RgbImage &source, const RgbImage &reference,
                             const ReswdConfig &cfg, const ColorMatchOptions &opts) {
    require(!source.empty() && !reference.empty(), "color_match: images must be non-empty");
    require(opts.steps >= 1, "color_match: steps must be >= 1");
    const RgbImage src = resize_max_dim(source, opts.max_dim);
    const RgbImage ref = resize_max_dim(reference, opts.max_dim);

    const SampleSet target = lab_samples(ref);
    CdlLabTransform transform(src);
    FitResult fit = fit_transform(CdlLabTransform::encode(CdlParams::identity()), transform, target,
                                  cfg, opts.steps, opts.optimizer, opts.method);

    ColorMatchResult out;
    out.cdl = CdlLabTransform::decode(fit.params);
    out.report = std::move(fit.report);

    bool single_color = true;
    for (std::size_t i = 1; i < ref.pixel_count() && single_color; ++i)
        for (int c = 0; c < 3; ++c)
            single_color = single_color && ref.px(i)[c] == ref.px(0)[c];
    if (single_color)
        out.report.warnings.push_back(
            "reference is a single color; the fitted grade is not unique");
    return out;
}

}  // namespace reswd
