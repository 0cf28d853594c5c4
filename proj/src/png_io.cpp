// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the reswd project.

#include "color.hpp"

#include "error.hpp"

#include <fmt/format.h>
#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <memory>

namespace reswd {

namespace {

struct FileCloser {
    void operator()(std::FILE *f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// libpng reports errors through longjmp; the message is stashed here first.
struct PngErrorState {
    char message[256] = {};
};

void on_error(png_structp png, png_const_charp msg) {
    auto *state = static_cast<PngErrorState *>(png_get_error_ptr(png));
    std::snprintf(state->message, sizeof state->message, "%s", msg);
    png_longjmp(png, 1);
}

void on_warning(png_structp, png_const_charp) {}

}  // namespace

RgbImage read_png(const std::string &path) {
    FilePtr file(std::fopen(path.c_str(), "rb"));
    if (!file)
        fail(ErrorKind::Input, fmt::format("cannot open '{}'", path));
    png_byte sig[8];
    if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
        fail(ErrorKind::Input, fmt::format("'{}' is not a PNG file", path));

    PngErrorState err;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, on_error, on_warning);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        fail(ErrorKind::Input, "libpng: out of memory");
    }
    std::vector<png_byte> data;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(ErrorKind::Input, fmt::format("'{}': {}", path, err.message));
    }
    png_init_io(png, file.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    const png_byte color = png_get_color_type(png, info);
    const png_byte depth = png_get_bit_depth(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE)
        png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS))
        png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    if (depth == 16)
        png_set_swap(png);  // host little-endian order for uint16 access
    png_read_update_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    const bool sixteen = png_get_bit_depth(png, info) == 16;
    const std::size_t stride = png_get_rowbytes(png, info);
    data.resize(stride * h);
    rows.resize(h);
    for (png_uint_32 y = 0; y < h; ++y)
        rows[y] = data.data() + y * stride;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    RgbImage img(static_cast<int>(w), static_cast<int>(h));
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t i = 0; i < static_cast<std::size_t>(w) * 3; ++i) {
            double v;
            if (sixteen) {
                std::uint16_t s;
                std::memcpy(&s, rows[y] + 2 * i, 2);
                v = s / 65535.0;
            } else {
                v = rows[y][i] / 255.0;
            }
            img.pixels[y * w * 3 + i] = v;
        }
    }
    return img;
}

void write_png(const std::string &path, const RgbImage &img, int bit_depth) {
    require(bit_depth == 8 || bit_depth == 16, "write_png: bit depth must be 8 or 16");
    require(!img.empty(), "write_png: empty image");
    const auto w = static_cast<std::size_t>(img.width);
    const auto h = static_cast<std::size_t>(img.height);
    const std::size_t bytes = static_cast<std::size_t>(bit_depth / 8);
    const double peak = bit_depth == 16 ? 65535.0 : 255.0;
    std::vector<png_byte> data(w * h * 3 * bytes);
    for (std::size_t i = 0; i < w * h * 3; ++i) {
        const double v = std::clamp(img.pixels[i], 0.0, 1.0);
        const auto q = static_cast<unsigned>(std::lround(v * peak));
        if (bytes == 2) {
            data[2 * i] = static_cast<png_byte>(q >> 8);  // PNG is big-endian
            data[2 * i + 1] = static_cast<png_byte>(q & 0xff);
        } else {
            data[i] = static_cast<png_byte>(q);
        }
    }
    std::vector<png_bytep> rows(h);
    for (std::size_t y = 0; y < h; ++y)
        rows[y] = data.data() + y * w * 3 * bytes;

    FilePtr file(std::fopen(path.c_str(), "wb"));
    if (!file)
        fail(ErrorKind::Output, fmt::format("cannot write '{}'", path));
    PngErrorState err;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, on_error, on_warning);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        fail(ErrorKind::Output, "libpng: out of memory");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail(ErrorKind::Output, fmt::format("'{}': {}", path, err.message));
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), bit_depth,
                 PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    if (std::fflush(file.get()) != 0)
        fail(ErrorKind::Output, fmt::format("cannot write '{}'", path));
}

}  // namespace reswd
