#pragma once

#include <jpeglib.h>
#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "lacnn/errors.hpp"
#include "lacnn/image.hpp"

namespace lacnn {

namespace detail {

struct PngErrorCtx {
    std::jmp_buf jump;
    std::string message;
};

inline void png_error_fn(png_structp png, png_const_charp msg) {
    auto* ctx = static_cast<PngErrorCtx*>(png_get_error_ptr(png));
    ctx->message = msg ? msg : "libpng error";
    std::longjmp(ctx->jump, 1);
}

inline void png_warn_fn(png_structp, png_const_charp) {}

struct JpegErrorMgr {
    jpeg_error_mgr pub;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

inline void jpeg_error_exit(j_common_ptr cinfo) {
    auto* mgr = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, mgr->message);
    std::longjmp(mgr->jump, 1);
}

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};

// 8-bit interleaved RGB rows decoded from a file.
struct DecodedRgb8 {
    int height = 0;
    int width = 0;
    std::vector<uint8_t> pixels; // h*w*3
};

inline DecodedRgb8 decode_png_rgb8(const std::string& path) {
    std::unique_ptr<std::FILE, FileCloser> file(std::fopen(path.c_str(), "rb"));
    if (!file) throw DataError("file not found: " + path);

    PngErrorCtx ctx;
    png_structp png =
        png_create_read_struct(PNG_LIBPNG_VER_STRING, &ctx, png_error_fn, png_warn_fn);
    if (!png) throw DataError("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw DataError("libpng init failed");
    }

    if (setjmp(ctx.jump)) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw DataError("PNG decode failure for " + path + ": " + ctx.message);
    }

    png_init_io(png, file.get());
    // Normalize every PNG variant (palette, gray, 16-bit, alpha) to 8-bit RGB.
    png_read_png(png, info,
                 PNG_TRANSFORM_STRIP_16 | PNG_TRANSFORM_PACKING | PNG_TRANSFORM_EXPAND |
                     PNG_TRANSFORM_STRIP_ALPHA | PNG_TRANSFORM_GRAY_TO_RGB,
                 nullptr);

    DecodedRgb8 out;
    out.height = static_cast<int>(png_get_image_height(png, info));
    out.width = static_cast<int>(png_get_image_width(png, info));
    if (out.height == 0 || out.width == 0) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw DataError("zero-dimension image: " + path);
    }
    if (png_get_channels(png, info) != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw DataError("PNG decode failure for " + path + ": unexpected channel count");
    }
    png_bytepp rows = png_get_rows(png, info);
    out.pixels.resize(static_cast<size_t>(out.height) * out.width * 3);
    for (int y = 0; y < out.height; ++y)
        std::memcpy(out.pixels.data() + static_cast<size_t>(y) * out.width * 3, rows[y],
                    static_cast<size_t>(out.width) * 3);
    png_destroy_read_struct(&png, &info, nullptr);
    return out;
}

inline DecodedRgb8 decode_jpeg_rgb8(const std::string& path) {
    std::unique_ptr<std::FILE, FileCloser> file(std::fopen(path.c_str(), "rb"));
    if (!file) throw DataError("file not found: " + path);

    jpeg_decompress_struct cinfo;
    JpegErrorMgr err;
    cinfo.err = jpeg_std_error(&err.pub);
    err.pub.error_exit = jpeg_error_exit;
    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw DataError("JPEG decode failure for " + path + ": " + err.message);
    }

    jpeg_create_decompress(&cinfo);
    jpeg_stdio_src(&cinfo, file.get());
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);

    DecodedRgb8 out;
    out.height = static_cast<int>(cinfo.output_height);
    out.width = static_cast<int>(cinfo.output_width);
    if (out.height == 0 || out.width == 0) {
        jpeg_destroy_decompress(&cinfo);
        throw DataError("zero-dimension image: " + path);
    }
    out.pixels.resize(static_cast<size_t>(out.height) * out.width * 3);
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = out.pixels.data() + static_cast<size_t>(cinfo.output_scanline) * out.width * 3;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return out;
}

} // namespace detail

/// Decodes a PNG or JPEG file (detected by magic bytes) into an RGB tensor at
/// native resolution, values normalized to [0,1] by division by 255.
inline ImageTensor decode_image_file(const std::string& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw DataError("file not found: " + path);
    unsigned char magic[4] = {0, 0, 0, 0};
    probe.read(reinterpret_cast<char*>(magic), 4);
    probe.close();

    detail::DecodedRgb8 raw;
    if (magic[0] == 0x89 && magic[1] == 'P' && magic[2] == 'N' && magic[3] == 'G') {
        raw = detail::decode_png_rgb8(path);
    } else if (magic[0] == 0xFF && magic[1] == 0xD8) {
        raw = detail::decode_jpeg_rgb8(path);
    } else {
        throw DataError("decode failure, not a PNG or JPEG file: " + path);
    }

    ImageTensor img = ImageTensor::rgb(raw.height, raw.width);
    const size_t n = raw.pixels.size();
    for (size_t i = 0; i < n; ++i) img.data()[i] = static_cast<float>(raw.pixels[i]) / 255.0f;
    return img;
}

/// Loads and scales to a square target via bilinear resampling (aspect ratio
/// is not preserved).
inline ImageTensor load_image(const std::string& path, int target_size) {
    return resize_bilinear(decode_image_file(path), target_size, target_size);
}

/// Writes 8-bit PNG from interleaved bytes; channels must be 1 (gray) or 3 (RGB).
inline void write_png(const std::string& path, const uint8_t* pixels, int height, int width,
                      int channels) {
    if (height <= 0 || width <= 0) throw std::invalid_argument("write_png: empty image");
    if (channels != 1 && channels != 3)
        throw std::invalid_argument("write_png: channels must be 1 or 3");

    std::unique_ptr<std::FILE, detail::FileCloser> file(std::fopen(path.c_str(), "wb"));
    if (!file) throw DataError("cannot open for writing: " + path);

    detail::PngErrorCtx ctx;
    png_structp png =
        png_create_write_struct(PNG_LIBPNG_VER_STRING, &ctx, detail::png_error_fn, detail::png_warn_fn);
    if (!png) throw DataError("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw DataError("libpng init failed");
    }
    if (setjmp(ctx.jump)) {
        png_destroy_write_struct(&png, &info);
        throw DataError("PNG encode failure for " + path + ": " + ctx.message);
    }

    png_init_io(png, file.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
                 channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    std::vector<png_bytep> rows(static_cast<size_t>(height));
    for (int y = 0; y < height; ++y)
        rows[y] = const_cast<png_bytep>(pixels + static_cast<size_t>(y) * width * channels);
    png_set_rows(png, info, rows.data());
    png_write_png(png, info, PNG_TRANSFORM_IDENTITY, nullptr);
    png_destroy_write_struct(&png, &info);
}

/// Writes the RGB channels of a tensor as an 8-bit PNG ([0,1] -> 0..255).
inline void write_png_rgb(const std::string& path, const ImageTensor& img) {
    std::vector<uint8_t> bytes(static_cast<size_t>(img.height()) * img.width() * 3);
    size_t i = 0;
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            for (int c = 0; c < 3; ++c) {
                const float v = std::clamp(img.at(y, x, c), 0.0f, 1.0f);
                bytes[i++] = static_cast<uint8_t>(std::lround(v * 255.0f));
            }
    write_png(path, bytes.data(), img.height(), img.width(), 3);
}

} // namespace lacnn
