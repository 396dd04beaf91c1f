#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "vball/errors.hpp"

namespace vball {

// Row-major, channel-interleaved float image. Pixel values are normalized to
// [0,1]; 8-bit files map k -> k/255.
struct Image {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<float> data;

    Image() = default;
    Image(int w, int h, int c, float fill = 0.0f)
        : width(w), height(h), channels(c),
          data(static_cast<std::size_t>(w) * h * c, fill) {}

    float& at(int x, int y, int c = 0) {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    float at(int x, int y, int c = 0) const {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }

    bool same_shape(const Image& o) const {
        return width == o.width && height == o.height && channels == o.channels;
    }
    std::size_t pixel_count() const {
        return static_cast<std::size_t>(width) * height;
    }
};

inline void require_same_shape(const Image& a, const Image& b, const char* what) {
    if (!a.same_shape(b)) throw DimensionMismatch(what);
}

// ITU-R 601 luma
Image to_gray(const Image& rgb);

// Binary PPM (P6) / PGM (P5), 8-bit, '#' comments allowed in the header.
Image load_ppm(const std::string& path);
void save_ppm(const std::string& path, const Image& img);
Image load_pgm(const std::string& path);
void save_pgm(const std::string& path, const Image& img);

// Bilinear sample with clamped borders, per channel.
float sample_bilinear(const Image& img, float x, float y, int c);

// Resample an axis-aligned source rectangle to out_w x out_h.
Image resample_rect(const Image& img, double rx, double ry, double rw, double rh,
                    int out_w, int out_h);

}  // namespace vball
