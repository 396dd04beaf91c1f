#include "vball/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace vball {

Image to_gray(const Image& rgb) {
    if (rgb.channels == 1) return rgb;
    if (rgb.channels != 3) throw DimensionMismatch("to_gray expects 1 or 3 channels");
    Image g(rgb.width, rgb.height, 1);
    for (int y = 0; y < rgb.height; ++y) {
        for (int x = 0; x < rgb.width; ++x) {
            g.at(x, y) = 0.299f * rgb.at(x, y, 0) + 0.587f * rgb.at(x, y, 1) +
                         0.114f * rgb.at(x, y, 2);
        }
    }
    return g;
}

namespace {

int read_pnm_token(std::istream& in) {
    // skip whitespace and '#' comments
    int ch = in.get();
    while (ch != EOF) {
        if (ch == '#') {
            while (ch != EOF && ch != '\n') ch = in.get();
        } else if (!std::isspace(ch)) {
            break;
        }
        ch = in.get();
    }
    if (ch == EOF) throw ParseError("unexpected end of PNM header");
    int value = 0;
    bool any = false;
    while (ch != EOF && std::isdigit(ch)) {
        value = value * 10 + (ch - '0');
        any = true;
        ch = in.get();
    }
    if (!any) throw ParseError("malformed PNM header");
    return value;
}

Image load_pnm(const std::string& path, int channels) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    const char want = channels == 3 ? '6' : '5';
    if (m0 != 'P' || m1 != want)
        throw ParseError(path + ": expected P" + std::string(1, want) + " magic");
    const int w = read_pnm_token(in);
    const int h = read_pnm_token(in);
    const int maxval = read_pnm_token(in);
    if (w <= 0 || h <= 0) throw ParseError(path + ": bad dimensions");
    if (maxval != 255) throw ParseError(path + ": only maxval 255 supported");
    std::vector<unsigned char> raw(static_cast<std::size_t>(w) * h * channels);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size())
        throw ParseError(path + ": truncated pixel data");
    Image img(w, h, channels);
    for (std::size_t i = 0; i < raw.size(); ++i) img.data[i] = raw[i] / 255.0f;
    return img;
}

void save_pnm(const std::string& path, const Image& img, int channels) {
    if (img.channels != channels) throw DimensionMismatch("save_pnm channel count");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << (channels == 3 ? "P6\n" : "P5\n") << img.width << " " << img.height << "\n255\n";
    std::vector<unsigned char> raw(img.data.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const float v = std::clamp(img.data[i], 0.0f, 1.0f);
        raw[i] = static_cast<unsigned char>(std::lround(v * 255.0f));
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) throw IoError("short write to " + path);
}

}  // namespace

Image load_ppm(const std::string& path) { return load_pnm(path, 3); }
void save_ppm(const std::string& path, const Image& img) { save_pnm(path, img, 3); }
Image load_pgm(const std::string& path) { return load_pnm(path, 1); }
void save_pgm(const std::string& path, const Image& img) { save_pnm(path, img, 1); }

float sample_bilinear(const Image& img, float x, float y, int c) {
    const float fx = std::clamp(x, 0.0f, static_cast<float>(img.width - 1));
    const float fy = std::clamp(y, 0.0f, static_cast<float>(img.height - 1));
    const int x0 = static_cast<int>(fx);
    const int y0 = static_cast<int>(fy);
    const int x1 = std::min(x0 + 1, img.width - 1);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const float ax = fx - x0;
    const float ay = fy - y0;
    const float top = img.at(x0, y0, c) * (1.0f - ax) + img.at(x1, y0, c) * ax;
    const float bot = img.at(x0, y1, c) * (1.0f - ax) + img.at(x1, y1, c) * ax;
    return top * (1.0f - ay) + bot * ay;
}

Image resample_rect(const Image& img, double rx, double ry, double rw, double rh,
                    int out_w, int out_h) {
    if (out_w <= 0 || out_h <= 0 || rw <= 0.0 || rh <= 0.0)
        throw EmptyPatch("resample_rect");
    Image out(out_w, out_h, img.channels);
    for (int y = 0; y < out_h; ++y) {
        // map output pixel centers onto the source rect
        const float sy = static_cast<float>(ry + (y + 0.5) * rh / out_h - 0.5);
        for (int x = 0; x < out_w; ++x) {
            const float sx = static_cast<float>(rx + (x + 0.5) * rw / out_w - 0.5);
            for (int c = 0; c < img.channels; ++c) {
                out.at(x, y, c) = sample_bilinear(img, sx, sy, c);
            }
        }
    }
    return out;
}

}  // namespace vball
