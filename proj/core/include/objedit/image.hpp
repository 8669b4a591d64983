#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "objedit/geometry.hpp"

namespace objedit::image {

// Interleaved 8-bit RGB raster, row-major.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;  // 3 * width * height bytes

    Image() = default;
    Image(int w, int h) : width(w), height(h), rgb(size_t(3) * w * h, 0) {}

    std::uint8_t* pixel(int x, int y) { return rgb.data() + (size_t(y) * width + x) * 3; }
    const std::uint8_t* pixel(int x, int y) const { return rgb.data() + (size_t(y) * width + x) * 3; }

    bool operator==(const Image&) const = default;
};

// Single-channel 8-bit raster; used for mask files and palette-indexed
// segmentation rasters (value = instance index).
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> values;

    GrayImage() = default;
    GrayImage(int w, int h) : width(w), height(h), values(size_t(w) * h, 0) {}

    bool operator==(const GrayImage&) const = default;
};

// Format is picked by extension: .pgm/.ppm/.pnm, .png, .jpg/.jpeg.
// Loads also sniff the magic bytes and reject mismatches.
Image load_image(const std::filesystem::path& path);
void save_image(const Image& img, const std::filesystem::path& path);

GrayImage load_gray(const std::filesystem::path& path);
void save_gray(const GrayImage& img, const std::filesystem::path& path);

// Mask files are single-channel 8-bit images holding exactly the values
// 0 (background) and 255 (foreground); anything else is rejected with
// BadMaskValue.
geometry::BinaryMask load_mask(const std::filesystem::path& path);
void save_mask(const geometry::BinaryMask& mask, const std::filesystem::path& path);

// In-memory PNM encodings; these are the rasters carried base64-encoded over
// the backend wire protocol (P5 for masks, P6 for images).
std::vector<std::uint8_t> encode_pgm(const GrayImage& img);
std::vector<std::uint8_t> encode_ppm(const Image& img);
GrayImage decode_pgm(const std::vector<std::uint8_t>& bytes);
Image decode_ppm(const std::vector<std::uint8_t>& bytes);

std::vector<std::uint8_t> mask_to_pgm(const geometry::BinaryMask& mask);
geometry::BinaryMask mask_from_pgm(const std::vector<std::uint8_t>& bytes);

}  // namespace objedit::image
