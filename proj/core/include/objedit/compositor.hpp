#pragma once

#include <cstdint>
#include <string>

#include "objedit/geometry.hpp"
#include "objedit/image.hpp"

namespace objedit::compositor {

// How vacated pixels (covered by the object before the edit, uncovered
// after) get new content. BoundaryMean grows the surrounding colors inward
// layer by layer; Noise writes seeded gray noise, useful when the result
// feeds a generative inpainter anyway.
enum class FillMode { BoundaryMean, Noise };

const char* to_string(FillMode m);
FillMode fill_mode_from_string(const std::string& s);

struct BlendRegions {
    geometry::BinaryMask source;   // object footprint before the edit
    geometry::BinaryMask target;   // footprint after the edit
    geometry::BinaryMask vacated;  // source minus target
};

BlendRegions regions(const geometry::BinaryMask& before, const geometry::BinaryMask& after);

struct EditResult {
    image::Image image;
    geometry::BinaryMask after;
};

// Reference pixel-space edit: warps the masked object by t, repaints the
// vacated area, and leaves every pixel outside source and target untouched
// bit for bit. The object is resampled with the same inverse-mapped
// nearest-neighbor rule the mask warp uses, so image and mask stay aligned.
// Throws DimensionMismatch when the mask does not match the image.
EditResult composite(const image::Image& img, const geometry::BinaryMask& before,
                     const geometry::AffineTransform& t, FillMode fill = FillMode::BoundaryMean,
                     std::uint64_t seed = 0);

}  // namespace objedit::compositor
