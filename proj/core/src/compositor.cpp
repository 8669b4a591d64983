#include "objedit/compositor.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "objedit/error.hpp"
#include "objedit/rng.hpp"

namespace objedit::compositor {

namespace {

using geometry::AffineTransform;
using geometry::BinaryMask;
using image::Image;

// Grows the surrounding colors into the hole one ring per pass. Within a
// pass every ring pixel reads only pixels that were already valid before the
// pass, so the result does not depend on scan order.
void boundary_mean_fill(Image& img, const BinaryMask& hole) {
    const int w = img.width;
    const int h = img.height;
    std::vector<std::uint8_t> valid(size_t(w) * h);
    size_t missing = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            bool in_hole = hole.get(x, y);
            valid[size_t(y) * w + x] = in_hole ? 0 : 1;
            if (in_hole) ++missing;
        }
    }

    std::vector<std::pair<int, int>> ring;
    while (missing > 0) {
        ring.clear();
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                if (valid[size_t(y) * w + x]) continue;
                bool touches = (x > 0 && valid[size_t(y) * w + x - 1]) ||
                               (x + 1 < w && valid[size_t(y) * w + x + 1]) ||
                               (y > 0 && valid[size_t(y - 1) * w + x]) ||
                               (y + 1 < h && valid[size_t(y + 1) * w + x]);
                if (touches) ring.emplace_back(x, y);
            }
        }
        if (ring.empty()) break;
        for (auto [x, y] : ring) {
            int sum[3] = {0, 0, 0};
            int cnt = 0;
            auto add = [&](int nx, int ny) {
                if (nx < 0 || nx >= w || ny < 0 || ny >= h) return;
                if (!valid[size_t(ny) * w + nx]) return;
                const std::uint8_t* p = img.pixel(nx, ny);
                sum[0] += p[0];
                sum[1] += p[1];
                sum[2] += p[2];
                ++cnt;
            };
            add(x - 1, y);
            add(x + 1, y);
            add(x, y - 1);
            add(x, y + 1);
            std::uint8_t* q = img.pixel(x, y);
            for (int c = 0; c < 3; ++c) q[c] = std::uint8_t((sum[c] + cnt / 2) / cnt);
        }
        for (auto [x, y] : ring) {
            valid[size_t(y) * w + x] = 1;
            --missing;
        }
    }

    if (missing > 0) {
        // The hole covers the whole frame; nothing to grow from.
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                if (valid[size_t(y) * w + x]) continue;
                std::uint8_t* q = img.pixel(x, y);
                q[0] = q[1] = q[2] = 128;
            }
        }
    }
}

void noise_fill(Image& img, const BinaryMask& hole, std::uint64_t seed) {
    rng::GaussianStream gauss(rng::mix(seed ^ 0x6f1d3f5b2c9a1e47ULL));
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            if (!hole.get(x, y)) continue;
            std::uint8_t* q = img.pixel(x, y);
            for (int c = 0; c < 3; ++c) {
                double v = 127.0 + 32.0 * gauss.next();
                q[c] = std::uint8_t(std::clamp<long>(std::lround(v), 0, 255));
            }
        }
    }
}

}  // namespace

const char* to_string(FillMode m) {
    return m == FillMode::BoundaryMean ? "boundary_mean" : "noise";
}

FillMode fill_mode_from_string(const std::string& s) {
    if (s == "boundary_mean") return FillMode::BoundaryMean;
    if (s == "noise") return FillMode::Noise;
    throw Error(ErrorCode::ConfigError, "unknown fill mode \"" + s + "\"");
}

BlendRegions regions(const geometry::BinaryMask& before, const geometry::BinaryMask& after) {
    return {before, after, geometry::mask_and_not(before, after)};
}

EditResult composite(const Image& img, const BinaryMask& before, const AffineTransform& t,
                     FillMode fill, std::uint64_t seed) {
    if (before.width() != img.width || before.height() != img.height)
        throw Error(ErrorCode::DimensionMismatch, "mask dimensions do not match the image");

    EditResult out{img, geometry::warp_mask(before, t)};
    const BinaryMask& after = out.after;
    const AffineTransform inv = geometry::inverse(t);

    // Same sampling rule as warp_mask; wherever `after` is set the source
    // pixel is in bounds by construction.
    for (int y = 0; y < img.height; ++y) {
        const double cy = y + 0.5;
        for (int x = 0; x < img.width; ++x) {
            if (!after.get(x, y)) continue;
            const double cx = x + 0.5;
            const double qx = inv.a11 * cx + inv.a12 * cy + inv.a13;
            const double qy = inv.a21 * cx + inv.a22 * cy + inv.a23;
            const long sx = std::lround(qx - 0.5);
            const long sy = std::lround(qy - 0.5);
            const std::uint8_t* src = img.pixel(int(sx), int(sy));
            std::uint8_t* dst = out.image.pixel(x, y);
            dst[0] = src[0];
            dst[1] = src[1];
            dst[2] = src[2];
        }
    }

    // Repaint the vacated area last so BoundaryMean grows from the final
    // surroundings, warped object included.
    BinaryMask vacated = geometry::mask_and_not(before, after);
    if (fill == FillMode::BoundaryMean)
        boundary_mean_fill(out.image, vacated);
    else
        noise_fill(out.image, vacated, seed);
    return out;
}

}  // namespace objedit::compositor
