#include "objedit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace objedit::geometry {

AffineTransform AffineTransform::rotate_degrees(double degrees) {
    const double rad = degrees * 3.14159265358979323846 / 180.0;
    const double c = std::cos(rad);
    const double s = std::sin(rad);
    return {c, -s, 0, s, c, 0};
}

AffineTransform compose(const AffineTransform& second, const AffineTransform& first) {
    return {
        second.a11 * first.a11 + second.a12 * first.a21,
        second.a11 * first.a12 + second.a12 * first.a22,
        second.a11 * first.a13 + second.a12 * first.a23 + second.a13,
        second.a21 * first.a11 + second.a22 * first.a21,
        second.a21 * first.a12 + second.a22 * first.a22,
        second.a21 * first.a13 + second.a22 * first.a23 + second.a23,
    };
}

AffineTransform about_anchor(const AffineTransform& t, Point anchor) {
    return compose(AffineTransform::translate(anchor.x, anchor.y),
                   compose(t, AffineTransform::translate(-anchor.x, -anchor.y)));
}

AffineTransform inverse(const AffineTransform& t) {
    const double det = t.determinant();
    if (std::abs(det) < kSingularDetEps) {
        throw Error(ErrorCode::SingularTransform, "determinant " + std::to_string(det));
    }
    const double i11 = t.a22 / det;
    const double i12 = -t.a12 / det;
    const double i21 = -t.a21 / det;
    const double i22 = t.a11 / det;
    return {i11, i12, -(i11 * t.a13 + i12 * t.a23), i21, i22, -(i21 * t.a13 + i22 * t.a23)};
}

double bbox_iou(const BoundingBox& a, const BoundingBox& b) {
    const double iw = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
    const double ih = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
    if (iw <= 0.0 || ih <= 0.0) return 0.0;
    const double inter = iw * ih;
    return inter / (a.area() + b.area() - inter);
}

BoundingBox transformed_bbox(const BoundingBox& box, const AffineTransform& t) {
    const Point corners[4] = {
        t.apply({box.x_min, box.y_min}),
        t.apply({box.x_max, box.y_min}),
        t.apply({box.x_min, box.y_max}),
        t.apply({box.x_max, box.y_max}),
    };
    BoundingBox out{corners[0].x, corners[0].y, corners[0].x, corners[0].y};
    for (const Point& p : corners) {
        out.x_min = std::min(out.x_min, p.x);
        out.y_min = std::min(out.y_min, p.y);
        out.x_max = std::max(out.x_max, p.x);
        out.y_max = std::max(out.y_max, p.y);
    }
    return out;
}

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
    if (bits_.size() != size_t(width_) * height_) {
        throw Error(ErrorCode::DimensionMismatch, "bit count does not match width*height");
    }
    for (auto& b : bits_) {
        if (b > 1) throw Error(ErrorCode::BadMaskValue, "mask bits must be 0 or 1");
    }
}

std::size_t BinaryMask::count() const {
    return std::accumulate(bits_.begin(), bits_.end(), std::size_t{0});
}

namespace {

void require_same_dims(const BinaryMask& a, const BinaryMask& b) {
    if (a.width() != b.width() || a.height() != b.height()) {
        throw Error(ErrorCode::DimensionMismatch,
                    std::to_string(a.width()) + "x" + std::to_string(a.height()) + " vs " +
                        std::to_string(b.width()) + "x" + std::to_string(b.height()));
    }
}

template <typename F>
BinaryMask zip_masks(const BinaryMask& a, const BinaryMask& b, F f) {
    require_same_dims(a, b);
    std::vector<std::uint8_t> out(a.bits().size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = f(a.bits()[i], b.bits()[i]);
    return BinaryMask(a.width(), a.height(), std::move(out));
}

}  // namespace

BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b) {
    return zip_masks(a, b, [](std::uint8_t x, std::uint8_t y) { return std::uint8_t(x & y); });
}

BinaryMask mask_or(const BinaryMask& a, const BinaryMask& b) {
    return zip_masks(a, b, [](std::uint8_t x, std::uint8_t y) { return std::uint8_t(x | y); });
}

BinaryMask mask_and_not(const BinaryMask& a, const BinaryMask& b) {
    return zip_masks(a, b, [](std::uint8_t x, std::uint8_t y) { return std::uint8_t(x & (1 - y)); });
}

BinaryMask mask_complement(const BinaryMask& m) {
    std::vector<std::uint8_t> out(m.bits().size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = std::uint8_t(1 - m.bits()[i]);
    return BinaryMask(m.width(), m.height(), std::move(out));
}

double mask_iou(const BinaryMask& a, const BinaryMask& b) {
    require_same_dims(a, b);
    std::size_t inter = 0, uni = 0;
    const auto& ba = a.bits();
    const auto& bb = b.bits();
    for (size_t i = 0; i < ba.size(); ++i) {
        inter += ba[i] & bb[i];
        uni += ba[i] | bb[i];
    }
    if (uni == 0) return 1.0;
    return double(inter) / double(uni);
}

BinaryMask warp_mask(const BinaryMask& m, const AffineTransform& t) {
    const AffineTransform inv = inverse(t);
    BinaryMask out(m.width(), m.height());
    for (int y = 0; y < m.height(); ++y) {
        const double cy = y + 0.5;
        for (int x = 0; x < m.width(); ++x) {
            const double cx = x + 0.5;
            const double qx = inv.a11 * cx + inv.a12 * cy + inv.a13;
            const double qy = inv.a21 * cx + inv.a22 * cy + inv.a23;
            const long sx = std::lround(qx - 0.5);
            const long sy = std::lround(qy - 0.5);
            if (sx >= 0 && sx < m.width() && sy >= 0 && sy < m.height() && m.get(int(sx), int(sy))) {
                out.set(x, y, true);
            }
        }
    }
    return out;
}

BoundingBox bbox_of_mask(const BinaryMask& m) {
    int x0 = m.width(), y0 = m.height(), x1 = -1, y1 = -1;
    for (int y = 0; y < m.height(); ++y) {
        for (int x = 0; x < m.width(); ++x) {
            if (!m.get(x, y)) continue;
            x0 = std::min(x0, x);
            y0 = std::min(y0, y);
            x1 = std::max(x1, x);
            y1 = std::max(y1, y);
        }
    }
    if (x1 < 0) throw Error(ErrorCode::EmptyMask, "bbox_of_mask on empty mask");
    return {double(x0), double(y0), double(x1 + 1), double(y1 + 1)};
}

}  // namespace objedit::geometry
