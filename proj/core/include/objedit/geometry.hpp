#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "objedit/error.hpp"

namespace objedit::geometry {

struct Point {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point&) const = default;
};

// 2D affine map in pixel coordinates. The full matrix is
//   | a11 a12 a13 |
//   | a21 a22 a23 |
//   |  0   0   1  |
// with the bottom row implicit. Screen convention throughout: x grows right,
// y grows down, translations in pixels.
struct AffineTransform {
    double a11 = 1.0, a12 = 0.0, a13 = 0.0;
    double a21 = 0.0, a22 = 1.0, a23 = 0.0;

    double determinant() const { return a11 * a22 - a12 * a21; }

    Point apply(Point p) const {
        return {a11 * p.x + a12 * p.y + a13, a21 * p.x + a22 * p.y + a23};
    }

    bool operator==(const AffineTransform&) const = default;

    static AffineTransform identity() { return {}; }
    static AffineTransform translate(double dx, double dy) { return {1, 0, dx, 0, 1, dy}; }
    static AffineTransform scale(double sx, double sy) { return {sx, 0, 0, 0, sy, 0}; }
    // CCW-positive in the mathematical convention; in screen coordinates
    // (y down) the visual motion is clockwise.
    static AffineTransform rotate_degrees(double degrees);
    static AffineTransform shear(double kx, double ky) { return {1, kx, 0, ky, 1, 0}; }
};

// Determinant magnitudes below this are treated as singular.
inline constexpr double kSingularDetEps = 1e-12;

// second * first: apply `first`, then `second`.
AffineTransform compose(const AffineTransform& second, const AffineTransform& first);

// translate(anchor) * t * translate(-anchor): t expressed about a fixed point.
AffineTransform about_anchor(const AffineTransform& t, Point anchor);

// Throws SingularTransform when |det| < kSingularDetEps.
AffineTransform inverse(const AffineTransform& t);

// Axis-aligned box, max edges exclusive: a pixel (x, y) is inside iff
// x_min <= x < x_max and y_min <= y < y_max.
struct BoundingBox {
    double x_min = 0.0, y_min = 0.0, x_max = 0.0, y_max = 0.0;

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
    double area() const { return width() * height(); }
    Point center() const { return {(x_min + x_max) / 2.0, (y_min + y_max) / 2.0}; }
    bool valid() const { return x_min < x_max && y_min < y_max; }

    bool operator==(const BoundingBox&) const = default;
};

double bbox_iou(const BoundingBox& a, const BoundingBox& b);

// Tightest box containing all corners of `box` mapped through `t`.
BoundingBox transformed_bbox(const BoundingBox& box, const AffineTransform& t);

// Row-major binary raster; values are strictly 0 or 1.
class BinaryMask {
  public:
    BinaryMask() = default;
    BinaryMask(int width, int height) : width_(width), height_(height), bits_(size_t(width) * height, 0) {}
    BinaryMask(int width, int height, std::vector<std::uint8_t> bits);

    int width() const { return width_; }
    int height() const { return height_; }

    bool get(int x, int y) const { return bits_[size_t(y) * width_ + x] != 0; }
    void set(int x, int y, bool v) { bits_[size_t(y) * width_ + x] = v ? 1 : 0; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width_ && y >= 0 && y < height_; }

    const std::vector<std::uint8_t>& bits() const { return bits_; }

    std::size_t count() const;
    bool empty() const { return count() == 0; }

    bool operator==(const BinaryMask&) const = default;

  private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> bits_;
};

// Set algebra; all operands must share dimensions (DimensionMismatch otherwise).
BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_or(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_and_not(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_complement(const BinaryMask& m);

// |a n b| / |a u b|. Both empty -> 1.0 (a correct "fully removed" prediction
// must not be penalized); exactly one empty -> 0.0.
double mask_iou(const BinaryMask& a, const BinaryMask& b);

// Inverse-mapped nearest-neighbor warp with pixel centers at (i + 0.5).
// Output keeps the source dimensions; an output pixel p is set iff the source
// pixel nearest to t^-1 * (p + (0.5, 0.5)) - (0.5, 0.5) is set and in bounds.
// Content mapped outside the raster is discarded.
// Throws SingularTransform when |det t| < kSingularDetEps.
BinaryMask warp_mask(const BinaryMask& m, const AffineTransform& t);

// Tightest integer box around set pixels. Throws EmptyMask.
BoundingBox bbox_of_mask(const BinaryMask& m);

}  // namespace objedit::geometry
