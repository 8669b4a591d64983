#pragma once

#include <string>
#include <variant>
#include <vector>

#include "objedit/geometry.hpp"

namespace objedit::editops {

class EditOp;

// Translation in pixels, screen coordinates: "left" is negative dx, "up" is
// negative dy.
struct Move {
    double dx = 0.0;
    double dy = 0.0;
    bool operator==(const Move&) const = default;
};

struct ScaleBy {
    double sx = 1.0;
    double sy = 1.0;
    bool operator==(const ScaleBy&) const = default;
};

// Uniform scale chosen so the object's bbox reaches the target width.
struct ScaleToWidth {
    double width = 0.0;
    bool operator==(const ScaleToWidth&) const = default;
};

struct ScaleToHeight {
    double height = 0.0;
    bool operator==(const ScaleToHeight&) const = default;
};

// CCW-positive, mathematical convention, applied in screen coordinates.
struct Rotate {
    double degrees = 0.0;
    bool operator==(const Rotate&) const = default;
};

struct FlipHorizontal {
    bool operator==(const FlipHorizontal&) const = default;
};

struct FlipVertical {
    bool operator==(const FlipVertical&) const = default;
};

struct Shear {
    double kx = 0.0;
    double ky = 0.0;
    bool operator==(const Shear&) const = default;
};

// Ordered chain; compiles left to right, later ops see the bbox produced by
// earlier ones.
struct Sequence {
    std::vector<EditOp> ops;
    bool operator==(const Sequence&) const;
};

class EditOp {
  public:
    using Node = std::variant<Move, ScaleBy, ScaleToWidth, ScaleToHeight, Rotate, FlipHorizontal,
                              FlipVertical, Shear, Sequence>;

    EditOp() : node_(Move{}) {}
    EditOp(Node node) : node_(std::move(node)) {}

    const Node& node() const { return node_; }

    bool operator==(const EditOp&) const = default;

  private:
    Node node_;
};

enum class EditCategory { Move, Scale, Flip, Shear, Rotate, Reason, Mix };

const char* to_string(EditCategory c);
EditCategory category_from_string(const std::string& s);

// Target object's bbox plus the host image dimensions.
struct ObjectGeometry {
    geometry::BoundingBox bbox;
    int image_width = 0;
    int image_height = 0;
};

// Validates the per-op invariants (positive scale factors and targets,
// nonempty sequences). Throws DegenerateScale on violations.
void validate(const EditOp& op);

// Deterministic instruction-to-matrix compiler. Size-changing and rotating
// ops are anchored at the bbox center; flips mirror about the bbox's own
// center lines; moves are absolute. Sequences compile left to right, each
// step seeing the bbox produced by the previous one, and compose.
// Throws DegenerateScale / ZeroSizeObject.
geometry::AffineTransform compile(const EditOp& op, const ObjectGeometry& geom);

// Move->Move, ScaleBy/ScaleTo*->Scale, Flip*->Flip, Shear->Shear,
// Rotate->Rotate, Sequence->Mix. Reason is never produced here; it is
// reserved for externally authored samples.
EditCategory categorize(const EditOp& op);

struct ParsedInstruction {
    EditOp op;
    std::string object_noun;  // the word after "the" in the first clause
};

// Parses the canonical template grammar (see grammar.md). Case-insensitive,
// whitespace-tolerant. Throws UnparsableInstruction carrying the offending
// span; free-form language is out of scope and must be routed to an LLM
// backend instead.
ParsedInstruction parse_instruction_detail(const std::string& text);

inline EditOp parse_instruction(const std::string& text) {
    return parse_instruction_detail(text).op;
}

}  // namespace objedit::editops
