#include <cmath>

#include <doctest.h>

#include "objedit/dataset.hpp"
#include "objedit/editops.hpp"
#include "objedit/rng.hpp"

using namespace objedit;
using editops::EditOp;
using editops::ObjectGeometry;
using geometry::AffineTransform;
using geometry::BoundingBox;

namespace {

const ObjectGeometry kGeom{{100, 80, 150, 180}, 640, 480};  // 50 wide, 100 tall

void check_close(const AffineTransform& got, const AffineTransform& want, double eps = 1e-12) {
    CHECK(got.a11 == doctest::Approx(want.a11).epsilon(eps));
    CHECK(got.a12 == doctest::Approx(want.a12).epsilon(eps));
    CHECK(got.a13 == doctest::Approx(want.a13).epsilon(eps));
    CHECK(got.a21 == doctest::Approx(want.a21).epsilon(eps));
    CHECK(got.a22 == doctest::Approx(want.a22).epsilon(eps));
    CHECK(got.a23 == doctest::Approx(want.a23).epsilon(eps));
}

}  // namespace

TEST_CASE("directional moves parse with screen-coordinate signs") {
    CHECK(editops::parse_instruction("move the cat left by 150px") ==
          EditOp(editops::Move{-150, 0}));
    CHECK(editops::parse_instruction("move the cat right by 30px") ==
          EditOp(editops::Move{30, 0}));
    CHECK(editops::parse_instruction("move the dog up by 40px") == EditOp(editops::Move{0, -40}));
    CHECK(editops::parse_instruction("move the dog down by 12px") ==
          EditOp(editops::Move{0, 12}));
    CHECK(editops::parse_instruction("shift the bus 25px to the left") ==
          EditOp(editops::Move{-25, 0}));
    CHECK(editops::parse_instruction("move the bus 60px right") == EditOp(editops::Move{60, 0}));
}

TEST_CASE("diagonal moves parse in all three surface forms") {
    EditOp want{editops::Move{-150, 30}};
    CHECK(editops::parse_instruction("move the cat left by 150px and down by 30px") == want);
    CHECK(editops::parse_instruction("shift the cat 150px to the left and 30px down") == want);
    CHECK(editops::parse_instruction("move the cat 150px left and 30px down") == want);
}

TEST_CASE("scales, rotations, flips and shears parse") {
    CHECK(editops::parse_instruction("scale the bus by 0.56") ==
          EditOp(editops::ScaleBy{0.56, 0.56}));
    CHECK(editops::parse_instruction("resize the bus by a factor of 2") ==
          EditOp(editops::ScaleBy{2, 2}));
    CHECK(editops::parse_instruction("make the bus 1.5 times its current size") ==
          EditOp(editops::ScaleBy{1.5, 1.5}));
    CHECK(editops::parse_instruction("scale the bus horizontally by 2 and vertically by 0.5") ==
          EditOp(editops::ScaleBy{2, 0.5}));
    CHECK(editops::parse_instruction("make the car 100px wide") ==
          EditOp(editops::ScaleToWidth{100}));
    CHECK(editops::parse_instruction("scale the car to a height of 88px") ==
          EditOp(editops::ScaleToHeight{88}));
    CHECK(editops::parse_instruction("rotate the sofa by 45 degrees") ==
          EditOp(editops::Rotate{45}));
    CHECK(editops::parse_instruction("rotate the sofa by 45 degrees clockwise") ==
          EditOp(editops::Rotate{-45}));
    CHECK(editops::parse_instruction("turn the sofa 30 degrees counterclockwise") ==
          EditOp(editops::Rotate{30}));
    CHECK(editops::parse_instruction("flip the chair horizontally") ==
          EditOp(editops::FlipHorizontal{}));
    CHECK(editops::parse_instruction("flip the chair left to right") ==
          EditOp(editops::FlipHorizontal{}));
    CHECK(editops::parse_instruction("mirror the chair vertically") ==
          EditOp(editops::FlipVertical{}));
    CHECK(editops::parse_instruction("flip the chair upside down") ==
          EditOp(editops::FlipVertical{}));
    CHECK(editops::parse_instruction("shear the table horizontally by 0.3") ==
          EditOp(editops::Shear{0.3, 0}));
    CHECK(editops::parse_instruction("apply a vertical shear of 0.25 to the table") ==
          EditOp(editops::Shear{0, 0.25}));
    CHECK(editops::parse_instruction("skew the table vertically by 0.4") ==
          EditOp(editops::Shear{0, 0.4}));
}

TEST_CASE("multi-clause instructions build sequences in order") {
    EditOp got = editops::parse_instruction("scale the orange by 2 and move it left by 150px");
    editops::Sequence want;
    want.ops.push_back(EditOp(editops::ScaleBy{2, 2}));
    want.ops.push_back(EditOp(editops::Move{-150, 0}));
    CHECK(got == EditOp(want));

    editops::ParsedInstruction p = editops::parse_instruction_detail(
        "rotate the cat by 90 degrees and scale it by 0.5 and move it right by 10px");
    CHECK(p.object_noun == "cat");
    const auto* seq = std::get_if<editops::Sequence>(&p.op.node());
    REQUIRE(seq != nullptr);
    CHECK(seq->ops.size() == 3);
}

TEST_CASE("unparsable text is rejected with the right code") {
    for (const char* bad :
         {"do something nice", "move the cat", "move the cat sideways by 10px",
          "scale the cat by zero percent", "move cat left by 10px",
          "scale the orange by 2 and move the apple left by 5px",
          "flip the chair diagonally", "move the cat left by 10px and sing"}) {
        CAPTURE(bad);
        CHECK_THROWS_AS(editops::parse_instruction(bad), Error);
        try {
            editops::parse_instruction(bad);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::UnparsableInstruction);
        }
    }
    // Blank input gets its own code so callers can tell it apart from prose
    // the grammar genuinely cannot digest.
    try {
        editops::parse_instruction("   ");
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyInstruction);
    }
}

TEST_CASE("validate rejects degenerate parameters") {
    CHECK_THROWS_AS(editops::validate(EditOp(editops::ScaleBy{0, 1})), Error);
    CHECK_THROWS_AS(editops::validate(EditOp(editops::ScaleBy{-1, 1})), Error);
    CHECK_THROWS_AS(editops::validate(EditOp(editops::ScaleToWidth{0})), Error);
    CHECK_THROWS_AS(editops::validate(EditOp(editops::Sequence{})), Error);
    CHECK_NOTHROW(editops::validate(EditOp(editops::ScaleBy{0.01, 3})));
}

TEST_CASE("compile: moves are absolute, size ops anchor at the bbox center") {
    check_close(editops::compile(EditOp(editops::Move{-150, 30}), kGeom),
                AffineTransform::translate(-150, 30));

    // Center of kGeom's box is (125, 130); it must stay fixed.
    for (EditOp op : {EditOp(editops::ScaleBy{2, 0.5}), EditOp(editops::Rotate{37}),
                      EditOp(editops::Shear{0.3, 0}), EditOp(editops::FlipHorizontal{}),
                      EditOp(editops::FlipVertical{})}) {
        AffineTransform t = editops::compile(op, kGeom);
        geometry::Point c = t.apply({125, 130});
        CHECK(c.x == doctest::Approx(125).epsilon(1e-12));
        CHECK(c.y == doctest::Approx(130).epsilon(1e-12));
    }

    // Flips mirror the box onto itself.
    AffineTransform fh = editops::compile(EditOp(editops::FlipHorizontal{}), kGeom);
    geometry::Point left_edge = fh.apply({100, 80});
    CHECK(left_edge.x == doctest::Approx(150));
    CHECK(left_edge.y == doctest::Approx(80));
}

TEST_CASE("compile: width and height targets pick the uniform factor") {
    // 50px wide scaled to 100 doubles; 25 -> 100 quadruples.
    AffineTransform t = editops::compile(EditOp(editops::ScaleToWidth{100}), kGeom);
    CHECK(t.a11 == doctest::Approx(2.0));
    CHECK(t.a22 == doctest::Approx(2.0));

    ObjectGeometry narrow{{100, 80, 125, 180}, 640, 480};
    AffineTransform q = editops::compile(EditOp(editops::ScaleToWidth{100}), narrow);
    CHECK(q.a11 == doctest::Approx(4.0));

    AffineTransform h = editops::compile(EditOp(editops::ScaleToHeight{50}), kGeom);
    CHECK(h.a22 == doctest::Approx(0.5));

    BoundingBox scaled = geometry::transformed_bbox(
        geometry::BoundingBox{100, 80, 150, 180},
        editops::compile(EditOp(editops::ScaleToWidth{100}), kGeom));
    CHECK(scaled.width() == doctest::Approx(100));

    ObjectGeometry flat{{10, 10, 10, 40}, 640, 480};
    CHECK_THROWS_AS(editops::compile(EditOp(editops::ScaleToWidth{100}), flat), Error);
}

TEST_CASE("compile: sequences compose left to right through moving geometry") {
    editops::Sequence seq;
    seq.ops.push_back(EditOp(editops::Move{100, 0}));
    seq.ops.push_back(EditOp(editops::ScaleBy{2, 2}));
    AffineTransform t = editops::compile(EditOp(seq), kGeom);

    // After the move the box center sits at (225, 130); the scale anchors
    // there, so that point lands on itself and the original center does not.
    geometry::Point c = t.apply({125, 130});
    CHECK(c.x == doctest::Approx(225));
    CHECK(c.y == doctest::Approx(130));

    // Composing by hand: scale about the moved center, after the move.
    AffineTransform manual = geometry::compose(
        geometry::about_anchor(AffineTransform::scale(2, 2), {225, 130}),
        AffineTransform::translate(100, 0));
    check_close(t, manual);
}

TEST_CASE("categorize maps ops onto report columns") {
    using editops::EditCategory;
    CHECK(editops::categorize(EditOp(editops::Move{1, 0})) == EditCategory::Move);
    CHECK(editops::categorize(EditOp(editops::ScaleBy{2, 2})) == EditCategory::Scale);
    CHECK(editops::categorize(EditOp(editops::ScaleToWidth{9})) == EditCategory::Scale);
    CHECK(editops::categorize(EditOp(editops::ScaleToHeight{9})) == EditCategory::Scale);
    CHECK(editops::categorize(EditOp(editops::FlipHorizontal{})) == EditCategory::Flip);
    CHECK(editops::categorize(EditOp(editops::FlipVertical{})) == EditCategory::Flip);
    CHECK(editops::categorize(EditOp(editops::Shear{0.1, 0})) == EditCategory::Shear);
    CHECK(editops::categorize(EditOp(editops::Rotate{10})) == EditCategory::Rotate);
    CHECK(editops::categorize(EditOp(editops::Sequence{})) == EditCategory::Mix);
    CHECK(editops::category_from_string("Rotate") == EditCategory::Rotate);
    CHECK(std::string(editops::to_string(EditCategory::Mix)) == "Mix");
    CHECK_THROWS_AS(editops::category_from_string("Bogus"), Error);
}

TEST_CASE("every rendered paraphrase parses back to the same op") {
    std::vector<EditOp> bank = {
        EditOp(editops::Move{-150, 0}),    EditOp(editops::Move{0, 42}),
        EditOp(editops::Move{30, -75}),    EditOp(editops::Move{-12, -34}),
        EditOp(editops::ScaleBy{0.56, 0.56}), EditOp(editops::ScaleBy{2, 2}),
        EditOp(editops::ScaleToWidth{100}), EditOp(editops::ScaleToHeight{64}),
        EditOp(editops::Rotate{45}),       EditOp(editops::Rotate{-30}),
        EditOp(editops::FlipHorizontal{}), EditOp(editops::FlipVertical{}),
        EditOp(editops::Shear{0.3, 0}),    EditOp(editops::Shear{0, 0.25}),
    };
    editops::Sequence seq;
    seq.ops.push_back(EditOp(editops::ScaleBy{2, 2}));
    seq.ops.push_back(EditOp(editops::Move{-150, 0}));
    bank.push_back(EditOp(seq));

    for (const EditOp& op : bank) {
        for (int variant = 0; variant < 3; ++variant) {
            std::string text = dataset::render_instruction(op, "cat", variant);
            CAPTURE(text);
            editops::ParsedInstruction parsed = editops::parse_instruction_detail(text);
            CHECK(parsed.object_noun == "cat");
            CHECK(parsed.op == op);
        }
    }
}

TEST_CASE("renderer refuses ops outside the grammar") {
    // A two-axis shear has no template sentence.
    CHECK_THROWS_AS(dataset::render_instruction(EditOp(editops::Shear{0.2, 0.2}), "cat", 0),
                    Error);
}
