#include "objedit/editops.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <type_traits>
#include <utility>

#include "objedit/error.hpp"

namespace objedit::editops {

namespace {

using geometry::AffineTransform;
using geometry::Point;

[[noreturn]] void fail_parse(const std::string& what, const std::string& span) {
    throw Error(ErrorCode::UnparsableInstruction, what + ": \"" + span + "\"");
}

// Lowercases and splits on whitespace/commas, dropping a trailing period.
std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        unsigned char c = static_cast<unsigned char>(ch);
        if (std::isspace(c) || ch == ',') {
            if (!cur.empty()) {
                out.push_back(cur);
                cur.clear();
            }
        } else {
            cur.push_back(static_cast<char>(std::tolower(c)));
        }
    }
    if (!cur.empty()) out.push_back(cur);
    if (!out.empty()) {
        std::string& last = out.back();
        while (!last.empty() && last.back() == '.') last.pop_back();
        if (last.empty()) out.pop_back();
    }
    return out;
}

bool is_verb(const std::string& w) {
    static const char* kVerbs[] = {"move",   "shift", "scale", "resize", "rotate", "turn",
                                   "flip",   "mirror", "shear", "skew",  "make",   "apply"};
    for (const char* v : kVerbs)
        if (w == v) return true;
    return false;
}

bool is_direction(const std::string& w) {
    return w == "left" || w == "right" || w == "up" || w == "down";
}

struct Cur {
    const std::vector<std::string>* toks;
    size_t begin;
    size_t end;
    size_t pos;

    bool done() const { return pos >= end; }
    const std::string& peek() const {
        static const std::string kEmpty;
        return pos < end ? (*toks)[pos] : kEmpty;
    }
    bool eat(const std::string& word) {
        if (!done() && (*toks)[pos] == word) {
            ++pos;
            return true;
        }
        return false;
    }
    std::string span() const {
        std::string s;
        for (size_t i = begin; i < end; ++i) {
            if (!s.empty()) s += ' ';
            s += (*toks)[i];
        }
        return s;
    }
};

// Accepts "150", "0.56", "-40" and, with a px suffix, "150px".
bool parse_number_token(std::string tok, bool* had_px, double* out) {
    bool px = false;
    if (tok.size() > 2 && tok.compare(tok.size() - 2, 2, "px") == 0) {
        px = true;
        tok.resize(tok.size() - 2);
    }
    if (had_px) *had_px = px;
    if (tok.empty()) return false;
    const char* s = tok.c_str();
    char* endp = nullptr;
    double v = std::strtod(s, &endp);
    if (endp != s + tok.size() || !std::isfinite(v)) return false;
    *out = v;
    return true;
}

double need_px(Cur& c) {
    bool px = false;
    double v = 0.0;
    if (c.done() || !parse_number_token(c.peek(), &px, &v) || !px)
        fail_parse("expected a pixel amount like 150px", c.span());
    ++c.pos;
    return v;
}

double need_number(Cur& c) {
    bool px = false;
    double v = 0.0;
    if (c.done() || !parse_number_token(c.peek(), &px, &v) || px)
        fail_parse("expected a bare number", c.span());
    ++c.pos;
    return v;
}

void apply_direction(const std::string& dir, double amount, Move* m) {
    if (dir == "left")
        m->dx -= amount;
    else if (dir == "right")
        m->dx += amount;
    else if (dir == "up")
        m->dy -= amount;
    else
        m->dy += amount;
}

struct Clause {
    EditOp op;
    std::string noun;  // empty when the subject was "it"
};

// "the cat" yields "cat"; "it" yields "".
std::string need_subject(Cur& c) {
    if (c.eat("it")) return "";
    if (c.eat("the")) {
        if (c.done()) fail_parse("expected an object noun after \"the\"", c.span());
        std::string noun = c.peek();
        ++c.pos;
        return noun;
    }
    fail_parse("expected \"the <object>\" or \"it\"", c.span());
}

void require_done(const Cur& c) {
    if (!c.done()) fail_parse("trailing words", c.span());
}

Clause parse_clause(Cur c) {
    Clause out;
    if (c.done()) fail_parse("empty clause", c.span());
    std::string verb = c.peek();
    ++c.pos;

    if (verb == "move") {
        out.noun = need_subject(c);
        Move m;
        if (is_direction(c.peek())) {
            std::string dir = c.peek();
            ++c.pos;
            if (!c.eat("by")) fail_parse("expected \"by\"", c.span());
            apply_direction(dir, need_px(c), &m);
            if (c.eat("and")) {
                if (!is_direction(c.peek()))
                    fail_parse("expected a second direction after \"and\"", c.span());
                std::string dir2 = c.peek();
                ++c.pos;
                if (!c.eat("by")) fail_parse("expected \"by\"", c.span());
                apply_direction(dir2, need_px(c), &m);
            }
        } else {
            double amount = need_px(c);
            if (!is_direction(c.peek())) fail_parse("expected a direction", c.span());
            apply_direction(c.peek(), amount, &m);
            ++c.pos;
            if (c.eat("and")) {
                double amount2 = need_px(c);
                if (!is_direction(c.peek()))
                    fail_parse("expected a second direction after \"and\"", c.span());
                apply_direction(c.peek(), amount2, &m);
                ++c.pos;
            }
        }
        require_done(c);
        out.op = EditOp(m);
        return out;
    }

    if (verb == "shift") {
        out.noun = need_subject(c);
        double amount = need_px(c);
        if (!c.eat("to") || !c.eat("the"))
            fail_parse("expected \"to the <direction>\"", c.span());
        if (!is_direction(c.peek())) fail_parse("expected a direction", c.span());
        Move m;
        apply_direction(c.peek(), amount, &m);
        ++c.pos;
        if (c.eat("and")) {
            double amount2 = need_px(c);
            if (!is_direction(c.peek()))
                fail_parse("expected a second direction after \"and\"", c.span());
            apply_direction(c.peek(), amount2, &m);
            ++c.pos;
        }
        require_done(c);
        out.op = EditOp(m);
        return out;
    }

    if (verb == "scale") {
        out.noun = need_subject(c);
        if (c.eat("by")) {
            double f = need_number(c);
            require_done(c);
            out.op = EditOp(ScaleBy{f, f});
            return out;
        }
        if (c.peek() == "horizontally" || c.peek() == "vertically") {
            bool horiz = c.peek() == "horizontally";
            ++c.pos;
            if (!c.eat("by")) fail_parse("expected \"by\"", c.span());
            ScaleBy s;
            (horiz ? s.sx : s.sy) = need_number(c);
            if (c.eat("and")) {
                std::string other = horiz ? "vertically" : "horizontally";
                if (!c.eat(other)) fail_parse("expected \"" + other + "\"", c.span());
                if (!c.eat("by")) fail_parse("expected \"by\"", c.span());
                (horiz ? s.sy : s.sx) = need_number(c);
            }
            require_done(c);
            out.op = EditOp(s);
            return out;
        }
        if (c.eat("to")) {
            if (!c.eat("a")) fail_parse("expected \"a width of\" or \"a height of\"", c.span());
            bool width = c.eat("width");
            if (!width && !c.eat("height")) fail_parse("expected \"width\" or \"height\"", c.span());
            if (!c.eat("of")) fail_parse("expected \"of\"", c.span());
            double v = need_px(c);
            require_done(c);
            out.op = width ? EditOp(ScaleToWidth{v}) : EditOp(ScaleToHeight{v});
            return out;
        }
        fail_parse("unrecognized scale form", c.span());
    }

    if (verb == "resize") {
        out.noun = need_subject(c);
        if (c.eat("by")) {
            if (!c.eat("a") || !c.eat("factor") || !c.eat("of"))
                fail_parse("expected \"by a factor of <f>\"", c.span());
            double f = need_number(c);
            require_done(c);
            out.op = EditOp(ScaleBy{f, f});
            return out;
        }
        if (c.eat("to")) {
            double v = need_px(c);
            bool wide = c.eat("wide");
            if (!wide && !c.eat("tall")) fail_parse("expected \"wide\" or \"tall\"", c.span());
            require_done(c);
            out.op = wide ? EditOp(ScaleToWidth{v}) : EditOp(ScaleToHeight{v});
            return out;
        }
        fail_parse("unrecognized resize form", c.span());
    }

    if (verb == "make") {
        out.noun = need_subject(c);
        bool px = false;
        double v = 0.0;
        if (c.done() || !parse_number_token(c.peek(), &px, &v))
            fail_parse("expected a number", c.span());
        ++c.pos;
        if (px) {
            bool wide = c.eat("wide");
            if (!wide && !c.eat("tall")) fail_parse("expected \"wide\" or \"tall\"", c.span());
            require_done(c);
            out.op = wide ? EditOp(ScaleToWidth{v}) : EditOp(ScaleToHeight{v});
            return out;
        }
        if (!c.eat("times") || !c.eat("its") || !c.eat("current") || !c.eat("size"))
            fail_parse("expected \"times its current size\"", c.span());
        require_done(c);
        out.op = EditOp(ScaleBy{v, v});
        return out;
    }

    if (verb == "rotate" || verb == "turn") {
        out.noun = need_subject(c);
        c.eat("by");
        double deg = need_number(c);
        if (!c.eat("degrees")) fail_parse("expected \"degrees\"", c.span());
        double sign = 1.0;
        if (c.eat("clockwise"))
            sign = -1.0;
        else
            c.eat("counterclockwise");
        require_done(c);
        out.op = EditOp(Rotate{sign * deg});
        return out;
    }

    if (verb == "flip" || verb == "mirror") {
        out.noun = need_subject(c);
        if (c.eat("horizontally")) {
            out.op = EditOp(FlipHorizontal{});
        } else if (c.eat("vertically")) {
            out.op = EditOp(FlipVertical{});
        } else if (verb == "flip" && c.eat("left")) {
            if (!c.eat("to") || !c.eat("right")) fail_parse("expected \"left to right\"", c.span());
            out.op = EditOp(FlipHorizontal{});
        } else if (verb == "flip" && c.eat("upside")) {
            if (!c.eat("down")) fail_parse("expected \"upside down\"", c.span());
            out.op = EditOp(FlipVertical{});
        } else {
            fail_parse("expected a flip axis", c.span());
        }
        require_done(c);
        return out;
    }

    if (verb == "shear" || verb == "skew") {
        out.noun = need_subject(c);
        bool horiz = c.eat("horizontally");
        if (!horiz && !c.eat("vertically"))
            fail_parse("expected \"horizontally\" or \"vertically\"", c.span());
        if (!c.eat("by")) fail_parse("expected \"by\"", c.span());
        double k = need_number(c);
        require_done(c);
        out.op = horiz ? EditOp(Shear{k, 0.0}) : EditOp(Shear{0.0, k});
        return out;
    }

    if (verb == "apply") {
        if (!c.eat("a")) fail_parse("expected \"a horizontal shear of\"", c.span());
        bool horiz = c.eat("horizontal");
        if (!horiz && !c.eat("vertical"))
            fail_parse("expected \"horizontal\" or \"vertical\"", c.span());
        if (!c.eat("shear")) fail_parse("expected \"shear\"", c.span());
        if (!c.eat("of")) fail_parse("expected \"of\"", c.span());
        double k = need_number(c);
        if (!c.eat("to")) fail_parse("expected \"to the <object>\"", c.span());
        out.noun = need_subject(c);
        require_done(c);
        out.op = horiz ? EditOp(Shear{k, 0.0}) : EditOp(Shear{0.0, k});
        return out;
    }

    fail_parse("unknown verb \"" + verb + "\"", c.span());
}

struct ValidateVisitor {
    void operator()(const Move&) const {}
    void operator()(const ScaleBy& s) const {
        if (!(s.sx > 0.0) || !(s.sy > 0.0))
            throw Error(ErrorCode::DegenerateScale, "scale factors must be positive");
    }
    void operator()(const ScaleToWidth& s) const {
        if (!(s.width > 0.0))
            throw Error(ErrorCode::DegenerateScale, "target width must be positive");
    }
    void operator()(const ScaleToHeight& s) const {
        if (!(s.height > 0.0))
            throw Error(ErrorCode::DegenerateScale, "target height must be positive");
    }
    void operator()(const Rotate&) const {}
    void operator()(const FlipHorizontal&) const {}
    void operator()(const FlipVertical&) const {}
    void operator()(const Shear&) const {}
    void operator()(const Sequence& s) const {
        if (s.ops.empty()) throw Error(ErrorCode::EmptyInstruction, "sequence has no steps");
        for (const EditOp& op : s.ops) validate(op);
    }
};

AffineTransform compile_one(const EditOp& op, const ObjectGeometry& geom);

struct CompileVisitor {
    const ObjectGeometry& geom;

    Point center() const { return geom.bbox.center(); }

    AffineTransform operator()(const Move& m) const {
        return AffineTransform::translate(m.dx, m.dy);
    }
    AffineTransform operator()(const ScaleBy& s) const {
        return geometry::about_anchor(AffineTransform::scale(s.sx, s.sy), center());
    }
    AffineTransform operator()(const ScaleToWidth& s) const {
        double w = geom.bbox.width();
        if (!(w > 0.0)) throw Error(ErrorCode::ZeroSizeObject, "object bbox has zero width");
        double f = s.width / w;
        return geometry::about_anchor(AffineTransform::scale(f, f), center());
    }
    AffineTransform operator()(const ScaleToHeight& s) const {
        double h = geom.bbox.height();
        if (!(h > 0.0)) throw Error(ErrorCode::ZeroSizeObject, "object bbox has zero height");
        double f = s.height / h;
        return geometry::about_anchor(AffineTransform::scale(f, f), center());
    }
    AffineTransform operator()(const Rotate& r) const {
        return geometry::about_anchor(AffineTransform::rotate_degrees(r.degrees), center());
    }
    AffineTransform operator()(const FlipHorizontal&) const {
        return geometry::about_anchor(AffineTransform::scale(-1.0, 1.0), center());
    }
    AffineTransform operator()(const FlipVertical&) const {
        return geometry::about_anchor(AffineTransform::scale(1.0, -1.0), center());
    }
    AffineTransform operator()(const Shear& s) const {
        return geometry::about_anchor(AffineTransform::shear(s.kx, s.ky), center());
    }
    AffineTransform operator()(const Sequence& seq) const {
        AffineTransform total = AffineTransform::identity();
        ObjectGeometry cur = geom;
        for (const EditOp& step : seq.ops) {
            AffineTransform t = compile_one(step, cur);
            total = geometry::compose(t, total);
            cur.bbox = geometry::transformed_bbox(cur.bbox, t);
        }
        return total;
    }
};

AffineTransform compile_one(const EditOp& op, const ObjectGeometry& geom) {
    return std::visit(CompileVisitor{geom}, op.node());
}

}  // namespace

bool Sequence::operator==(const Sequence& other) const { return ops == other.ops; }

const char* to_string(EditCategory c) {
    switch (c) {
        case EditCategory::Move: return "Move";
        case EditCategory::Scale: return "Scale";
        case EditCategory::Flip: return "Flip";
        case EditCategory::Shear: return "Shear";
        case EditCategory::Rotate: return "Rotate";
        case EditCategory::Reason: return "Reason";
        case EditCategory::Mix: return "Mix";
    }
    return "Mix";
}

EditCategory category_from_string(const std::string& s) {
    for (EditCategory c : {EditCategory::Move, EditCategory::Scale, EditCategory::Flip,
                           EditCategory::Shear, EditCategory::Rotate, EditCategory::Reason,
                           EditCategory::Mix}) {
        if (s == to_string(c)) return c;
    }
    throw Error(ErrorCode::ConfigError, "unknown edit category \"" + s + "\"");
}

void validate(const EditOp& op) { std::visit(ValidateVisitor{}, op.node()); }

geometry::AffineTransform compile(const EditOp& op, const ObjectGeometry& geom) {
    validate(op);
    return compile_one(op, geom);
}

EditCategory categorize(const EditOp& op) {
    return std::visit(
        [](const auto& node) -> EditCategory {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Move>)
                return EditCategory::Move;
            else if constexpr (std::is_same_v<T, ScaleBy> || std::is_same_v<T, ScaleToWidth> ||
                               std::is_same_v<T, ScaleToHeight>)
                return EditCategory::Scale;
            else if constexpr (std::is_same_v<T, Rotate>)
                return EditCategory::Rotate;
            else if constexpr (std::is_same_v<T, FlipHorizontal> ||
                               std::is_same_v<T, FlipVertical>)
                return EditCategory::Flip;
            else if constexpr (std::is_same_v<T, Shear>)
                return EditCategory::Shear;
            else
                return EditCategory::Mix;
        },
        op.node());
}

ParsedInstruction parse_instruction_detail(const std::string& text) {
    std::vector<std::string> toks = tokenize(text);
    if (toks.empty()) throw Error(ErrorCode::EmptyInstruction, "instruction text is empty");

    // Split into clauses on "and" only when a verb follows; the other "and"s
    // belong to within-clause continuations like "left by 20px and down by
    // 10px".
    std::vector<std::pair<size_t, size_t>> spans;
    size_t start = 0;
    for (size_t i = 1; i + 1 < toks.size(); ++i) {
        if (i > start && toks[i] == "and" && is_verb(toks[i + 1])) {
            spans.emplace_back(start, i);
            start = i + 1;
        }
    }
    spans.emplace_back(start, toks.size());

    ParsedInstruction out;
    std::vector<EditOp> ops;
    ops.reserve(spans.size());
    for (size_t idx = 0; idx < spans.size(); ++idx) {
        Cur c{&toks, spans[idx].first, spans[idx].second, spans[idx].first};
        Clause cl = parse_clause(c);
        if (idx == 0) {
            if (cl.noun.empty()) fail_parse("first clause must name its object", text);
            out.object_noun = cl.noun;
        } else if (!cl.noun.empty() && cl.noun != out.object_noun) {
            fail_parse("clauses name different objects", text);
        }
        ops.push_back(std::move(cl.op));
    }
    if (ops.size() == 1)
        out.op = std::move(ops.front());
    else
        out.op = EditOp(Sequence{std::move(ops)});
    return out;
}

}  // namespace objedit::editops
