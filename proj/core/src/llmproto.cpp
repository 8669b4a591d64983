#include "objedit/llmproto.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "objedit/error.hpp"

namespace objedit::llmproto {

namespace {

using geometry::AffineTransform;
using geometry::BoundingBox;

// Pulls every parseable number out of a span, skipping everything else.
std::vector<double> scan_numbers(const std::string& s) {
    std::vector<double> out;
    const char* p = s.c_str();
    const char* end = p + s.size();
    while (p < end) {
        char ch = *p;
        if (ch == '-' || ch == '+' || ch == '.' || (ch >= '0' && ch <= '9')) {
            char* after = nullptr;
            double v = std::strtod(p, &after);
            if (after != p && std::isfinite(v)) {
                out.push_back(v);
                p = after;
                continue;
            }
        }
        ++p;
    }
    return out;
}

// Contents of every complete start..end span, in order of appearance.
std::vector<std::string> find_spans(const std::string& text, const char* start_tok,
                                    const char* end_tok, bool* start_seen) {
    std::vector<std::string> out;
    const size_t slen = std::strlen(start_tok);
    const size_t elen = std::strlen(end_tok);
    *start_seen = false;
    size_t pos = 0;
    while (true) {
        size_t s = text.find(start_tok, pos);
        if (s == std::string::npos) break;
        *start_seen = true;
        size_t content = s + slen;
        size_t e = text.find(end_tok, content);
        if (e == std::string::npos) break;
        out.push_back(text.substr(content, e - content));
        pos = e + elen;
    }
    return out;
}

std::string first_json_object(const std::string& text) {
    size_t i = text.find('{');
    while (i != std::string::npos) {
        int depth = 0;
        bool in_str = false;
        bool esc = false;
        for (size_t j = i; j < text.size(); ++j) {
            char c = text[j];
            if (in_str) {
                if (esc)
                    esc = false;
                else if (c == '\\')
                    esc = true;
                else if (c == '"')
                    in_str = false;
            } else if (c == '"') {
                in_str = true;
            } else if (c == '{') {
                ++depth;
            } else if (c == '}') {
                if (--depth == 0) return text.substr(i, j - i + 1);
            }
        }
        i = text.find('{', i + 1);
    }
    throw Error(ErrorCode::MalformedReply, "no balanced JSON object in grounding reply");
}

const char kGroundingTemplate[] =
    R"TPL(You are labeling one photograph for an object-level image editor.

The picture is {{image_width}}x{{image_height}} pixels. Coordinates are in
pixels with x growing to the right and y growing downward from the top-left
corner.

Candidate object classes: {{classes}}.

Reply with a single JSON object and no other text, shaped like this:

{
  "objects": [
    {"id": 0, "class": "<a candidate class>", "bbox": [x_min, y_min, x_max, y_max], "point": [x, y]}
  ],
  "scene": "<one sentence describing the whole picture>",
  "relationships": "<one sentence on how the visible things relate spatially>",
  "background_prompt": "<a short phrase for regenerating the backdrop>",
  "generation_prompt": "<a short phrase for regenerating the foreground>"
}

List every clearly visible instance of the candidate classes, give each one
a distinct integer id, keep bbox edges exclusive on the max side, and put
point somewhere on the object itself.
)TPL";

const char kReasonerTemplate[] =
    R"TPL(You plan a geometric edit of one object in a photograph.

The picture is {{image_width}}x{{image_height}} pixels. Coordinates are in
pixels with x growing to the right and y growing downward from the top-left
corner; positive angles turn counterclockwise in this frame.

Edit request: {{instruction}}

Detected objects, one per line as "id class [x_min, y_min, x_max, y_max]":
{{candidates}}

Pick the one object the request refers to and work out the 3x3 affine matrix,
in pixel units, that carries every point of that object to its edited
position. The third row of the matrix must be 0 0 1.

Answer with the nine matrix numbers in row order between <MSTART> and <MEND>,
and the chosen id between <ISTART> and <IEND>, like:

<MSTART> 1 0 0 0 1 0 0 0 1 <MEND> <ISTART> 0 <IEND>
)TPL";

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

}  // namespace

ReasonerReply parse_reasoner_reply(const std::string& text) {
    ReasonerReply out;

    bool mstart_seen = false;
    std::vector<std::string> mspans = find_spans(text, kMatrixStart, kMatrixEnd, &mstart_seen);
    if (mspans.empty()) {
        throw Error(ErrorCode::MissingMatrixTokens,
                    mstart_seen ? "matrix start token has no matching end token"
                                : "reply contains no matrix span");
    }
    if (mspans.size() > 1) out.warnings.push_back("multiple matrix spans; using the first");

    std::vector<double> nums = scan_numbers(mspans.front());
    if (nums.size() == 9) {
        if (std::abs(nums[6]) > 1e-6 || std::abs(nums[7]) > 1e-6 ||
            std::abs(nums[8] - 1.0) > 1e-6) {
            throw Error(ErrorCode::BadBottomRow,
                        "third matrix row must be 0 0 1, got " + format_number(nums[6]) + " " +
                            format_number(nums[7]) + " " + format_number(nums[8]));
        }
    } else if (nums.size() != 6) {
        throw Error(ErrorCode::WrongNumberCount, "matrix span must contain 6 or 9 numbers, found " +
                                                     std::to_string(nums.size()));
    }
    out.transform = AffineTransform{nums[0], nums[1], nums[2], nums[3], nums[4], nums[5]};

    bool istart_seen = false;
    std::vector<std::string> ispans = find_spans(text, kIdStart, kIdEnd, &istart_seen);
    if (ispans.empty()) {
        throw Error(ErrorCode::MissingIdTokens, istart_seen
                                                    ? "id start token has no matching end token"
                                                    : "reply contains no object id span");
    }
    if (ispans.size() > 1) out.warnings.push_back("multiple id spans; using the first");

    std::vector<double> ids = scan_numbers(ispans.front());
    if (ids.empty()) throw Error(ErrorCode::BadId, "id span contains no number");
    if (ids.size() > 1) out.warnings.push_back("id span contains several numbers; using the first");
    double idv = ids.front();
    if (idv < 0.0 || idv != std::floor(idv) || idv > double(std::numeric_limits<int>::max()))
        throw Error(ErrorCode::BadId, "object id must be a nonnegative integer, got " +
                                          format_number(idv));
    out.object_id = static_cast<int>(idv);
    return out;
}

std::string render_reasoner_reply(const geometry::AffineTransform& t, int object_id) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "%s %.17g %.17g %.17g %.17g %.17g %.17g 0 0 1 %s %s %d %s",
                  kMatrixStart, t.a11, t.a12, t.a13, t.a21, t.a22, t.a23, kMatrixEnd, kIdStart,
                  object_id, kIdEnd);
    return buf;
}

SceneDescription parse_grounding_reply(const std::string& text, int image_width,
                                       int image_height) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(first_json_object(text));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedReply,
                    std::string("grounding reply is not valid JSON: ") + e.what());
    }

    SceneDescription out;
    auto text_field = [&root](const char* name) -> std::string {
        if (!root.contains(name) || !root[name].is_string())
            throw Error(ErrorCode::MissingDescriptions,
                        std::string("grounding reply lacks a \"") + name + "\" string");
        std::string v = root[name].get<std::string>();
        if (v.empty())
            throw Error(ErrorCode::MissingDescriptions,
                        std::string("grounding reply has an empty \"") + name + "\"");
        return v;
    };
    out.scene = text_field("scene");
    out.relationships = text_field("relationships");
    out.background_prompt = text_field("background_prompt");
    out.generation_prompt = text_field("generation_prompt");

    if (!root.contains("objects") || !root["objects"].is_array())
        throw Error(ErrorCode::MalformedReply, "grounding reply lacks an \"objects\" array");

    std::set<int> seen_ids;
    for (const auto& item : root["objects"]) {
        bool shape_ok = item.is_object() && item.contains("id") &&
                        item["id"].is_number_integer() && item.contains("class") &&
                        item["class"].is_string() && item.contains("bbox") &&
                        item["bbox"].is_array() && item["bbox"].size() == 4;
        if (shape_ok) {
            for (const auto& v : item["bbox"])
                if (!v.is_number()) shape_ok = false;
        }
        if (!shape_ok) {
            out.warnings.push_back("skipping a malformed object entry");
            continue;
        }

        GroundedObject obj;
        obj.id = item["id"].get<int>();
        if (obj.id < 0) {
            out.warnings.push_back("skipping object with negative id " + std::to_string(obj.id));
            continue;
        }
        if (!seen_ids.insert(obj.id).second) {
            out.warnings.push_back("duplicate object id " + std::to_string(obj.id) +
                                   "; keeping the first");
            continue;
        }
        obj.label = item["class"].get<std::string>();

        BoundingBox b{item["bbox"][0].get<double>(), item["bbox"][1].get<double>(),
                      item["bbox"][2].get<double>(), item["bbox"][3].get<double>()};
        if (b.x_max < b.x_min || b.y_max < b.y_min) {
            if (b.x_max < b.x_min) std::swap(b.x_min, b.x_max);
            if (b.y_max < b.y_min) std::swap(b.y_min, b.y_max);
            out.warnings.push_back("bbox edges for id " + std::to_string(obj.id) +
                                   " were reversed; swapped");
        }
        BoundingBox clamped{std::clamp(b.x_min, 0.0, double(image_width)),
                            std::clamp(b.y_min, 0.0, double(image_height)),
                            std::clamp(b.x_max, 0.0, double(image_width)),
                            std::clamp(b.y_max, 0.0, double(image_height))};
        if (!(clamped == b))
            out.warnings.push_back("bbox for id " + std::to_string(obj.id) +
                                   " clamped to the image");
        if (!(clamped.width() > 0.0) || !(clamped.height() > 0.0)) {
            out.warnings.push_back("dropping id " + std::to_string(obj.id) +
                                   ": bbox is empty after clamping");
            continue;
        }
        obj.bbox = clamped;

        if (item.contains("point") && item["point"].is_array() && item["point"].size() == 2 &&
            item["point"][0].is_number() && item["point"][1].is_number()) {
            obj.point = {item["point"][0].get<double>(), item["point"][1].get<double>()};
            geometry::Point fixed{std::clamp(obj.point.x, obj.bbox.x_min, obj.bbox.x_max),
                                  std::clamp(obj.point.y, obj.bbox.y_min, obj.bbox.y_max)};
            if (fixed.x != obj.point.x || fixed.y != obj.point.y) {
                out.warnings.push_back("point for id " + std::to_string(obj.id) +
                                       " moved inside its bbox");
                obj.point = fixed;
            }
        } else {
            obj.point = obj.bbox.center();
        }
        out.objects.push_back(std::move(obj));
    }

    if (out.objects.empty())
        throw Error(ErrorCode::NoCandidateObjects, "grounding reply lists no usable objects");
    return out;
}

std::string render_grounding_reply(const SceneDescription& scene) {
    nlohmann::ordered_json objs = nlohmann::ordered_json::array();
    for (const GroundedObject& o : scene.objects) {
        objs.push_back({{"id", o.id},
                        {"class", o.label},
                        {"bbox", {o.bbox.x_min, o.bbox.y_min, o.bbox.x_max, o.bbox.y_max}},
                        {"point", {o.point.x, o.point.y}}});
    }
    nlohmann::ordered_json root;
    root["objects"] = std::move(objs);
    root["scene"] = scene.scene;
    root["relationships"] = scene.relationships;
    root["background_prompt"] = scene.background_prompt;
    root["generation_prompt"] = scene.generation_prompt;
    return root.dump(2);
}

std::string grounding_prompt_template() { return kGroundingTemplate; }

std::string reasoner_prompt_template() { return kReasonerTemplate; }

std::string load_template_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open template file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string render_template(const std::string& tmpl,
                            const std::map<std::string, std::string>& values) {
    std::string out;
    std::set<std::string> used;
    size_t pos = 0;
    while (true) {
        size_t open = tmpl.find("{{", pos);
        if (open == std::string::npos) {
            out.append(tmpl, pos, std::string::npos);
            break;
        }
        size_t close = tmpl.find("}}", open + 2);
        if (close == std::string::npos)
            throw Error(ErrorCode::ConfigError, "unterminated {{placeholder}} in template");
        out.append(tmpl, pos, open - pos);
        std::string key = tmpl.substr(open + 2, close - open - 2);
        auto it = values.find(key);
        if (it == values.end())
            throw Error(ErrorCode::ConfigError, "template references unknown key \"" + key + "\"");
        out += it->second;
        used.insert(key);
        pos = close + 2;
    }
    for (const auto& [key, value] : values) {
        (void)value;
        if (!used.count(key))
            throw Error(ErrorCode::ConfigError, "template never uses key \"" + key + "\"");
    }
    return out;
}

std::string make_grounding_prompt(const std::string& tmpl,
                                  const std::vector<std::string>& class_names, int image_width,
                                  int image_height) {
    std::string classes;
    for (const std::string& name : class_names) {
        if (!classes.empty()) classes += ", ";
        classes += name;
    }
    return render_template(tmpl, {{"classes", classes},
                                  {"image_width", std::to_string(image_width)},
                                  {"image_height", std::to_string(image_height)}});
}

std::string make_reasoner_prompt(const std::string& tmpl, const std::string& instruction,
                                 const std::vector<GroundedObject>& candidates, int image_width,
                                 int image_height) {
    std::string lines;
    for (const GroundedObject& c : candidates) {
        if (!lines.empty()) lines += '\n';
        lines += std::to_string(c.id) + " " + c.label + " [" + format_number(c.bbox.x_min) + ", " +
                 format_number(c.bbox.y_min) + ", " + format_number(c.bbox.x_max) + ", " +
                 format_number(c.bbox.y_max) + "]";
    }
    return render_template(tmpl, {{"instruction", instruction},
                                  {"candidates", lines},
                                  {"image_width", std::to_string(image_width)},
                                  {"image_height", std::to_string(image_height)}});
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace objedit::llmproto
