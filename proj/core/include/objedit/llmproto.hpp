#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "objedit/geometry.hpp"

namespace objedit::llmproto {

// Sentinel tokens wrapping the machine-readable parts of a planner reply.
// These exact byte sequences are part of the wire contract (protocol.md).
inline constexpr const char* kMatrixStart = "<MSTART>";
inline constexpr const char* kMatrixEnd = "<MEND>";
inline constexpr const char* kIdStart = "<ISTART>";
inline constexpr const char* kIdEnd = "<IEND>";

inline constexpr const char* kGroundingTemplateVersion = "grounding_v1";
inline constexpr const char* kReasonerTemplateVersion = "reasoner_v1";

struct ReasonerReply {
    geometry::AffineTransform transform;
    int object_id = 0;
    std::vector<std::string> warnings;
};

// Pulls the matrix and the chosen object id out of free-form reply text.
// Inside the matrix span any non-numeric characters are skipped; 9 numbers
// are read as a full row-major 3x3 (bottom row must be 0 0 1 within 1e-6),
// 6 numbers as the top two rows. When a token pair occurs more than once
// the first complete span wins and a warning is recorded.
// Throws MissingMatrixTokens, MissingIdTokens, WrongNumberCount,
// BadBottomRow, BadId.
ReasonerReply parse_reasoner_reply(const std::string& text);

// Canonical reply text the parser is guaranteed to round-trip.
std::string render_reasoner_reply(const geometry::AffineTransform& t, int object_id);

struct GroundedObject {
    int id = 0;
    std::string label;
    geometry::BoundingBox bbox;
    geometry::Point point{0.0, 0.0};
    bool operator==(const GroundedObject&) const = default;
};

// Everything a grounding backend reports about one image: the candidate
// objects plus the four free-text descriptions the drawing stage needs.
struct SceneDescription {
    std::vector<GroundedObject> objects;
    std::string scene;
    std::string relationships;
    std::string background_prompt;
    std::string generation_prompt;
    std::vector<std::string> warnings;
};

// Extracts the first balanced JSON object from the reply (models often wrap
// it in prose) and validates it. Boxes are clamped to the image, reversed
// edges are swapped, points are clamped into their box, duplicate ids keep
// the first occurrence; each repair appends a warning. Throws
// MalformedReply, MissingDescriptions, NoCandidateObjects.
SceneDescription parse_grounding_reply(const std::string& text, int image_width,
                                       int image_height);

// Inverse of parse_grounding_reply for oracle backends and stub scripts.
std::string render_grounding_reply(const SceneDescription& scene);

// Builtin prompt texts; byte-identical copies ship as files under
// core/templates/ for operators who want to edit them.
std::string grounding_prompt_template();
std::string reasoner_prompt_template();

std::string load_template_file(const std::string& path);

// Replaces every "{{key}}" with its value. Unknown keys in the template or
// unused entries in the map throw ConfigError so template edits fail loudly.
std::string render_template(const std::string& tmpl,
                            const std::map<std::string, std::string>& values);

std::string make_grounding_prompt(const std::string& tmpl,
                                  const std::vector<std::string>& class_names, int image_width,
                                  int image_height);

std::string make_reasoner_prompt(const std::string& tmpl, const std::string& instruction,
                                 const std::vector<GroundedObject>& candidates, int image_width,
                                 int image_height);

// Recorded next to results so a report names the exact prompt text it used.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace objedit::llmproto
