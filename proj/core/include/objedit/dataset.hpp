#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "objedit/editops.hpp"
#include "objedit/geometry.hpp"
#include "objedit/image.hpp"

namespace objedit::dataset {

// The twenty segmentation class names, in canonical order.
extern const std::vector<std::string> kVocClasses;

// One annotated instance: the k-th <object> element of the annotation file,
// matched to palette index k in the instance raster (index 0 is background,
// 255 is the void border).
struct SourceInstance {
    int index = 0;  // palette index, 1-based
    std::string class_name;
    geometry::BoundingBox bbox;  // zero-based, max edges exclusive
    bool truncated = false;
    std::size_t pixel_area = 0;
    bool touches_border = false;
};

struct SourceImage {
    std::string id;
    std::filesystem::path jpeg_path;
    int width = 0;
    int height = 0;
    std::vector<SourceInstance> instances;
    image::GrayImage instance_raster;
};

// Reads <root>/ImageSets/Segmentation/<split>.txt and for each listed id the
// annotation XML, the JPEG and the instance raster. Throws
// MalformedAnnotation or MissingMask naming the offending file.
std::vector<SourceImage> ingest_voc(const std::filesystem::path& root, const std::string& split);

geometry::BinaryMask instance_mask(const SourceImage& img, int instance_index);

enum class Difficulty { Easy, Medium, Hard };
const char* to_string(Difficulty d);
Difficulty difficulty_from_string(const std::string& s);

struct GenerationConfig {
    std::uint64_t seed = 0;
    int transforms_per_image = 2;
    int paraphrases_per_transform = 3;

    // Instance filters.
    int max_foreground_objects = 5;
    double min_area_frac = 0.01;
    double max_area_frac = 0.70;

    // Difficulty thresholds on IoU(before, after).
    double t_easy = 0.5;
    double t_hard = 0.1;

    // Edit kinds to draw from; Mix composes mix_len simple ops. Reason is
    // reserved for externally authored samples and never generated.
    std::vector<editops::EditCategory> kinds = {
        editops::EditCategory::Move,  editops::EditCategory::Scale,
        editops::EditCategory::Flip,  editops::EditCategory::Shear,
        editops::EditCategory::Rotate, editops::EditCategory::Mix};

    // Parameter ranges. Translations and rotations are whole units, scale
    // and shear snap to a two-decimal grid so instruction text round-trips
    // through the parser exactly.
    double move_min_px = 25.0;
    double move_max_px = 250.0;
    double scale_min = 0.5;
    double scale_max = 2.0;
    double rotate_min_deg = 10.0;
    double rotate_max_deg = 90.0;
    double shear_min = 0.1;
    double shear_max = 0.5;
    int mix_len = 2;

    // Parameter redraws allowed before a sample whose object leaves the
    // frame entirely is given up on.
    int max_resample = 16;
};

GenerationConfig load_generation_config(const std::filesystem::path& path);  // JSON
std::string generation_config_json(const GenerationConfig& cfg);             // canonical echo

// Why an instance or image was rejected; keys are the tally names in
// FilterOutcome::dropped.
inline constexpr const char* kDropDuplicateClass = "duplicate_class";
inline constexpr const char* kDropTruncated = "truncated";
inline constexpr const char* kDropExtremeSize = "extreme_size";
inline constexpr const char* kDropBoundary = "boundary";
inline constexpr const char* kDropTooManyObjects = "too_many_objects";

struct FilterOutcome {
    std::vector<int> kept_indices;       // instance indices that survived
    std::map<std::string, int> dropped;  // reason -> count
};

// Applies the five usability rules in order; the first failing rule names
// the reason. duplicate_class: another instance in the image shares the
// class, so a class noun cannot refer uniquely. truncated: the annotation
// flags the object as cut off. extreme_size: mask area outside
// [min_area_frac, max_area_frac] of the image. boundary: the mask touches
// the image edge. too_many_objects: the image holds more than
// max_foreground_objects instances, so every otherwise-usable instance in
// it is dropped.
FilterOutcome filter_instances(const SourceImage& img, const GenerationConfig& cfg);

struct EditSample {
    std::string sample_id;  // "<image>_t<k>_p<j>"
    std::string image_id;
    std::string image_path;  // relative to the dataset root
    std::string instruction;
    editops::EditCategory category = editops::EditCategory::Move;
    Difficulty difficulty = Difficulty::Easy;
    std::string object_label;
    int object_index = 0;
    std::string before_mask_path;  // relative; shared by paraphrases
    std::string after_mask_path;
    geometry::AffineTransform transform;
    std::uint64_t seed = 0;  // per-sample stream for downstream stages
};

struct Manifest {
    GenerationConfig config;
    std::string grounding_template_version;
    std::string reasoner_template_version;
    std::string grounding_template_hash;  // fnv1a64 hex of the prompt text
    std::string reasoner_template_hash;
    std::map<std::string, int> dropped;  // filter tallies over the whole set
    int source_images = 0;
    int usable_images = 0;
    std::vector<EditSample> samples;
};

void save_manifest(const Manifest& m, const std::filesystem::path& path);
Manifest load_manifest(const std::filesystem::path& path);

// Renders the canonical instruction text for an op. Paraphrase variants 0-2
// use different surface templates; every rendering parses back to exactly
// the same op (see grammar.md).
std::string render_instruction(const editops::EditOp& op, const std::string& noun, int variant);

// Builds the benchmark under out_root: picks target objects, synthesizes
// transforms, writes masks/ rasters plus manifest.json, and leaves source
// JPEGs where they are (image paths in the manifest point into voc_root).
// Reruns with equal inputs produce byte-identical files. Per-image work is
// seeded by mixing cfg.seed with the image id, so a subset run generates
// the same samples for the images it shares with a full run.
Manifest generate(const std::filesystem::path& voc_root, const std::string& split,
                  const GenerationConfig& cfg, const std::filesystem::path& out_root);

Difficulty bucket_difficulty(double iou_before_after, const GenerationConfig& cfg);

}  // namespace objedit::dataset
