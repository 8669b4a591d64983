#include "objedit/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <utility>

#include <nlohmann/json.hpp>

#include "objedit/error.hpp"
#include "objedit/llmproto.hpp"
#include "objedit/rng.hpp"

namespace objedit::dataset {

namespace fs = std::filesystem;
using editops::EditCategory;
using editops::EditOp;
using geometry::BinaryMask;

namespace {

std::string hash_hex(std::uint64_t h) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

double grid2(double v) { return std::round(v * 100.0) / 100.0; }

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string format_px(double v) { return format_number(v) + "px"; }

// "0.50" -> "0.5", "2.00" -> "2".
std::string format_factor(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    std::string s = buf;
    while (s.size() > 1 && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
}

struct MovePart {
    const char* dir;
    double amount;
};

std::vector<MovePart> decompose(const editops::Move& m) {
    std::vector<MovePart> parts;
    if (m.dx < 0)
        parts.push_back({"left", -m.dx});
    else if (m.dx > 0)
        parts.push_back({"right", m.dx});
    if (m.dy < 0)
        parts.push_back({"up", -m.dy});
    else if (m.dy > 0)
        parts.push_back({"down", m.dy});
    if (parts.empty()) parts.push_back({"right", 0.0});
    return parts;
}

[[noreturn]] void unrenderable(const std::string& why) {
    throw Error(ErrorCode::ConfigError, "instruction grammar cannot express " + why);
}

struct ClauseRenderer {
    std::string subj;
    int variant;

    std::string operator()(const editops::Move& m) const {
        std::vector<MovePart> p = decompose(m);
        std::string s;
        if (variant == 0) {
            s = "move " + subj + " " + p[0].dir + " by " + format_px(p[0].amount);
            if (p.size() > 1) s += std::string(" and ") + p[1].dir + " by " + format_px(p[1].amount);
        } else if (variant == 1) {
            s = "shift " + subj + " " + format_px(p[0].amount) + " to the " + p[0].dir;
            if (p.size() > 1) s += " and " + format_px(p[1].amount) + " " + p[1].dir;
        } else {
            s = "move " + subj + " " + format_px(p[0].amount) + " " + p[0].dir;
            if (p.size() > 1) s += " and " + format_px(p[1].amount) + " " + p[1].dir;
        }
        return s;
    }

    std::string operator()(const editops::ScaleBy& sc) const {
        if (sc.sx != sc.sy) {
            // Only the one-template per-axis form exists; paraphrases would
            // coincide, so the generator sticks to uniform factors.
            if (sc.sx != 1.0 && sc.sy != 1.0)
                return "scale " + subj + " horizontally by " + format_factor(sc.sx) +
                       " and vertically by " + format_factor(sc.sy);
            if (sc.sx != 1.0) return "scale " + subj + " horizontally by " + format_factor(sc.sx);
            return "scale " + subj + " vertically by " + format_factor(sc.sy);
        }
        std::string f = format_factor(sc.sx);
        if (variant == 0) return "scale " + subj + " by " + f;
        if (variant == 1) return "resize " + subj + " by a factor of " + f;
        return "make " + subj + " " + f + " times its current size";
    }

    std::string operator()(const editops::ScaleToWidth& sc) const {
        std::string w = format_px(sc.width);
        if (variant == 0) return "make " + subj + " " + w + " wide";
        if (variant == 1) return "resize " + subj + " to " + w + " wide";
        return "scale " + subj + " to a width of " + w;
    }

    std::string operator()(const editops::ScaleToHeight& sc) const {
        std::string h = format_px(sc.height);
        if (variant == 0) return "make " + subj + " " + h + " tall";
        if (variant == 1) return "resize " + subj + " to " + h + " tall";
        return "scale " + subj + " to a height of " + h;
    }

    std::string operator()(const editops::Rotate& r) const {
        std::string d = format_number(std::abs(r.degrees));
        if (r.degrees < 0) {
            if (variant == 0) return "rotate " + subj + " by " + d + " degrees clockwise";
            if (variant == 1) return "rotate " + subj + " " + d + " degrees clockwise";
            return "turn " + subj + " by " + d + " degrees clockwise";
        }
        if (variant == 0) return "rotate " + subj + " by " + d + " degrees";
        if (variant == 1) return "rotate " + subj + " " + d + " degrees counterclockwise";
        return "turn " + subj + " by " + d + " degrees";
    }

    std::string operator()(const editops::FlipHorizontal&) const {
        if (variant == 0) return "flip " + subj + " horizontally";
        if (variant == 1) return "mirror " + subj + " horizontally";
        return "flip " + subj + " left to right";
    }

    std::string operator()(const editops::FlipVertical&) const {
        if (variant == 0) return "flip " + subj + " vertically";
        if (variant == 1) return "mirror " + subj + " vertically";
        return "flip " + subj + " upside down";
    }

    std::string operator()(const editops::Shear& sh) const {
        if (sh.kx != 0.0 && sh.ky != 0.0) unrenderable("a two-axis shear in one clause");
        bool horiz = sh.kx != 0.0;
        std::string k = format_factor(horiz ? sh.kx : sh.ky);
        const char* axis = horiz ? "horizontally" : "vertically";
        const char* axis_adj = horiz ? "horizontal" : "vertical";
        if (variant == 0) return std::string("shear ") + subj + " " + axis + " by " + k;
        if (variant == 1)
            return std::string("apply a ") + axis_adj + " shear of " + k + " to " + subj;
        return std::string("skew ") + subj + " " + axis + " by " + k;
    }

    std::string operator()(const editops::Sequence&) const {
        unrenderable("a nested sequence");
    }
};

EditCategory require_category(const nlohmann::json& j) {
    return editops::category_from_string(j.get<std::string>());
}

void config_from_json(const nlohmann::json& j, GenerationConfig& cfg) {
    static const std::set<std::string> known = {
        "seed",          "transforms_per_image", "paraphrases_per_transform",
        "max_foreground_objects", "min_area_frac", "max_area_frac",
        "t_easy",        "t_hard",               "kinds",
        "move_min_px",   "move_max_px",          "scale_min",
        "scale_max",     "rotate_min_deg",       "rotate_max_deg",
        "shear_min",     "shear_max",            "mix_len",
        "max_resample"};
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!known.count(key))
            throw Error(ErrorCode::ConfigError, "unknown generation config key \"" + key + "\"");
    }
    auto opt = [&j](const char* key, auto& slot) {
        if (j.contains(key)) slot = j[key].get<std::decay_t<decltype(slot)>>();
    };
    opt("seed", cfg.seed);
    opt("transforms_per_image", cfg.transforms_per_image);
    opt("paraphrases_per_transform", cfg.paraphrases_per_transform);
    opt("max_foreground_objects", cfg.max_foreground_objects);
    opt("min_area_frac", cfg.min_area_frac);
    opt("max_area_frac", cfg.max_area_frac);
    opt("t_easy", cfg.t_easy);
    opt("t_hard", cfg.t_hard);
    opt("move_min_px", cfg.move_min_px);
    opt("move_max_px", cfg.move_max_px);
    opt("scale_min", cfg.scale_min);
    opt("scale_max", cfg.scale_max);
    opt("rotate_min_deg", cfg.rotate_min_deg);
    opt("rotate_max_deg", cfg.rotate_max_deg);
    opt("shear_min", cfg.shear_min);
    opt("shear_max", cfg.shear_max);
    opt("mix_len", cfg.mix_len);
    opt("max_resample", cfg.max_resample);
    if (j.contains("kinds")) {
        cfg.kinds.clear();
        for (const auto& k : j["kinds"]) cfg.kinds.push_back(require_category(k));
    }
    if (cfg.kinds.empty())
        throw Error(ErrorCode::ConfigError, "generation config lists no edit kinds");
    if (cfg.transforms_per_image < 1 || cfg.paraphrases_per_transform < 1 || cfg.mix_len < 1)
        throw Error(ErrorCode::ConfigError, "generation config counts must be positive");
    for (EditCategory k : cfg.kinds)
        if (k == EditCategory::Reason)
            throw Error(ErrorCode::ConfigError,
                        "Reason samples are authored, not generated; remove it from kinds");
}

nlohmann::json config_to_json(const GenerationConfig& cfg) {
    nlohmann::json kinds = nlohmann::json::array();
    for (EditCategory k : cfg.kinds) kinds.push_back(editops::to_string(k));
    return {{"seed", cfg.seed},
            {"transforms_per_image", cfg.transforms_per_image},
            {"paraphrases_per_transform", cfg.paraphrases_per_transform},
            {"max_foreground_objects", cfg.max_foreground_objects},
            {"min_area_frac", cfg.min_area_frac},
            {"max_area_frac", cfg.max_area_frac},
            {"t_easy", cfg.t_easy},
            {"t_hard", cfg.t_hard},
            {"kinds", std::move(kinds)},
            {"move_min_px", cfg.move_min_px},
            {"move_max_px", cfg.move_max_px},
            {"scale_min", cfg.scale_min},
            {"scale_max", cfg.scale_max},
            {"rotate_min_deg", cfg.rotate_min_deg},
            {"rotate_max_deg", cfg.rotate_max_deg},
            {"shear_min", cfg.shear_min},
            {"shear_max", cfg.shear_max},
            {"mix_len", cfg.mix_len},
            {"max_resample", cfg.max_resample}};
}

EditOp synth_simple(EditCategory kind, rng::SplitMix64& rng, const GenerationConfig& cfg,
                    const editops::ObjectGeometry& geom) {
    switch (kind) {
        case EditCategory::Move: {
            auto amount = [&]() {
                return double(rng.uniform_int(int(cfg.move_min_px), int(cfg.move_max_px)));
            };
            editops::Move m;
            switch (int(rng.below(6))) {
                case 0: m.dx = -amount(); break;
                case 1: m.dx = amount(); break;
                case 2: m.dy = -amount(); break;
                case 3: m.dy = amount(); break;
                default:
                    m.dx = rng.coin() ? amount() : -amount();
                    m.dy = rng.coin() ? amount() : -amount();
            }
            return EditOp(m);
        }
        case EditCategory::Scale: {
            double f = grid2(rng.uniform(cfg.scale_min, cfg.scale_max));
            for (int i = 0; i < 8 && f == 1.0; ++i)
                f = grid2(rng.uniform(cfg.scale_min, cfg.scale_max));
            if (f == 1.0) f = grid2(cfg.scale_max);
            switch (int(rng.below(3))) {
                case 0: return EditOp(editops::ScaleBy{f, f});
                case 1: {
                    double target = std::max(1.0, std::round(geom.bbox.width() * f));
                    return EditOp(editops::ScaleToWidth{target});
                }
                default: {
                    double target = std::max(1.0, std::round(geom.bbox.height() * f));
                    return EditOp(editops::ScaleToHeight{target});
                }
            }
        }
        case EditCategory::Rotate: {
            int deg = rng.uniform_int(int(cfg.rotate_min_deg), int(cfg.rotate_max_deg));
            return EditOp(editops::Rotate{rng.coin() ? double(deg) : -double(deg)});
        }
        case EditCategory::Flip:
            return rng.coin() ? EditOp(editops::FlipHorizontal{})
                              : EditOp(editops::FlipVertical{});
        case EditCategory::Shear: {
            double k = grid2(rng.uniform(cfg.shear_min, cfg.shear_max));
            if (k == 0.0) k = grid2(cfg.shear_min);
            if (rng.coin()) k = -k;
            return rng.coin() ? EditOp(editops::Shear{k, 0.0}) : EditOp(editops::Shear{0.0, k});
        }
        default:
            break;
    }
    throw Error(ErrorCode::ConfigError,
                std::string("cannot synthesize kind ") + editops::to_string(kind));
}

EditOp synth_op(EditCategory kind, rng::SplitMix64& rng, const GenerationConfig& cfg,
                const editops::ObjectGeometry& geom) {
    if (kind != EditCategory::Mix) return synth_simple(kind, rng, cfg, geom);

    static const EditCategory pool[] = {EditCategory::Move, EditCategory::Scale,
                                        EditCategory::Rotate, EditCategory::Shear,
                                        EditCategory::Flip};
    // Distinct kinds per step keeps the composed instruction readable.
    std::vector<EditCategory> deck(std::begin(pool), std::end(pool));
    editops::Sequence seq;
    for (int i = 0; i < cfg.mix_len; ++i) {
        if (deck.empty()) deck.assign(std::begin(pool), std::end(pool));
        size_t pick = size_t(rng.below(deck.size()));
        EditCategory k = deck[pick];
        deck.erase(deck.begin() + long(pick));
        seq.ops.push_back(synth_simple(k, rng, cfg, geom));
    }
    return EditOp(std::move(seq));
}

nlohmann::json sample_to_json(const EditSample& s) {
    return {{"sample_id", s.sample_id},
            {"image_id", s.image_id},
            {"image_path", s.image_path},
            {"instruction", s.instruction},
            {"category", editops::to_string(s.category)},
            {"difficulty", to_string(s.difficulty)},
            {"object_label", s.object_label},
            {"object_index", s.object_index},
            {"before_mask_path", s.before_mask_path},
            {"after_mask_path", s.after_mask_path},
            {"transform",
             {s.transform.a11, s.transform.a12, s.transform.a13, s.transform.a21, s.transform.a22,
              s.transform.a23}},
            {"seed", s.seed}};
}

EditSample sample_from_json(const nlohmann::json& j) {
    EditSample s;
    s.sample_id = j.at("sample_id").get<std::string>();
    s.image_id = j.at("image_id").get<std::string>();
    s.image_path = j.at("image_path").get<std::string>();
    s.instruction = j.at("instruction").get<std::string>();
    s.category = editops::category_from_string(j.at("category").get<std::string>());
    s.difficulty = difficulty_from_string(j.at("difficulty").get<std::string>());
    s.object_label = j.at("object_label").get<std::string>();
    s.object_index = j.at("object_index").get<int>();
    s.before_mask_path = j.at("before_mask_path").get<std::string>();
    s.after_mask_path = j.at("after_mask_path").get<std::string>();
    const auto& t = j.at("transform");
    if (!t.is_array() || t.size() != 6)
        throw Error(ErrorCode::ConfigError, "sample transform must hold 6 numbers");
    s.transform = {t[0].get<double>(), t[1].get<double>(), t[2].get<double>(),
                   t[3].get<double>(), t[4].get<double>(), t[5].get<double>()};
    s.seed = j.at("seed").get<std::uint64_t>();
    return s;
}

}  // namespace

const char* to_string(Difficulty d) {
    switch (d) {
        case Difficulty::Easy: return "easy";
        case Difficulty::Medium: return "medium";
        case Difficulty::Hard: return "hard";
    }
    return "medium";
}

Difficulty difficulty_from_string(const std::string& s) {
    if (s == "easy") return Difficulty::Easy;
    if (s == "medium") return Difficulty::Medium;
    if (s == "hard") return Difficulty::Hard;
    throw Error(ErrorCode::ConfigError, "unknown difficulty \"" + s + "\"");
}

GenerationConfig load_generation_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open generation config " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
    }
    GenerationConfig cfg;
    config_from_json(j, cfg);
    return cfg;
}

std::string generation_config_json(const GenerationConfig& cfg) {
    return config_to_json(cfg).dump(2);
}

FilterOutcome filter_instances(const SourceImage& img, const GenerationConfig& cfg) {
    FilterOutcome out;
    std::map<std::string, int> class_counts;
    for (const SourceInstance& inst : img.instances) ++class_counts[inst.class_name];

    const bool crowded = int(img.instances.size()) > cfg.max_foreground_objects;
    const double image_area = double(img.width) * double(img.height);

    for (const SourceInstance& inst : img.instances) {
        if (class_counts[inst.class_name] > 1) {
            ++out.dropped[kDropDuplicateClass];
            continue;
        }
        if (inst.truncated) {
            ++out.dropped[kDropTruncated];
            continue;
        }
        double frac = double(inst.pixel_area) / image_area;
        if (frac < cfg.min_area_frac || frac > cfg.max_area_frac) {
            ++out.dropped[kDropExtremeSize];
            continue;
        }
        if (inst.touches_border) {
            ++out.dropped[kDropBoundary];
            continue;
        }
        if (crowded) {
            ++out.dropped[kDropTooManyObjects];
            continue;
        }
        out.kept_indices.push_back(inst.index);
    }
    return out;
}

std::string render_instruction(const EditOp& op, const std::string& noun, int variant) {
    int v = variant % 3;
    if (const auto* seq = std::get_if<editops::Sequence>(&op.node())) {
        std::string text;
        for (size_t i = 0; i < seq->ops.size(); ++i) {
            std::string subj = i == 0 ? "the " + noun : std::string("it");
            if (!text.empty()) text += " and ";
            text += std::visit(ClauseRenderer{subj, v}, seq->ops[i].node());
        }
        if (text.empty()) throw Error(ErrorCode::EmptyInstruction, "sequence has no steps");
        return text;
    }
    return std::visit(ClauseRenderer{"the " + noun, v}, op.node());
}

Difficulty bucket_difficulty(double iou_before_after, const GenerationConfig& cfg) {
    if (iou_before_after >= cfg.t_easy) return Difficulty::Easy;
    if (iou_before_after <= cfg.t_hard) return Difficulty::Hard;
    return Difficulty::Medium;
}

void save_manifest(const Manifest& m, const fs::path& path) {
    nlohmann::json samples = nlohmann::json::array();
    for (const EditSample& s : m.samples) samples.push_back(sample_to_json(s));
    nlohmann::json j{{"version", 1},
                     {"config", config_to_json(m.config)},
                     {"grounding_template_version", m.grounding_template_version},
                     {"reasoner_template_version", m.reasoner_template_version},
                     {"grounding_template_hash", m.grounding_template_hash},
                     {"reasoner_template_hash", m.reasoner_template_hash},
                     {"dropped", m.dropped},
                     {"source_images", m.source_images},
                     {"usable_images", m.usable_images},
                     {"samples", std::move(samples)}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write manifest " + path.string());
    out << j.dump(2) << '\n';
}

Manifest load_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open manifest " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
    }
    Manifest m;
    try {
        config_from_json(j.at("config"), m.config);
        m.grounding_template_version = j.at("grounding_template_version").get<std::string>();
        m.reasoner_template_version = j.at("reasoner_template_version").get<std::string>();
        m.grounding_template_hash = j.at("grounding_template_hash").get<std::string>();
        m.reasoner_template_hash = j.at("reasoner_template_hash").get<std::string>();
        m.dropped = j.at("dropped").get<std::map<std::string, int>>();
        m.source_images = j.at("source_images").get<int>();
        m.usable_images = j.at("usable_images").get<int>();
        for (const auto& s : j.at("samples")) m.samples.push_back(sample_from_json(s));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
    }
    return m;
}

Manifest generate(const fs::path& voc_root, const std::string& split, const GenerationConfig& cfg,
                  const fs::path& out_root) {
    std::vector<SourceImage> images = ingest_voc(voc_root, split);
    fs::create_directories(out_root / "masks");

    Manifest m;
    m.config = cfg;
    m.grounding_template_version = llmproto::kGroundingTemplateVersion;
    m.reasoner_template_version = llmproto::kReasonerTemplateVersion;
    m.grounding_template_hash = hash_hex(llmproto::fnv1a64(llmproto::grounding_prompt_template()));
    m.reasoner_template_hash = hash_hex(llmproto::fnv1a64(llmproto::reasoner_prompt_template()));
    m.source_images = int(images.size());

    for (const SourceImage& img : images) {
        FilterOutcome fo = filter_instances(img, cfg);
        for (const auto& [reason, n] : fo.dropped) m.dropped[reason] += n;
        if (fo.kept_indices.empty()) continue;
        ++m.usable_images;

        rng::SplitMix64 rng(rng::mix(cfg.seed ^ llmproto::fnv1a64(img.id)));

        // Distinct kinds per image, falling back to repeats only when the
        // config lists fewer kinds than transforms.
        std::vector<EditCategory> deck = cfg.kinds;
        std::set<int> masks_written;

        for (int k = 0; k < cfg.transforms_per_image; ++k) {
            if (deck.empty()) deck = cfg.kinds;
            size_t pick = size_t(rng.below(deck.size()));
            EditCategory kind = deck[pick];
            deck.erase(deck.begin() + long(pick));

            int instance = fo.kept_indices[rng.below(fo.kept_indices.size())];
            const SourceInstance& inst = img.instances[instance - 1];
            BinaryMask before = instance_mask(img, instance);
            editops::ObjectGeometry geom{geometry::bbox_of_mask(before), img.width, img.height};

            EditOp op;
            geometry::AffineTransform t;
            BinaryMask after;
            bool ok = false;
            for (int attempt = 0; attempt <= cfg.max_resample; ++attempt) {
                op = synth_op(kind, rng, cfg, geom);
                t = editops::compile(op, geom);
                after = geometry::warp_mask(before, t);
                if (!after.empty()) {
                    ok = true;
                    break;
                }
            }
            if (!ok)
                throw Error(ErrorCode::ExhaustedResampling,
                            img.id + " transform " + std::to_string(k) + ": object leaves the "
                            "frame after " + std::to_string(cfg.max_resample + 1) + " redraws");

            std::string before_rel = "masks/" + img.id + "_obj" + std::to_string(instance) + ".pgm";
            std::string after_rel = "masks/" + img.id + "_t" + std::to_string(k) + ".pgm";
            if (masks_written.insert(instance).second)
                image::save_mask(before, out_root / before_rel);
            image::save_mask(after, out_root / after_rel);

            Difficulty difficulty = bucket_difficulty(geometry::mask_iou(before, after), cfg);
            std::string image_rel =
                fs::relative(img.jpeg_path, out_root).generic_string();

            for (int j = 0; j < cfg.paraphrases_per_transform; ++j) {
                EditSample s;
                s.sample_id = img.id + "_t" + std::to_string(k) + "_p" + std::to_string(j);
                s.image_id = img.id;
                s.image_path = image_rel;
                s.instruction = render_instruction(op, inst.class_name, j);
                s.category = editops::categorize(op);
                s.difficulty = difficulty;
                s.object_label = inst.class_name;
                s.object_index = instance;
                s.before_mask_path = before_rel;
                s.after_mask_path = after_rel;
                s.transform = t;
                s.seed = rng::mix(cfg.seed ^ llmproto::fnv1a64(s.sample_id));
                m.samples.push_back(std::move(s));
            }
        }
    }

    save_manifest(m, out_root / "manifest.json");
    return m;
}

}  // namespace objedit::dataset
