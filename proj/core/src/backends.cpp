#include "objedit/backends.hpp"

#include <algorithm>
#include <cctype>
#include <utility>

#include <nlohmann/json.hpp>

#include "objedit/editops.hpp"
#include "objedit/error.hpp"
#include "objedit/rng.hpp"
#include "objedit/wire.hpp"

namespace objedit::backends {

namespace {

using geometry::BinaryMask;
using geometry::BoundingBox;
using llmproto::GroundedObject;
using llmproto::SceneDescription;

std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return char(std::tolower(c)); });
    return s;
}

const GroundTruth& need_gt(const GroundTruth* gt, const char* who) {
    if (!gt)
        throw Error(ErrorCode::ConfigError,
                    std::string(who) + " needs ground-truth context; use it only on "
                                       "benchmark samples");
    return *gt;
}

SceneDescription oracle_scene(const GroundTruth& gt) {
    SceneDescription scene;
    GroundedObject obj;
    obj.id = gt.object_id;
    obj.label = gt.object_label;
    obj.bbox = geometry::bbox_of_mask(gt.before_mask);
    obj.point = obj.bbox.center();
    scene.objects.push_back(std::move(obj));
    scene.scene = "a photograph with a " + gt.object_label + " in frame";
    scene.relationships = "the " + gt.object_label + " is the annotated object";
    scene.background_prompt = "the scenery around the " + gt.object_label;
    scene.generation_prompt = "a realistic " + gt.object_label;
    return scene;
}

class OracleGrounder final : public Grounder {
  public:
    SceneDescription ground(const GroundContext& ctx) override {
        return oracle_scene(need_gt(ctx.gt, "oracle grounder"));
    }
};

class JitterGrounder final : public Grounder {
  public:
    explicit JitterGrounder(double sigma_px) : sigma_(sigma_px) {}

    SceneDescription ground(const GroundContext& ctx) override {
        if (!ctx.image) throw Error(ErrorCode::ConfigError, "jitter grounder needs the image");
        SceneDescription scene = oracle_scene(need_gt(ctx.gt, "jitter grounder"));
        rng::GaussianStream gauss(rng::mix(ctx.seed ^ 0x9d2c5680aull));
        const double w = ctx.image->width;
        const double h = ctx.image->height;
        for (GroundedObject& obj : scene.objects) {
            BoundingBox b = obj.bbox;
            b.x_min = std::clamp(b.x_min + sigma_ * gauss.next(), 0.0, w);
            b.y_min = std::clamp(b.y_min + sigma_ * gauss.next(), 0.0, h);
            b.x_max = std::clamp(b.x_max + sigma_ * gauss.next(), 0.0, w);
            b.y_max = std::clamp(b.y_max + sigma_ * gauss.next(), 0.0, h);
            if (b.x_max < b.x_min) std::swap(b.x_min, b.x_max);
            if (b.y_max < b.y_min) std::swap(b.y_min, b.y_max);
            obj.bbox = b;
            obj.point = b.center();
        }
        return scene;
    }

  private:
    double sigma_;
};

class OracleRefiner final : public Refiner {
  public:
    std::vector<RefinedObject> refine(const RefineContext& ctx) override {
        const GroundTruth& gt = need_gt(ctx.gt, "oracle refiner");
        std::vector<RefinedObject> out;
        for (const GroundedObject& det : ctx.detections) {
            if (det.id != gt.object_id)
                throw Error(ErrorCode::ObjectNotFound,
                            "oracle refiner has no mask for id " + std::to_string(det.id));
            out.push_back({det.id, gt.before_mask, geometry::bbox_of_mask(gt.before_mask)});
        }
        return out;
    }
};

class CompilerReasoner final : public Reasoner {
  public:
    ReasonResult reason(const ReasonContext& ctx) override {
        editops::ParsedInstruction parsed = editops::parse_instruction_detail(ctx.instruction);
        const GroundedObject* target = nullptr;
        std::string noun = lowercase(parsed.object_noun);
        for (const GroundedObject& c : ctx.candidates) {
            if (lowercase(c.label) == noun) {
                target = &c;
                break;
            }
        }
        if (!target)
            throw Error(ErrorCode::ObjectNotFound,
                        "no candidate is labeled \"" + parsed.object_noun + "\"");
        editops::ObjectGeometry geom{target->bbox, ctx.image_width, ctx.image_height};
        return {editops::compile(parsed.op, geom), target->id, {}};
    }
};

class PerturbedReasoner final : public Reasoner {
  public:
    PerturbedReasoner(std::unique_ptr<Reasoner> inner, double rel_noise)
        : inner_(std::move(inner)), rel_(rel_noise) {}

    ReasonResult reason(const ReasonContext& ctx) override {
        ReasonResult r = inner_->reason(ctx);
        rng::GaussianStream gauss(rng::mix(ctx.seed ^ 0x5deece66dull));
        // Noise is relative to the edit's deviation from the identity, not to
        // the raw matrix entries. Entries the edit leaves alone stay exact,
        // so a gentle nudge stays nearly perfect while an aggressive edit
        // degrades in proportion.
        const geometry::AffineTransform id = geometry::AffineTransform::identity();
        const double base[6] = {id.a11, id.a12, id.a13, id.a21, id.a22, id.a23};
        geometry::AffineTransform noisy = r.transform;
        double* entries[6] = {&noisy.a11, &noisy.a12, &noisy.a13,
                              &noisy.a21, &noisy.a22, &noisy.a23};
        for (int k = 0; k < 6; ++k) {
            double deviation = *entries[k] - base[k];
            *entries[k] = base[k] + deviation * (1.0 + rel_ * gauss.next());
        }
        // Anchor the linear-part error at the chosen object's center. Left at
        // the raw matrix it would act about the image origin and displace the
        // object by rel times its distance from (0,0), which has nothing to
        // do with how aggressive the requested edit was.
        auto it = std::find_if(ctx.candidates.begin(), ctx.candidates.end(),
                               [&](const GroundedObject& c) { return c.id == r.object_id; });
        if (it != ctx.candidates.end()) {
            geometry::Point c = it->bbox.center();
            noisy.a13 += (r.transform.a11 - noisy.a11) * c.x + (r.transform.a12 - noisy.a12) * c.y;
            noisy.a23 += (r.transform.a21 - noisy.a21) * c.x + (r.transform.a22 - noisy.a22) * c.y;
        }
        r.transform = noisy;
        return r;
    }

  private:
    std::unique_ptr<Reasoner> inner_;
    double rel_;
};

class ReferenceDrawer final : public Drawer {
  public:
    EditedImage draw(const DrawContext& ctx) override {
        if (!ctx.image || !ctx.before)
            throw Error(ErrorCode::ConfigError, "reference drawer needs image and mask");
        compositor::EditResult r =
            compositor::composite(*ctx.image, *ctx.before, ctx.transform, ctx.fill, ctx.seed);
        return {std::move(r.image), std::move(r.after)};
    }
};

nlohmann::json parse_body(const std::string& body, const char* route) {
    try {
        return nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedReply,
                    std::string(route) + " body is not valid JSON: " + e.what());
    }
}

std::string image_b64(const image::Image& img) {
    return wire::base64_encode(image::encode_ppm(img));
}

std::string mask_b64(const BinaryMask& mask) {
    return wire::base64_encode(image::mask_to_pgm(mask));
}

nlohmann::json detection_json(const GroundedObject& d) {
    return {{"id", d.id},
            {"class", d.label},
            {"bbox", {d.bbox.x_min, d.bbox.y_min, d.bbox.x_max, d.bbox.y_max}},
            {"point", {d.point.x, d.point.y}}};
}

}  // namespace

std::unique_ptr<Grounder> make_oracle_grounder() { return std::make_unique<OracleGrounder>(); }

std::unique_ptr<Grounder> make_jitter_grounder(double sigma_px) {
    return std::make_unique<JitterGrounder>(sigma_px);
}

std::unique_ptr<Refiner> make_oracle_refiner() { return std::make_unique<OracleRefiner>(); }

std::unique_ptr<Reasoner> make_compiler_reasoner() { return std::make_unique<CompilerReasoner>(); }

std::unique_ptr<Reasoner> make_perturbed_reasoner(std::unique_ptr<Reasoner> inner,
                                                  double rel_noise) {
    return std::make_unique<PerturbedReasoner>(std::move(inner), rel_noise);
}

std::unique_ptr<Drawer> make_reference_drawer() { return std::make_unique<ReferenceDrawer>(); }

std::string make_ground_request(const image::Image& image, const std::string& prompt) {
    return nlohmann::json{{"image_b64", image_b64(image)}, {"prompt", prompt}}.dump();
}

std::string make_refine_request(const image::Image& image,
                                const std::vector<GroundedObject>& detections) {
    nlohmann::json dets = nlohmann::json::array();
    for (const GroundedObject& d : detections) dets.push_back(detection_json(d));
    return nlohmann::json{{"image_b64", image_b64(image)}, {"detections", std::move(dets)}}.dump();
}

std::string make_reason_request(const std::string& prompt) {
    return nlohmann::json{{"prompt", prompt}}.dump();
}

std::string make_draw_request(const image::Image& image, const geometry::BinaryMask& before,
                              const geometry::BinaryMask& after,
                              const std::string& background_prompt,
                              const std::string& generation_prompt, bool refine) {
    return nlohmann::json{{"image_b64", image_b64(image)},
                          {"before_mask_b64", mask_b64(before)},
                          {"after_mask_b64", mask_b64(after)},
                          {"background_prompt", background_prompt},
                          {"generation_prompt", generation_prompt},
                          {"refine", refine}}
        .dump();
}

std::string make_text_response(const std::string& reply) {
    return nlohmann::json{{"reply", reply}}.dump();
}

std::string make_refine_response(const std::vector<RefinedObject>& objects) {
    nlohmann::json objs = nlohmann::json::array();
    for (const RefinedObject& o : objects) {
        objs.push_back({{"id", o.id},
                        {"mask_b64", mask_b64(o.mask)},
                        {"bbox", {o.bbox.x_min, o.bbox.y_min, o.bbox.x_max, o.bbox.y_max}}});
    }
    return nlohmann::json{{"objects", std::move(objs)}}.dump();
}

std::string make_draw_response(const image::Image& image) {
    return nlohmann::json{{"image_b64", image_b64(image)}}.dump();
}

std::string parse_text_response(const std::string& body) {
    nlohmann::json j = parse_body(body, "text response");
    if (!j.is_object() || !j.contains("reply") || !j["reply"].is_string())
        throw Error(ErrorCode::MalformedReply, "response lacks a \"reply\" string");
    return j["reply"].get<std::string>();
}

std::vector<RefinedObject> parse_refine_response(const std::string& body) {
    nlohmann::json j = parse_body(body, "/refine response");
    if (!j.is_object() || !j.contains("objects") || !j["objects"].is_array())
        throw Error(ErrorCode::MalformedReply, "/refine response lacks an \"objects\" array");
    std::vector<RefinedObject> out;
    for (const auto& item : j["objects"]) {
        if (!item.is_object() || !item.contains("id") || !item["id"].is_number_integer() ||
            !item.contains("mask_b64") || !item["mask_b64"].is_string())
            throw Error(ErrorCode::MalformedReply, "/refine response object entry is malformed");
        RefinedObject o;
        o.id = item["id"].get<int>();
        o.mask = image::mask_from_pgm(wire::base64_decode(item["mask_b64"].get<std::string>()));
        // The reported bbox (if any) is ignored; deriving it from the mask
        // keeps the two consistent no matter what the host sent.
        o.bbox = o.mask.empty() ? BoundingBox{} : geometry::bbox_of_mask(o.mask);
        out.push_back(std::move(o));
    }
    return out;
}

image::Image parse_draw_response(const std::string& body) {
    nlohmann::json j = parse_body(body, "/draw response");
    if (!j.is_object() || !j.contains("image_b64") || !j["image_b64"].is_string())
        throw Error(ErrorCode::MalformedReply, "/draw response lacks an \"image_b64\" string");
    return image::decode_ppm(wire::base64_decode(j["image_b64"].get<std::string>()));
}

BackendSet make_backends(const BackendConfig& cfg) {
    BackendSet set;

    if (cfg.grounder.kind == "oracle")
        set.grounder = make_oracle_grounder();
    else if (cfg.grounder.kind == "jitter")
        set.grounder = make_jitter_grounder(cfg.grounder.jitter_px);
    else if (cfg.grounder.kind == "http")
        set.grounder = make_http_grounder(cfg.grounder);
    else
        throw Error(ErrorCode::ConfigError, "unknown grounder kind \"" + cfg.grounder.kind + "\"");

    if (cfg.refiner.kind == "oracle")
        set.refiner = make_oracle_refiner();
    else if (cfg.refiner.kind == "http")
        set.refiner = make_http_refiner(cfg.refiner);
    else
        throw Error(ErrorCode::ConfigError, "unknown refiner kind \"" + cfg.refiner.kind + "\"");

    if (cfg.reasoner.kind == "compiler")
        set.reasoner = make_compiler_reasoner();
    else if (cfg.reasoner.kind == "perturbed")
        set.reasoner = make_perturbed_reasoner(make_compiler_reasoner(), cfg.reasoner.rel_noise);
    else if (cfg.reasoner.kind == "http")
        set.reasoner = make_http_reasoner(cfg.reasoner);
    else
        throw Error(ErrorCode::ConfigError, "unknown reasoner kind \"" + cfg.reasoner.kind + "\"");

    if (cfg.drawer.kind == "reference")
        set.drawer = make_reference_drawer();
    else if (cfg.drawer.kind == "http")
        set.drawer = make_http_drawer(cfg.drawer);
    else
        throw Error(ErrorCode::ConfigError, "unknown drawer kind \"" + cfg.drawer.kind + "\"");

    return set;
}

}  // namespace objedit::backends
