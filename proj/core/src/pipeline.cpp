#include "objedit/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <thread>

#include "objedit/compositor.hpp"
#include "objedit/error.hpp"
#include "objedit/image.hpp"

namespace objedit::pipeline {

namespace {

std::string lower(std::string s) {
    for (char& c : s) c = char(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

}  // namespace

StageLimit stage_limit_from_string(const std::string& s) {
    if (s == "ground") return StageLimit::Ground;
    if (s == "refine") return StageLimit::Refine;
    if (s == "reason") return StageLimit::Reason;
    if (s == "draw" || s == "all") return StageLimit::Draw;
    throw Error(ErrorCode::ConfigError,
                "unknown stage \"" + s + "\" (want all, ground, refine, reason or draw)");
}

const char* to_string(StageLimit s) {
    switch (s) {
        case StageLimit::Ground: return "ground";
        case StageLimit::Refine: return "refine";
        case StageLimit::Reason: return "reason";
        case StageLimit::Draw: return "draw";
    }
    return "draw";
}

evalreport::SampleScore run_sample(const dataset::EditSample& sample,
                                   const std::filesystem::path& dataset_root,
                                   backends::BackendSet& set, const RunOptions& opt) {
    using evalreport::Stage;
    evalreport::SampleScore row;
    row.sample_id = sample.sample_id;
    row.category = sample.category;
    row.difficulty = sample.difficulty;
    try {
        image::Image img = image::load_image(dataset_root / sample.image_path);
        geometry::BinaryMask gt_before = image::load_mask(dataset_root / sample.before_mask_path);
        geometry::BinaryMask gt_after = image::load_mask(dataset_root / sample.after_mask_path);

        backends::GroundTruth gt;
        gt.object_label = sample.object_label;
        gt.before_mask = gt_before;
        gt.transform = sample.transform;
        gt.object_id = sample.object_index;

        backends::GroundContext gctx;
        gctx.image = &img;
        gctx.class_names = opt.class_names.empty() ? dataset::kVocClasses : opt.class_names;
        gctx.seed = sample.seed;
        gctx.gt = &gt;
        llmproto::SceneDescription scene = set.grounder->ground(gctx);

        // The candidate that names the right class is the target; among
        // several, the one overlapping the true box most. When nothing was
        // grounded under that name the whole frame stands in, flagged so the
        // report can count how often grounding failed outright.
        geometry::BoundingBox gt_box = geometry::bbox_of_mask(gt_before);
        const std::string want = lower(sample.object_label);
        const llmproto::GroundedObject* best = nullptr;
        double best_overlap = -1.0;
        for (const llmproto::GroundedObject& obj : scene.objects) {
            if (lower(obj.label) != want) continue;
            double overlap = geometry::bbox_iou(obj.bbox, gt_box);
            if (overlap > best_overlap) {
                best_overlap = overlap;
                best = &obj;
            }
        }
        llmproto::GroundedObject target;
        if (best) {
            target = *best;
        } else {
            row.fallback_used = true;
            target.id = sample.object_index;
            target.label = sample.object_label;
            target.bbox = {0.0, 0.0, double(img.width), double(img.height)};
            target.point = target.bbox.center();
        }
        row.at(Stage::Grounding) = geometry::bbox_iou(target.bbox, gt_box);
        if (opt.limit == StageLimit::Ground) return row;

        backends::RefineContext rctx;
        rctx.image = &img;
        rctx.detections = {target};
        rctx.gt = &gt;
        std::vector<backends::RefinedObject> refined = set.refiner->refine(rctx);
        if (refined.empty())
            throw Error(ErrorCode::ObjectNotFound,
                        "refiner returned nothing for " + sample.sample_id);
        backends::RefinedObject target_mask = std::move(refined.front());
        row.at(Stage::Refinement) = geometry::mask_iou(target_mask.mask, gt_before);
        if (opt.limit == StageLimit::Refine) return row;

        // The reasoner sees every grounded candidate, with the target's
        // coarse box tightened to the refined one. A fallback target that
        // shadows a same-id candidate replaces it.
        std::vector<llmproto::GroundedObject> candidates;
        bool placed = false;
        for (const llmproto::GroundedObject& obj : scene.objects) {
            if (obj.id == target.id) {
                llmproto::GroundedObject tightened = target;
                tightened.bbox = target_mask.bbox;
                candidates.push_back(tightened);
                placed = true;
            } else {
                candidates.push_back(obj);
            }
        }
        if (!placed) {
            llmproto::GroundedObject tightened = target;
            tightened.bbox = target_mask.bbox;
            candidates.push_back(tightened);
        }

        backends::ReasonContext nctx;
        nctx.instruction = sample.instruction;
        nctx.candidates = candidates;
        nctx.image_width = img.width;
        nctx.image_height = img.height;
        nctx.seed = sample.seed;
        nctx.gt = &gt;
        backends::ReasonResult decision = set.reasoner->reason(nctx);

        // Score the object the reasoner actually picked. Picking a different
        // candidate means segmenting that one; an id no candidate carries is
        // a reasoning failure, not something to paper over with the target.
        geometry::BinaryMask moved = target_mask.mask;
        if (decision.object_id != target.id) {
            auto it = std::find_if(
                candidates.begin(), candidates.end(),
                [&](const llmproto::GroundedObject& o) { return o.id == decision.object_id; });
            if (it == candidates.end())
                throw Error(ErrorCode::ObjectNotFound,
                            "reasoner picked id " + std::to_string(decision.object_id) +
                                " which no candidate carries");
            rctx.detections = {*it};
            refined = set.refiner->refine(rctx);
            if (refined.empty())
                throw Error(ErrorCode::ObjectNotFound,
                            "refiner returned nothing for picked id " +
                                std::to_string(decision.object_id));
            moved = std::move(refined.front().mask);
        }

        geometry::BinaryMask pred_after = geometry::warp_mask(moved, decision.transform);
        row.at(Stage::Transformation) = geometry::mask_iou(pred_after, gt_after);
        if (opt.limit == StageLimit::Reason) return row;

        backends::DrawContext dctx;
        dctx.image = &img;
        dctx.before = &moved;
        dctx.after = &pred_after;
        dctx.transform = decision.transform;
        dctx.background_prompt = scene.background_prompt;
        dctx.generation_prompt = scene.generation_prompt;
        dctx.fill = compositor::fill_mode_from_string(opt.backend_config.drawer.fill);
        dctx.seed = sample.seed;
        dctx.refine = opt.backend_config.drawer.refine;
        backends::EditedImage edited = set.drawer->draw(dctx);
        row.at(Stage::FinalEdit) = geometry::mask_iou(edited.after, gt_after);

        if (!opt.save_images_dir.empty())
            image::save_image(edited.image, opt.save_images_dir / (sample.sample_id + ".png"));
    } catch (const Error& e) {
        row.error = to_string(e.code());
    } catch (const std::exception&) {
        row.error = "Unhandled";
    }
    return row;
}

std::vector<evalreport::SampleScore> run_dataset(const dataset::Manifest& manifest,
                                                 const RunOptions& opt) {
    // Configuration mistakes must abort the run, not poison every row.
    (void)compositor::fill_mode_from_string(opt.backend_config.drawer.fill);
    if (!opt.save_images_dir.empty()) std::filesystem::create_directories(opt.save_images_dir);

    size_t count = manifest.samples.size();
    if (opt.max_samples > 0 && size_t(opt.max_samples) < count) count = size_t(opt.max_samples);
    std::vector<evalreport::SampleScore> rows(count);

    std::atomic<size_t> next{0};
    auto worker = [&]() {
        backends::BackendSet set = backends::make_backends(opt.backend_config);
        for (size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1))
            rows[i] = run_sample(manifest.samples[i], opt.dataset_root, set, opt);
    };

    size_t nthreads = size_t(std::max(1, opt.threads));
    nthreads = std::min(nthreads, std::max<size_t>(count, 1));
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (size_t i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    return rows;
}

}  // namespace objedit::pipeline
