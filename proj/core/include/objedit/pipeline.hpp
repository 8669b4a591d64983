#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "objedit/backends.hpp"
#include "objedit/dataset.hpp"
#include "objedit/evalreport.hpp"

namespace objedit::pipeline {

// How far to run; each step includes everything before it. "all" and "draw"
// are synonyms on the command line.
enum class StageLimit { Ground, Refine, Reason, Draw };

StageLimit stage_limit_from_string(const std::string& s);
const char* to_string(StageLimit s);

struct RunOptions {
    std::filesystem::path dataset_root;
    backends::BackendConfig backend_config;
    StageLimit limit = StageLimit::Draw;
    int threads = 1;
    int max_samples = 0;  // 0 runs everything
    std::vector<std::string> class_names;  // grounding vocabulary; empty -> VOC classes
    std::filesystem::path save_images_dir;  // empty -> edited images are not written
};

// Runs one sample through the configured stages and scores each against
// ground truth. Failures are captured in the returned row's error field,
// never thrown: one bad sample must not kill a benchmark run.
evalreport::SampleScore run_sample(const dataset::EditSample& sample,
                                   const std::filesystem::path& dataset_root,
                                   backends::BackendSet& set, const RunOptions& opt);

// Scores samples in manifest order regardless of thread count; every worker
// gets its own backend set built from opt.backend_config.
std::vector<evalreport::SampleScore> run_dataset(const dataset::Manifest& manifest,
                                                 const RunOptions& opt);

}  // namespace objedit::pipeline
