#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "objedit/backends.hpp"
#include "objedit/dataset.hpp"

namespace objedit::evalreport {

enum class Stage { Grounding, Refinement, Transformation, FinalEdit };

inline constexpr std::array<Stage, 4> kStages = {Stage::Grounding, Stage::Refinement,
                                                 Stage::Transformation, Stage::FinalEdit};

const char* to_string(Stage s);
Stage stage_from_string(const std::string& s);

// One scored sample: an IoU per stage that ran, empty past the point of
// failure or past the requested stage limit.
struct SampleScore {
    std::string sample_id;
    editops::EditCategory category = editops::EditCategory::Move;
    dataset::Difficulty difficulty = dataset::Difficulty::Easy;
    std::array<std::optional<double>, 4> iou;
    bool fallback_used = false;
    std::string error;  // error name when the sample failed, else empty

    std::optional<double>& at(Stage s) { return iou[size_t(s)]; }
    const std::optional<double>& at(Stage s) const { return iou[size_t(s)]; }
};

// Identifies what produced a results file; serialized as leading # lines of
// the CSV so every derived report can carry it. No timestamps: equal runs
// must produce byte-identical files.
struct Provenance {
    std::uint64_t dataset_seed = 0;
    std::string config_hash;         // fnv1a64 hex of the canonical config JSON
    std::string grounding_template;  // "<version>@<hash>"
    std::string reasoner_template;
    std::string backends;  // "grounder:oracle,refiner:oracle,..."
};

Provenance make_provenance(const dataset::Manifest& manifest,
                           const backends::BackendConfig& backends);

void write_results_csv(const std::filesystem::path& path, const Provenance& prov,
                       const std::vector<SampleScore>& rows);

struct ResultsFile {
    Provenance provenance;
    std::vector<SampleScore> rows;
};

ResultsFile read_results_csv(const std::filesystem::path& path);

struct CellStats {
    double sum = 0.0;
    int n = 0;

    void add(double v) {
        sum += v;
        ++n;
    }
    double mean() const { return n > 0 ? sum / n : 0.0; }
};

// Micro-averaged tables: the Avg column weights every scored sample equally
// rather than averaging the per-category means.
struct Aggregates {
    std::array<std::map<std::string, CellStats>, 4> by_category;
    std::array<std::map<std::string, CellStats>, 4> by_difficulty;
    std::array<CellStats, 4> overall;
    std::array<int, 4> errored_at{};  // failures attributed to each stage
    int total = 0;
    int errors = 0;
    int fallbacks = 0;
};

Aggregates aggregate(const std::vector<SampleScore>& rows);

// Every sample id in rows must exist in the manifest and carry the same
// category and difficulty; throws UnknownSampleId otherwise.
void check_against_manifest(const std::vector<SampleScore>& rows,
                            const dataset::Manifest& manifest);

void write_report_md(const std::filesystem::path& path, const Aggregates& agg,
                     const Provenance& prov);
void write_report_csv(const std::filesystem::path& path, const Aggregates& agg,
                      const Provenance& prov);

std::string render_report_md(const Aggregates& agg, const Provenance& prov);
std::string render_report_csv(const Aggregates& agg, const Provenance& prov);

// Recomputes every numeric cell of the rendered report from the raw rows
// and compares the formatted strings; returns the number of cells checked.
// Throws ConfigError on the first mismatch.
int verify_report(const std::filesystem::path& report_csv,
                  const std::filesystem::path& results_csv);

}  // namespace objedit::evalreport
