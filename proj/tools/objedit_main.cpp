#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "objedit/backends.hpp"
#include "objedit/dataset.hpp"
#include "objedit/error.hpp"
#include "objedit/evalreport.hpp"
#include "objedit/pipeline.hpp"

namespace fs = std::filesystem;
using namespace objedit;

namespace {

int cmd_gen_dataset(const std::string& voc_dir, const std::string& config_path,
                    const std::string& out_dir, const std::string& split) {
    dataset::GenerationConfig cfg = dataset::load_generation_config(config_path);
    dataset::Manifest m = dataset::generate(voc_dir, split, cfg, out_dir);
    std::cout << "wrote " << m.samples.size() << " samples from " << m.usable_images << " of "
              << m.source_images << " images to " << out_dir << '\n';
    return 0;
}

int cmd_run_pipeline(const std::string& manifest_path, const std::string& backends_path,
                     const std::string& stage, const std::string& out_path, int threads,
                     int max_samples, const std::string& save_images) {
    dataset::Manifest manifest = dataset::load_manifest(manifest_path);

    backends::BackendConfig cfg = backends::load_backend_config(backends_path);
    backends::apply_env_overrides(cfg);

    pipeline::RunOptions opt;
    opt.dataset_root = fs::path(manifest_path).parent_path();
    opt.backend_config = cfg;
    opt.limit = pipeline::stage_limit_from_string(stage);
    opt.threads = threads;
    opt.max_samples = max_samples;
    opt.save_images_dir = save_images;

    std::vector<evalreport::SampleScore> rows = pipeline::run_dataset(manifest, opt);

    fs::path out(out_path);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    evalreport::write_results_csv(out, evalreport::make_provenance(manifest, cfg), rows);

    int errors = 0;
    for (const auto& r : rows)
        if (!r.error.empty()) ++errors;
    std::cout << "scored " << rows.size() << " samples (" << errors << " errored) -> " << out_path
              << '\n';
    return 0;
}

int cmd_eval(const std::string& results_path, const std::string& manifest_path,
             const std::string& out_dir) {
    evalreport::ResultsFile results = evalreport::read_results_csv(results_path);
    dataset::Manifest manifest = dataset::load_manifest(manifest_path);
    evalreport::check_against_manifest(results.rows, manifest);

    evalreport::Aggregates agg = evalreport::aggregate(results.rows);
    fs::create_directories(out_dir);
    fs::path md = fs::path(out_dir) / "report.md";
    fs::path csv = fs::path(out_dir) / "report.csv";
    evalreport::write_report_md(md, agg, results.provenance);
    evalreport::write_report_csv(csv, agg, results.provenance);

    int cells = evalreport::verify_report(csv, results_path);
    std::cout << "wrote " << md.string() << " and " << csv.string() << " (" << cells
              << " cells re-derived from " << results.rows.size() << " rows)\n";
    return 0;
}

int cmd_report(const std::string& results_path, const std::string& format) {
    evalreport::ResultsFile results = evalreport::read_results_csv(results_path);
    evalreport::Aggregates agg = evalreport::aggregate(results.rows);
    if (format == "md")
        std::cout << evalreport::render_report_md(agg, results.provenance);
    else
        std::cout << evalreport::render_report_csv(agg, results.provenance);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"object-level image edit benchmark toolkit"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("gen-dataset", "build a benchmark dataset from a VOC tree");
    std::string voc_dir, gen_config, gen_out, split = "train";
    gen->add_option("--voc-dir", voc_dir, "VOC root holding Annotations/ and JPEGImages/")
        ->required();
    gen->add_option("--config", gen_config, "generation config JSON")->required();
    gen->add_option("--out", gen_out, "dataset directory to create")->required();
    gen->add_option("--split", split, "image set under ImageSets/Segmentation (default train)");

    auto* run = app.add_subcommand("run-pipeline", "score a dataset against configured backends");
    std::string manifest_path, backends_path, run_out, save_images;
    std::string stage = "all";
    int threads = 1, max_samples = 0;
    run->add_option("--manifest", manifest_path, "manifest.json of a generated dataset")
        ->required();
    run->add_option("--backends", backends_path, "backend config (TOML)")->required();
    run->add_option("--stage", stage, "how far to run: all, ground, refine, reason or draw");
    run->add_option("--out", run_out, "results CSV to write")->required();
    run->add_option("--threads", threads, "worker threads (default 1)");
    run->add_option("--max-samples", max_samples, "score only the first N samples");
    run->add_option("--save-images", save_images, "directory for edited images");

    auto* ev = app.add_subcommand("eval", "render and verify reports for a results file");
    std::string results_path, eval_manifest, eval_out;
    ev->add_option("--results", results_path, "results CSV from run-pipeline")->required();
    ev->add_option("--manifest", eval_manifest, "manifest the results must match")->required();
    ev->add_option("--out", eval_out, "directory for report.md and report.csv")->required();

    auto* rep = app.add_subcommand("report", "print a report to stdout");
    std::string rep_results, format = "md";
    rep->add_option("--results", rep_results, "results CSV from run-pipeline")->required();
    rep->add_option("--format", format, "md or csv")->check(CLI::IsMember({"md", "csv"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_gen_dataset(voc_dir, gen_config, gen_out, split);
        if (run->parsed())
            return cmd_run_pipeline(manifest_path, backends_path, stage, run_out, threads,
                                    max_samples, save_images);
        if (ev->parsed()) return cmd_eval(results_path, eval_manifest, eval_out);
        if (rep->parsed()) return cmd_report(rep_results, format);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
