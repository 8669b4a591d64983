#include <fstream>
#include <sstream>

#include <doctest.h>

#include "objedit/evalreport.hpp"
#include "testutil.hpp"

using namespace objedit;
using evalreport::SampleScore;
using evalreport::Stage;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

SampleScore row(const char* id, editops::EditCategory cat, dataset::Difficulty diff,
                std::initializer_list<double> ious, const char* error = "",
                bool fallback = false) {
    SampleScore r;
    r.sample_id = id;
    r.category = cat;
    r.difficulty = diff;
    size_t i = 0;
    for (double v : ious) r.iou[i++] = v;
    r.error = error;
    r.fallback_used = fallback;
    return r;
}

evalreport::Provenance prov() {
    evalreport::Provenance p;
    p.dataset_seed = 42;
    p.config_hash = "00000000deadbeef";
    p.grounding_template = "grounding_v1@1111111111111111";
    p.reasoner_template = "reasoner_v1@2222222222222222";
    p.backends = "grounder:oracle,refiner:oracle,reasoner:compiler,drawer:reference";
    return p;
}

std::vector<SampleScore> sample_rows() {
    using editops::EditCategory;
    using dataset::Difficulty;
    return {
        row("a_t0_p0", EditCategory::Move, Difficulty::Easy, {1.0, 0.8, 0.6, 0.6}),
        row("a_t0_p1", EditCategory::Move, Difficulty::Hard, {0.5}, "ObjectNotFound"),
        row("a_t1_p0", EditCategory::Scale, Difficulty::Easy, {1.0, 1.0, 1.0, 1.0}, "", true),
    };
}

}  // namespace

TEST_CASE("results csv round-trips rows and provenance") {
    testutil::TempDir tmp("results");
    std::filesystem::path p = tmp.path / "results.csv";
    evalreport::write_results_csv(p, prov(), sample_rows());

    evalreport::ResultsFile back = evalreport::read_results_csv(p);
    CHECK(back.provenance.dataset_seed == 42);
    CHECK(back.provenance.config_hash == "00000000deadbeef");
    CHECK(back.provenance.backends == prov().backends);
    REQUIRE(back.rows.size() == 3);
    CHECK(back.rows[0].iou[0] == 1.0);
    CHECK(back.rows[0].iou[3] == 0.6);
    CHECK(back.rows[1].category == editops::EditCategory::Move);
    CHECK(back.rows[1].difficulty == dataset::Difficulty::Hard);
    CHECK(!back.rows[1].iou[1].has_value());
    CHECK(back.rows[1].error == "ObjectNotFound");
    CHECK(back.rows[2].fallback_used);

    std::ofstream(tmp.path / "bad.csv") << "# dataset_seed=1\nnot,the,header\n";
    CHECK_THROWS_AS(evalreport::read_results_csv(tmp.path / "bad.csv"), Error);
    CHECK_THROWS_AS(evalreport::read_results_csv(tmp.path / "absent.csv"), Error);
}

TEST_CASE("aggregate computes micro means and error attribution") {
    evalreport::Aggregates agg = evalreport::aggregate(sample_rows());
    CHECK(agg.total == 3);
    CHECK(agg.errors == 1);
    CHECK(agg.fallbacks == 1);

    // Grounding: all three scored. Move mean (1.0 + 0.5) / 2.
    CHECK(agg.overall[0].n == 3);
    CHECK(agg.overall[0].mean() == doctest::Approx((1.0 + 0.5 + 1.0) / 3));
    CHECK(agg.by_category[0].at("Move").mean() == doctest::Approx(0.75));
    CHECK(agg.by_category[0].at("Scale").mean() == doctest::Approx(1.0));

    // The errored row stopped after grounding: charged to Refinement.
    CHECK(agg.overall[1].n == 2);
    CHECK(agg.errored_at[1] == 1);
    CHECK(agg.errored_at[0] == 0);

    CHECK(agg.by_difficulty[0].at("easy").n == 2);
    CHECK(agg.by_difficulty[0].at("hard").n == 1);
    CHECK(agg.by_difficulty[3].count("hard") == 0);  // nothing scored there
}

TEST_CASE("rows are checked against the manifest") {
    dataset::Manifest m;
    dataset::EditSample s;
    s.sample_id = "a_t0_p0";
    s.category = editops::EditCategory::Move;
    s.difficulty = dataset::Difficulty::Easy;
    m.samples.push_back(s);

    std::vector<SampleScore> ok = {
        row("a_t0_p0", editops::EditCategory::Move, dataset::Difficulty::Easy, {1.0})};
    CHECK_NOTHROW(evalreport::check_against_manifest(ok, m));

    std::vector<SampleScore> unknown = {
        row("zzz", editops::EditCategory::Move, dataset::Difficulty::Easy, {1.0})};
    try {
        evalreport::check_against_manifest(unknown, m);
        FAIL("expected UnknownSampleId");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownSampleId);
    }

    std::vector<SampleScore> wrong = {
        row("a_t0_p0", editops::EditCategory::Scale, dataset::Difficulty::Easy, {1.0})};
    CHECK_THROWS_AS(evalreport::check_against_manifest(wrong, m), Error);
}

TEST_CASE("reports render both formats with stable cells") {
    evalreport::Aggregates agg = evalreport::aggregate(sample_rows());

    std::string csv = evalreport::render_report_csv(agg, prov());
    CHECK(csv.find("# dataset_seed=42\n") != std::string::npos);
    CHECK(csv.find("section,row,column,value\n") != std::string::npos);
    CHECK(csv.find("category,Grounding,Move,75.0\n") != std::string::npos);
    CHECK(csv.find("category,Grounding,Avg,83.3\n") != std::string::npos);
    CHECK(csv.find("category,FinalEdit,Move,60.0\n") != std::string::npos);
    CHECK(csv.find("difficulty,FinalEdit,hard,-\n") != std::string::npos);
    CHECK(csv.find("counts,samples,,3\n") != std::string::npos);
    CHECK(csv.find("counts,errors_at,Refinement,1\n") != std::string::npos);
    CHECK(csv.find("counts,scored,FinalEdit,2\n") != std::string::npos);

    std::string md = evalreport::render_report_md(agg, prov());
    CHECK(md.find("samples: 3, errors: 1, fallbacks: 1") != std::string::npos);
    CHECK(md.find("| Move | Scale | Avg |") != std::string::npos);
    CHECK(md.find("| Grounding | 75.0 | 100.0 | 83.3 |") != std::string::npos);
    CHECK(md.find("| easy | hard | Avg |") != std::string::npos);
    // No dates or timestamps anywhere: reruns must be byte-identical.
    CHECK(md.find("202") == std::string::npos);
}

TEST_CASE("the verifier re-derives every cell and spots tampering") {
    testutil::TempDir tmp("verify");
    std::filesystem::path results = tmp.path / "results.csv";
    std::filesystem::path report = tmp.path / "report.csv";
    evalreport::write_results_csv(results, prov(), sample_rows());

    evalreport::ResultsFile rf = evalreport::read_results_csv(results);
    evalreport::write_report_csv(report, evalreport::aggregate(rf.rows), rf.provenance);

    // 12 category cells, 12 difficulty cells, 11 count lines.
    int cells = evalreport::verify_report(report, results);
    CHECK(cells == 35);

    std::string text = slurp(report);
    size_t pos = text.find("75.0");
    REQUIRE(pos != std::string::npos);
    text[pos] = '9';
    std::ofstream(report, std::ios::binary) << text;
    CHECK_THROWS_AS(evalreport::verify_report(report, results), Error);
}
