#include "objedit/evalreport.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "objedit/error.hpp"
#include "objedit/llmproto.hpp"

namespace objedit::evalreport {

namespace {

const char* kHeader =
    "sample_id,category,difficulty,grounding_iou,refinement_iou,transformation_iou,"
    "final_iou,fallback_used,error";

// Canonical column orders; tables list only the keys that occur.
const char* kCategoryOrder[] = {"Move", "Scale", "Flip", "Shear", "Rotate", "Reason", "Mix"};
const char* kDifficultyOrder[] = {"easy", "medium", "hard"};

std::string format_iou(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string format_cell(const CellStats& c) {
    if (c.n == 0) return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", c.mean() * 100.0);
    return buf;
}

std::string hash_hex(std::uint64_t h) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::string provenance_block(const Provenance& p) {
    std::ostringstream os;
    os << "# dataset_seed=" << p.dataset_seed << '\n'
       << "# config_hash=" << p.config_hash << '\n'
       << "# grounding_template=" << p.grounding_template << '\n'
       << "# reasoner_template=" << p.reasoner_template << '\n'
       << "# backends=" << p.backends << '\n';
    return os.str();
}

void read_provenance_line(Provenance& p, const std::string& line) {
    size_t eq = line.find('=');
    if (eq == std::string::npos) return;
    std::string key = line.substr(2, eq - 2);
    std::string value = line.substr(eq + 1);
    if (key == "dataset_seed")
        p.dataset_seed = std::strtoull(value.c_str(), nullptr, 10);
    else if (key == "config_hash")
        p.config_hash = value;
    else if (key == "grounding_template")
        p.grounding_template = value;
    else if (key == "reasoner_template")
        p.reasoner_template = value;
    else if (key == "backends")
        p.backends = value;
}

template <typename T, size_t N>
std::vector<std::string> present_keys(const std::array<std::map<std::string, CellStats>, 4>& maps,
                                      const T (&order)[N]) {
    std::vector<std::string> keys;
    for (const char* key : order) {
        for (const auto& m : maps) {
            if (m.count(key)) {
                keys.push_back(key);
                break;
            }
        }
    }
    return keys;
}

const CellStats& cell_or_empty(const std::map<std::string, CellStats>& m, const std::string& key) {
    static const CellStats kEmpty;
    auto it = m.find(key);
    return it == m.end() ? kEmpty : it->second;
}

}  // namespace

const char* to_string(Stage s) {
    switch (s) {
        case Stage::Grounding: return "Grounding";
        case Stage::Refinement: return "Refinement";
        case Stage::Transformation: return "Transformation";
        case Stage::FinalEdit: return "FinalEdit";
    }
    return "Grounding";
}

Stage stage_from_string(const std::string& s) {
    for (Stage st : kStages)
        if (s == to_string(st)) return st;
    throw Error(ErrorCode::ConfigError, "unknown stage \"" + s + "\"");
}

Provenance make_provenance(const dataset::Manifest& manifest,
                           const backends::BackendConfig& backends) {
    Provenance p;
    p.dataset_seed = manifest.config.seed;
    p.config_hash = hash_hex(llmproto::fnv1a64(dataset::generation_config_json(manifest.config)));
    p.grounding_template =
        manifest.grounding_template_version + "@" + manifest.grounding_template_hash;
    p.reasoner_template =
        manifest.reasoner_template_version + "@" + manifest.reasoner_template_hash;
    p.backends = "grounder:" + backends.grounder.kind + ",refiner:" + backends.refiner.kind +
                 ",reasoner:" + backends.reasoner.kind + ",drawer:" + backends.drawer.kind;
    return p;
}

void write_results_csv(const std::filesystem::path& path, const Provenance& prov,
                       const std::vector<SampleScore>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write results " + path.string());
    out << provenance_block(prov) << kHeader << '\n';
    for (const SampleScore& r : rows) {
        out << r.sample_id << ',' << editops::to_string(r.category) << ','
            << dataset::to_string(r.difficulty);
        for (const auto& v : r.iou) out << ',' << (v ? format_iou(*v) : std::string());
        out << ',' << (r.fallback_used ? '1' : '0') << ',' << r.error << '\n';
    }
}

ResultsFile read_results_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open results " + path.string());
    ResultsFile rf;
    std::string line;
    bool header_seen = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            read_provenance_line(rf.provenance, line);
            continue;
        }
        if (!header_seen) {
            if (line != kHeader)
                throw Error(ErrorCode::ConfigError,
                            path.string() + ": unexpected header on line " +
                                std::to_string(lineno));
            header_seen = true;
            continue;
        }
        std::vector<std::string> f = split_csv(line);
        if (f.size() != 9)
            throw Error(ErrorCode::ConfigError, path.string() + ": expected 9 fields on line " +
                                                    std::to_string(lineno));
        SampleScore r;
        r.sample_id = f[0];
        r.category = editops::category_from_string(f[1]);
        r.difficulty = dataset::difficulty_from_string(f[2]);
        for (int i = 0; i < 4; ++i) {
            if (f[size_t(3 + i)].empty()) continue;
            r.iou[size_t(i)] = std::strtod(f[size_t(3 + i)].c_str(), nullptr);
        }
        r.fallback_used = f[7] == "1";
        r.error = f[8];
        rf.rows.push_back(std::move(r));
    }
    if (!header_seen)
        throw Error(ErrorCode::ConfigError, path.string() + " holds no result rows");
    return rf;
}

Aggregates aggregate(const std::vector<SampleScore>& rows) {
    Aggregates agg;
    agg.total = int(rows.size());
    for (const SampleScore& r : rows) {
        if (r.fallback_used) ++agg.fallbacks;
        if (!r.error.empty()) {
            ++agg.errors;
            size_t failed_at = 0;
            while (failed_at < 3 && r.iou[failed_at]) ++failed_at;
            ++agg.errored_at[failed_at];
        }
        for (size_t s = 0; s < 4; ++s) {
            if (!r.iou[s]) continue;
            double v = *r.iou[s];
            agg.by_category[s][editops::to_string(r.category)].add(v);
            agg.by_difficulty[s][dataset::to_string(r.difficulty)].add(v);
            agg.overall[s].add(v);
        }
    }
    return agg;
}

void check_against_manifest(const std::vector<SampleScore>& rows,
                            const dataset::Manifest& manifest) {
    std::map<std::string, const dataset::EditSample*> by_id;
    for (const dataset::EditSample& s : manifest.samples) by_id[s.sample_id] = &s;
    for (const SampleScore& r : rows) {
        auto it = by_id.find(r.sample_id);
        if (it == by_id.end())
            throw Error(ErrorCode::UnknownSampleId,
                        "results mention " + r.sample_id + " which the manifest does not hold");
        if (it->second->category != r.category || it->second->difficulty != r.difficulty)
            throw Error(ErrorCode::ConfigError,
                        r.sample_id + ": results row disagrees with the manifest");
    }
}

std::string render_report_csv(const Aggregates& agg, const Provenance& prov) {
    std::ostringstream os;
    os << provenance_block(prov) << "section,row,column,value\n";
    std::vector<std::string> cats = present_keys(agg.by_category, kCategoryOrder);
    std::vector<std::string> diffs = present_keys(agg.by_difficulty, kDifficultyOrder);
    for (Stage st : kStages) {
        size_t s = size_t(st);
        for (const std::string& c : cats)
            os << "category," << to_string(st) << ',' << c << ','
               << format_cell(cell_or_empty(agg.by_category[s], c)) << '\n';
        os << "category," << to_string(st) << ",Avg," << format_cell(agg.overall[s]) << '\n';
    }
    for (Stage st : kStages) {
        size_t s = size_t(st);
        for (const std::string& d : diffs)
            os << "difficulty," << to_string(st) << ',' << d << ','
               << format_cell(cell_or_empty(agg.by_difficulty[s], d)) << '\n';
        os << "difficulty," << to_string(st) << ",Avg," << format_cell(agg.overall[s]) << '\n';
    }
    os << "counts,samples,," << agg.total << '\n';
    os << "counts,errors,," << agg.errors << '\n';
    os << "counts,fallbacks,," << agg.fallbacks << '\n';
    for (Stage st : kStages) {
        size_t s = size_t(st);
        os << "counts,errors_at," << to_string(st) << ',' << agg.errored_at[s] << '\n';
        os << "counts,scored," << to_string(st) << ',' << agg.overall[s].n << '\n';
    }
    return os.str();
}

std::string render_report_md(const Aggregates& agg, const Provenance& prov) {
    std::ostringstream os;
    os << "# Stage IoU report\n\n";
    os << "- dataset_seed: " << prov.dataset_seed << '\n';
    os << "- config_hash: " << prov.config_hash << '\n';
    os << "- grounding_template: " << prov.grounding_template << '\n';
    os << "- reasoner_template: " << prov.reasoner_template << '\n';
    os << "- backends: " << prov.backends << '\n';
    os << "- samples: " << agg.total << ", errors: " << agg.errors
       << ", fallbacks: " << agg.fallbacks << '\n';

    auto table = [&os, &agg](const char* title,
                             const std::array<std::map<std::string, CellStats>, 4>& maps,
                             const std::vector<std::string>& cols) {
        os << "\n## " << title << " (IoU x100)\n\n| Stage |";
        for (const std::string& c : cols) os << ' ' << c << " |";
        os << " Avg |\n|---|";
        for (size_t i = 0; i < cols.size() + 1; ++i) os << "---:|";
        os << '\n';
        for (Stage st : kStages) {
            size_t s = size_t(st);
            os << "| " << to_string(st) << " |";
            for (const std::string& c : cols) os << ' ' << format_cell(cell_or_empty(maps[s], c)) << " |";
            os << ' ' << format_cell(agg.overall[s]) << " |\n";
        }
    };
    table("By edit category", agg.by_category, present_keys(agg.by_category, kCategoryOrder));
    table("By difficulty", agg.by_difficulty, present_keys(agg.by_difficulty, kDifficultyOrder));

    os << "\n## Coverage\n\n| Stage | scored | failed at stage |\n|---|---:|---:|\n";
    for (Stage st : kStages) {
        size_t s = size_t(st);
        os << "| " << to_string(st) << " | " << agg.overall[s].n << " | " << agg.errored_at[s]
           << " |\n";
    }
    return os.str();
}

void write_report_md(const std::filesystem::path& path, const Aggregates& agg,
                     const Provenance& prov) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write report " + path.string());
    out << render_report_md(agg, prov);
}

void write_report_csv(const std::filesystem::path& path, const Aggregates& agg,
                      const Provenance& prov) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write report " + path.string());
    out << render_report_csv(agg, prov);
}

int verify_report(const std::filesystem::path& report_csv,
                  const std::filesystem::path& results_csv) {
    std::ifstream in(report_csv, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open report " + report_csv.string());
    std::ostringstream have;
    have << in.rdbuf();

    ResultsFile rf = read_results_csv(results_csv);
    std::string want = render_report_csv(aggregate(rf.rows), rf.provenance);

    if (have.str() != want) {
        std::istringstream ha(have.str()), wa(want);
        std::string hl, wl;
        int lineno = 0;
        while (true) {
            ++lineno;
            bool hok = bool(std::getline(ha, hl));
            bool wok = bool(std::getline(wa, wl));
            if (!hok && !wok) break;
            if (hl != wl || hok != wok)
                throw Error(ErrorCode::ConfigError,
                            "report line " + std::to_string(lineno) + " is not derivable: have \"" +
                                (hok ? hl : "<eof>") + "\", recomputed \"" +
                                (wok ? wl : "<eof>") + "\"");
            hl.clear();
            wl.clear();
        }
        throw Error(ErrorCode::ConfigError, "report differs from recomputation");
    }

    int cells = 0;
    std::istringstream lines(want);
    std::string line;
    while (std::getline(lines, line))
        if (!line.empty() && line[0] != '#' && line != "section,row,column,value") ++cells;
    return cells;
}

}  // namespace objedit::evalreport
