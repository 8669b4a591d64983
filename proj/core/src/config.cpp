#include <cstdlib>
#include <fstream>
#include <string>

#include "objedit/backends.hpp"
#include "objedit/error.hpp"

namespace objedit::backends {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string strip_comment(const std::string& line) {
    bool in_str = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (c == '"') in_str = !in_str;
        if (c == '#' && !in_str) return line.substr(0, i);
    }
    return line;
}

std::string unquote(const std::string& v, int lineno) {
    if (v.size() >= 2 && v.front() == '"') {
        if (v.back() != '"')
            throw Error(ErrorCode::ConfigError,
                        "unterminated string on line " + std::to_string(lineno));
        return v.substr(1, v.size() - 2);
    }
    return v;
}

double parse_double(const std::string& v, const std::string& key) {
    char* end = nullptr;
    double d = std::strtod(v.c_str(), &end);
    if (end != v.c_str() + v.size() || v.empty())
        throw Error(ErrorCode::ConfigError, "value for " + key + " is not a number: " + v);
    return d;
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw Error(ErrorCode::ConfigError, "value for " + key + " must be true or false: " + v);
}

void assign(BackendChoice& c, const std::string& section, const std::string& key,
            const std::string& value) {
    std::string full = "[" + section + "] " + key;
    if (key == "kind")
        c.kind = value;
    else if (key == "url")
        c.url = value;
    else if (key == "template")
        c.template_path = value;
    else if (key == "fill")
        c.fill = value;
    else if (key == "jitter_px")
        c.jitter_px = parse_double(value, full);
    else if (key == "rel_noise")
        c.rel_noise = parse_double(value, full);
    else if (key == "timeout_s")
        c.timeout_s = parse_double(value, full);
    else if (key == "max_retries")
        c.max_retries = int(parse_double(value, full));
    else if (key == "refine")
        c.refine = parse_bool(value, full);
    else
        throw Error(ErrorCode::ConfigError, "unknown key \"" + key + "\" in [" + section + "]");
}

BackendChoice* section_of(BackendConfig& cfg, const std::string& name) {
    if (name == "grounder") return &cfg.grounder;
    if (name == "refiner") return &cfg.refiner;
    if (name == "reasoner") return &cfg.reasoner;
    if (name == "drawer") return &cfg.drawer;
    return nullptr;
}

}  // namespace

BackendConfig load_backend_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open backend config " + path.string());

    BackendConfig cfg;
    BackendChoice* current = nullptr;
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw Error(ErrorCode::ConfigError,
                            "bad section header on line " + std::to_string(lineno));
            std::string name = trim(line.substr(1, line.size() - 2));
            current = section_of(cfg, name);
            if (!current)
                throw Error(ErrorCode::ConfigError, "unknown section [" + name + "] on line " +
                                                        std::to_string(lineno));
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::ConfigError,
                        "expected key = value on line " + std::to_string(lineno));
        if (!current)
            throw Error(ErrorCode::ConfigError,
                        "key outside any [section] on line " + std::to_string(lineno));
        std::string key = trim(line.substr(0, eq));
        std::string value = unquote(trim(line.substr(eq + 1)), lineno);
        std::string section = current == &cfg.grounder   ? "grounder"
                              : current == &cfg.refiner  ? "refiner"
                              : current == &cfg.reasoner ? "reasoner"
                                                         : "drawer";
        assign(*current, section, key, value);
    }
    return cfg;
}

void apply_env_overrides(BackendConfig& cfg) {
    static const char* kSections[] = {"grounder", "refiner", "reasoner", "drawer"};
    static const char* kKeys[] = {"kind",      "url",         "template", "fill",   "jitter_px",
                                  "rel_noise", "max_retries", "refine",   "timeout_s"};
    BackendChoice* slots[] = {&cfg.grounder, &cfg.refiner, &cfg.reasoner, &cfg.drawer};
    for (int s = 0; s < 4; ++s) {
        for (const char* key : kKeys) {
            std::string env = "OBJEDIT_";
            for (const char* p = kSections[s]; *p; ++p) env += char(std::toupper(*p));
            env += '_';
            for (const char* p = key; *p; ++p) env += char(std::toupper(*p));
            if (const char* value = std::getenv(env.c_str()))
                assign(*slots[s], kSections[s], key, value);
        }
    }
}

}  // namespace objedit::backends
