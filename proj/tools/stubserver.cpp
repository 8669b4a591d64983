#include "stubserver.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "objedit/backends.hpp"
#include "objedit/error.hpp"

namespace objedit::stub {

namespace {

const char* kRoutes[] = {"ground", "refine", "reason", "draw"};

}  // namespace

StubServer::StubServer() {
    for (const char* r : kRoutes) {
        queues_[r];
        counts_[r] = 0;
    }
    server_.Post("/ground", [this](const httplib::Request&, httplib::Response& res) {
        handle("ground", res);
    });
    server_.Post("/refine", [this](const httplib::Request&, httplib::Response& res) {
        handle("refine", res);
    });
    server_.Post("/reason", [this](const httplib::Request&, httplib::Response& res) {
        handle("reason", res);
    });
    server_.Post("/draw", [this](const httplib::Request&, httplib::Response& res) {
        handle("draw", res);
    });
    server_.Get("/_stats", [this](const httplib::Request&, httplib::Response& res) {
        nlohmann::json stats;
        std::lock_guard<std::mutex> lock(mu_);
        for (const char* r : kRoutes) {
            stats["requests"][r] = counts_.at(r);
            stats["remaining"][r] = queues_.at(r).size();
        }
        res.set_content(stats.dump(2) + "\n", "application/json");
    });
}

StubServer::~StubServer() { stop(); }

void StubServer::load_script(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open script " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    load_script_json(buf.str());
}

void StubServer::load_script_json(const std::string& text) {
    nlohmann::json script;
    try {
        script = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("bad script: ") + e.what());
    }
    if (!script.is_object()) throw Error(ErrorCode::ConfigError, "script must be a JSON object");
    for (const auto& [route, entries] : script.items()) {
        if (!queues_.count(route))
            throw Error(ErrorCode::ConfigError, "script names unknown route \"" + route + "\"");
        if (!entries.is_array())
            throw Error(ErrorCode::ConfigError, "script route \"" + route + "\" must be an array");
        for (const auto& entry : entries) {
            if (entry.is_string()) {
                enqueue(route, entry.get<std::string>());
            } else if (entry.is_object()) {
                Reply r;
                r.status = entry.value("status", 200);
                r.body = entry.value("body", std::string());
                enqueue(route, r.body, r.status);
            } else {
                throw Error(ErrorCode::ConfigError,
                            "script entries must be strings or {status, body} objects");
            }
        }
    }
}

void StubServer::enqueue(const std::string& route, std::string body, int status) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = queues_.find(route);
    if (it == queues_.end())
        throw Error(ErrorCode::ConfigError, "unknown route \"" + route + "\"");
    it->second.push_back(Reply{status, std::move(body)});
}

int StubServer::start(int port) {
    if (port != 0) {
        if (!server_.bind_to_port("127.0.0.1", port))
            throw Error(ErrorCode::IoError, "cannot bind port " + std::to_string(port));
        port_ = port;
    } else {
        port_ = server_.bind_to_any_port("127.0.0.1");
        if (port_ <= 0) throw Error(ErrorCode::IoError, "cannot bind a port on 127.0.0.1");
    }
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    while (!server_.is_running()) std::this_thread::sleep_for(std::chrono::milliseconds(1));
    return port_;
}

void StubServer::stop() {
    if (thread_.joinable()) {
        server_.stop();
        thread_.join();
    }
}

std::string StubServer::url() const { return "http://127.0.0.1:" + std::to_string(port_); }

int StubServer::requests(const std::string& route) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = counts_.find(route);
    return it == counts_.end() ? 0 : it->second;
}

int StubServer::remaining(const std::string& route) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = queues_.find(route);
    return it == queues_.end() ? 0 : int(it->second.size());
}

void StubServer::handle(const std::string& route, httplib::Response& res) {
    std::lock_guard<std::mutex> lock(mu_);
    ++counts_[route];
    std::deque<Reply>& q = queues_[route];
    if (q.empty()) {
        res.status = 503;
        res.set_content("no scripted reply left for /" + route + "\n", "text/plain");
        return;
    }
    Reply r = std::move(q.front());
    q.pop_front();
    res.status = r.status;
    res.set_content(r.body, "application/json");
}

}  // namespace objedit::stub
