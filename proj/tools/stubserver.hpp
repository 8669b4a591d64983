#pragma once

#include <deque>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <thread>

#include <httplib.h>

namespace objedit::stub {

// Plays back scripted replies for the four backend routes, first in first
// out per route. An exhausted route answers 503, so a test whose script is
// too short fails loudly instead of hanging. GET /_stats reports
// request counts and remaining queue depths.
class StubServer {
  public:
    struct Reply {
        int status = 200;
        std::string body;
    };

    StubServer();
    ~StubServer();

    StubServer(const StubServer&) = delete;
    StubServer& operator=(const StubServer&) = delete;

    // Script shape: {"ground": [{"status": 200, "body": "..."}, ...], ...}
    // with keys ground, refine, reason, draw. A bare string entry means a
    // 200 with that body.
    void load_script(const std::filesystem::path& path);
    void load_script_json(const std::string& text);
    void enqueue(const std::string& route, std::string body, int status = 200);

    // Binds 127.0.0.1 on a free port (or `port` when nonzero) and serves on
    // a background thread. Returns the bound port.
    int start(int port = 0);
    void stop();

    std::string url() const;
    int port() const { return port_; }
    int requests(const std::string& route) const;
    int remaining(const std::string& route) const;

  private:
    void handle(const std::string& route, httplib::Response& res);

    httplib::Server server_;
    std::thread thread_;
    mutable std::mutex mu_;
    std::map<std::string, std::deque<Reply>> queues_;
    std::map<std::string, int> counts_;
    int port_ = 0;
};

}  // namespace objedit::stub
