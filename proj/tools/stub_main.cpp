#include <atomic>
#include <chrono>
#include <csignal>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "stubserver.hpp"

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"canned-reply backend host for pipeline testing"};
    std::string script;
    int port = 0;
    app.add_option("--script", script, "JSON reply script; without one every route answers 503");
    app.add_option("--port", port, "port to bind on 127.0.0.1; 0 picks a free one");

    CLI11_PARSE(app, argc, argv);

    try {
        objedit::stub::StubServer server;
        if (!script.empty()) server.load_script(script);
        server.start(port);
        std::cout << server.url() << std::endl;

        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
        while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(50));
        server.stop();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
