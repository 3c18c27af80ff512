#include <csignal>
#include <cstdlib>
#include <iostream>
#include <thread>

#include <pthread.h>
#include <CLI11.hpp>

#include "solscan/api_service.hpp"

int main(int argc, char** argv) {
    namespace fs = std::filesystem;
    CLI::App app{"HTTP API for solscan", "solscan-api"};
    std::string host = "127.0.0.1";
    int port = 8080;
    if (const char* env = std::getenv("SOLSCAN_API_HOST")) {
        host = env;
    }
    if (const char* env = std::getenv("SOLSCAN_API_PORT")) {
        port = std::atoi(env);
    }
    solscan::api::ServiceConfig config;
    std::string runtime = "docker";
    std::optional<fs::path> stub_map;
    std::string cors = "*";
    unsigned timeout = 1800;
    app.add_option("--host", host, "bind address (env SOLSCAN_API_HOST)");
    app.add_option("--port", port, "port, 0 for any (env SOLSCAN_API_PORT)");
    app.add_option("--config-dir", config.config_dir);
    app.add_option("--work-dir", config.work_dir);
    app.add_option("--persist-dir", config.persist_dir);
    app.add_option("--processes", config.processes)->check(CLI::PositiveNumber);
    app.add_option("--runtime", runtime)->check(CLI::IsMember({"docker", "process"}));
    app.add_option("--stub-map", stub_map);
    app.add_option("--timeout", timeout)->check(CLI::PositiveNumber);
    app.add_option("--cors-origin", cors);
    CLI11_PARSE(app, argc, argv);

    // Handle SIGINT/SIGTERM on a dedicated thread.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    try {
        config.timeout = std::chrono::seconds(timeout);
        if (runtime == "process") {
            if (!stub_map) {
                std::cerr << "error: --runtime process needs --stub-map\n";
                return 2;
            }
            config.runtime = std::make_shared<solscan::exec::ProcessRuntime>(
                solscan::exec::ProcessRuntime::load_image_map(*stub_map), fs::temp_directory_path() / "solscan-stub");
        }
        solscan::api::AnalysisService service(config);
        solscan::api::ApiServer server(service, cors);
        const int bound = server.bind(host, port);
        if (bound < 0) {
            std::cerr << "error: cannot bind " << host << ':' << port << '\n';
            return 1;
        }
        std::jthread waiter([&] {
            int sig = 0;
            sigwait(&signals, &sig);
            server.stop();
        });
        std::cout << "listening on http://" << host << ':' << bound << std::endl;
        server.listen();
        pthread_kill(waiter.native_handle(), SIGTERM);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
