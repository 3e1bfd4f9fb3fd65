#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "http_server.hpp"
#include "quip/text.hpp"

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quip session server"};
    std::string config_path;
    std::optional<int> port;
    std::optional<std::string> providers;
    std::string replay_path;
    std::string replay_out;
    app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--port", port, "listen port (0 picks one)");
    app.add_option("--providers", providers, "provider selection, e.g. mock, or a JSON object");
    app.add_option("--replay", replay_path, "run a scripted conversation offline and print its event log")
        ->check(CLI::ExistingFile);
    app.add_option("--replay-out", replay_out, "write the replayed log here instead of stdout");
    CLI11_PARSE(app, argc, argv);

    try {
        quip::ServiceConfig config = config_path.empty() ? quip::ServiceConfig{} : quip::ServiceConfig::load(config_path);
        config.apply_env();
        if (port) config.port = *port;
        if (providers) {
            const std::string p = quip::trim(*providers);
            config.providers = quip::ProvidersConfig::from_json(
                !p.empty() && p.front() == '{' ? nlohmann::json::parse(p) : nlohmann::json(p));
        }

        if (!replay_path.empty()) {
            auto result = quip::run_replay(quip::load_script(replay_path), config);
            if (replay_out.empty()) {
                for (const auto& ev : result.events) std::cout << ev.to_line() << "\n";
            } else {
                std::ofstream out(replay_out, std::ios::binary | std::ios::trunc);
                out << result.log_text;
                if (!out) throw quip::Error(quip::ErrorCode::io_failure, "cannot write " + replay_out);
            }
            std::cerr << result.session_id << ": " << result.events.size() << " events, " << result.tts.size()
                      << " plays, " << result.rejected_commands << " rejected commands\n";
            return 0;
        }

        quip::SessionService service(config);
        quip::HttpServer http(service);
        const int bound = http.bind(config.host, config.port);
        if (bound < 0) {
            std::cerr << "cannot listen on " << config.host << ":" << config.port << "\n";
            return 1;
        }
        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
        std::cerr << "listening on " << config.host << ":" << bound << "\n";
        std::thread serving([&] { http.serve(); });
        while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
        http.stop();
        serving.join();
    } catch (const quip::Error& e) {
        std::cerr << "error (" << quip::to_string(e.code()) << "): " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
