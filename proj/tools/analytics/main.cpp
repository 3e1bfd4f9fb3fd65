#include <algorithm>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "quip/analytics.hpp"
#include "quip/error.hpp"

namespace {

// Expands directories to their *.log files, sorted for stable output.
std::vector<quip::ServerEvent> read_logs(const std::vector<std::string>& paths) {
    std::vector<std::filesystem::path> files;
    for (const auto& p : paths) {
        if (std::filesystem::is_directory(p)) {
            std::vector<std::filesystem::path> found;
            for (const auto& entry : std::filesystem::directory_iterator(p)) {
                if (entry.path().extension() == ".log") found.push_back(entry.path());
            }
            std::sort(found.begin(), found.end());
            files.insert(files.end(), found.begin(), found.end());
        } else {
            files.emplace_back(p);
        }
    }
    std::vector<quip::ServerEvent> events;
    for (const auto& f : files) {
        try {
            auto evs = quip::read_event_log(f);
            events.insert(events.end(), evs.begin(), evs.end());
        } catch (const quip::CorruptLogError& e) {
            throw quip::CorruptLogError(e.offset(), f.string() + ": " + e.what());
        }
    }
    return events;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"interaction coding over quip session logs"};
    app.require_subcommand(1);

    std::vector<std::string> code_logs;
    std::string out_path;
    std::string format = "csv";
    auto* code = app.add_subcommand("code", "code events into interaction categories");
    code->add_option("--log", code_logs, "log file or directory of logs")->required()->check(CLI::ExistingPath);
    code->add_option("--out", out_path, "output file (stdout when omitted)");
    code->add_option("--format", format, "csv | json | timeline-json")
        ->check(CLI::IsMember({"csv", "json", "timeline-json"}));

    std::vector<std::string> summary_logs;
    auto* summarize = app.add_subcommand("summarize", "per-session counts and derived metrics");
    summarize->add_option("--log", summary_logs, "log file or directory of logs")->required()->check(CLI::ExistingPath);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*code) {
            const auto events = read_logs(code_logs);
            const auto coded = quip::code_events(events);
            const auto fmt = *quip::parse_export_format(format);
            if (out_path.empty()) {
                std::cout << quip::export_coded(coded, fmt);
            } else {
                quip::write_export(out_path, coded, fmt);
            }
        } else if (*summarize) {
            const auto events = read_logs(summary_logs);
            nlohmann::json out = nlohmann::json::object();
            for (const auto& [id, summary] : quip::summarize_by_session(events)) out[id] = summary.to_json();
            std::cout << out.dump(2) << "\n";
        }
    } catch (const quip::CorruptLogError& e) {
        std::cerr << "corrupt_log at offset " << e.offset() << ": " << e.what() << "\n";
        return 3;
    } catch (const quip::Error& e) {
        std::cerr << "error (" << quip::to_string(e.code()) << "): " << e.what() << "\n";
        return 2;
    }
    return 0;
}
