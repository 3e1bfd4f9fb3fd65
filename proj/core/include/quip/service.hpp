#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "quip/events.hpp"
#include "quip/keywords.hpp"
#include "quip/prompt.hpp"
#include "quip/providers.hpp"
#include "quip/session.hpp"
#include "quip/types.hpp"

namespace quip {

// Server configuration. JSON keys mirror the field names; every key is
// optional. Environment overrides: QUIP_PORT, QUIP_PROVIDERS, QUIP_TEMPLATES,
// QUIP_STOPWORDS, QUIP_LOG_DIR.
struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    ProvidersConfig providers;
    std::optional<std::filesystem::path> templates_path;
    std::optional<std::filesystem::path> stopwords_path;
    // Empty keeps sessions in memory only.
    std::filesystem::path log_dir;
    ModeConfig mode_config;
    Mode default_mode = Mode::full_auto;
    ExtractionSource keyword_source = ExtractionSource::local;
    EngineOptions engine;
    // Sessions run on a ManualClock and generate inline, so a driver that
    // waits for each command gets byte-identical logs. Used by --replay.
    bool virtual_time = false;

    static ServiceConfig from_json(const nlohmann::json& j);
    static ServiceConfig load(const std::filesystem::path& path);
    // `getenv` is injectable for tests.
    void apply_env(const std::function<const char*(const char*)>& getenv = nullptr);
    nlohmann::json to_json() const;
};

class SessionHandle;

// Cursor over one session's event sequence. Never blocks the session; a slow
// reader just falls behind and catches up from the retained history.
class Subscription {
public:
    Subscription(std::shared_ptr<SessionHandle> session, std::int64_t from_seq);

    // Next event with seq > cursor(). Waits up to `timeout`; nullopt on
    // timeout or once the session has closed and everything was delivered.
    std::optional<ServerEvent> next(std::chrono::milliseconds timeout);
    // Everything currently available past the cursor, at most `max` events.
    std::vector<ServerEvent> poll(std::size_t max = SIZE_MAX);

    std::int64_t cursor() const { return cursor_; }
    // True once the session is closed and the cursor reached its end.
    bool finished() const;

private:
    std::shared_ptr<SessionHandle> session_;
    std::int64_t cursor_;
};

struct Submission {
    // Highest seq at enqueue time; the command's events all come later.
    std::int64_t ack_seq = 0;
    std::shared_future<CommandOutcome> outcome;
};

// Owns the live sessions. Each session has a single-writer command queue on
// its own thread; provider rounds run on a second per-session thread and post
// their results back onto the queue. Thread-safe.
class SessionService {
public:
    explicit SessionService(ServiceConfig config);
    ~SessionService();

    SessionService(const SessionService&) = delete;
    SessionService& operator=(const SessionService&) = delete;

    // Overrides: "mode", "providers", and any ModeConfig key. Throws
    // Error(invalid_config).
    SessionId create_session(const nlohmann::json& overrides = nlohmann::json::object());

    // Validates the command and enqueues it. Throws Error(session_not_found |
    // schema_violation | invalid_mode) without enqueueing.
    Submission submit(const SessionId& id, const nlohmann::json& command);
    Submission submit(Command command);
    // submit() and wait for the outcome.
    CommandOutcome execute(const SessionId& id, const nlohmann::json& command);

    Subscription subscribe(const SessionId& id, std::int64_t from_seq = 0);
    std::vector<ServerEvent> events(const SessionId& id, std::int64_t from_seq = 0);
    nlohmann::json snapshot(const SessionId& id);
    // Mock TTS playback record; empty for other TTS implementations.
    std::vector<MockTts::Entry> tts_entries(const SessionId& id);

    // Loads a session from its persisted log if it is not live yet. Throws
    // Error(session_not_found) or CorruptLogError.
    void load_session(const SessionId& id);
    bool has_session(const SessionId& id);
    std::vector<SessionId> sessions() const;
    // Stops the session's threads and forgets it; the log stays on disk.
    void close_session(const SessionId& id);

    // Feeds the session from its ASR provider on a background thread, pacing
    // by event timestamps. Stream failures become `error` events.
    void attach_asr(const SessionId& id, const std::string& source);

    // Virtual-time sessions only: moves the clock forward, firing any
    // debounce deadline at its exact time. Blocks until done.
    void advance_time(const SessionId& id, Millis delta);

    const ServiceConfig& config() const { return config_; }
    std::filesystem::path log_path(const SessionId& id) const;

private:
    std::shared_ptr<SessionHandle> find(const SessionId& id);
    std::shared_ptr<SessionHandle> make_handle(const SessionId& id, const ProvidersConfig& providers,
                                               const ModeConfig& mode_config);
    SessionId next_id();

    ServiceConfig config_;
    PromptTemplates templates_;
    Stopwords stopwords_;
    AssociationLexicon lexicon_;
    mutable std::mutex mu_;
    std::map<SessionId, std::shared_ptr<SessionHandle>> sessions_;
    std::uint64_t id_counter_ = 0;
};

struct ReplayResult {
    SessionId session_id;
    std::vector<ServerEvent> events;
    // The persisted log bytes (checksummed records).
    std::string log_text;
    nlohmann::json snapshot;
    std::vector<MockTts::Entry> tts;
    int rejected_commands = 0;
};

// Drives a session through a scripted conversation: ASR lines go through a
// ScriptedAsr stream in lockstep with the script, cmd lines are submitted as
// commands, and each line's delay advances the session's virtual clock.
// The service must run with virtual_time.
ReplayResult replay_script(SessionService& service, const SessionId& id, const std::vector<ScriptLine>& script);

// Fresh virtual-time service, one session, the whole script.
ReplayResult run_replay(const std::vector<ScriptLine>& script, ServiceConfig config,
                        const nlohmann::json& overrides = nlohmann::json::object());

}  // namespace quip
