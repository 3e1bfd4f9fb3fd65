#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "quip/types.hpp"

namespace quip {

enum class EventKind {
    state_snapshot,
    transcript_appended,
    keywords_updated,
    associations_updated,
    suggestions_updated,
    tts_played,
    error,
    warning,
};

std::string_view to_string(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view name);

// The interaction that caused an event, recorded in payload["interaction"].
// This is the coding vocabulary the analytics pipeline reads back.
enum class Interaction {
    session_created,
    session_loaded,
    transcript_ingested,
    set_mode,
    enter_joke_mode,
    exit_joke_mode,
    select_bubble,
    deselect_bubble,
    select_keyword,
    deselect_keyword,
    select_association,
    deselect_association,
    set_prefix,
    keywords_extracted,
    associations_extracted,
    suggestion_shown,
    refresh,
    suggestion_picked,
    edit_text,
    type_own,
    tts_played,
    command_rejected,
    provider_warning,
    asr_error,
};

std::string_view to_string(Interaction i);
std::optional<Interaction> parse_interaction(std::string_view name);

struct ServerEvent {
    SessionId session_id;
    std::int64_t seq = 0;
    EventKind kind = EventKind::state_snapshot;
    nlohmann::json payload = nlohmann::json::object();
    Millis ts = 0;

    std::optional<Interaction> interaction() const;

    // Wire form: an object with exactly session_id, seq, kind, payload, ts.
    nlohmann::json to_json() const;
    static ServerEvent from_json(const nlohmann::json& j);
    // Single-line JSON, keys sorted; byte-stable for identical events.
    std::string to_line() const;

    friend bool operator==(const ServerEvent& a, const ServerEvent& b) {
        return a.session_id == b.session_id && a.seq == b.seq && a.kind == b.kind && a.payload == b.payload &&
               a.ts == b.ts;
    }
};

// On-disk session log: one record per line, "<crc32 hex8> <event json>\n".
// The checksum covers the JSON bytes. Appends are flushed per record.
class EventLogWriter {
public:
    explicit EventLogWriter(const std::filesystem::path& path);

    void append(const ServerEvent& event);
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

std::string encode_log_record(const ServerEvent& event);

// Reads a session log. Accepts checksummed records and plain JSON lines.
// Throws CorruptLogError with the byte offset of the first bad record:
// checksum mismatch, unparsable JSON, missing trailing newline, or a seq gap.
std::vector<ServerEvent> read_event_log(const std::filesystem::path& path);
std::vector<ServerEvent> parse_event_log(std::string_view content);

}  // namespace quip
