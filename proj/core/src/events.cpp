#include "quip/events.hpp"

#include <array>
#include <cstdio>
#include <sstream>

#include <zlib.h>

#include "quip/error.hpp"

namespace quip {

namespace {

constexpr std::array<std::pair<EventKind, const char*>, 8> kKinds = {{
    {EventKind::state_snapshot, "state_snapshot"},
    {EventKind::transcript_appended, "transcript_appended"},
    {EventKind::keywords_updated, "keywords_updated"},
    {EventKind::associations_updated, "associations_updated"},
    {EventKind::suggestions_updated, "suggestions_updated"},
    {EventKind::tts_played, "tts_played"},
    {EventKind::error, "error"},
    {EventKind::warning, "warning"},
}};

constexpr std::array<std::pair<Interaction, const char*>, 24> kInteractions = {{
    {Interaction::session_created, "session_created"},
    {Interaction::session_loaded, "session_loaded"},
    {Interaction::transcript_ingested, "transcript_ingested"},
    {Interaction::set_mode, "set_mode"},
    {Interaction::enter_joke_mode, "enter_joke_mode"},
    {Interaction::exit_joke_mode, "exit_joke_mode"},
    {Interaction::select_bubble, "select_bubble"},
    {Interaction::deselect_bubble, "deselect_bubble"},
    {Interaction::select_keyword, "select_keyword"},
    {Interaction::deselect_keyword, "deselect_keyword"},
    {Interaction::select_association, "select_association"},
    {Interaction::deselect_association, "deselect_association"},
    {Interaction::set_prefix, "set_prefix"},
    {Interaction::keywords_extracted, "keywords_extracted"},
    {Interaction::associations_extracted, "associations_extracted"},
    {Interaction::suggestion_shown, "suggestion_shown"},
    {Interaction::refresh, "refresh"},
    {Interaction::suggestion_picked, "suggestion_picked"},
    {Interaction::edit_text, "edit_text"},
    {Interaction::type_own, "type_own"},
    {Interaction::tts_played, "tts_played"},
    {Interaction::command_rejected, "command_rejected"},
    {Interaction::provider_warning, "provider_warning"},
    {Interaction::asr_error, "asr_error"},
}};

std::uint32_t crc_of(std::string_view bytes) {
    return static_cast<std::uint32_t>(
        crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size())));
}

std::string hex8(std::uint32_t v) {
    char buf[9];
    std::snprintf(buf, sizeof buf, "%08x", v);
    return buf;
}

}  // namespace

std::string_view to_string(EventKind kind) {
    for (const auto& [k, name] : kKinds) {
        if (k == kind) return name;
    }
    return "unknown";
}

std::optional<EventKind> parse_event_kind(std::string_view name) {
    for (const auto& [k, n] : kKinds) {
        if (name == n) return k;
    }
    return std::nullopt;
}

std::string_view to_string(Interaction i) {
    for (const auto& [k, name] : kInteractions) {
        if (k == i) return name;
    }
    return "unknown";
}

std::optional<Interaction> parse_interaction(std::string_view name) {
    for (const auto& [k, n] : kInteractions) {
        if (name == n) return k;
    }
    return std::nullopt;
}

std::optional<Interaction> ServerEvent::interaction() const {
    auto it = payload.find("interaction");
    if (it == payload.end() || !it->is_string()) return std::nullopt;
    return parse_interaction(it->get<std::string>());
}

nlohmann::json ServerEvent::to_json() const {
    return {{"session_id", session_id}, {"seq", seq}, {"kind", to_string(kind)}, {"payload", payload}, {"ts", ts}};
}

ServerEvent ServerEvent::from_json(const nlohmann::json& j) {
    if (!j.is_object() || j.size() != 5) throw Error(ErrorCode::schema_violation, "event must have exactly 5 fields");
    ServerEvent e;
    try {
        e.session_id = j.at("session_id").get<std::string>();
        e.seq = j.at("seq").get<std::int64_t>();
        auto kind = parse_event_kind(j.at("kind").get<std::string>());
        if (!kind) throw Error(ErrorCode::schema_violation, "unknown event kind");
        e.kind = *kind;
        e.payload = j.at("payload");
        e.ts = j.at("ts").get<Millis>();
    } catch (const nlohmann::json::exception& ex) {
        throw Error(ErrorCode::schema_violation, std::string("bad event: ") + ex.what());
    }
    return e;
}

std::string ServerEvent::to_line() const { return to_json().dump(); }

std::string encode_log_record(const ServerEvent& event) {
    std::string body = event.to_line();
    return hex8(crc_of(body)) + " " + body + "\n";
}

EventLogWriter::EventLogWriter(const std::filesystem::path& path) : path_(path) {
    out_.open(path, std::ios::binary | std::ios::app);
    if (!out_) throw Error(ErrorCode::io_failure, "cannot open log " + path.string());
}

void EventLogWriter::append(const ServerEvent& event) {
    out_ << encode_log_record(event);
    out_.flush();
    if (!out_) throw Error(ErrorCode::io_failure, "write failed on " + path_.string());
}

std::vector<ServerEvent> parse_event_log(std::string_view content) {
    std::vector<ServerEvent> events;
    std::size_t offset = 0;
    while (offset < content.size()) {
        std::size_t nl = content.find('\n', offset);
        if (nl == std::string_view::npos) {
            throw CorruptLogError(offset, "truncated record at offset " + std::to_string(offset));
        }
        std::string_view line = content.substr(offset, nl - offset);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) {
            offset = nl + 1;
            continue;
        }
        std::string_view body = line;
        if (line.front() != '{') {
            if (line.size() < 10 || line[8] != ' ') {
                throw CorruptLogError(offset, "malformed record at offset " + std::to_string(offset));
            }
            body = line.substr(9);
            if (hex8(crc_of(body)) != line.substr(0, 8)) {
                throw CorruptLogError(offset, "checksum mismatch at offset " + std::to_string(offset));
            }
        }
        ServerEvent ev;
        try {
            ev = ServerEvent::from_json(nlohmann::json::parse(body));
        } catch (const std::exception& e) {
            throw CorruptLogError(offset, "unparsable record at offset " + std::to_string(offset) + ": " + e.what());
        }
        if (!events.empty() && ev.session_id == events.back().session_id && ev.seq != events.back().seq + 1) {
            throw CorruptLogError(offset, "sequence gap at offset " + std::to_string(offset));
        }
        events.push_back(std::move(ev));
        offset = nl + 1;
    }
    return events;
}

std::vector<ServerEvent> read_event_log(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io_failure, "cannot read log " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_event_log(buf.str());
}

}  // namespace quip
