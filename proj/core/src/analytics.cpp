#include "quip/analytics.hpp"

#include <fstream>
#include <sstream>

#include "quip/error.hpp"

namespace quip {

namespace {

constexpr std::array<const char*, 10> kCategoryNames = {
    "enter_joke_mode", "exit_joke_mode", "select_bubble", "select_keyword", "select_association",
    "refresh",         "pick_suggestion", "edit_text",    "play_tts",       "type_own",
};

[[noreturn]] void bad_export(const std::string& what) { throw Error(ErrorCode::schema_violation, what); }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

// Splits one CSV record starting at `pos`; advances past its line break.
std::vector<std::string> csv_record(std::string_view content, std::size_t& pos) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    while (pos < content.size()) {
        const char c = content[pos++];
        if (quoted) {
            if (c == '"' && pos < content.size() && content[pos] == '"') {
                fields.back() += '"';
                ++pos;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else if (c == '\n') {
            break;
        } else if (c != '\r') {
            fields.back() += c;
        }
    }
    if (quoted) bad_export("unterminated quoted CSV field");
    return fields;
}

Millis parse_t(const std::string& s) {
    try {
        std::size_t used = 0;
        const Millis t = std::stoll(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return t;
    } catch (const std::exception&) {
        bad_export("bad t value " + s);
    }
}

Category category_field(const std::string& s) {
    auto c = parse_category(s);
    if (!c) bad_export("unknown category " + s);
    return *c;
}

nlohmann::json item_json(const CodedInteraction& c) {
    return {{"session_id", c.session_id}, {"t", c.t}, {"category", to_string(c.category)}};
}

CodedInteraction item_from_json(const nlohmann::json& j, const SessionId* session) {
    try {
        CodedInteraction c;
        c.session_id = session ? *session : j.at("session_id").get<std::string>();
        c.t = j.at("t").get<Millis>();
        c.category = category_field(j.at("category").get<std::string>());
        return c;
    } catch (const nlohmann::json::exception& e) {
        bad_export(std::string("bad coded item: ") + e.what());
    }
}

}  // namespace

std::string_view to_string(Category c) { return kCategoryNames[static_cast<std::size_t>(c)]; }

std::optional<Category> parse_category(std::string_view name) {
    for (std::size_t i = 0; i < kCategoryNames.size(); ++i) {
        if (name == kCategoryNames[i]) return static_cast<Category>(i);
    }
    return std::nullopt;
}

std::optional<Category> category_of(const ServerEvent& event) {
    if (event.kind == EventKind::tts_played) return Category::play_tts;
    const auto interaction = event.interaction();
    if (!interaction) return std::nullopt;
    if (event.kind == EventKind::suggestions_updated) {
        if (*interaction == Interaction::refresh) return Category::refresh;
        return std::nullopt;
    }
    if (event.kind != EventKind::state_snapshot) return std::nullopt;
    switch (*interaction) {
        case Interaction::enter_joke_mode: return Category::enter_joke_mode;
        case Interaction::exit_joke_mode: return Category::exit_joke_mode;
        case Interaction::select_bubble: return Category::select_bubble;
        case Interaction::select_keyword: return Category::select_keyword;
        case Interaction::select_association: return Category::select_association;
        case Interaction::suggestion_picked: return Category::pick_suggestion;
        case Interaction::edit_text: return Category::edit_text;
        case Interaction::type_own: return Category::type_own;
        default: return std::nullopt;
    }
}

std::vector<CodedInteraction> code_events(std::span<const ServerEvent> events) {
    std::map<SessionId, std::int64_t> last_seq;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const ServerEvent& ev = events[i];
        auto [it, fresh] = last_seq.try_emplace(ev.session_id, ev.seq - 1);
        if (!fresh && ev.seq != it->second + 1) {
            throw CorruptLogError(i, "sequence gap in " + ev.session_id + " at seq " + std::to_string(ev.seq));
        }
        it->second = ev.seq;
    }

    std::vector<CodedInteraction> out;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const ServerEvent& ev = events[i];
        auto category = category_of(ev);
        if (!category) continue;
        if (*category == Category::type_own) {
            // keep only typing that reached the speaker
            bool played = false;
            for (std::size_t k = i + 1; k < events.size(); ++k) {
                if (events[k].session_id != ev.session_id || events[k].kind == EventKind::warning) continue;
                played = events[k].kind == EventKind::tts_played;
                break;
            }
            if (!played) continue;
        }
        out.push_back({ev.session_id, ev.ts, *category});
    }
    return out;
}

std::vector<bool> excludable_flags(std::span<const CodedInteraction> coded) {
    std::map<SessionId, bool> joke_on;
    std::vector<bool> flags;
    flags.reserve(coded.size());
    for (const auto& c : coded) {
        bool& on = joke_on[c.session_id];
        if (c.category == Category::enter_joke_mode) on = true;
        if (c.category == Category::exit_joke_mode) on = false;
        flags.push_back(!on && (c.category == Category::type_own || c.category == Category::play_tts));
    }
    return flags;
}

int SessionSummary::count(Category c) const {
    auto it = counts.find(c);
    return it == counts.end() ? 0 : it->second;
}

nlohmann::json SessionSummary::to_json() const {
    nlohmann::json c = nlohmann::json::object();
    for (Category cat : kAllCategories) c[std::string(quip::to_string(cat))] = count(cat);
    return {{"counts", c},
            {"jokes_delivered", jokes_delivered},
            {"suggestions_shown", suggestions_shown},
            {"edits_before_play", edits_before_play},
            {"excludable", excludable}};
}

SessionSummary summarize(std::span<const CodedInteraction> coded) {
    SessionSummary s;
    for (Category c : kAllCategories) s.counts[c] = 0;
    const auto flags = excludable_flags(coded);
    std::map<SessionId, bool> joke_on;
    std::map<SessionId, std::optional<Category>> composing;
    for (std::size_t i = 0; i < coded.size(); ++i) {
        const auto& c = coded[i];
        ++s.counts[c.category];
        if (flags[i]) ++s.excludable;
        bool& on = joke_on[c.session_id];
        auto& last = composing[c.session_id];
        switch (c.category) {
            case Category::enter_joke_mode: on = true; break;
            case Category::exit_joke_mode: on = false; break;
            case Category::pick_suggestion:
            case Category::edit_text:
            case Category::type_own: last = c.category; break;
            case Category::play_tts:
                if (on) ++s.jokes_delivered;
                if (last == Category::edit_text) ++s.edits_before_play;
                last.reset();
                break;
            default: break;
        }
    }
    return s;
}

SessionSummary summarize(std::span<const CodedInteraction> coded, std::span<const ServerEvent> events) {
    SessionSummary s = summarize(coded);
    for (const auto& ev : events) {
        if (ev.kind != EventKind::suggestions_updated) continue;
        if (auto it = ev.payload.find("suggestions"); it != ev.payload.end() && it->is_array()) {
            s.suggestions_shown += static_cast<int>(it->size());
        }
    }
    return s;
}

std::map<SessionId, SessionSummary> summarize_by_session(std::span<const ServerEvent> events) {
    std::map<SessionId, std::vector<ServerEvent>> by_session;
    for (const auto& ev : events) by_session[ev.session_id].push_back(ev);
    std::map<SessionId, SessionSummary> out;
    for (const auto& [id, evs] : by_session) {
        const auto coded = code_events(evs);
        out[id] = summarize(coded, evs);
    }
    return out;
}

std::optional<ExportFormat> parse_export_format(std::string_view name) {
    if (name == "csv") return ExportFormat::csv;
    if (name == "json") return ExportFormat::json;
    if (name == "timeline-json") return ExportFormat::timeline_json;
    return std::nullopt;
}

std::string export_coded(std::span<const CodedInteraction> coded, ExportFormat format) {
    switch (format) {
        case ExportFormat::csv: {
            std::string out = "session_id,t,category\n";
            for (const auto& c : coded) {
                out += csv_field(c.session_id) + "," + std::to_string(c.t) + "," + std::string(to_string(c.category)) + "\n";
            }
            return out;
        }
        case ExportFormat::json: {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& c : coded) arr.push_back(item_json(c));
            return arr.dump(2) + "\n";
        }
        case ExportFormat::timeline_json: {
            std::map<SessionId, nlohmann::json> groups;
            for (const auto& c : coded) {
                auto& g = groups[c.session_id];
                if (g.is_null()) g = nlohmann::json::array();
                g.push_back({{"t", c.t}, {"category", to_string(c.category)}});
            }
            nlohmann::json sessions = nlohmann::json::array();
            for (auto& [id, items] : groups) sessions.push_back({{"session_id", id}, {"interactions", std::move(items)}});
            return nlohmann::json{{"sessions", std::move(sessions)}}.dump(2) + "\n";
        }
    }
    return {};
}

void write_export(const std::filesystem::path& path, std::span<const CodedInteraction> coded, ExportFormat format) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io_failure, "cannot write " + path.string());
    out << export_coded(coded, format);
    out.flush();
    if (!out) throw Error(ErrorCode::io_failure, "write failed on " + path.string());
}

std::vector<CodedInteraction> load_coded(std::string_view content, ExportFormat format) {
    std::vector<CodedInteraction> out;
    if (format == ExportFormat::csv) {
        std::size_t pos = 0;
        const auto header = csv_record(content, pos);
        if (header != std::vector<std::string>{"session_id", "t", "category"}) bad_export("unexpected CSV header");
        while (pos < content.size()) {
            auto row = csv_record(content, pos);
            if (row.size() == 1 && row[0].empty()) continue;
            if (row.size() != 3) bad_export("CSV row needs 3 fields");
            out.push_back({row[0], parse_t(row[1]), category_field(row[2])});
        }
        return out;
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(content);
    } catch (const nlohmann::json::exception& e) {
        bad_export(std::string("unparsable export: ") + e.what());
    }
    if (format == ExportFormat::json) {
        if (!j.is_array()) bad_export("json export must be an array");
        for (const auto& item : j) out.push_back(item_from_json(item, nullptr));
        return out;
    }
    if (!j.is_object() || !j.contains("sessions") || !j["sessions"].is_array()) bad_export("timeline needs sessions");
    for (const auto& group : j["sessions"]) {
        if (!group.is_object() || !group.contains("session_id") || !group["session_id"].is_string() ||
            !group.contains("interactions") || !group["interactions"].is_array()) {
            bad_export("malformed timeline group");
        }
        const SessionId id = group["session_id"].get<std::string>();
        for (const auto& item : group["interactions"]) out.push_back(item_from_json(item, &id));
    }
    return out;
}

}  // namespace quip
