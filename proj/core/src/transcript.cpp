#include "quip/transcript.hpp"

#include "quip/error.hpp"
#include "quip/text.hpp"

namespace quip {

namespace {

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

nlohmann::json ordered_set_json(const OrderedSet& set) { return set.items(); }

OrderedSet ordered_set_from_json(const nlohmann::json& j) {
    OrderedSet out;
    for (const auto& v : j) out.insert(v.get<std::string>());
    return out;
}

}  // namespace

std::vector<std::string> segment_sentences(std::string_view raw) {
    const std::string text = normalize_whitespace(raw);
    std::vector<std::string> out;
    std::size_t start = 0;
    bool has_content = false;
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (!is_terminator(c)) {
            if (c != ' ') has_content = true;
            ++i;
            continue;
        }
        std::size_t run_end = i;
        while (run_end < text.size() && is_terminator(text[run_end])) ++run_end;
        bool at_boundary = run_end == text.size() || text[run_end] == ' ';
        if (at_boundary && has_content) {
            out.push_back(text.substr(start, run_end - start));
            start = run_end < text.size() ? run_end + 1 : run_end;
            has_content = false;
        }
        i = run_end;
    }
    if (start < text.size()) {
        std::string tail = trim(std::string_view(text).substr(start));
        if (!tail.empty()) out.push_back(std::move(tail));
    }
    return out;
}

std::vector<std::string> ContextWindow::texts() const {
    std::vector<std::string> out;
    out.reserve(sentences.size());
    for (const auto& s : sentences) out.push_back(s.text);
    return out;
}

const Utterance& Transcript::ingest(Speaker speaker, std::string_view text, Millis received_at) {
    std::string normalized = normalize_whitespace(text);
    if (normalized.empty()) throw Error(ErrorCode::rejected_empty, "utterance text is empty");
    Utterance u;
    u.id = next_id_;
    u.speaker = speaker;
    u.received_at = received_at;
    int index = 0;
    for (auto& piece : segment_sentences(normalized)) {
        u.sentences.push_back(Sentence{u.id, index++, std::move(piece)});
    }
    u.text = std::move(normalized);
    restore(std::move(u));
    return utterances_.back();
}

void Transcript::restore(Utterance utterance) {
    if (utterance.id < next_id_) {
        throw Error(ErrorCode::corrupt_log, "utterance ids must strictly increase");
    }
    next_id_ = utterance.id + 1;
    for (const auto& s : utterance.sentences) sentences_.push_back(s);
    utterances_.push_back(std::move(utterance));
}

ContextWindow Transcript::window(int capacity) const {
    ContextWindow w;
    w.capacity = capacity;
    std::size_t n = std::min<std::size_t>(sentences_.size(), static_cast<std::size_t>(std::max(capacity, 0)));
    w.sentences.assign(sentences_.end() - static_cast<std::ptrdiff_t>(n), sentences_.end());
    return w;
}

const Utterance* Transcript::find(UtteranceId id) const {
    if (id < 1 || id >= next_id_) return nullptr;
    // ids are dense from 1 unless restored from a log with gaps
    auto it = std::lower_bound(utterances_.begin(), utterances_.end(), id,
                               [](const Utterance& u, UtteranceId v) { return u.id < v; });
    return it != utterances_.end() && it->id == id ? &*it : nullptr;
}

nlohmann::json to_json(const Sentence& s) {
    return {{"utterance_id", s.utterance_id}, {"index", s.index}, {"text", s.text}};
}

nlohmann::json to_json(const Utterance& u) {
    nlohmann::json sentences = nlohmann::json::array();
    for (const auto& s : u.sentences) sentences.push_back(s.text);
    return {{"id", u.id},
            {"speaker", to_string(u.speaker)},
            {"text", u.text},
            {"received_at", u.received_at},
            {"sentences", std::move(sentences)}};
}

Utterance utterance_from_json(const nlohmann::json& j) {
    Utterance u;
    u.id = j.at("id").get<UtteranceId>();
    auto speaker = parse_speaker(j.at("speaker").get<std::string>());
    if (!speaker) throw Error(ErrorCode::schema_violation, "bad speaker label");
    u.speaker = *speaker;
    u.text = j.at("text").get<std::string>();
    u.received_at = j.at("received_at").get<Millis>();
    int index = 0;
    for (const auto& s : j.at("sentences")) u.sentences.push_back(Sentence{u.id, index++, s.get<std::string>()});
    return u;
}

nlohmann::json to_json(const SessionState& s) {
    nlohmann::json j = {
        {"session_id", s.session_id},
        {"mode", to_string(s.mode)},
        {"joke_mode", s.joke_mode},
        {"selected_bubbles", s.selected_bubbles},
        {"selected_keywords", ordered_set_json(s.selected_keywords)},
        {"selected_associations", ordered_set_json(s.selected_associations)},
        {"typed_prefix", s.typed_prefix},
        {"context_epoch", s.context_epoch},
        {"shown_suggestions", ordered_set_json(s.shown_suggestions)},
        {"input_field", s.input_field},
    };
    j["picked_text"] = s.picked_text ? nlohmann::json(*s.picked_text) : nlohmann::json(nullptr);
    return j;
}

SessionState session_state_from_json(const nlohmann::json& j) {
    SessionState s;
    s.session_id = j.at("session_id").get<std::string>();
    auto mode = parse_mode(j.at("mode").get<std::string>());
    if (!mode) throw Error(ErrorCode::schema_violation, "bad mode in snapshot");
    s.mode = *mode;
    s.joke_mode = j.at("joke_mode").get<bool>();
    for (const auto& id : j.at("selected_bubbles")) s.selected_bubbles.insert(id.get<UtteranceId>());
    s.selected_keywords = ordered_set_from_json(j.at("selected_keywords"));
    s.selected_associations = ordered_set_from_json(j.at("selected_associations"));
    s.typed_prefix = j.at("typed_prefix").get<std::string>();
    s.context_epoch = j.at("context_epoch").get<Epoch>();
    s.shown_suggestions = ordered_set_from_json(j.at("shown_suggestions"));
    s.input_field = j.at("input_field").get<std::string>();
    if (j.contains("picked_text") && !j["picked_text"].is_null()) s.picked_text = j["picked_text"].get<std::string>();
    return s;
}

namespace transitions {

namespace {

void clear_selections(SessionState& s) {
    s.selected_bubbles.clear();
    s.selected_keywords.clear();
    s.selected_associations.clear();
}

void require_joke_mode(const SessionState& s) {
    if (!s.joke_mode) throw Error(ErrorCode::joke_mode_off, "joke mode is off");
}

}  // namespace

void set_mode(SessionState& s, Mode mode) {
    s.mode = mode;
    clear_selections(s);
    s.typed_prefix.clear();
    s.input_field.clear();
    s.picked_text.reset();
    s.shown_suggestions.clear();
}

bool toggle_joke_mode(SessionState& s, bool on) {
    if (s.joke_mode == on) return false;
    s.joke_mode = on;
    if (!on) clear_selections(s);
    s.shown_suggestions.clear();
    return true;
}

void select_bubble(SessionState& s, const Transcript& t, UtteranceId id, bool selected) {
    if (s.mode != Mode::bubble) throw Error(ErrorCode::wrong_mode, "bubble selection needs bubble mode");
    require_joke_mode(s);
    if (!t.contains(id)) throw Error(ErrorCode::unknown_utterance, "no utterance " + std::to_string(id));
    if (selected) {
        s.selected_bubbles.insert(id);
    } else {
        s.selected_bubbles.erase(id);
    }
}

void select_keyword(SessionState& s, std::span<const std::string> available, const std::string& term,
                    bool selected) {
    if (s.mode == Mode::full_auto) throw Error(ErrorCode::wrong_mode, "full_auto has no keywords");
    require_joke_mode(s);
    if (!selected) {
        s.selected_keywords.erase(term);
        if (s.selected_keywords.empty()) s.selected_associations.clear();
        return;
    }
    if (std::find(available.begin(), available.end(), term) == available.end()) {
        throw Error(ErrorCode::unknown_keyword, "keyword not offered: " + term);
    }
    s.selected_keywords.insert(term);
}

void select_association(SessionState& s, std::span<const std::string> available, const std::string& term,
                        bool selected) {
    if (s.mode != Mode::wizard) throw Error(ErrorCode::wrong_mode, "associations exist only in wizard mode");
    require_joke_mode(s);
    if (!selected) {
        s.selected_associations.erase(term);
        return;
    }
    if (s.selected_keywords.empty()) {
        throw Error(ErrorCode::state_violation, "select a keyword before choosing associations");
    }
    if (std::find(available.begin(), available.end(), term) == available.end()) {
        throw Error(ErrorCode::unknown_association, "association not offered: " + term);
    }
    s.selected_associations.insert(term);
}

void set_typed_prefix(SessionState& s, const ModeConfig& config, std::string text) {
    if (!config.editing_allowed[s.mode]) {
        throw Error(ErrorCode::wrong_mode, std::string(to_string(s.mode)) + " does not allow typing");
    }
    if (text.empty()) s.picked_text.reset();
    s.input_field = text;
    s.typed_prefix = std::move(text);
}

void advance_epoch(SessionState& s) {
    ++s.context_epoch;
    s.shown_suggestions.clear();
}

}  // namespace transitions

std::optional<std::string> check_invariants(const SessionState& s, const Transcript& t) {
    if (!s.selected_associations.empty()) {
        if (s.mode != Mode::wizard) return "associations selected outside wizard mode";
        if (s.selected_keywords.empty()) return "associations selected without a keyword";
    }
    if (!s.selected_bubbles.empty() && s.mode != Mode::bubble) return "bubbles selected outside bubble mode";
    for (UtteranceId id : s.selected_bubbles) {
        if (!t.contains(id)) return "selected bubble " + std::to_string(id) + " does not exist";
    }
    if (!s.joke_mode && (!s.selected_bubbles.empty() || !s.selected_keywords.empty())) {
        return "selections held while joke mode is off";
    }
    if (s.mode == Mode::full_auto && !s.selected_keywords.empty()) return "keywords selected in full_auto";
    return std::nullopt;
}

}  // namespace quip
