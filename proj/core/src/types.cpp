#include "quip/types.hpp"

#include "quip/error.hpp"

namespace quip {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::session_not_found: return "session_not_found";
        case ErrorCode::rejected_empty: return "rejected_empty";
        case ErrorCode::invalid_mode: return "invalid_mode";
        case ErrorCode::wrong_mode: return "wrong_mode";
        case ErrorCode::unknown_utterance: return "unknown_utterance";
        case ErrorCode::unknown_keyword: return "unknown_keyword";
        case ErrorCode::unknown_association: return "unknown_association";
        case ErrorCode::unknown_suggestion: return "unknown_suggestion";
        case ErrorCode::state_violation: return "state_violation";
        case ErrorCode::joke_mode_off: return "joke_mode_off";
        case ErrorCode::precondition: return "precondition";
        case ErrorCode::stale_suggestion: return "stale_suggestion";
        case ErrorCode::no_new_suggestions: return "no_new_suggestions";
        case ErrorCode::provider_failure: return "provider_failure";
        case ErrorCode::provider_timeout: return "provider_timeout";
        case ErrorCode::malformed_response: return "malformed_response";
        case ErrorCode::stream_closed: return "stream_closed";
        case ErrorCode::tts_failure: return "tts_failure";
        case ErrorCode::invalid_config: return "invalid_config";
        case ErrorCode::schema_violation: return "schema_violation";
        case ErrorCode::corrupt_log: return "corrupt_log";
        case ErrorCode::io_failure: return "io_failure";
    }
    return "unknown";
}

std::string_view to_string(Mode mode) {
    switch (mode) {
        case Mode::bubble: return "bubble";
        case Mode::keywords: return "keywords";
        case Mode::wizard: return "wizard";
        case Mode::full_auto: return "full_auto";
    }
    return "unknown";
}

std::optional<Mode> parse_mode(std::string_view name) {
    for (Mode m : kAllModes) {
        if (to_string(m) == name) return m;
    }
    return std::nullopt;
}

std::string_view to_string(Speaker speaker) {
    switch (speaker) {
        case Speaker::partner: return "partner";
        case Speaker::user: return "user";
        case Speaker::system: return "system";
    }
    return "unknown";
}

std::optional<Speaker> parse_speaker(std::string_view name) {
    if (name == "partner") return Speaker::partner;
    if (name == "user") return Speaker::user;
    if (name == "system") return Speaker::system;
    return std::nullopt;
}

void ModeConfig::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw Error(ErrorCode::invalid_config, std::string(what) + " must be >= 1");
    };
    require(window_capacity >= 1, "window_capacity");
    require(keyword_count >= 1, "keyword_count");
    require(association_count >= 1, "association_count");
    for (Mode m : kAllModes) require(suggestion_count[m] >= 1, "suggestion_count");
}

namespace {

template <typename T>
nlohmann::json per_mode_json(const PerMode<T>& table) {
    nlohmann::json out = nlohmann::json::object();
    for (Mode m : kAllModes) out[std::string(to_string(m))] = table[m];
    return out;
}

template <typename T>
void per_mode_apply(PerMode<T>& table, const nlohmann::json& j, const char* field) {
    if (!j.is_object()) {
        throw Error(ErrorCode::invalid_config, std::string(field) + " must be an object keyed by mode");
    }
    for (const auto& [key, value] : j.items()) {
        auto mode = parse_mode(key);
        if (!mode) throw Error(ErrorCode::invalid_config, std::string(field) + ": unknown mode " + key);
        try {
            table[*mode] = value.template get<T>();
        } catch (const nlohmann::json::exception&) {
            throw Error(ErrorCode::invalid_config, std::string(field) + "." + key + " has the wrong type");
        }
    }
}

int int_field(const nlohmann::json& j, const char* field) {
    if (!j.is_number_integer()) {
        throw Error(ErrorCode::invalid_config, std::string(field) + " must be an integer");
    }
    return j.get<int>();
}

}  // namespace

nlohmann::json to_json(const ModeConfig& config) {
    return {
        {"window_capacity", config.window_capacity},
        {"keyword_count", config.keyword_count},
        {"association_count", config.association_count},
        {"suggestion_count", per_mode_json(config.suggestion_count)},
        {"editing_allowed", per_mode_json(config.editing_allowed)},
        {"immediate_play", per_mode_json(config.immediate_play)},
    };
}

ModeConfig apply_overrides(ModeConfig base, const nlohmann::json& overrides) {
    if (overrides.is_null()) return base;
    if (!overrides.is_object()) throw Error(ErrorCode::invalid_config, "mode config must be an object");
    for (const auto& [key, value] : overrides.items()) {
        if (key == "window_capacity") {
            base.window_capacity = int_field(value, "window_capacity");
        } else if (key == "keyword_count") {
            base.keyword_count = int_field(value, "keyword_count");
        } else if (key == "association_count") {
            base.association_count = int_field(value, "association_count");
        } else if (key == "suggestion_count") {
            per_mode_apply(base.suggestion_count, value, "suggestion_count");
        } else if (key == "editing_allowed") {
            per_mode_apply(base.editing_allowed, value, "editing_allowed");
        } else if (key == "immediate_play") {
            per_mode_apply(base.immediate_play, value, "immediate_play");
        } else {
            throw Error(ErrorCode::invalid_config, "unknown config key: " + key);
        }
    }
    base.validate();
    return base;
}

}  // namespace quip
