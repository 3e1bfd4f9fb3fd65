#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "quip/clock.hpp"
#include "quip/error.hpp"
#include "quip/events.hpp"
#include "quip/keywords.hpp"
#include "quip/providers.hpp"
#include "quip/suggestions.hpp"
#include "quip/transcript.hpp"
#include "quip/types.hpp"

namespace quip {

enum class CommandKind {
    set_mode,
    toggle_joke_mode,
    select_bubble,
    select_keyword,
    select_association,
    set_prefix,
    generate,
    refresh,
    accept,
    speak,
    ingest_text,
};

std::string_view to_string(CommandKind kind);
std::optional<CommandKind> parse_command_kind(std::string_view name);

struct Command {
    SessionId session_id;
    CommandKind kind = CommandKind::generate;
    nlohmann::json payload = nlohmann::json::object();
    Millis client_ts = 0;

    nlohmann::json to_json() const;
};

// Validates the envelope and the kind-specific payload schema. Throws
// Error(schema_violation), or Error(invalid_mode) for an unknown mode name.
// `session_id` fills in a missing envelope id (the URL path supplies it).
Command parse_command(const nlohmann::json& j, const SessionId& session_id = {});

struct CommandOutcome {
    bool ok = true;
    std::optional<ErrorCode> error;
    std::string message;
    // Seq range of events this command produced; first_seq > last_seq when
    // it produced none.
    std::int64_t first_seq = 0;
    std::int64_t last_seq = 0;

    nlohmann::json to_json() const;
};

struct EngineOptions {
    // Quiet period after a selection or prefix change before suggestions
    // regenerate.
    Millis debounce_ms = 400;
    std::string voice = "default";
};

struct EngineDeps {
    ModeConfig config;
    std::shared_ptr<const KeywordEngine> keywords;
    std::shared_ptr<const SuggestionEngine> suggestions;
    std::shared_ptr<TtsProvider> tts;
    const Clock* clock = nullptr;
    GenerationRunner* runner = nullptr;
    EngineOptions options;
};

// One conversation's state machine. Not thread-safe: the owner serializes
// every call (the session service runs one per command queue). All state
// changes are announced through the event sink with gapless seq numbers.
class SessionEngine {
public:
    using EventSink = std::function<void(const ServerEvent&)>;

    SessionEngine(SessionId id, EngineDeps deps, EventSink sink, Mode initial_mode = Mode::full_auto);

    // Emits the initial state_snapshot (carrying the config). `extra` fields
    // are merged into its payload; restore() ignores them.
    void start(const nlohmann::json& extra = nlohmann::json::object());

    // Rebuilds an engine by folding a persisted log. Emits nothing.
    static std::unique_ptr<SessionEngine> restore(std::span<const ServerEvent> log, EngineDeps deps, EventSink sink);

    // Applies a command. Rejections are reported in the outcome and as an
    // `error` event; state is unchanged in that case.
    CommandOutcome apply(const Command& command);

    // Direct operations; each throws quip::Error on rejection.
    const Utterance& ingest_utterance(Speaker speaker, const std::string& text);
    void set_mode(Mode mode);
    void toggle_joke_mode(bool on);
    void select_bubble(UtteranceId id, bool selected);
    void select_keyword(const std::string& term, bool selected);
    void select_association(const std::string& term, bool selected);
    void set_typed_prefix(std::string text);
    void generate();
    void refresh();
    void accept_suggestion(SuggestionId id);
    PlaybackHandle speak(std::optional<std::string> text = std::nullopt);

    // Fires the debounce timer when due.
    void poll();
    std::optional<Millis> next_deadline() const { return regen_deadline_; }

    // Records a problem that did not come from a command (ASR failures).
    void report(EventKind kind, Interaction interaction, ErrorCode code, const std::string& message);

    const SessionId& id() const { return state_.session_id; }
    const SessionState& state() const { return state_; }
    const Transcript& transcript() const { return transcript_; }
    const ModeConfig& config() const { return deps_.config; }
    ContextWindow context_window() const { return transcript_.window(deps_.config.window_capacity); }
    const KeywordSet& keywords() const { return keywords_; }
    const AssociationSet& associations() const { return associations_; }
    const std::vector<Suggestion>& suggestions() const { return suggestions_; }
    std::int64_t last_seq() const { return seq_; }
    bool generation_in_flight() const { return in_flight_.has_value(); }

    // Canonical JSON of everything a client can observe; byte-stable.
    nlohmann::json snapshot() const;

private:
    struct InFlight {
        std::uint64_t ticket;
        Epoch epoch;
        GenerationKind kind;
        bool stale_retry;
        std::string digest;
    };

    void emit(EventKind kind, Interaction interaction, nlohmann::json payload);
    void emit_snapshot(Interaction interaction);
    void after_epoch_change();
    void recompute_keywords();
    void recompute_associations();
    void schedule_regeneration();
    void cancel_generation();
    bool can_generate() const;
    std::uint64_t start_generation(GenerationKind kind, bool stale_retry);
    void throw_if_failed(std::uint64_t ticket);
    void complete_generation(const GenerationOutcome& outcome);
    std::vector<Sentence> keyword_source() const;
    PlaybackHandle speak_text(const std::string& final_text);
    void fold(const ServerEvent& event);

    EngineDeps deps_;
    EventSink sink_;
    SessionState state_;
    Transcript transcript_;
    KeywordSet keywords_;
    AssociationSet associations_;
    std::vector<Suggestion> suggestions_;
    std::map<SuggestionId, Suggestion> issued_;
    std::optional<Epoch> generated_epoch_;
    std::optional<InFlight> in_flight_;
    std::optional<Millis> regen_deadline_;
    std::optional<std::pair<std::uint64_t, Error>> failed_ticket_;
    std::uint64_t next_ticket_ = 1;
    SuggestionId next_suggestion_id_ = 1;
    std::int64_t seq_ = 0;
};

}  // namespace quip
