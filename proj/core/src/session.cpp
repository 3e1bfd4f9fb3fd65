#include "quip/session.hpp"

#include <algorithm>
#include <array>

#include "quip/text.hpp"

namespace quip {

namespace {

constexpr std::array<std::pair<CommandKind, const char*>, 11> kCommandKinds = {{
    {CommandKind::set_mode, "set_mode"},
    {CommandKind::toggle_joke_mode, "toggle_joke_mode"},
    {CommandKind::select_bubble, "select_bubble"},
    {CommandKind::select_keyword, "select_keyword"},
    {CommandKind::select_association, "select_association"},
    {CommandKind::set_prefix, "set_prefix"},
    {CommandKind::generate, "generate"},
    {CommandKind::refresh, "refresh"},
    {CommandKind::accept, "accept"},
    {CommandKind::speak, "speak"},
    {CommandKind::ingest_text, "ingest_text"},
}};

// A generation failure that complete_generation already turned into an
// `error` event; apply() must not log it twice.
class ReportedError : public Error {
public:
    explicit ReportedError(const Error& e) : Error(e) {}
};

[[noreturn]] void schema(const std::string& what) { throw Error(ErrorCode::schema_violation, what); }

void require_field(const nlohmann::json& p, const char* key, bool (nlohmann::json::*is_type)() const noexcept,
                   const char* type_name) {
    auto it = p.find(key);
    if (it == p.end()) schema(std::string("payload.") + key + " is required");
    if (!((*it).*is_type)()) schema(std::string("payload.") + key + " must be " + type_name);
}

void optional_field(const nlohmann::json& p, const char* key, bool (nlohmann::json::*is_type)() const noexcept,
                    const char* type_name) {
    auto it = p.find(key);
    if (it != p.end() && !((*it).*is_type)()) schema(std::string("payload.") + key + " must be " + type_name);
}

void allow_only(const nlohmann::json& p, std::initializer_list<const char*> keys) {
    for (const auto& [key, _] : p.items()) {
        if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; })) {
            schema("unexpected payload field " + key);
        }
    }
}

bool selected_flag(const nlohmann::json& p) { return p.value("selected", true); }

}  // namespace

std::string_view to_string(CommandKind kind) {
    for (const auto& [k, name] : kCommandKinds) {
        if (k == kind) return name;
    }
    return "unknown";
}

std::optional<CommandKind> parse_command_kind(std::string_view name) {
    for (const auto& [k, n] : kCommandKinds) {
        if (name == n) return k;
    }
    return std::nullopt;
}

nlohmann::json Command::to_json() const {
    return {{"session_id", session_id}, {"kind", to_string(kind)}, {"payload", payload}, {"client_ts", client_ts}};
}

Command parse_command(const nlohmann::json& j, const SessionId& session_id) {
    if (!j.is_object()) schema("command must be a JSON object");
    allow_only(j, {"session_id", "kind", "payload", "client_ts"});
    Command c;
    if (auto it = j.find("session_id"); it != j.end()) {
        if (!it->is_string()) schema("session_id must be a string");
        c.session_id = it->get<std::string>();
        if (!session_id.empty() && c.session_id != session_id) schema("session_id does not match the target session");
    } else {
        c.session_id = session_id;
    }
    auto kind_it = j.find("kind");
    if (kind_it == j.end() || !kind_it->is_string()) schema("kind must be a string");
    auto kind = parse_command_kind(kind_it->get<std::string>());
    if (!kind) schema("unknown command kind " + kind_it->get<std::string>());
    c.kind = *kind;
    if (auto it = j.find("client_ts"); it != j.end()) {
        if (!it->is_number_integer()) schema("client_ts must be an integer");
        c.client_ts = it->get<Millis>();
    }
    if (auto it = j.find("payload"); it != j.end() && !it->is_null()) c.payload = *it;
    const nlohmann::json& p = c.payload;
    if (!p.is_object()) schema("payload must be an object");

    using J = nlohmann::json;
    switch (c.kind) {
        case CommandKind::set_mode:
            allow_only(p, {"mode"});
            require_field(p, "mode", &J::is_string, "a string");
            if (!parse_mode(p["mode"].get<std::string>())) {
                throw Error(ErrorCode::invalid_mode, "unknown mode " + p["mode"].get<std::string>());
            }
            break;
        case CommandKind::toggle_joke_mode:
            allow_only(p, {"on"});
            require_field(p, "on", &J::is_boolean, "a boolean");
            break;
        case CommandKind::select_bubble:
            allow_only(p, {"utterance_id", "selected"});
            require_field(p, "utterance_id", &J::is_number_integer, "an integer");
            optional_field(p, "selected", &J::is_boolean, "a boolean");
            break;
        case CommandKind::select_keyword:
            allow_only(p, {"keyword", "selected"});
            require_field(p, "keyword", &J::is_string, "a string");
            optional_field(p, "selected", &J::is_boolean, "a boolean");
            break;
        case CommandKind::select_association:
            allow_only(p, {"association", "selected"});
            require_field(p, "association", &J::is_string, "a string");
            optional_field(p, "selected", &J::is_boolean, "a boolean");
            break;
        case CommandKind::set_prefix:
            allow_only(p, {"text"});
            require_field(p, "text", &J::is_string, "a string");
            break;
        case CommandKind::generate:
        case CommandKind::refresh:
            allow_only(p, {});
            break;
        case CommandKind::accept:
            // by id, or by position in the current list (keyboard shortcuts)
            allow_only(p, {"suggestion_id", "slot"});
            if (p.contains("suggestion_id") == p.contains("slot")) schema("accept needs exactly one of suggestion_id, slot");
            optional_field(p, "suggestion_id", &J::is_number_integer, "an integer");
            optional_field(p, "slot", &J::is_number_integer, "a non-negative integer");
            if (p.contains("slot") && p["slot"].get<std::int64_t>() < 0) schema("payload.slot must be a non-negative integer");
            break;
        case CommandKind::speak:
            allow_only(p, {"text"});
            optional_field(p, "text", &J::is_string, "a string");
            break;
        case CommandKind::ingest_text:
            allow_only(p, {"speaker", "text"});
            require_field(p, "text", &J::is_string, "a string");
            optional_field(p, "speaker", &J::is_string, "a string");
            if (p.contains("speaker") && !parse_speaker(p["speaker"].get<std::string>())) {
                schema("unknown speaker " + p["speaker"].get<std::string>());
            }
            break;
    }
    return c;
}

nlohmann::json CommandOutcome::to_json() const {
    nlohmann::json j = {{"ok", ok}, {"first_seq", first_seq}, {"last_seq", last_seq}};
    if (error) {
        j["error"] = to_string(*error);
        j["message"] = message;
    }
    return j;
}

// ---------------------------------------------------------------- engine

SessionEngine::SessionEngine(SessionId id, EngineDeps deps, EventSink sink, Mode initial_mode)
    : deps_(std::move(deps)), sink_(std::move(sink)) {
    deps_.config.validate();
    if (!deps_.keywords || !deps_.suggestions || !deps_.tts || !deps_.clock || !deps_.runner) {
        throw Error(ErrorCode::invalid_config, "session engine is missing a dependency");
    }
    state_.session_id = std::move(id);
    state_.mode = initial_mode;
}

void SessionEngine::start(const nlohmann::json& extra) {
    nlohmann::json payload = extra.is_object() ? extra : nlohmann::json::object();
    payload["state"] = to_json(state_);
    payload["config"] = to_json(deps_.config);
    emit(EventKind::state_snapshot, Interaction::session_created, std::move(payload));
}

void SessionEngine::emit(EventKind kind, Interaction interaction, nlohmann::json payload) {
    ServerEvent ev;
    ev.session_id = state_.session_id;
    ev.seq = ++seq_;
    ev.kind = kind;
    ev.payload = std::move(payload);
    ev.payload["interaction"] = to_string(interaction);
    ev.ts = deps_.clock->now_ms();
    if (sink_) sink_(ev);
}

void SessionEngine::emit_snapshot(Interaction interaction) {
    emit(EventKind::state_snapshot, interaction, {{"state", to_json(state_)}});
}

void SessionEngine::report(EventKind kind, Interaction interaction, ErrorCode code, const std::string& message) {
    emit(kind, interaction, {{"code", to_string(code)}, {"message", message}});
}

CommandOutcome SessionEngine::apply(const Command& command) {
    CommandOutcome out;
    out.first_seq = seq_ + 1;
    const nlohmann::json& p = command.payload;
    try {
        switch (command.kind) {
            case CommandKind::set_mode: {
                auto mode = parse_mode(p.at("mode").get<std::string>());
                if (!mode) throw Error(ErrorCode::invalid_mode, "unknown mode");
                set_mode(*mode);
                break;
            }
            case CommandKind::toggle_joke_mode: toggle_joke_mode(p.at("on").get<bool>()); break;
            case CommandKind::select_bubble:
                select_bubble(p.at("utterance_id").get<UtteranceId>(), selected_flag(p));
                break;
            case CommandKind::select_keyword: select_keyword(p.at("keyword").get<std::string>(), selected_flag(p)); break;
            case CommandKind::select_association:
                select_association(p.at("association").get<std::string>(), selected_flag(p));
                break;
            case CommandKind::set_prefix: set_typed_prefix(p.at("text").get<std::string>()); break;
            case CommandKind::generate: generate(); break;
            case CommandKind::refresh: refresh(); break;
            case CommandKind::accept:
                if (p.contains("slot")) {
                    const auto slot = p["slot"].get<std::size_t>();
                    if (slot >= suggestions_.size()) {
                        throw Error(ErrorCode::unknown_suggestion, "no suggestion in slot " + std::to_string(slot));
                    }
                    accept_suggestion(suggestions_[slot].id);
                } else {
                    accept_suggestion(p.at("suggestion_id").get<SuggestionId>());
                }
                break;
            case CommandKind::speak:
                speak(p.contains("text") ? std::optional<std::string>(p["text"].get<std::string>()) : std::nullopt);
                break;
            case CommandKind::ingest_text: {
                auto speaker = parse_speaker(p.value("speaker", std::string("partner")));
                if (!speaker) throw Error(ErrorCode::schema_violation, "unknown speaker");
                ingest_utterance(*speaker, p.at("text").get<std::string>());
                break;
            }
        }
    } catch (const ReportedError& e) {
        out.ok = false;
        out.error = e.code();
        out.message = e.what();
    } catch (const Error& e) {
        out.ok = false;
        out.error = e.code();
        out.message = e.what();
        emit(EventKind::error, Interaction::command_rejected,
             {{"code", to_string(e.code())}, {"message", e.what()}, {"command", command.to_json()}});
    } catch (const nlohmann::json::exception& e) {
        out.ok = false;
        out.error = ErrorCode::schema_violation;
        out.message = e.what();
        emit(EventKind::error, Interaction::command_rejected,
             {{"code", to_string(ErrorCode::schema_violation)}, {"message", e.what()}, {"command", command.to_json()}});
    }
    out.last_seq = seq_;
    return out;
}

// ---------------------------------------------------------------- transcript

const Utterance& SessionEngine::ingest_utterance(Speaker speaker, const std::string& text) {
    const Utterance& u = transcript_.ingest(speaker, text, deps_.clock->now_ms());
    transitions::advance_epoch(state_);
    emit(EventKind::transcript_appended, Interaction::transcript_ingested,
         {{"utterance", to_json(u)}, {"epoch", state_.context_epoch}});
    after_epoch_change();
    return u;
}

void SessionEngine::after_epoch_change() {
    suggestions_.clear();
    emit_snapshot(Interaction::transcript_ingested);
    if (!state_.joke_mode) return;
    recompute_keywords();
    recompute_associations();
    schedule_regeneration();
}

std::vector<Sentence> SessionEngine::keyword_source() const {
    if (state_.mode == Mode::bubble && !state_.selected_bubbles.empty()) {
        std::vector<Sentence> out;
        for (UtteranceId id : state_.selected_bubbles) {
            if (const Utterance* u = transcript_.find(id)) out.insert(out.end(), u->sentences.begin(), u->sentences.end());
        }
        return out;
    }
    return context_window().sentences;
}

void SessionEngine::recompute_keywords() {
    if (!state_.joke_mode || state_.mode == Mode::full_auto) return;
    const auto source = keyword_source();
    auto result = deps_.keywords->extract_keywords(source, deps_.config.keyword_count, state_.context_epoch);
    if (result.warning) {
        emit(EventKind::warning, Interaction::provider_warning,
             {{"code", to_string(ErrorCode::provider_failure)}, {"message", *result.warning}});
    }
    keywords_ = std::move(result.set);
    nlohmann::json payload = to_json(keywords_);
    payload["source"] = state_.mode == Mode::bubble && !state_.selected_bubbles.empty() ? "bubbles" : "window";
    payload["extractor"] = result.used == ExtractionSource::llm ? "llm" : "local";
    emit(EventKind::keywords_updated, Interaction::keywords_extracted, std::move(payload));
}

void SessionEngine::recompute_associations() {
    if (!state_.joke_mode || state_.mode != Mode::wizard) return;
    if (state_.selected_keywords.empty()) {
        if (associations_.keyword.empty() && associations_.associations.empty()) return;
        associations_ = AssociationSet{};
        associations_.epoch = state_.context_epoch;
        emit(EventKind::associations_updated, Interaction::associations_extracted, to_json(associations_));
        return;
    }
    const std::string& focus = state_.selected_keywords.items().back();
    auto result = deps_.keywords->extract_associations(focus, context_window().sentences,
                                                       deps_.config.association_count, state_.context_epoch);
    if (result.warning) {
        emit(EventKind::warning, Interaction::provider_warning,
             {{"code", to_string(ErrorCode::provider_failure)}, {"message", *result.warning}});
    }
    associations_ = std::move(result.set);
    emit(EventKind::associations_updated, Interaction::associations_extracted, to_json(associations_));
}

// ---------------------------------------------------------------- modes

void SessionEngine::set_mode(Mode mode) {
    transitions::set_mode(state_, mode);
    cancel_generation();
    suggestions_.clear();
    keywords_ = KeywordSet{};
    associations_ = AssociationSet{};
    emit_snapshot(Interaction::set_mode);
    if (!state_.joke_mode) return;
    recompute_keywords();
    if (can_generate()) start_generation(GenerationKind::automatic, false);
}

void SessionEngine::toggle_joke_mode(bool on) {
    if (!transitions::toggle_joke_mode(state_, on)) return;
    if (on) {
        emit_snapshot(Interaction::enter_joke_mode);
        recompute_keywords();
        if (can_generate()) start_generation(GenerationKind::automatic, false);
        return;
    }
    cancel_generation();
    suggestions_.clear();
    keywords_ = KeywordSet{};
    associations_ = AssociationSet{};
    emit_snapshot(Interaction::exit_joke_mode);
}

void SessionEngine::select_bubble(UtteranceId id, bool selected) {
    transitions::select_bubble(state_, transcript_, id, selected);
    emit_snapshot(selected ? Interaction::select_bubble : Interaction::deselect_bubble);
    recompute_keywords();
    schedule_regeneration();
}

void SessionEngine::select_keyword(const std::string& term, bool selected) {
    const auto available = keywords_.terms();
    transitions::select_keyword(state_, available, term, selected);
    emit_snapshot(selected ? Interaction::select_keyword : Interaction::deselect_keyword);
    recompute_associations();
    schedule_regeneration();
}

void SessionEngine::select_association(const std::string& term, bool selected) {
    transitions::select_association(state_, associations_.associations, term, selected);
    emit_snapshot(selected ? Interaction::select_association : Interaction::deselect_association);
    schedule_regeneration();
}

void SessionEngine::set_typed_prefix(std::string text) {
    transitions::set_typed_prefix(state_, deps_.config, std::move(text));
    emit_snapshot(Interaction::set_prefix);
    schedule_regeneration();
}

// ---------------------------------------------------------------- generation

void SessionEngine::schedule_regeneration() {
    if (!state_.joke_mode) return;
    regen_deadline_ = deps_.clock->now_ms() + deps_.options.debounce_ms;
}

void SessionEngine::cancel_generation() {
    in_flight_.reset();
    regen_deadline_.reset();
}

void SessionEngine::poll() {
    if (!regen_deadline_ || deps_.clock->now_ms() < *regen_deadline_) return;
    regen_deadline_.reset();
    if (can_generate()) start_generation(GenerationKind::automatic, false);
}

bool SessionEngine::can_generate() const {
    return state_.joke_mode && (state_.mode != Mode::wizard || !state_.selected_keywords.empty());
}

void SessionEngine::generate() {
    if (!state_.joke_mode) throw Error(ErrorCode::joke_mode_off, "joke mode is off");
    if (!can_generate()) throw Error(ErrorCode::state_violation, "wizard needs a keyword before suggesting");
    regen_deadline_.reset();
    throw_if_failed(start_generation(GenerationKind::generate, false));
}

void SessionEngine::refresh() {
    if (!state_.joke_mode) throw Error(ErrorCode::joke_mode_off, "joke mode is off");
    if (generated_epoch_ != state_.context_epoch) {
        throw Error(ErrorCode::state_violation, "nothing has been suggested at this epoch yet");
    }
    if (!can_generate()) throw Error(ErrorCode::state_violation, "wizard needs a keyword before suggesting");
    regen_deadline_.reset();
    throw_if_failed(start_generation(GenerationKind::refresh, false));
}

void SessionEngine::throw_if_failed(std::uint64_t ticket) {
    if (failed_ticket_ && failed_ticket_->first == ticket) {
        Error e = failed_ticket_->second;
        failed_ticket_.reset();
        throw ReportedError(e);
    }
}

std::uint64_t SessionEngine::start_generation(GenerationKind kind, bool stale_retry) {
    GenerationRequest request;
    request.ticket = next_ticket_++;
    request.epoch = state_.context_epoch;
    request.kind = kind;
    request.stale_retry = stale_retry;
    request.prompt = deps_.suggestions->build(state_, deps_.config, transcript_);
    request.exclude = state_.shown_suggestions.items();
    in_flight_ = InFlight{request.ticket, request.epoch, kind, stale_retry, request.prompt.spec.digest()};

    auto engine = deps_.suggestions;
    const auto ticket = request.ticket;
    deps_.runner->run([engine, request = std::move(request)] { return engine->execute(request); },
                      [this](GenerationOutcome outcome) { complete_generation(outcome); });
    return ticket;
}

void SessionEngine::complete_generation(const GenerationOutcome& outcome) {
    if (!in_flight_ || in_flight_->ticket != outcome.ticket) return;  // superseded
    const InFlight job = *in_flight_;
    in_flight_.reset();
    if (!state_.joke_mode) return;

    if (job.epoch != state_.context_epoch) {
        // context moved while the provider was busy: drop, regenerate once
        if (!job.stale_retry && can_generate()) {
            regen_deadline_.reset();
            start_generation(GenerationKind::automatic, true);
        }
        return;
    }
    if (outcome.error) {
        failed_ticket_ = std::make_pair(outcome.ticket, *outcome.error);
        emit(EventKind::error, Interaction::command_rejected,
             {{"code", to_string(outcome.error->code())},
              {"message", outcome.error->what()},
              {"generation", to_string(job.kind)}});
        return;
    }

    const Millis now = deps_.clock->now_ms();
    std::vector<Suggestion> fresh;
    nlohmann::json items = nlohmann::json::array();
    for (const auto& text : outcome.texts) {
        Suggestion s{next_suggestion_id_++, text, job.epoch, state_.mode, job.digest, now};
        state_.shown_suggestions.insert(text);
        issued_[s.id] = s;
        items.push_back(to_json(s));
        fresh.push_back(std::move(s));
    }
    suggestions_ = std::move(fresh);
    generated_epoch_ = job.epoch;
    emit(EventKind::suggestions_updated,
         job.kind == GenerationKind::refresh ? Interaction::refresh : Interaction::suggestion_shown,
         {{"epoch", job.epoch}, {"cause", to_string(job.kind)}, {"suggestions", std::move(items)}});
}

// ---------------------------------------------------------------- output

void SessionEngine::accept_suggestion(SuggestionId id) {
    auto it = issued_.find(id);
    if (it == issued_.end()) throw Error(ErrorCode::unknown_suggestion, "no suggestion " + std::to_string(id));
    if (!state_.joke_mode) throw Error(ErrorCode::joke_mode_off, "joke mode is off");
    const Suggestion& s = it->second;
    if (s.epoch != state_.context_epoch || s.mode != state_.mode) {
        throw Error(ErrorCode::stale_suggestion, "suggestion " + std::to_string(id) + " is from an older context");
    }
    const std::string text = s.text;
    state_.picked_text = text;
    if (deps_.config.immediate_play[state_.mode]) {
        emit_snapshot(Interaction::suggestion_picked);
        speak_text(text);
        return;
    }
    state_.input_field = text;
    emit_snapshot(Interaction::suggestion_picked);
}

PlaybackHandle SessionEngine::speak(std::optional<std::string> text) {
    if (text && !deps_.config.editing_allowed[state_.mode]) {
        throw Error(ErrorCode::wrong_mode, std::string(to_string(state_.mode)) + " does not allow free text");
    }
    std::string final_text = text ? *text : state_.input_field;
    if (is_blank(final_text)) throw Error(ErrorCode::precondition, "nothing to speak");
    state_.input_field = final_text;
    if (!state_.picked_text) {
        emit_snapshot(Interaction::type_own);
    } else if (*state_.picked_text != final_text) {
        emit_snapshot(Interaction::edit_text);
    }
    return speak_text(final_text);
}

PlaybackHandle SessionEngine::speak_text(const std::string& final_text) {
    const bool from_suggestion = state_.picked_text.has_value();
    const bool edited = from_suggestion && *state_.picked_text != final_text;
    PlaybackHandle handle = deps_.tts->synthesize(final_text, deps_.options.voice);
    emit(EventKind::tts_played, Interaction::tts_played,
         {{"text", final_text},
          {"play_index", handle.play_index},
          {"joke_mode", state_.joke_mode},
          {"source", from_suggestion ? "suggestion" : "typed"},
          {"edited", edited}});
    state_.input_field.clear();
    state_.typed_prefix.clear();
    state_.picked_text.reset();
    ingest_utterance(Speaker::user, final_text);
    return handle;
}

// ---------------------------------------------------------------- persistence

nlohmann::json SessionEngine::snapshot() const {
    nlohmann::json transcript = nlohmann::json::array();
    for (const auto& u : transcript_.utterances()) transcript.push_back(to_json(u));
    nlohmann::json suggestions = nlohmann::json::array();
    for (const auto& s : suggestions_) suggestions.push_back(to_json(s));
    return {{"state", to_json(state_)},
            {"config", to_json(deps_.config)},
            {"transcript", std::move(transcript)},
            {"window", context_window().texts()},
            {"keywords", to_json(keywords_)},
            {"associations", to_json(associations_)},
            {"suggestions", std::move(suggestions)},
            {"generated_epoch", generated_epoch_ ? nlohmann::json(*generated_epoch_) : nlohmann::json(nullptr)},
            {"next_suggestion_id", next_suggestion_id_},
            {"last_seq", seq_}};
}

std::unique_ptr<SessionEngine> SessionEngine::restore(std::span<const ServerEvent> log, EngineDeps deps,
                                                      EventSink sink) {
    if (log.empty()) throw CorruptLogError(0, "empty session log");
    const ServerEvent& first = log.front();
    if (first.kind != EventKind::state_snapshot || first.interaction() != Interaction::session_created ||
        first.seq != 1) {
        throw CorruptLogError(0, "log does not start with the session_created snapshot");
    }
    try {
        deps.config = apply_overrides(ModeConfig{}, first.payload.at("config"));
        auto state = session_state_from_json(first.payload.at("state"));
        auto engine = std::make_unique<SessionEngine>(state.session_id, std::move(deps), std::move(sink), state.mode);
        for (const auto& ev : log) {
            if (ev.session_id != engine->state_.session_id) {
                throw CorruptLogError(0, "log mixes sessions");
            }
            if (ev.seq != engine->seq_ + 1) throw CorruptLogError(0, "sequence gap at seq " + std::to_string(ev.seq));
            engine->fold(ev);
        }
        return engine;
    } catch (const CorruptLogError&) {
        throw;
    } catch (const std::exception& e) {
        throw CorruptLogError(0, std::string("cannot replay log: ") + e.what());
    }
}

void SessionEngine::fold(const ServerEvent& ev) {
    seq_ = ev.seq;
    const auto interaction = ev.interaction();
    switch (ev.kind) {
        case EventKind::state_snapshot:
            state_ = session_state_from_json(ev.payload.at("state"));
            if (interaction == Interaction::transcript_ingested) suggestions_.clear();
            if (interaction == Interaction::set_mode || interaction == Interaction::exit_joke_mode) {
                suggestions_.clear();
                keywords_ = KeywordSet{};
                associations_ = AssociationSet{};
            }
            break;
        case EventKind::transcript_appended:
            transcript_.restore(utterance_from_json(ev.payload.at("utterance")));
            break;
        case EventKind::keywords_updated: keywords_ = keyword_set_from_json(ev.payload); break;
        case EventKind::associations_updated: associations_ = association_set_from_json(ev.payload); break;
        case EventKind::suggestions_updated: {
            suggestions_.clear();
            for (const auto& item : ev.payload.at("suggestions")) {
                Suggestion s = suggestion_from_json(item);
                state_.shown_suggestions.insert(s.text);
                issued_[s.id] = s;
                next_suggestion_id_ = std::max(next_suggestion_id_, s.id + 1);
                suggestions_.push_back(std::move(s));
            }
            generated_epoch_ = ev.payload.at("epoch").get<Epoch>();
            break;
        }
        case EventKind::tts_played:
        case EventKind::error:
        case EventKind::warning: break;
    }
}

}  // namespace quip
