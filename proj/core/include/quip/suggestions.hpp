#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "quip/error.hpp"
#include "quip/prompt.hpp"
#include "quip/providers.hpp"
#include "quip/transcript.hpp"
#include "quip/types.hpp"

namespace quip {

struct Suggestion {
    SuggestionId id = 0;
    std::string text;
    Epoch epoch = 0;
    Mode mode = Mode::full_auto;
    std::string inputs_digest;
    Millis shown_at = 0;

    friend bool operator==(const Suggestion&, const Suggestion&) = default;
};

nlohmann::json to_json(const Suggestion& s);
Suggestion suggestion_from_json(const nlohmann::json& j);

enum class GenerationKind { generate, refresh, automatic };

std::string_view to_string(GenerationKind kind);

// Everything a provider round needs, captured by value so it can run off the
// session's command queue.
struct GenerationRequest {
    std::uint64_t ticket = 0;
    Epoch epoch = 0;
    GenerationKind kind = GenerationKind::generate;
    // Set on the single regeneration issued after a stale result.
    bool stale_retry = false;
    RenderedPrompt prompt;
    std::vector<std::string> exclude;
};

struct GenerationOutcome {
    std::uint64_t ticket = 0;
    Epoch epoch = 0;
    std::vector<std::string> texts;
    std::optional<Error> error;
};

class SuggestionEngine {
public:
    static constexpr int kMaxDuplicateRetries = 3;

    SuggestionEngine(PromptTemplates templates, std::shared_ptr<LlmProvider> llm)
        : templates_(std::move(templates)), llm_(std::move(llm)) {}

    // Throws Error(joke_mode_off).
    RenderedPrompt build(const SessionState& state, const ModeConfig& config, const Transcript& transcript) const {
        return build_prompt(state, config, transcript, templates_);
    }

    // Asks the provider for requested_count texts none of which are in
    // `exclude` or repeated within the batch; asks for extras while dedupe
    // shrinks the set. More than kMaxDuplicateRetries rounds of duplicate-only
    // output raise Error(no_new_suggestions). Provider errors propagate.
    std::vector<std::string> run(const GenerationRequest& request) const;

    // run() with errors folded into the outcome; safe to call off-thread.
    GenerationOutcome execute(const GenerationRequest& request) const;

    const PromptTemplates& templates() const { return templates_; }

private:
    PromptTemplates templates_;
    std::shared_ptr<LlmProvider> llm_;
};

// Decides where provider rounds execute. `done` must be invoked exactly once,
// on whatever thread owns the session (the runner's caller arranges that).
class GenerationRunner {
public:
    virtual ~GenerationRunner() = default;
    virtual void run(std::function<GenerationOutcome()> work, std::function<void(GenerationOutcome)> done) = 0;
};

// Runs the round synchronously on the caller's thread.
class InlineRunner final : public GenerationRunner {
public:
    void run(std::function<GenerationOutcome()> work, std::function<void(GenerationOutcome)> done) override {
        done(work());
    }
};

}  // namespace quip
