#include "quip/suggestions.hpp"

#include <algorithm>

#include "quip/text.hpp"

namespace quip {

nlohmann::json to_json(const Suggestion& s) {
    return {{"id", s.id},
            {"text", s.text},
            {"epoch", s.epoch},
            {"mode", to_string(s.mode)},
            {"inputs_digest", s.inputs_digest},
            {"shown_at", s.shown_at}};
}

Suggestion suggestion_from_json(const nlohmann::json& j) {
    Suggestion s;
    s.id = j.at("id").get<SuggestionId>();
    s.text = j.at("text").get<std::string>();
    s.epoch = j.at("epoch").get<Epoch>();
    auto mode = parse_mode(j.at("mode").get<std::string>());
    if (!mode) throw Error(ErrorCode::schema_violation, "bad suggestion mode");
    s.mode = *mode;
    s.inputs_digest = j.at("inputs_digest").get<std::string>();
    s.shown_at = j.at("shown_at").get<Millis>();
    return s;
}

std::string_view to_string(GenerationKind kind) {
    switch (kind) {
        case GenerationKind::generate: return "generate";
        case GenerationKind::refresh: return "refresh";
        case GenerationKind::automatic: return "automatic";
    }
    return "unknown";
}

std::vector<std::string> SuggestionEngine::run(const GenerationRequest& request) const {
    const PromptSpec& spec = request.prompt.spec;
    const int wanted = spec.requested_count;

    CompletionConstraints constraints;
    constraints.task = LlmTask::suggestions;
    constraints.prefix = spec.typed_prefix;
    constraints.keywords = spec.selected_keywords;
    constraints.associations = spec.selected_associations;
    constraints.context = spec.selected_context;
    constraints.exclude = request.exclude;

    std::vector<std::string> accepted;
    int duplicate_rounds = 0;
    while (static_cast<int>(accepted.size()) < wanted) {
        const int missing = wanted - static_cast<int>(accepted.size());
        auto texts = llm_->complete(request.prompt.instruction, missing, constraints);
        bool progressed = false;
        for (auto& text : texts) {
            if (static_cast<int>(accepted.size()) >= wanted) break;
            if (is_blank(text)) continue;
            auto seen = [&](const std::vector<std::string>& v) { return std::find(v.begin(), v.end(), text) != v.end(); };
            if (seen(constraints.exclude) || seen(accepted)) continue;
            accepted.push_back(text);
            progressed = true;
        }
        if (!progressed && ++duplicate_rounds > kMaxDuplicateRetries) {
            throw Error(ErrorCode::no_new_suggestions,
                        "provider returned only already-shown suggestions " + std::to_string(duplicate_rounds) + " times");
        }
        // later rounds also avoid what this batch already produced
        constraints.exclude.insert(constraints.exclude.end(), accepted.begin(), accepted.end());
        std::sort(constraints.exclude.begin(), constraints.exclude.end());
        constraints.exclude.erase(std::unique(constraints.exclude.begin(), constraints.exclude.end()),
                                  constraints.exclude.end());
    }
    return accepted;
}

GenerationOutcome SuggestionEngine::execute(const GenerationRequest& request) const {
    GenerationOutcome out;
    out.ticket = request.ticket;
    out.epoch = request.epoch;
    try {
        out.texts = run(request);
    } catch (const Error& e) {
        out.error = e;
    } catch (const std::exception& e) {
        out.error = Error(ErrorCode::provider_failure, e.what());
    }
    return out;
}

}  // namespace quip
