#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "quip/transcript.hpp"
#include "quip/types.hpp"

namespace quip {

// Instruction templates keyed by id: one per mode ("bubble", "keywords",
// "wizard", "full_auto") plus "keyword_extraction" and
// "association_extraction". Placeholders: {prefix} {context} {keywords}
// {associations} {count}. A template line whose only placeholders all render
// empty is dropped, so unselected inputs leave no trace in the instruction.
class PromptTemplates {
public:
    static PromptTemplates builtin();
    // File format: JSON object, id -> string or array of lines.
    static PromptTemplates load(const std::filesystem::path& path);
    static PromptTemplates from_json(const nlohmann::json& j);

    const std::string& get(const std::string& id) const;
    bool has(const std::string& id) const { return templates_.count(id) > 0; }

private:
    std::map<std::string, std::string> templates_;
};

struct TemplateValues {
    std::string prefix;
    std::string context;
    std::string keywords;
    std::string associations;
    int count = 1;
};

std::string render_template(const std::string& tmpl, const TemplateValues& values);

// Fixed sentence of the context-bubble instruction, with {count} in place of
// the number of comments requested.
inline constexpr const char* kBubbleInstructionSentence =
    "Imagine you are the user, generate {count} humorous comments start always with the user input and "
    "complete giving maximum priority to the context of the selected messages and second to the keywords. "
    "Give a short and concise sentence that the user could fit into the conversation";

struct PromptSpec {
    Mode mode = Mode::full_auto;
    std::string typed_prefix;
    std::vector<std::string> selected_context;
    std::vector<std::string> selected_keywords;
    std::vector<std::string> selected_associations;
    int requested_count = 1;
    std::string instruction_template_id;

    nlohmann::json to_json() const;
    // Stable 64-bit FNV-1a over the canonical JSON form, hex encoded.
    std::string digest() const;
};

struct RenderedPrompt {
    PromptSpec spec;
    std::string instruction;
};

// Throws Error(joke_mode_off) when joke mode is off. `context_source` is the
// list of texts to embed: selected bubble utterances in bubble mode (window
// sentences when none are selected), window sentences otherwise.
RenderedPrompt build_prompt(const SessionState& state, const ModeConfig& config, const Transcript& transcript,
                            const PromptTemplates& templates);

}  // namespace quip
