#include "quip/prompt.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include "quip/error.hpp"
#include "quip/keywords.hpp"
#include "quip/text.hpp"

namespace quip {

namespace {

constexpr std::array<const char*, 4> kContentPlaceholders = {"{prefix}", "{context}", "{keywords}", "{associations}"};

void replace_all(std::string& s, std::string_view from, std::string_view to) {
    std::size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
}

}  // namespace

PromptTemplates PromptTemplates::builtin() { return from_json(nlohmann::json::parse(embedded::kPrompts)); }

PromptTemplates PromptTemplates::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io_failure, "cannot read template file " + path.string());
    try {
        return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::invalid_config, "template file " + path.string() + ": " + e.what());
    }
}

PromptTemplates PromptTemplates::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error(ErrorCode::invalid_config, "template file must be a JSON object");
    PromptTemplates t;
    for (const auto& [id, value] : j.items()) {
        if (value.is_string()) {
            t.templates_[id] = value.get<std::string>();
        } else if (value.is_array()) {
            t.templates_[id] = join(value.get<std::vector<std::string>>(), "\n");
        } else {
            throw Error(ErrorCode::invalid_config, "template " + id + " must be a string or array of lines");
        }
    }
    for (Mode m : kAllModes) {
        if (!t.has(std::string(to_string(m)))) {
            throw Error(ErrorCode::invalid_config, "template file lacks mode " + std::string(to_string(m)));
        }
    }
    return t;
}

const std::string& PromptTemplates::get(const std::string& id) const {
    auto it = templates_.find(id);
    if (it == templates_.end()) throw Error(ErrorCode::invalid_config, "no template " + id);
    return it->second;
}

std::string render_template(const std::string& tmpl, const TemplateValues& values) {
    const std::array<const std::string*, 4> rendered = {&values.prefix, &values.context, &values.keywords,
                                                        &values.associations};
    std::vector<std::string> kept;
    std::istringstream in(tmpl);
    std::string line;
    while (std::getline(in, line)) {
        bool has_placeholder = false;
        bool any_value = false;
        for (std::size_t i = 0; i < kContentPlaceholders.size(); ++i) {
            if (line.find(kContentPlaceholders[i]) == std::string::npos) continue;
            has_placeholder = true;
            if (!is_blank(*rendered[i])) any_value = true;
        }
        if (has_placeholder && !any_value) continue;
        for (std::size_t i = 0; i < kContentPlaceholders.size(); ++i) {
            replace_all(line, kContentPlaceholders[i], *rendered[i]);
        }
        replace_all(line, "{count}", std::to_string(values.count));
        kept.push_back(std::move(line));
    }
    return join(kept, "\n");
}

nlohmann::json PromptSpec::to_json() const {
    return {{"mode", to_string(mode)},
            {"typed_prefix", typed_prefix},
            {"selected_context", selected_context},
            {"selected_keywords", selected_keywords},
            {"selected_associations", selected_associations},
            {"requested_count", requested_count},
            {"instruction_template_id", instruction_template_id}};
}

std::string PromptSpec::digest() const { return hex64(fnv1a(to_json().dump())); }

RenderedPrompt build_prompt(const SessionState& state, const ModeConfig& config, const Transcript& transcript,
                            const PromptTemplates& templates) {
    if (!state.joke_mode) throw Error(ErrorCode::joke_mode_off, "prompts are only built in joke mode");
    RenderedPrompt out;
    PromptSpec& spec = out.spec;
    spec.mode = state.mode;
    spec.typed_prefix = state.typed_prefix;
    spec.requested_count = config.suggestion_count[state.mode];
    spec.instruction_template_id = std::string(to_string(state.mode));

    if (state.mode == Mode::bubble && !state.selected_bubbles.empty()) {
        for (UtteranceId id : state.selected_bubbles) {
            if (const Utterance* u = transcript.find(id)) spec.selected_context.push_back(u->text);
        }
    } else {
        spec.selected_context = transcript.window(config.window_capacity).texts();
    }
    if (state.mode != Mode::full_auto) spec.selected_keywords = state.selected_keywords.items();
    if (state.mode == Mode::wizard) spec.selected_associations = state.selected_associations.items();

    TemplateValues values;
    values.prefix = spec.typed_prefix;
    std::vector<std::string> context_lines;
    for (const auto& c : spec.selected_context) context_lines.push_back("- " + c);
    values.context = join(context_lines, "\n");
    values.keywords = join(spec.selected_keywords, ", ");
    values.associations = join(spec.selected_associations, ", ");
    values.count = spec.requested_count;
    out.instruction = render_template(templates.get(spec.instruction_template_id), values);
    return out;
}

}  // namespace quip
