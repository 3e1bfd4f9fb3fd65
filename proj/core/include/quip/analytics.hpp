#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "quip/events.hpp"
#include "quip/types.hpp"

namespace quip {

enum class Category {
    enter_joke_mode,
    exit_joke_mode,
    select_bubble,
    select_keyword,
    select_association,
    refresh,
    pick_suggestion,
    edit_text,
    play_tts,
    type_own,
};

inline constexpr std::array<Category, 10> kAllCategories = {
    Category::enter_joke_mode, Category::exit_joke_mode,    Category::select_bubble, Category::select_keyword,
    Category::select_association, Category::refresh,        Category::pick_suggestion, Category::edit_text,
    Category::play_tts,        Category::type_own,
};

std::string_view to_string(Category c);
std::optional<Category> parse_category(std::string_view name);

struct CodedInteraction {
    SessionId session_id;
    // ms since session start
    Millis t = 0;
    Category category = Category::play_tts;

    friend bool operator==(const CodedInteraction&, const CodedInteraction&) = default;
};

// The category a single event codes to, if any. Lookahead-dependent cases
// (type_own) are resolved by code_events.
std::optional<Category> category_of(const ServerEvent& event);

// One item per joke-relevant event, in log order. A type_own is kept only
// when its text actually got played. Throws CorruptLogError on a seq gap.
std::vector<CodedInteraction> code_events(std::span<const ServerEvent> events);

// Flags items made outside joke mode (typed and played without the feature);
// parallel to `coded`.
std::vector<bool> excludable_flags(std::span<const CodedInteraction> coded);

struct SessionSummary {
    std::map<Category, int> counts;
    // play_tts while joke mode was on
    int jokes_delivered = 0;
    // suggestion texts delivered to the client; needs the event log
    int suggestions_shown = 0;
    // plays whose text was an edited suggestion
    int edits_before_play = 0;
    int excludable = 0;

    int count(Category c) const;
    nlohmann::json to_json() const;
};

SessionSummary summarize(std::span<const CodedInteraction> coded);
SessionSummary summarize(std::span<const CodedInteraction> coded, std::span<const ServerEvent> events);
std::map<SessionId, SessionSummary> summarize_by_session(std::span<const ServerEvent> events);

enum class ExportFormat { csv, json, timeline_json };

std::optional<ExportFormat> parse_export_format(std::string_view name);

// Column order is always session_id, t, category.
std::string export_coded(std::span<const CodedInteraction> coded, ExportFormat format);
// Throws Error(io_failure).
void write_export(const std::filesystem::path& path, std::span<const CodedInteraction> coded, ExportFormat format);
// Inverse of export_coded for every format. Throws Error(schema_violation).
std::vector<CodedInteraction> load_coded(std::string_view content, ExportFormat format);

}  // namespace quip
