#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace quip {

using SessionId = std::string;
using UtteranceId = std::int64_t;
using SuggestionId = std::int64_t;
using Epoch = std::int64_t;
using Millis = std::int64_t;

// The four joke-composition interfaces.
enum class Mode { bubble, keywords, wizard, full_auto };

inline constexpr std::array<Mode, 4> kAllModes = {Mode::bubble, Mode::keywords, Mode::wizard,
                                                  Mode::full_auto};

std::string_view to_string(Mode mode);
std::optional<Mode> parse_mode(std::string_view name);

enum class Speaker { partner, user, system };

std::string_view to_string(Speaker speaker);
std::optional<Speaker> parse_speaker(std::string_view name);

// Per-mode lookup table with one slot per Mode.
template <typename T>
struct PerMode {
    std::array<T, 4> values{};

    constexpr T& operator[](Mode m) { return values[static_cast<std::size_t>(m)]; }
    constexpr const T& operator[](Mode m) const { return values[static_cast<std::size_t>(m)]; }
    friend bool operator==(const PerMode&, const PerMode&) = default;
};

struct ModeConfig {
    int window_capacity = 5;
    int keyword_count = 6;
    int association_count = 4;
    PerMode<int> suggestion_count{{3, 1, 3, 1}};
    PerMode<bool> editing_allowed{{true, true, false, true}};
    PerMode<bool> immediate_play{{false, false, true, false}};

    // Throws Error(invalid_config) when any count is below 1.
    void validate() const;

    friend bool operator==(const ModeConfig&, const ModeConfig&) = default;
};

nlohmann::json to_json(const ModeConfig& config);
// Applies the keys present in `overrides` on top of `base`; unknown keys are
// rejected so typos in session overrides surface as invalid_config.
ModeConfig apply_overrides(ModeConfig base, const nlohmann::json& overrides);

}  // namespace quip
