#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "quip/types.hpp"

namespace quip {

struct Sentence {
    UtteranceId utterance_id = 0;
    int index = 0;
    std::string text;

    friend bool operator==(const Sentence&, const Sentence&) = default;
};

struct Utterance {
    UtteranceId id = 0;
    Speaker speaker = Speaker::partner;
    std::string text;
    Millis received_at = 0;
    std::vector<Sentence> sentences;

    friend bool operator==(const Utterance&, const Utterance&) = default;
};

nlohmann::json to_json(const Sentence& s);
nlohmann::json to_json(const Utterance& u);
Utterance utterance_from_json(const nlohmann::json& j);

// Splits on runs of . ! ? followed by whitespace or end of text. A run with
// no preceding word content (a leading "...") stays with the next sentence.
// Input is whitespace-normalized first, so joining the result with single
// spaces reproduces the normalized text exactly.
std::vector<std::string> segment_sentences(std::string_view text);

struct ContextWindow {
    std::vector<Sentence> sentences;  // most recent last
    int capacity = 5;

    std::vector<std::string> texts() const;
};

// Append-only conversation record. Owns utterance ids and the global
// sentence stream the context window slides over.
class Transcript {
public:
    // Throws Error(rejected_empty) for blank text.
    const Utterance& ingest(Speaker speaker, std::string_view text, Millis received_at);
    // Re-inserts a persisted utterance verbatim (log replay).
    void restore(Utterance utterance);

    ContextWindow window(int capacity) const;
    const std::vector<Utterance>& utterances() const { return utterances_; }
    const std::vector<Sentence>& sentences() const { return sentences_; }
    const Utterance* find(UtteranceId id) const;
    bool contains(UtteranceId id) const { return find(id) != nullptr; }
    UtteranceId last_id() const { return next_id_ - 1; }

private:
    std::vector<Utterance> utterances_;
    std::vector<Sentence> sentences_;
    UtteranceId next_id_ = 1;
};

// Insertion-ordered set of strings. Selections keep the order the user made
// them, which is also the order they are rendered into prompts.
class OrderedSet {
public:
    bool contains(const std::string& v) const { return std::find(items_.begin(), items_.end(), v) != items_.end(); }
    bool insert(const std::string& v) {
        if (contains(v)) return false;
        items_.push_back(v);
        return true;
    }
    bool erase(const std::string& v) {
        auto it = std::find(items_.begin(), items_.end(), v);
        if (it == items_.end()) return false;
        items_.erase(it);
        return true;
    }
    void clear() { items_.clear(); }
    bool empty() const { return items_.empty(); }
    std::size_t size() const { return items_.size(); }
    const std::vector<std::string>& items() const { return items_; }
    auto begin() const { return items_.begin(); }
    auto end() const { return items_.end(); }

    friend bool operator==(const OrderedSet&, const OrderedSet&) = default;

private:
    std::vector<std::string> items_;
};

struct SessionState {
    SessionId session_id;
    Mode mode = Mode::full_auto;
    bool joke_mode = false;
    std::set<UtteranceId> selected_bubbles;
    OrderedSet selected_keywords;
    OrderedSet selected_associations;
    std::string typed_prefix;
    Epoch context_epoch = 0;
    OrderedSet shown_suggestions;
    std::string input_field;
    // Text of the suggestion most recently moved into the input field, until
    // it is spoken. Lets speak() tell an edited pick from a verbatim one.
    std::optional<std::string> picked_text;

    friend bool operator==(const SessionState&, const SessionState&) = default;
};

nlohmann::json to_json(const SessionState& s);
SessionState session_state_from_json(const nlohmann::json& j);

// State-machine transitions shared by all four modes. Each throws quip::Error
// on a rejected transition and leaves the state untouched in that case.
namespace transitions {

void set_mode(SessionState& s, Mode mode);
// Returns false for a no-op (already in the requested joke mode).
bool toggle_joke_mode(SessionState& s, bool on);
void select_bubble(SessionState& s, const Transcript& t, UtteranceId id, bool selected);
void select_keyword(SessionState& s, std::span<const std::string> available, const std::string& term,
                    bool selected);
void select_association(SessionState& s, std::span<const std::string> available, const std::string& term,
                        bool selected);
void set_typed_prefix(SessionState& s, const ModeConfig& config, std::string text);
// Called after a new utterance lands in the transcript.
void advance_epoch(SessionState& s);

}  // namespace transitions

// Returns a description of the first violated SessionState invariant, if any.
std::optional<std::string> check_invariants(const SessionState& s, const Transcript& t);

}  // namespace quip
