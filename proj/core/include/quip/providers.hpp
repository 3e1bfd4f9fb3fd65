#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <future>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "quip/error.hpp"
#include "quip/types.hpp"

namespace quip {

class Stopwords;
class AssociationLexicon;

enum class ProviderKind { asr, llm, tts };

struct ProviderConfig {
    ProviderKind kind = ProviderKind::llm;
    std::string implementation = "mock";  // mock | scripted | remote
    std::string endpoint;
    std::string credentials;
    std::optional<std::uint64_t> seed;
    Millis timeout_ms = 10000;
    int retry_count = 1;

    // mocks need a seed, remote needs an endpoint
    void validate() const;
    static ProviderConfig from_json(ProviderKind kind, const nlohmann::json& j);
    nlohmann::json to_json() const;
};

std::string_view to_string(ProviderKind kind);

// ---------------------------------------------------------------- ASR

struct TranscriptEvent {
    std::string text;
    bool is_final = true;
    std::optional<Speaker> speaker;
    Millis timestamp = 0;
};

// Pull-based event stream. next() returns nullopt at end of stream and
// throws Error(stream_closed | provider_failure) when the source dies.
class AsrStream {
public:
    virtual ~AsrStream() = default;
    virtual std::optional<TranscriptEvent> next() = 0;
};

class AsrProvider {
public:
    virtual ~AsrProvider() = default;
    virtual std::unique_ptr<AsrStream> open(const std::string& source) = 0;
    virtual std::string name() const = 0;
};

// One line of a scripted conversation: "delay_ms<TAB>speaker<TAB>text".
// A speaker suffixed with '~' marks a partial hypothesis. Speaker "cmd"
// carries a JSON command in the text column; ASR streams skip those lines
// and the replay driver feeds them to the session.
struct ScriptLine {
    int line_no = 0;
    Millis delay_ms = 0;
    bool is_command = false;
    std::optional<Speaker> speaker;
    bool partial = false;
    std::string text;
    nlohmann::json command;
};

std::vector<ScriptLine> parse_script(std::string_view content);
std::vector<ScriptLine> load_script(const std::filesystem::path& path);

class ScriptedAsr final : public AsrProvider {
public:
    struct Options {
        // Simulates a remote disconnect after this many delivered events.
        std::optional<int> disconnect_after;
    };

    ScriptedAsr() = default;
    explicit ScriptedAsr(Options options) : options_(options) {}

    // `source` is a path to a script file.
    std::unique_ptr<AsrStream> open(const std::string& source) override;
    std::unique_ptr<AsrStream> open_lines(std::vector<ScriptLine> lines);
    std::string name() const override { return "scripted"; }

private:
    Options options_;
};

// ---------------------------------------------------------------- LLM

enum class LlmTask { suggestions, keywords, associations };

struct CompletionConstraints {
    LlmTask task = LlmTask::suggestions;
    std::string prefix;
    std::vector<std::string> keywords;
    std::vector<std::string> associations;
    std::vector<std::string> context;
    // Texts the caller has already shown; providers should avoid them.
    std::vector<std::string> exclude;
    // Number of list items wanted for keyword/association tasks.
    int item_count = 0;
};

class LlmProvider {
public:
    virtual ~LlmProvider() = default;
    // Returns exactly n texts or throws Error(provider_failure |
    // provider_timeout | malformed_response).
    virtual std::vector<std::string> complete(const std::string& instruction, int n,
                                              const CompletionConstraints& constraints) = 0;
    virtual std::string name() const = 0;
};

// Deterministic offline stand-in. Output is a pure function of
// (seed, instruction, n, constraints):
//  - every text starts with constraints.prefix verbatim
//  - text i splices in keyword[i % K] and association[i % A]
//  - variants are enumerated in a fixed order and texts listed in
//    constraints.exclude are skipped, so refresh always finds fresh ones
class MockLlm final : public LlmProvider {
public:
    explicit MockLlm(std::uint64_t seed);
    ~MockLlm() override;

    std::vector<std::string> complete(const std::string& instruction, int n,
                                      const CompletionConstraints& constraints) override;
    std::string name() const override { return "mock"; }

    // The i-th variant for a request, before exclusion. Exposed for tests.
    std::string variant(const std::string& instruction, const CompletionConstraints& constraints,
                        std::uint64_t index) const;

private:
    std::uint64_t seed_;
    std::unique_ptr<Stopwords> stopwords_;
    std::unique_ptr<AssociationLexicon> lexicon_;
};

// ---------------------------------------------------------------- TTS

struct PlaybackHandle {
    std::int64_t play_index = 0;
    std::string text;
};

class TtsProvider {
public:
    virtual ~TtsProvider() = default;
    // Blocks until playback completes; throws Error(tts_failure).
    virtual PlaybackHandle synthesize(const std::string& text, const std::string& voice) = 0;
    virtual std::string name() const = 0;
};

class MockTts final : public TtsProvider {
public:
    struct Entry {
        std::string text;
        std::int64_t play_index;
        friend bool operator==(const Entry&, const Entry&) = default;
    };

    PlaybackHandle synthesize(const std::string& text, const std::string& voice) override;
    std::string name() const override { return "mock"; }
    std::vector<Entry> entries() const;

private:
    mutable std::mutex mu_;
    std::vector<Entry> entries_;
};

// ---------------------------------------------------------------- guards

// Runs `fn` on a helper thread and waits at most `timeout`. On timeout the
// helper is abandoned (it keeps its own captures alive) and
// Error(provider_timeout) is thrown. Exceptions from `fn` propagate.
template <typename Fn>
auto call_with_timeout(Fn fn, Millis timeout) -> decltype(fn()) {
    using R = decltype(fn());
    auto task = std::make_shared<std::packaged_task<R()>>(std::move(fn));
    auto result = task->get_future();
    std::thread([task] { (*task)(); }).detach();
    if (result.wait_for(std::chrono::milliseconds(timeout)) != std::future_status::ready) {
        throw Error(ErrorCode::provider_timeout, "provider call exceeded " + std::to_string(timeout) + " ms");
    }
    return result.get();
}

// Applies ProviderConfig timeout and retry policy around another provider.
class GuardedLlm final : public LlmProvider {
public:
    GuardedLlm(std::shared_ptr<LlmProvider> inner, Millis timeout_ms, int retry_count)
        : inner_(std::move(inner)), timeout_ms_(timeout_ms), retry_count_(retry_count) {}

    std::vector<std::string> complete(const std::string& instruction, int n,
                                      const CompletionConstraints& constraints) override;
    std::string name() const override { return inner_->name(); }

private:
    std::shared_ptr<LlmProvider> inner_;
    Millis timeout_ms_;
    int retry_count_;
};

class GuardedTts final : public TtsProvider {
public:
    GuardedTts(std::shared_ptr<TtsProvider> inner, Millis timeout_ms)
        : inner_(std::move(inner)), timeout_ms_(timeout_ms) {}

    // Timeouts and provider errors surface as Error(tts_failure).
    PlaybackHandle synthesize(const std::string& text, const std::string& voice) override;
    std::string name() const override { return inner_->name(); }
    const std::shared_ptr<TtsProvider>& inner() const { return inner_; }

private:
    std::shared_ptr<TtsProvider> inner_;
    Millis timeout_ms_;
};

// ---------------------------------------------------------------- wiring

struct ProvidersConfig {
    ProviderConfig asr{ProviderKind::asr, "scripted", {}, {}, 0, 10000, 1};
    ProviderConfig llm{ProviderKind::llm, "mock", {}, {}, 7, 10000, 1};
    ProviderConfig tts{ProviderKind::tts, "mock", {}, {}, 0, 10000, 1};

    static ProvidersConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct ProviderSet {
    std::shared_ptr<AsrProvider> asr;
    std::shared_ptr<LlmProvider> llm;  // already guarded
    std::shared_ptr<TtsProvider> tts;  // already guarded
    ProvidersConfig config;
};

// Remote adapters are plugins: a deployment registers factories for
// "remote" before building providers. The default build registers none.
class ProviderRegistry {
public:
    using LlmFactory = std::function<std::shared_ptr<LlmProvider>(const ProviderConfig&)>;
    using TtsFactory = std::function<std::shared_ptr<TtsProvider>(const ProviderConfig&)>;
    using AsrFactory = std::function<std::shared_ptr<AsrProvider>(const ProviderConfig&)>;

    static ProviderRegistry& instance();

    void register_llm(const std::string& impl, LlmFactory f);
    void register_tts(const std::string& impl, TtsFactory f);
    void register_asr(const std::string& impl, AsrFactory f);

    // Throws Error(invalid_config) for an unregistered implementation id.
    ProviderSet build(const ProvidersConfig& config) const;

private:
    ProviderRegistry();

    mutable std::mutex mu_;
    std::map<std::string, LlmFactory> llm_;
    std::map<std::string, TtsFactory> tts_;
    std::map<std::string, AsrFactory> asr_;
};

}  // namespace quip
