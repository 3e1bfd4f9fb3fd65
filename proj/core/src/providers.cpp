#include "quip/providers.hpp"

#include <array>
#include <cctype>
#include <fstream>
#include <sstream>

#include "quip/keywords.hpp"
#include "quip/text.hpp"

namespace quip {

std::string_view to_string(ProviderKind kind) {
    switch (kind) {
        case ProviderKind::asr: return "asr";
        case ProviderKind::llm: return "llm";
        case ProviderKind::tts: return "tts";
    }
    return "unknown";
}

void ProviderConfig::validate() const {
    const std::string what = std::string(to_string(kind)) + " provider";
    if (implementation == "mock" || implementation == "scripted") {
        if (!seed) throw Error(ErrorCode::invalid_config, what + ": mock providers require a seed");
    } else if (implementation == "remote") {
        if (endpoint.empty()) throw Error(ErrorCode::invalid_config, what + ": remote providers require an endpoint");
    }
    if (timeout_ms <= 0) throw Error(ErrorCode::invalid_config, what + ": timeout_ms must be positive");
    if (retry_count < 0) throw Error(ErrorCode::invalid_config, what + ": retry_count must be >= 0");
}

ProviderConfig ProviderConfig::from_json(ProviderKind kind, const nlohmann::json& j) {
    ProviderConfig c;
    c.kind = kind;
    if (kind == ProviderKind::asr) c.implementation = "scripted";
    c.seed = 0;
    if (kind == ProviderKind::llm) c.seed = 7;
    if (j.is_string()) {
        c.implementation = j.get<std::string>();
    } else if (j.is_object()) {
        try {
            for (const auto& [key, value] : j.items()) {
                if (key == "impl" || key == "implementation") {
                    c.implementation = value.get<std::string>();
                } else if (key == "endpoint") {
                    c.endpoint = value.get<std::string>();
                } else if (key == "credentials") {
                    c.credentials = value.get<std::string>();
                } else if (key == "seed") {
                    c.seed = value.is_null() ? std::nullopt : std::optional<std::uint64_t>(value.get<std::uint64_t>());
                } else if (key == "timeout_ms") {
                    c.timeout_ms = value.get<Millis>();
                } else if (key == "retry_count") {
                    c.retry_count = value.get<int>();
                } else {
                    throw Error(ErrorCode::invalid_config, "unknown provider key: " + key);
                }
            }
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::invalid_config, std::string("provider config: ") + e.what());
        }
    } else if (!j.is_null()) {
        throw Error(ErrorCode::invalid_config, "provider config must be a string or object");
    }
    // scripted ASR is the ASR mock
    if (kind == ProviderKind::asr && c.implementation == "mock") c.implementation = "scripted";
    c.validate();
    return c;
}

nlohmann::json ProviderConfig::to_json() const {
    nlohmann::json j = {{"impl", implementation}, {"timeout_ms", timeout_ms}, {"retry_count", retry_count}};
    if (seed) j["seed"] = *seed;
    if (!endpoint.empty()) j["endpoint"] = endpoint;
    return j;
}

// ---------------------------------------------------------------- scripts

std::vector<ScriptLine> parse_script(std::string_view content) {
    std::vector<ScriptLine> lines;
    std::istringstream in{std::string(content)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        if (trim(raw).empty() || trim(raw).front() == '#') continue;
        auto t1 = raw.find('\t');
        auto t2 = t1 == std::string::npos ? std::string::npos : raw.find('\t', t1 + 1);
        if (t2 == std::string::npos) {
            throw Error(ErrorCode::schema_violation,
                        "script line " + std::to_string(line_no) + ": expected delay_ms<TAB>speaker<TAB>text");
        }
        ScriptLine line;
        line.line_no = line_no;
        const std::string delay = trim(raw.substr(0, t1));
        if (delay.empty() || !std::all_of(delay.begin(), delay.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
            throw Error(ErrorCode::schema_violation, "script line " + std::to_string(line_no) + ": bad delay");
        }
        line.delay_ms = std::stoll(delay);
        std::string speaker = trim(raw.substr(t1 + 1, t2 - t1 - 1));
        line.text = raw.substr(t2 + 1);
        if (speaker == "cmd") {
            line.is_command = true;
            try {
                line.command = nlohmann::json::parse(line.text);
            } catch (const nlohmann::json::exception&) {
                throw Error(ErrorCode::schema_violation,
                            "script line " + std::to_string(line_no) + ": command is not valid JSON");
            }
        } else {
            if (!speaker.empty() && speaker.back() == '~') {
                line.partial = true;
                speaker.pop_back();
            }
            line.speaker = parse_speaker(speaker);
            if (!line.speaker) {
                throw Error(ErrorCode::schema_violation,
                            "script line " + std::to_string(line_no) + ": unknown speaker " + speaker);
            }
        }
        lines.push_back(std::move(line));
    }
    return lines;
}

std::vector<ScriptLine> load_script(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io_failure, "cannot read script " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_script(buf.str());
}

namespace {

class ScriptStream final : public AsrStream {
public:
    ScriptStream(std::vector<ScriptLine> lines, std::optional<int> disconnect_after)
        : lines_(std::move(lines)), disconnect_after_(disconnect_after) {}

    std::optional<TranscriptEvent> next() override {
        while (pos_ < lines_.size()) {
            const ScriptLine& line = lines_[pos_++];
            clock_ += line.delay_ms;
            if (line.is_command) continue;
            if (disconnect_after_ && delivered_ >= *disconnect_after_) {
                pos_ = lines_.size();
                throw Error(ErrorCode::stream_closed, "ASR stream disconnected");
            }
            ++delivered_;
            return TranscriptEvent{line.text, !line.partial, line.speaker, clock_};
        }
        return std::nullopt;
    }

private:
    std::vector<ScriptLine> lines_;
    std::optional<int> disconnect_after_;
    std::size_t pos_ = 0;
    int delivered_ = 0;
    Millis clock_ = 0;
};

}  // namespace

std::unique_ptr<AsrStream> ScriptedAsr::open(const std::string& source) { return open_lines(load_script(source)); }

std::unique_ptr<AsrStream> ScriptedAsr::open_lines(std::vector<ScriptLine> lines) {
    return std::make_unique<ScriptStream>(std::move(lines), options_.disconnect_after);
}

// ---------------------------------------------------------------- mock LLM

namespace {

constexpr std::array<const char*, 12> kBodies = {
    "that {k} really took the {a} to a whole new level!",
    "if the {k} had a {a}, it would be applying for my job.",
    "nothing says {k} like an unexpected {a}.",
    "I'd rate this {k} ten out of ten for {a}.",
    "the {k} clearly never read the {a} manual.",
    "plot twist: the {k} was the {a} all along!",
    "at this point the {k} deserves its own {a} fan club.",
    "somebody call the {a} department, the {k} is out of control!",
    "I came for the {k}, I stayed for the {a}.",
    "my therapist will hear about this {k} and its {a}.",
    "this {k} has more {a} than my entire weekend.",
    "honestly, the {k} and the {a} should start a podcast.",
};

constexpr std::array<const char*, 8> kClosers = {
    "", " Just saying.", " Classic.", " Who knew?", " Unbelievable.", " Ten points.", " Called it.",
    " Story of my life.",
};

void replace_all(std::string& s, std::string_view from, std::string_view to) {
    std::size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
}

}  // namespace

MockLlm::MockLlm(std::uint64_t seed)
    : seed_(seed),
      stopwords_(std::make_unique<Stopwords>(Stopwords::builtin())),
      lexicon_(std::make_unique<AssociationLexicon>(AssociationLexicon::builtin())) {}

MockLlm::~MockLlm() = default;

std::string MockLlm::variant(const std::string& instruction, const CompletionConstraints& c,
                             std::uint64_t index) const {
    const std::uint64_t bodies = kBodies.size();
    const std::uint64_t closers = kClosers.size();
    const std::uint64_t base = fnv1a(instruction, fnv1a(std::to_string(seed_))) % bodies;

    std::string topic;
    if (!c.keywords.empty()) {
        topic = c.keywords[index % c.keywords.size()];
    } else {
        std::vector<std::string> tokens;
        for (const auto& s : c.context) {
            auto t = tokenize(s);
            tokens.insert(tokens.end(), t.begin(), t.end());
        }
        auto picked = local_extract(tokens, *stopwords_, 1);
        topic = picked.empty() ? "situation" : picked.front();
    }
    std::string assoc;
    if (!c.associations.empty()) {
        assoc = c.associations[index % c.associations.size()];
    } else {
        auto related = LocalAssociator(*stopwords_, *lexicon_, seed_).associate(topic, c.context, 1);
        assoc = related.empty() ? "drama" : related.front();
    }

    std::string body = kBodies[(base + index) % bodies];
    body += kClosers[(index / bodies) % closers];
    if (std::uint64_t round = index / (bodies * closers); round > 0) body += " (take " + std::to_string(round + 1) + ")";
    replace_all(body, "{k}", topic);
    replace_all(body, "{a}", assoc);

    if (c.prefix.empty()) {
        body[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(body[0])));
        return body;
    }
    const char last = c.prefix.back();
    const bool needs_space = !(last == ' ' || last == '\t' || last == '\n');
    return c.prefix + (needs_space ? " " : "") + body;
}

std::vector<std::string> MockLlm::complete(const std::string& instruction, int n, const CompletionConstraints& c) {
    if (n < 1) throw Error(ErrorCode::precondition, "n must be >= 1");
    std::vector<std::string> out;
    if (c.task == LlmTask::keywords) {
        std::vector<std::string> tokens;
        for (const auto& s : c.context) {
            auto t = tokenize(s);
            tokens.insert(tokens.end(), t.begin(), t.end());
        }
        const int count = c.item_count > 0 ? c.item_count : 6;
        out.assign(static_cast<std::size_t>(n), join(local_extract(tokens, *stopwords_, count), ", "));
        return out;
    }
    if (c.task == LlmTask::associations) {
        if (c.keywords.empty()) throw Error(ErrorCode::malformed_response, "association request without keyword");
        LocalAssociator associator(*stopwords_, *lexicon_, seed_);
        const int count = c.item_count > 0 ? c.item_count : 4;
        out.assign(static_cast<std::size_t>(n), join(associator.associate(c.keywords.front(), c.context, count), ", "));
        return out;
    }
    std::vector<std::string> seen = c.exclude;
    for (std::uint64_t i = 0; static_cast<int>(out.size()) < n; ++i) {
        std::string text = variant(instruction, c, i);
        if (std::find(seen.begin(), seen.end(), text) != seen.end()) continue;
        seen.push_back(text);
        out.push_back(std::move(text));
    }
    return out;
}

// ---------------------------------------------------------------- mock TTS

PlaybackHandle MockTts::synthesize(const std::string& text, const std::string& /*voice*/) {
    if (text.empty()) throw Error(ErrorCode::precondition, "nothing to speak");
    std::lock_guard lock(mu_);
    auto index = static_cast<std::int64_t>(entries_.size()) + 1;
    entries_.push_back(Entry{text, index});
    return PlaybackHandle{index, text};
}

std::vector<MockTts::Entry> MockTts::entries() const {
    std::lock_guard lock(mu_);
    return entries_;
}

// ---------------------------------------------------------------- guards

std::vector<std::string> GuardedLlm::complete(const std::string& instruction, int n, const CompletionConstraints& c) {
    std::optional<Error> last;
    for (int attempt = 0; attempt <= retry_count_; ++attempt) {
        try {
            auto inner = inner_;
            auto texts = call_with_timeout([inner, instruction, n, c] { return inner->complete(instruction, n, c); },
                                           timeout_ms_);
            if (static_cast<int>(texts.size()) != n) {
                throw Error(ErrorCode::malformed_response, "provider returned " + std::to_string(texts.size()) +
                                                               " texts, wanted " + std::to_string(n));
            }
            return texts;
        } catch (const Error& e) {
            last = e;
        } catch (const std::exception& e) {
            last = Error(ErrorCode::provider_failure, e.what());
        }
    }
    throw *last;
}

PlaybackHandle GuardedTts::synthesize(const std::string& text, const std::string& voice) {
    try {
        auto inner = inner_;
        return call_with_timeout([inner, text, voice] { return inner->synthesize(text, voice); }, timeout_ms_);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::precondition) throw;
        throw Error(ErrorCode::tts_failure, e.what());
    } catch (const std::exception& e) {
        throw Error(ErrorCode::tts_failure, e.what());
    }
}

// ---------------------------------------------------------------- wiring

ProvidersConfig ProvidersConfig::from_json(const nlohmann::json& j) {
    ProvidersConfig c;
    if (j.is_null()) return c;
    if (j.is_string()) {
        // "--providers=mock" shorthand: every slot gets its offline implementation
        const auto impl = j.get<std::string>();
        c.asr = ProviderConfig::from_json(ProviderKind::asr, impl);
        c.llm = ProviderConfig::from_json(ProviderKind::llm, impl);
        c.tts = ProviderConfig::from_json(ProviderKind::tts, impl);
        return c;
    }
    if (!j.is_object()) throw Error(ErrorCode::invalid_config, "providers must be an object or a string");
    for (const auto& [key, value] : j.items()) {
        if (key == "asr") {
            c.asr = ProviderConfig::from_json(ProviderKind::asr, value);
        } else if (key == "llm") {
            c.llm = ProviderConfig::from_json(ProviderKind::llm, value);
        } else if (key == "tts") {
            c.tts = ProviderConfig::from_json(ProviderKind::tts, value);
        } else {
            throw Error(ErrorCode::invalid_config, "unknown provider slot: " + key);
        }
    }
    return c;
}

nlohmann::json ProvidersConfig::to_json() const {
    return {{"asr", asr.to_json()}, {"llm", llm.to_json()}, {"tts", tts.to_json()}};
}

ProviderRegistry::ProviderRegistry() {
    llm_["mock"] = [](const ProviderConfig& c) { return std::make_shared<MockLlm>(c.seed.value_or(0)); };
    tts_["mock"] = [](const ProviderConfig&) { return std::make_shared<MockTts>(); };
    asr_["scripted"] = [](const ProviderConfig&) { return std::make_shared<ScriptedAsr>(); };
}

ProviderRegistry& ProviderRegistry::instance() {
    static ProviderRegistry registry;
    return registry;
}

void ProviderRegistry::register_llm(const std::string& impl, LlmFactory f) {
    std::lock_guard lock(mu_);
    llm_[impl] = std::move(f);
}

void ProviderRegistry::register_tts(const std::string& impl, TtsFactory f) {
    std::lock_guard lock(mu_);
    tts_[impl] = std::move(f);
}

void ProviderRegistry::register_asr(const std::string& impl, AsrFactory f) {
    std::lock_guard lock(mu_);
    asr_[impl] = std::move(f);
}

ProviderSet ProviderRegistry::build(const ProvidersConfig& config) const {
    std::lock_guard lock(mu_);
    auto missing = [](const ProviderConfig& c) {
        return Error(ErrorCode::invalid_config, std::string(to_string(c.kind)) + " implementation '" +
                                                    c.implementation + "' is not available in this build");
    };
    config.asr.validate();
    config.llm.validate();
    config.tts.validate();
    auto a = asr_.find(config.asr.implementation);
    auto l = llm_.find(config.llm.implementation);
    auto t = tts_.find(config.tts.implementation);
    if (a == asr_.end()) throw missing(config.asr);
    if (l == llm_.end()) throw missing(config.llm);
    if (t == tts_.end()) throw missing(config.tts);
    ProviderSet set;
    set.config = config;
    set.asr = a->second(config.asr);
    set.llm = std::make_shared<GuardedLlm>(l->second(config.llm), config.llm.timeout_ms, config.llm.retry_count);
    set.tts = std::make_shared<GuardedTts>(t->second(config.tts), config.tts.timeout_ms);
    return set;
}

}  // namespace quip
