#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "quip/prompt.hpp"
#include "quip/transcript.hpp"
#include "quip/types.hpp"

namespace quip {

class LlmProvider;

class Stopwords {
public:
    Stopwords() = default;
    explicit Stopwords(std::unordered_set<std::string> words) : words_(std::move(words)) {}

    // The shipped English list (data/stopwords.txt, compiled in).
    static Stopwords builtin();
    // One lowercase token per line; blank lines and '#' comments ignored.
    static Stopwords load(const std::filesystem::path& path);
    static Stopwords parse(std::string_view content);

    bool contains(const std::string& token) const { return words_.count(token) > 0; }
    std::size_t size() const { return words_.size(); }

private:
    std::unordered_set<std::string> words_;
};

// Curated keyword -> association lists (data/associations.tsv, compiled in).
class AssociationLexicon {
public:
    static AssociationLexicon builtin();
    // Lines "keyword<TAB>assoc, assoc, ...".
    static AssociationLexicon parse(std::string_view content);

    const std::vector<std::string>* find(const std::string& keyword) const;

private:
    std::map<std::string, std::vector<std::string>> entries_;
};

// Lowercases, drops stopwords, ranks by frequency desc, first occurrence asc,
// then lexicographic asc, and keeps the top `count`.
std::vector<std::string> local_extract(std::span<const std::string> tokens, const Stopwords& stopwords, int count);

struct SentenceRef {
    UtteranceId utterance_id = -1;
    int index = -1;

    friend bool operator==(const SentenceRef&, const SentenceRef&) = default;
};

struct Keyword {
    std::string term;
    SentenceRef source;

    friend bool operator==(const Keyword&, const Keyword&) = default;
};

struct KeywordSet {
    std::vector<Keyword> keywords;
    Epoch epoch = 0;

    std::vector<std::string> terms() const;
    bool empty() const { return keywords.empty(); }
    std::size_t size() const { return keywords.size(); }

    friend bool operator==(const KeywordSet&, const KeywordSet&) = default;
};

struct AssociationSet {
    std::string keyword;
    std::vector<std::string> associations;
    Epoch epoch = 0;

    friend bool operator==(const AssociationSet&, const AssociationSet&) = default;
};

nlohmann::json to_json(const KeywordSet& k);
KeywordSet keyword_set_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AssociationSet& a);
AssociationSet association_set_from_json(const nlohmann::json& j);

// Seeded co-occurrence associator used offline and by the mock LLM. Lexicon
// entries come first, then tokens sharing a sentence with the keyword ranked
// by co-occurrence count, ties broken by a seeded hash.
class LocalAssociator {
public:
    LocalAssociator(const Stopwords& stopwords, const AssociationLexicon& lexicon, std::uint64_t seed)
        : stopwords_(stopwords), lexicon_(lexicon), seed_(seed) {}

    std::vector<std::string> associate(const std::string& keyword, std::span<const std::string> context,
                                       int count) const;

private:
    const Stopwords& stopwords_;
    const AssociationLexicon& lexicon_;
    std::uint64_t seed_;
};

enum class ExtractionSource { local, llm };

struct KeywordResult {
    KeywordSet set;
    ExtractionSource used = ExtractionSource::local;
    std::optional<std::string> warning;
};

struct AssociationResult {
    AssociationSet set;
    ExtractionSource used = ExtractionSource::local;
    std::optional<std::string> warning;
};

// Stateless apart from configuration; safe to call concurrently.
class KeywordEngine {
public:
    struct Options {
        ExtractionSource source = ExtractionSource::local;
        std::uint64_t seed = 7;
    };

    KeywordEngine(Stopwords stopwords, AssociationLexicon lexicon, PromptTemplates templates, Options options,
                  std::shared_ptr<LlmProvider> llm = nullptr);

    // Empty source yields an empty set. With the LLM source, a provider
    // failure degrades to local extraction and sets `warning`.
    KeywordResult extract_keywords(std::span<const Sentence> source, int count, Epoch epoch) const;

    // Throws Error(precondition) for an empty keyword. A provider failure
    // yields an empty set plus `warning`.
    AssociationResult extract_associations(const std::string& keyword, std::span<const Sentence> context,
                                           int count, Epoch epoch) const;

    const Stopwords& stopwords() const { return stopwords_; }

private:
    KeywordSet local_keywords(std::span<const Sentence> source, int count, Epoch epoch) const;

    Stopwords stopwords_;
    AssociationLexicon lexicon_;
    PromptTemplates templates_;
    Options options_;
    std::shared_ptr<LlmProvider> llm_;
};

// Compiled-in copies of the shipped data files.
namespace embedded {
extern const char* const kStopwords;
extern const char* const kAssociations;
extern const char* const kPrompts;
}  // namespace embedded

}  // namespace quip
