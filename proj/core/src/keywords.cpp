#include "quip/keywords.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "quip/error.hpp"
#include "quip/providers.hpp"
#include "quip/text.hpp"

namespace quip {

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io_failure, "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

SentenceRef locate(const std::string& term, std::span<const Sentence> source) {
    for (const auto& s : source) {
        if (icontains(s.text, term)) return {s.utterance_id, s.index};
    }
    return {};
}

std::vector<std::string> sentence_texts(std::span<const Sentence> sentences) {
    std::vector<std::string> out;
    out.reserve(sentences.size());
    for (const auto& s : sentences) out.push_back(s.text);
    return out;
}

}  // namespace

Stopwords Stopwords::builtin() { return parse(embedded::kStopwords); }

Stopwords Stopwords::load(const std::filesystem::path& path) { return parse(read_file(path)); }

Stopwords Stopwords::parse(std::string_view content) {
    std::unordered_set<std::string> words;
    std::istringstream in{std::string(content)};
    std::string line;
    while (std::getline(in, line)) {
        std::string w = trim(line);
        if (w.empty() || w.front() == '#') continue;
        words.insert(to_lower_ascii(w));
    }
    return Stopwords(std::move(words));
}

AssociationLexicon AssociationLexicon::builtin() { return parse(embedded::kAssociations); }

AssociationLexicon AssociationLexicon::parse(std::string_view content) {
    AssociationLexicon lex;
    std::istringstream in{std::string(content)};
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty() || trim(line).front() == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos) continue;
        lex.entries_[to_lower_ascii(trim(line.substr(0, tab)))] = split_lenient_list(line.substr(tab + 1));
    }
    return lex;
}

const std::vector<std::string>* AssociationLexicon::find(const std::string& keyword) const {
    auto it = entries_.find(to_lower_ascii(keyword));
    return it == entries_.end() ? nullptr : &it->second;
}

std::vector<std::string> local_extract(std::span<const std::string> tokens, const Stopwords& stopwords, int count) {
    struct Stat {
        std::string term;
        int freq = 0;
        std::size_t first = 0;
    };
    std::vector<Stat> stats;
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t pos = 0; pos < tokens.size(); ++pos) {
        std::string t = to_lower_ascii(tokens[pos]);
        if (t.empty() || stopwords.contains(t)) continue;
        auto [it, inserted] = index.try_emplace(t, stats.size());
        if (inserted) stats.push_back(Stat{t, 0, pos});
        ++stats[it->second].freq;
    }
    std::sort(stats.begin(), stats.end(), [](const Stat& a, const Stat& b) {
        if (a.freq != b.freq) return a.freq > b.freq;
        if (a.first != b.first) return a.first < b.first;
        return a.term < b.term;
    });
    std::vector<std::string> out;
    for (const auto& s : stats) {
        if (static_cast<int>(out.size()) >= count) break;
        out.push_back(s.term);
    }
    return out;
}

std::vector<std::string> KeywordSet::terms() const {
    std::vector<std::string> out;
    out.reserve(keywords.size());
    for (const auto& k : keywords) out.push_back(k.term);
    return out;
}

nlohmann::json to_json(const KeywordSet& k) {
    nlohmann::json items = nlohmann::json::array();
    for (const auto& kw : k.keywords) {
        items.push_back({{"term", kw.term},
                         {"source", {{"utterance_id", kw.source.utterance_id}, {"index", kw.source.index}}}});
    }
    return {{"epoch", k.epoch}, {"keywords", std::move(items)}};
}

KeywordSet keyword_set_from_json(const nlohmann::json& j) {
    KeywordSet k;
    k.epoch = j.at("epoch").get<Epoch>();
    for (const auto& item : j.at("keywords")) {
        const auto& src = item.at("source");
        k.keywords.push_back(Keyword{item.at("term").get<std::string>(),
                                     SentenceRef{src.at("utterance_id").get<UtteranceId>(), src.at("index").get<int>()}});
    }
    return k;
}

nlohmann::json to_json(const AssociationSet& a) {
    return {{"epoch", a.epoch}, {"keyword", a.keyword}, {"associations", a.associations}};
}

AssociationSet association_set_from_json(const nlohmann::json& j) {
    return AssociationSet{j.at("keyword").get<std::string>(), j.at("associations").get<std::vector<std::string>>(),
                          j.at("epoch").get<Epoch>()};
}

std::vector<std::string> LocalAssociator::associate(const std::string& keyword, std::span<const std::string> context,
                                                    int count) const {
    const std::string key = to_lower_ascii(trim(keyword));
    std::vector<std::string> out;
    auto push = [&](const std::string& candidate) {
        if (static_cast<int>(out.size()) >= count) return;
        std::string c = to_lower_ascii(candidate);
        if (c.empty() || c == key) return;
        if (std::find(out.begin(), out.end(), c) != out.end()) return;
        out.push_back(std::move(c));
    };

    if (const auto* curated = lexicon_.find(key)) {
        for (const auto& c : *curated) push(c);
    }

    const auto key_tokens = tokenize(key);
    std::unordered_map<std::string, int> cooccur;
    std::vector<std::string> order;
    for (const auto& sentence : context) {
        if (!icontains(sentence, key)) continue;
        for (auto& tok : tokenize(sentence)) {
            if (stopwords_.contains(tok)) continue;
            if (std::find(key_tokens.begin(), key_tokens.end(), tok) != key_tokens.end()) continue;
            if (cooccur[tok]++ == 0) order.push_back(tok);
        }
    }
    std::sort(order.begin(), order.end(), [&](const std::string& a, const std::string& b) {
        if (cooccur[a] != cooccur[b]) return cooccur[a] > cooccur[b];
        auto ha = fnv1a(a, seed_), hb = fnv1a(b, seed_);
        if (ha != hb) return ha < hb;
        return a < b;
    });
    for (const auto& tok : order) push(tok);
    return out;
}

KeywordEngine::KeywordEngine(Stopwords stopwords, AssociationLexicon lexicon, PromptTemplates templates,
                             Options options, std::shared_ptr<LlmProvider> llm)
    : stopwords_(std::move(stopwords)),
      lexicon_(std::move(lexicon)),
      templates_(std::move(templates)),
      options_(options),
      llm_(std::move(llm)) {}

KeywordSet KeywordEngine::local_keywords(std::span<const Sentence> source, int count, Epoch epoch) const {
    std::vector<std::string> tokens;
    for (const auto& s : source) {
        auto t = tokenize(s.text);
        tokens.insert(tokens.end(), t.begin(), t.end());
    }
    KeywordSet set;
    set.epoch = epoch;
    for (auto& term : local_extract(tokens, stopwords_, count)) {
        auto ref = locate(term, source);
        set.keywords.push_back(Keyword{std::move(term), ref});
    }
    return set;
}

KeywordResult KeywordEngine::extract_keywords(std::span<const Sentence> source, int count, Epoch epoch) const {
    if (count < 1) throw Error(ErrorCode::precondition, "keyword count must be >= 1");
    KeywordResult result;
    result.set.epoch = epoch;
    if (source.empty()) return result;

    if (options_.source == ExtractionSource::llm && llm_) {
        try {
            TemplateValues values;
            values.context = join(sentence_texts(source), "\n");
            values.count = count;
            CompletionConstraints constraints;
            constraints.task = LlmTask::keywords;
            constraints.context = sentence_texts(source);
            constraints.item_count = count;
            auto texts = llm_->complete(render_template(templates_.get("keyword_extraction"), values), 1, constraints);
            KeywordSet set;
            set.epoch = epoch;
            for (const auto& text : texts) {
                for (auto& term : split_lenient_list(text)) {
                    if (static_cast<int>(set.keywords.size()) >= count) break;
                    std::string lowered = to_lower_ascii(term);
                    bool dup = std::any_of(set.keywords.begin(), set.keywords.end(),
                                           [&](const Keyword& k) { return k.term == lowered; });
                    if (!dup) set.keywords.push_back(Keyword{lowered, locate(lowered, source)});
                }
            }
            if (set.keywords.empty()) throw Error(ErrorCode::malformed_response, "no keywords in provider response");
            result.set = std::move(set);
            result.used = ExtractionSource::llm;
            return result;
        } catch (const Error& e) {
            result.warning = "keyword provider failed (" + std::string(to_string(e.code())) + "); using local extractor";
        }
    }
    result.set = local_keywords(source, count, epoch);
    result.used = ExtractionSource::local;
    return result;
}

AssociationResult KeywordEngine::extract_associations(const std::string& keyword, std::span<const Sentence> context,
                                                      int count, Epoch epoch) const {
    if (trim(keyword).empty()) throw Error(ErrorCode::precondition, "keyword must be non-empty");
    if (count < 1) throw Error(ErrorCode::precondition, "association count must be >= 1");
    AssociationResult result;
    result.set.keyword = keyword;
    result.set.epoch = epoch;
    const auto texts = sentence_texts(context);

    if (options_.source == ExtractionSource::llm && llm_) {
        try {
            TemplateValues values;
            values.keywords = keyword;
            values.context = join(texts, "\n");
            values.count = count;
            CompletionConstraints constraints;
            constraints.task = LlmTask::associations;
            constraints.keywords = {keyword};
            constraints.context = texts;
            constraints.item_count = count;
            auto out = llm_->complete(render_template(templates_.get("association_extraction"), values), 1,
                                      constraints);
            const std::string key = to_lower_ascii(keyword);
            for (const auto& text : out) {
                for (auto& item : split_lenient_list(text)) {
                    std::string lowered = to_lower_ascii(item);
                    if (lowered == key || static_cast<int>(result.set.associations.size()) >= count) continue;
                    result.set.associations.push_back(std::move(lowered));
                }
            }
            result.used = ExtractionSource::llm;
        } catch (const Error& e) {
            result.set.associations.clear();
            result.warning = "association provider failed (" + std::string(to_string(e.code())) + ")";
        }
        return result;
    }

    LocalAssociator associator(stopwords_, lexicon_, options_.seed);
    result.set.associations = associator.associate(keyword, texts, count);
    return result;
}

}  // namespace quip
