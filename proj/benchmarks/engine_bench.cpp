#include <random>

#include <benchmark/benchmark.h>

#include "quip/clock.hpp"
#include "quip/keywords.hpp"
#include "quip/service.hpp"
#include "quip/session.hpp"

namespace {

using namespace quip;

const char* kLines[] = {"I tripped over a plant at work today.", "The slides would not load in the meeting.",
                        "My boss laughed at the plant.", "Then the plant fell over again.",
                        "We ordered pizza with pineapple to cheer up."};

std::vector<Sentence> window_of(int n) {
    std::vector<Sentence> out;
    for (int i = 0; i < n; ++i) out.push_back({i + 1, 0, kLines[i % 5]});
    return out;
}

void BM_LocalKeywordExtraction(benchmark::State& state) {
    KeywordEngine engine(Stopwords::builtin(), AssociationLexicon::builtin(), PromptTemplates::builtin(), {});
    const auto src = window_of(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(engine.extract_keywords(src, 6, 0));
}
BENCHMARK(BM_LocalKeywordExtraction)->Arg(5)->Arg(50);

void BM_Associations(benchmark::State& state) {
    KeywordEngine engine(Stopwords::builtin(), AssociationLexicon::builtin(), PromptTemplates::builtin(), {});
    const auto src = window_of(5);
    for (auto _ : state) benchmark::DoNotOptimize(engine.extract_associations("plant", src, 4, 0));
}
BENCHMARK(BM_Associations);

struct Engine {
    ManualClock clock;
    InlineRunner runner;
    std::shared_ptr<MockLlm> llm = std::make_shared<MockLlm>(7);
    std::vector<ServerEvent> sink;
    std::unique_ptr<SessionEngine> engine;

    explicit Engine(Mode mode) {
        EngineDeps d;
        d.keywords = std::make_shared<KeywordEngine>(Stopwords::builtin(), AssociationLexicon::builtin(),
                                                     PromptTemplates::builtin(), KeywordEngine::Options{}, llm);
        d.suggestions = std::make_shared<SuggestionEngine>(PromptTemplates::builtin(), llm);
        d.tts = std::make_shared<MockTts>();
        d.clock = &clock;
        d.runner = &runner;
        engine = std::make_unique<SessionEngine>("bench", d, [this](const ServerEvent& e) { sink.push_back(e); }, mode);
        engine->start();
    }
};

// Inline engine: ingest one line, then one generate and nine refreshes.
void BM_EngineRefreshBlock(benchmark::State& state) {
    Engine e(static_cast<Mode>(state.range(0)));
    e.engine->ingest_utterance(Speaker::partner, kLines[0]);
    e.engine->toggle_joke_mode(true);
    if (e.engine->state().mode == Mode::wizard) e.engine->select_keyword(e.engine->keywords().terms().front(), true);
    int i = 0;
    for (auto _ : state) {
        e.engine->ingest_utterance(Speaker::partner, kLines[i++ % 5]);
        e.engine->generate();
        for (int r = 0; r < 9; ++r) e.engine->refresh();
        if (e.sink.size() > 100000) e.sink.clear();
    }
    state.SetItemsProcessed(state.iterations() * 10);
}
BENCHMARK(BM_EngineRefreshBlock)->DenseRange(0, 3);

// Full service round trip: submit, then wait for the answering event.
void BM_ServiceRefreshLatency(benchmark::State& state) {
    SessionService service{ServiceConfig{}};
    const auto id = service.create_session();
    auto sub = service.subscribe(id);
    service.execute(id, {{"kind", "toggle_joke_mode"}, {"payload", {{"on", true}}}});
    int n = 0;
    for (auto _ : state) {
        if (n++ % 20 == 0) {
            state.PauseTiming();
            service.execute(id, {{"kind", "ingest_text"}, {"payload", {{"text", kLines[n % 5]}}}});
            service.execute(id, {{"kind", "generate"}, {"payload", nlohmann::json::object()}});
            state.ResumeTiming();
        }
        const auto s = service.submit(id, {{"kind", "refresh"}, {"payload", nlohmann::json::object()}});
        while (auto ev = sub.next(std::chrono::milliseconds(1000))) {
            if (ev->kind == EventKind::suggestions_updated && ev->seq > s.ack_seq) break;
        }
    }
}
BENCHMARK(BM_ServiceRefreshLatency)->UseRealTime()->Unit(benchmark::kMicrosecond);

void BM_LogEncodeParse(benchmark::State& state) {
    std::string text;
    for (int i = 1; i <= 1000; ++i) {
        text += encode_log_record({"bench", i, EventKind::warning, {{"interaction", "provider_warning"}, {"i", i}}, i});
    }
    for (auto _ : state) benchmark::DoNotOptimize(parse_event_log(text));
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_LogEncodeParse);

}  // namespace
BENCHMARK_MAIN();
