#include <random>

#include <gtest/gtest.h>

#include "harness.hpp"

namespace quip {
namespace {

using testing::direct_counts;
using testing::EngineHarness;

std::map<std::string, int> coded_counts(const std::vector<CodedInteraction>& coded) {
    std::map<std::string, int> out;
    for (const auto& c : coded) ++out[std::string(to_string(c.category))];
    return out;
}

TEST(Categories, NamesRoundTrip) {
    for (Category c : kAllCategories) EXPECT_EQ(parse_category(to_string(c)), c);
    EXPECT_FALSE(parse_category("juggle"));
    EXPECT_EQ(parse_export_format("timeline-json"), ExportFormat::timeline_json);
    EXPECT_FALSE(parse_export_format("xml"));
}

// Three bursts of eight refreshes, each ending in a pick that is edited
// before playback.
TEST(Coding, HeavyRefresherFixture) {
    const auto events = testing::p2_style_log();
    const auto coded = code_events(events);
    const auto counts = coded_counts(coded);
    EXPECT_EQ(counts.at("refresh"), 24);
    EXPECT_EQ(counts.at("pick_suggestion"), 3);
    EXPECT_EQ(counts.at("edit_text"), 3);
    EXPECT_EQ(counts.at("play_tts"), 3);
    EXPECT_EQ(counts.at("enter_joke_mode"), 1);
    EXPECT_EQ(counts.count("type_own"), 0u);
    EXPECT_EQ(counts, direct_counts(events));

    const auto summary = summarize(coded, events);
    EXPECT_EQ(summary.jokes_delivered, 3);
    EXPECT_EQ(summary.edits_before_play, 3);
    EXPECT_EQ(summary.excludable, 0);
    int shown = 0;
    for (const auto& e : events) {
        if (e.kind == EventKind::suggestions_updated) shown += static_cast<int>(e.payload["suggestions"].size());
    }
    EXPECT_EQ(summary.suggestions_shown, shown);
    EXPECT_GE(shown, 27);
    EXPECT_EQ(summary.to_json()["counts"]["refresh"], 24);

    Millis prev = 0;
    for (const auto& c : coded) {
        EXPECT_GE(c.t, prev);
        prev = c.t;
        EXPECT_EQ(c.session_id, "sess-test");
    }
}

TEST(Coding, TypedLinesOutsideJokeModeAreExcludable) {
    EngineHarness h(Mode::keywords);
    h.engine->ingest_utterance(Speaker::partner, "How was the meeting?");
    h.engine->speak("Long.");
    h.engine->toggle_joke_mode(true);
    h.engine->speak("Longer than the plant.");
    const auto coded = code_events(h.events);
    std::vector<Category> cats;
    for (const auto& c : coded) cats.push_back(c.category);
    EXPECT_EQ(cats, (std::vector<Category>{Category::type_own, Category::play_tts, Category::enter_joke_mode,
                                           Category::type_own, Category::play_tts}));
    EXPECT_EQ(excludable_flags(coded), (std::vector<bool>{true, true, false, false, false}));
    const auto s = summarize(coded);
    EXPECT_EQ(s.excludable, 2);
    EXPECT_EQ(s.jokes_delivered, 1);
}

class SilentTts final : public TtsProvider {
public:
    PlaybackHandle synthesize(const std::string&, const std::string&) override {
        throw Error(ErrorCode::tts_failure, "muted");
    }
    std::string name() const override { return "silent"; }
};

TEST(Coding, UnplayedTypedLinesAreDropped) {
    EngineHarness h(Mode::full_auto);
    h.events.clear();
    h.engine = std::make_unique<SessionEngine>(
        "sess-test",
        [&] {
            auto d = h.deps({}, false);
            d.tts = std::make_shared<SilentTts>();
            return d;
        }(),
        [&](const ServerEvent& e) { h.events.push_back(e); });
    h.engine->start();
    h.engine->set_typed_prefix("Hello");
    h.apply(testing::cmd("speak"));
    EXPECT_TRUE(code_events(h.events).empty());
}

TEST(Coding, GapsAreCorruption) {
    auto events = testing::p2_style_log();
    events.erase(events.begin() + 10);
    EXPECT_THROW(code_events(events), CorruptLogError);
}

// Random sessions: coding must agree with a count written straight against
// the wire format, category by category.
TEST(Coding, ConservesCountsOnRandomSessions) {
    std::mt19937 rng(77);
    static const char* lines[] = {"The plant fell over.", "My boss laughed.", "The pizza is cold!", "Circus time?"};
    for (int trial = 0; trial < 30; ++trial) {
        EngineHarness h(static_cast<Mode>(trial % 4));
        for (int step = 0; step < 200; ++step) {
            auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
            nlohmann::json c;
            switch (pick(8)) {
                case 0: c = testing::cmd("toggle_joke_mode", {{"on", pick(4) > 0}}); break;
                case 1: c = testing::cmd("refresh"); break;
                case 2: c = testing::cmd("accept", {{"slot", pick(3)}}); break;
                case 3: c = testing::cmd("speak", pick(2) ? nlohmann::json{{"text", "My line."}} : nlohmann::json::object()); break;
                case 4: {
                    const auto& kw = h.engine->keywords().terms();
                    c = testing::cmd("select_keyword", {{"keyword", kw.empty() ? "x" : kw[static_cast<std::size_t>(pick(static_cast<int>(kw.size())))]}});
                    break;
                }
                case 5: {
                    const auto& as = h.engine->associations().associations;
                    c = testing::cmd("select_association", {{"association", as.empty() ? "x" : as.front()}});
                    break;
                }
                case 6: c = testing::cmd("select_bubble", {{"utterance_id", 1 + pick(3)}}); break;
                default: c = testing::cmd("ingest_text", {{"text", lines[pick(4)]}}); break;
            }
            h.apply(c);
            if (pick(5) == 0) h.settle(500);
        }
        ASSERT_EQ(coded_counts(code_events(h.events)), direct_counts(h.events)) << "trial " << trial;
    }
}

TEST(Coding, InterleavedSessionsKeepTheirOwnClock) {
    auto a = testing::p2_style_log();
    EngineHarness hb(Mode::full_auto);
    hb.clock.advance(100000);
    hb.engine->ingest_utterance(Speaker::partner, "Hi.");
    hb.engine->speak("Hello!");
    std::vector<ServerEvent> merged;
    for (auto& e : hb.events) {
        e.session_id = "sess-b";
        merged.push_back(e);
    }
    merged.insert(merged.begin() + 1, a.begin(), a.end());
    const auto by_session = summarize_by_session(merged);
    ASSERT_EQ(by_session.size(), 2u);
    EXPECT_EQ(by_session.at("sess-b").count(Category::play_tts), 1);
    EXPECT_EQ(by_session.at("sess-test").count(Category::refresh), 24);
    for (const auto& c : code_events(merged)) {
        if (c.session_id == "sess-b") EXPECT_EQ(c.t, 100000);
    }
}

// ---------------------------------------------------------------- export

std::vector<CodedInteraction> sample() {
    return {{"sess-2", 10, Category::refresh},
            {"sess-1", 0, Category::enter_joke_mode},
            {"sess,\"odd\"", 5, Category::play_tts},
            {"sess-1", 25, Category::pick_suggestion}};
}

TEST(Export, CsvIsQuotedAndRoundTrips) {
    const auto csv = export_coded(sample(), ExportFormat::csv);
    EXPECT_EQ(csv,
              "session_id,t,category\n"
              "sess-2,10,refresh\n"
              "sess-1,0,enter_joke_mode\n"
              "\"sess,\"\"odd\"\"\",5,play_tts\n"
              "sess-1,25,pick_suggestion\n");
    EXPECT_EQ(load_coded(csv, ExportFormat::csv), sample());
    EXPECT_THROW(load_coded("id,t\nx,1\n", ExportFormat::csv), Error);
    EXPECT_THROW(load_coded("session_id,t,category\nx,1,dance\n", ExportFormat::csv), Error);
}

TEST(Export, JsonRoundTrips) {
    const auto json = export_coded(sample(), ExportFormat::json);
    const auto parsed = nlohmann::json::parse(json);
    ASSERT_TRUE(parsed.is_array());
    EXPECT_EQ(parsed[0], (nlohmann::json{{"session_id", "sess-2"}, {"t", 10}, {"category", "refresh"}}));
    EXPECT_EQ(load_coded(json, ExportFormat::json), sample());
}

TEST(Export, TimelineGroupsBySession) {
    const auto text = export_coded(sample(), ExportFormat::timeline_json);
    const auto j = nlohmann::json::parse(text);
    ASSERT_EQ(j["sessions"].size(), 3u);
    EXPECT_EQ(j["sessions"][1]["session_id"], "sess-1");
    EXPECT_EQ(j["sessions"][1]["interactions"].size(), 2u);
    EXPECT_EQ(j["sessions"][1]["interactions"][1]["category"], "pick_suggestion");
    // grouping loses the cross-session order but nothing else
    auto back = load_coded(text, ExportFormat::timeline_json);
    auto expected = sample();
    auto key = [](const CodedInteraction& c) { return std::make_tuple(c.session_id, c.t); };
    std::sort(back.begin(), back.end(), [&](auto& x, auto& y) { return key(x) < key(y); });
    std::sort(expected.begin(), expected.end(), [&](auto& x, auto& y) { return key(x) < key(y); });
    EXPECT_EQ(back, expected);
}

TEST(Export, WriteFailsOnBadPath) {
    EXPECT_THROW(write_export("/nonexistent/dir/out.csv", sample(), ExportFormat::csv), Error);
    testing::TempDir dir;
    write_export(dir.path() / "out.json", sample(), ExportFormat::json);
    EXPECT_TRUE(std::filesystem::exists(dir.path() / "out.json"));
}

}  // namespace
}  // namespace quip
