// One PASS/FAIL line per primary criterion. Exit status is the number of
// failed criteria.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "harness.hpp"
#include "http_server.hpp"
#include "quip/prompt.hpp"
#include "quip/text.hpp"

namespace {

using namespace quip;
using quip::testing::cmd;
using quip::testing::EngineHarness;

struct Failed {
    std::string why;
};

void require(bool cond, const std::string& why) {
    if (!cond) throw Failed{why};
}

template <typename Fn>
void expect_error(ErrorCode code, Fn fn, const std::string& what) {
    try {
        fn();
    } catch (const Error& e) {
        require(e.code() == code, what + ": got " + std::string(to_string(e.code())));
        return;
    }
    throw Failed{what + ": not rejected"};
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::filesystem::path scenario_dir() { return std::filesystem::path(QUIP_FIXTURE_DIR) / "scenarios"; }

const std::vector<std::string> kScenarios = {"costume_store", "wrong_job", "work_mishap", "pizza_order"};

// ---------------------------------------------------------------- criteria

std::string structural_constants() {
    const ModeConfig c;
    require(c.window_capacity == 5 && c.keyword_count == 6, "window/keyword defaults");
    require(c.suggestion_count[Mode::wizard] == 3 && c.suggestion_count[Mode::bubble] == 3, "3-suggestion modes");
    require(c.suggestion_count[Mode::keywords] == 1 && c.suggestion_count[Mode::full_auto] == 1, "1-suggestion modes");

    // window: seven sentences in, the last five are the context
    EngineHarness w(Mode::full_auto);
    w.engine->ingest_utterance(Speaker::partner, "One. Two. Three. Four.");
    w.engine->ingest_utterance(Speaker::user, "Five. Six. Seven.");
    require(w.engine->context_window().texts() ==
                std::vector<std::string>{"Three.", "Four.", "Five.", "Six.", "Seven."},
            "context window is not the last five sentences");

    for (Mode m : kAllModes) {
        EngineHarness h(m);
        h.engine->ingest_utterance(Speaker::partner,
                                   "The circus clown juggled plants, pizzas, laptops, slides, coffee, dinosaurs and "
                                   "costumes while the boss watched the meeting.");
        h.engine->toggle_joke_mode(true);
        require(h.engine->keywords().keywords.size() <= 6, "more than six keywords");
        if (m != Mode::full_auto) require(h.engine->keywords().keywords.size() == 6, "keyword set not filled");
        if (m == Mode::wizard) h.engine->select_keyword(h.engine->keywords().terms().front(), true);
        h.settle();
        const auto expected = static_cast<std::size_t>(m == Mode::wizard || m == Mode::bubble ? 3 : 1);
        require(h.engine->suggestions().size() == expected, std::string(to_string(m)) + " suggestion count");
        h.engine->accept_suggestion(h.engine->suggestions().front().id);
        if (m == Mode::wizard) {
            require(h.tts->entries().size() == 1, "wizard pick did not play immediately");
            expect_error(ErrorCode::wrong_mode, [&] { h.engine->speak("edited"); }, "wizard editing");
            expect_error(ErrorCode::wrong_mode, [&] { h.engine->set_typed_prefix("x"); }, "wizard typing");
        } else {
            require(h.tts->entries().empty(), std::string(to_string(m)) + " played without confirmation");
            h.engine->speak(h.engine->state().input_field + " Edited.");
            require(h.tts->entries().size() == 1, "edited play failed");
        }
    }
    return "window 5, keywords <= 6, suggestions 3/1/3/1, wizard locked + immediate play";
}

std::string prompt_goldens() {
    Transcript t;
    t.ingest(Speaker::partner, "The costume store only had dinosaurs.", 0);
    t.ingest(Speaker::user, "I wanted to be a pirate.", 0);
    const ModeConfig config;
    const std::string sentence =
        "Imagine you are the user, generate 3 humorous comments start always with the user input and complete giving "
        "maximum priority to the context of the selected messages and second to the keywords. Give a short and "
        "concise sentence that the user could fit into the conversation";
    SessionState s;
    transitions::set_mode(s, Mode::bubble);
    transitions::toggle_joke_mode(s, true);
    const auto bubble = build_prompt(s, config, t, PromptTemplates::builtin()).instruction;
    require(bubble.find(sentence) != std::string::npos, "bubble sentence not verbatim");

    const std::vector<std::string> kws = {"costume", "dinosaurs", "pirate"};
    const Mode modes[] = {Mode::bubble, Mode::keywords, Mode::full_auto};
    for (int i = 0; i < 10; ++i) {
        SessionState st;
        transitions::set_mode(st, modes[i % 3]);
        transitions::toggle_joke_mode(st, true);
        const std::string prefix = "Prefix" + std::to_string(i);
        transitions::set_typed_prefix(st, config, prefix);
        if (st.mode != Mode::full_auto) transitions::select_keyword(st, kws, kws[static_cast<std::size_t>(i % 3)], true);
        if (st.mode == Mode::bubble) transitions::select_bubble(st, t, 1 + i % 2, true);
        const auto text = build_prompt(st, config, t, PromptTemplates::builtin()).instruction;
        const auto p = text.find(prefix);
        const auto c = text.find("\n- ");
        require(p != std::string::npos && c != std::string::npos && p < c, "prefix not before context, state " + std::to_string(i));
        if (st.mode != Mode::full_auto) {
            const auto k = text.find("Keywords: ");
            require(k != std::string::npos && c < k, "context not before keywords, state " + std::to_string(i));
        }
    }
    return "bubble sentence verbatim; prefix < context < keywords on 10 states";
}

std::string state_machine() {
    std::mt19937 rng(20241015);
    EngineHarness h(Mode::full_auto);
    int rejected = 0;
    for (int step = 0; step < 10000; ++step) {
        const auto out = h.apply(quip::testing::random_command(rng, *h.engine));
        rejected += out.ok ? 0 : 1;
        if (auto bad = check_invariants(h.engine->state(), h.engine->transcript())) {
            throw Failed{"step " + std::to_string(step) + ": " + *bad};
        }
        if (step % 7 == 0) h.settle(std::uniform_int_distribution<int>(0, 800)(rng));
    }
    for (std::size_t i = 0; i < h.events.size(); ++i) require(h.events[i].seq == static_cast<std::int64_t>(i + 1), "seq gap");

    EngineHarness wiz(Mode::wizard);
    wiz.engine->ingest_utterance(Speaker::partner, "I applied to the circus.");
    wiz.engine->toggle_joke_mode(true);
    expect_error(ErrorCode::state_violation, [&] { wiz.engine->select_association("clown", true); },
                 "association before keyword");
    expect_error(ErrorCode::wrong_mode, [&] { wiz.engine->set_typed_prefix("hi"); }, "typing in wizard");
    const auto out = wiz.apply(cmd("set_prefix", {{"text", "hi"}}));
    require(!out.ok && wiz.engine->state().typed_prefix.empty(), "typing in wizard changed state");
    return "10000 steps, " + std::to_string(rejected) + " rejections, invariants held";
}

std::string oracle_equivalence() {
    const auto stop = quip::testing::builtin_stopword_set();
    KeywordEngine engine(Stopwords::builtin(), AssociationLexicon::builtin(), PromptTemplates::builtin(), {});
    std::mt19937 rng(4242);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::string> texts;
        std::vector<Sentence> src;
        for (int i = 0; i < 5; ++i) {
            texts.push_back(quip::testing::random_sentence(rng));
            src.push_back({1, i, texts.back()});
        }
        require(engine.extract_keywords(src, 6, 0).set.terms() == quip::testing::oracle_keywords(texts, stop, 6),
                "keyword mismatch in trial " + std::to_string(trial));
    }
    for (int trial = 0; trial < 100; ++trial) {
        Transcript t;
        std::vector<std::vector<std::string>> history;
        const int n = std::uniform_int_distribution<int>(1, 12)(rng);
        for (int u = 0; u < n; ++u) {
            std::vector<std::string> sentences;
            std::string text;
            for (int k = std::uniform_int_distribution<int>(1, 3)(rng); k > 0; --k) {
                sentences.push_back(quip::testing::random_sentence(rng));
                text += sentences.back() + "  ";
            }
            history.push_back(sentences);
            t.ingest(Speaker::partner, text, u);
        }
        require(t.window(5).texts() == quip::testing::oracle_window(history, 5),
                "window mismatch in trial " + std::to_string(trial));
    }
    return "100 keyword fixtures, 100 ingestion sequences";
}

std::string refresh_exclusion() {
    for (Mode m : kAllModes) {
        EngineHarness h(m);
        h.engine->ingest_utterance(Speaker::partner, "The pizza place sent pineapple again.");
        h.engine->toggle_joke_mode(true);
        if (m == Mode::wizard) {
            h.engine->select_keyword(h.engine->keywords().terms().front(), true);
            h.settle();
        }
        std::set<std::string> shown;
        std::size_t total = 0;
        for (int r = 0; r <= 30; ++r) {
            if (r > 0) h.engine->refresh();
            for (const auto& s : h.engine->suggestions()) {
                shown.insert(s.text);
                ++total;
            }
        }
        require(shown.size() == total, std::string(to_string(m)) + ": repeated suggestion within an epoch");
        require(h.engine->state().shown_suggestions.size() == total, "exclusion set does not track shown texts");
        h.engine->ingest_utterance(Speaker::partner, "Now they sent anchovies.");
        require(h.engine->state().shown_suggestions.empty(), "epoch change kept the exclusion set");
    }
    return "30 refreshes distinct in every mode; epoch change clears exclusion";
}

std::string e2e_replay() {
    const auto t0 = Clock::now();
    int plays = 0;
    for (const auto& name : kScenarios) {
        const auto script = load_script(scenario_dir() / (name + ".tsv"));
        quip::testing::TempDir dir;
        ServiceConfig config;
        config.log_dir = dir.path();
        const auto a = run_replay(script, config);
        const auto b = run_replay(script, ServiceConfig{});
        require(a.log_text == b.log_text, name + ": reruns differ");
        std::ifstream in(dir.path() / (a.session_id + ".log"), std::ios::binary);
        const std::string on_disk((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        require(on_disk == a.log_text, name + ": persisted log differs");
        require(!a.tts.empty(), name + ": nothing was spoken");
        bool delivered_joke = false;
        for (const auto& e : a.events) {
            if (e.kind == EventKind::tts_played && e.payload.value("source", "") == "suggestion") delivered_joke = true;
        }
        require(delivered_joke, name + ": no suggestion reached playback");
        plays += static_cast<int>(a.tts.size());
    }
    const double elapsed = seconds_since(t0);
    require(elapsed < 10.0, "took " + std::to_string(elapsed) + " s");
    char buf[128];
    std::snprintf(buf, sizeof buf, "4 scenarios x2 byte-identical, %d plays, %.2f s", plays, elapsed);
    return buf;
}

std::vector<nlohmann::json> parse_lines(const std::string& body) {
    std::vector<nlohmann::json> out;
    std::istringstream in(body);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) out.push_back(nlohmann::json::parse(line));
    }
    return out;
}

// A client follows the HTTP event stream while a replay runs, hangs up after
// a random number of events and reconnects from the last seq it saw.
std::string stream_integrity() {
    ServiceConfig config;
    config.virtual_time = true;
    SessionService service(config);
    HttpServer http(service);
    const int port = http.bind("127.0.0.1", 0);
    require(port > 0, "cannot bind");
    std::thread serving([&] { http.serve(); });
    std::mt19937 rng(99);
    int reconnects = 0;
    std::string failure;
    const auto scripts = [] {
        std::vector<std::vector<ScriptLine>> out;
        for (const auto& name : kScenarios) out.push_back(load_script(scenario_dir() / (name + ".tsv")));
        return out;
    }();

    for (int trial = 0; trial < 100 && failure.empty(); ++trial) {
        const auto id = service.create_session();
        std::atomic<bool> done{false};
        std::thread driver([&, id] {
            replay_script(service, id, scripts[static_cast<std::size_t>(trial) % scripts.size()]);
            done = true;
        });
        std::vector<nlohmann::json> view;
        httplib::Client client("127.0.0.1", port);
        // an idle stream counts as one more dropped connection
        client.set_read_timeout(0, 50000);
        while (true) {
            const bool finished = done.load();
            const auto last = view.empty() ? 0 : view.back()["seq"].get<std::int64_t>();
            const int cut = std::uniform_int_distribution<int>(1, 15)(rng);
            int got = 0;
            std::string buffer;
            const std::string path = "/sessions/" + id + "/stream?from_seq=" + std::to_string(last) +
                                     (finished ? "&follow=0" : "");
            client.Get(path, [&](const char* data, std::size_t len) {
                buffer.append(data, len);
                std::size_t nl;
                while ((nl = buffer.find('\n')) != std::string::npos) {
                    view.push_back(nlohmann::json::parse(buffer.substr(0, nl)));
                    buffer.erase(0, nl + 1);
                    ++got;
                }
                return finished || got < cut;
            });
            if (finished) break;
            ++reconnects;
        }
        driver.join();
        const auto truth = service.events(id);
        if (view.size() != truth.size()) {
            failure = "trial " + std::to_string(trial) + ": saw " + std::to_string(view.size()) + " of " +
                      std::to_string(truth.size()) + " events";
            break;
        }
        for (std::size_t i = 0; i < view.size(); ++i) {
            if (view[i] != truth[i].to_json()) {
                failure = "trial " + std::to_string(trial) + ": event " + std::to_string(i + 1) + " differs";
                break;
            }
        }
        service.close_session(id);
    }
    http.stop();
    serving.join();
    require(failure.empty(), failure);
    return "100 trials, " + std::to_string(reconnects) + " reconnects, gapless and duplicate-free";
}

std::string analytics() {
    const auto coded = code_events(quip::testing::p2_style_log());
    const auto summary = summarize(coded);
    require(summary.count(Category::refresh) == 24, "refresh = " + std::to_string(summary.count(Category::refresh)));
    require(summary.count(Category::pick_suggestion) == 3, "pick_suggestion = " + std::to_string(summary.count(Category::pick_suggestion)));
    require(summary.count(Category::edit_text) == 3, "edit_text = " + std::to_string(summary.count(Category::edit_text)));
    const auto csv = export_coded(coded, ExportFormat::csv);
    require(load_coded(csv, ExportFormat::csv) == coded, "CSV round trip lost data");
    require(export_coded(load_coded(csv, ExportFormat::csv), ExportFormat::csv) == csv, "CSV re-export differs");
    return "{refresh:24, pick_suggestion:3, edit_text:3}; CSV round trip of " + std::to_string(coded.size()) + " rows";
}

// Real-time service, mock providers on their own thread. Each block moves
// the context on (unmeasured), then times one generate and nine refreshes
// from submission to the suggestions_updated event that answers them.
std::string liveness() {
    SessionService service{ServiceConfig{}};
    const auto id = service.create_session();
    auto sub = service.subscribe(id);
    require(service.execute(id, cmd("toggle_joke_mode", {{"on", true}})).ok, "cannot enter joke mode");
    std::vector<double> ms;
    auto wait_for_suggestions = [&](std::int64_t after) {
        while (auto e = sub.next(std::chrono::milliseconds(2000))) {
            if (e->kind == EventKind::suggestions_updated && e->seq > after) return true;
            if (e->kind == EventKind::error && e->seq > after) throw Failed{"error event: " + e->payload.dump()};
        }
        return false;
    };
    for (int block = 0; block < 100; ++block) {
        service.execute(id, cmd("ingest_text", {{"text", "Block " + std::to_string(block) + ": the pizza is late."}}));
        for (int i = 0; i < 10; ++i) {
            const auto t0 = Clock::now();
            const auto s = service.submit(id, cmd(i == 0 ? "generate" : "refresh"));
            require(wait_for_suggestions(s.ack_seq), "no suggestions_updated after command");
            ms.push_back(seconds_since(t0) * 1000.0);
            require(s.outcome.get().ok, "command rejected");
        }
    }
    std::sort(ms.begin(), ms.end());
    const double p50 = ms[ms.size() / 2];
    const double p99 = ms[static_cast<std::size_t>(static_cast<double>(ms.size()) * 0.99) - 1];
    char buf[128];
    std::snprintf(buf, sizeof buf, "%zu commands, p50 %.2f ms, p99 %.2f ms, max %.2f ms", ms.size(), p50, p99, ms.back());
    require(p99 < 100.0, buf);
    return buf;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::string (*)()>> criteria = {
        {"structural-constants", structural_constants},
        {"prompt-goldens", prompt_goldens},
        {"state-machine", state_machine},
        {"oracle-equivalence", oracle_equivalence},
        {"refresh-exclusion", refresh_exclusion},
        {"e2e-replay", e2e_replay},
        {"stream-integrity", stream_integrity},
        {"analytics", analytics},
        {"liveness", liveness},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        std::string detail;
        bool ok = false;
        try {
            detail = fn();
            ok = true;
        } catch (const Failed& f) {
            detail = f.why;
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        failed += ok ? 0 : 1;
        std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
    }
    return failed;
}
