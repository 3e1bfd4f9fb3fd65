#include <sstream>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>

#include "harness.hpp"
#include "http_server.hpp"

namespace quip {
namespace {

std::vector<nlohmann::json> ndjson_lines(const std::string& body) {
    std::vector<nlohmann::json> out;
    std::istringstream in(body);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) out.push_back(nlohmann::json::parse(line));
    }
    return out;
}

class Http : public ::testing::Test {
protected:
    SessionService service{ServiceConfig{}};
    HttpServer server{service};
    std::thread serving;
    int port = -1;
    std::unique_ptr<httplib::Client> client;

    void SetUp() override {
        port = server.bind("127.0.0.1", 0);
        ASSERT_GT(port, 0);
        serving = std::thread([this] { server.serve(); });
        client = std::make_unique<httplib::Client>("127.0.0.1", port);
        client->set_read_timeout(5, 0);
    }
    void TearDown() override {
        server.stop();
        if (serving.joinable()) serving.join();
    }

    std::string create(const nlohmann::json& overrides = nlohmann::json::object()) {
        auto r = client->Post("/sessions", overrides.dump(), "application/json");
        EXPECT_TRUE(r);
        EXPECT_EQ(r->status, 201);
        return nlohmann::json::parse(r->body)["session_id"];
    }

    nlohmann::json command(const std::string& id, const nlohmann::json& c) {
        auto r = client->Post("/sessions/" + id + "/commands?wait=1", c.dump(), "application/json");
        EXPECT_TRUE(r);
        EXPECT_EQ(r->status, 200) << r->body;
        return nlohmann::json::parse(r->body);
    }
};

TEST(HttpStatus, ErrorCodesMapToStatuses) {
    EXPECT_EQ(http_status(ErrorCode::session_not_found), 404);
    EXPECT_EQ(http_status(ErrorCode::schema_violation), 400);
    EXPECT_EQ(http_status(ErrorCode::invalid_config), 400);
    EXPECT_EQ(http_status(ErrorCode::wrong_mode), 409);
    EXPECT_EQ(http_status(ErrorCode::provider_timeout), 504);
    EXPECT_EQ(http_status(ErrorCode::provider_failure), 502);
    EXPECT_EQ(http_status(ErrorCode::corrupt_log), 500);
}

TEST_F(Http, SessionLifecycle) {
    const auto id = create({{"mode", "bubble"}});
    auto list = client->Get("/sessions");
    ASSERT_TRUE(list);
    EXPECT_EQ(nlohmann::json::parse(list->body)["sessions"], nlohmann::json::array({id}));

    auto snap = client->Get("/sessions/" + id);
    ASSERT_TRUE(snap);
    EXPECT_EQ(nlohmann::json::parse(snap->body)["state"]["mode"], "bubble");

    auto accepted = client->Post("/sessions/" + id + "/commands",
                                 testing::cmd("ingest_text", {{"text", "We need costumes."}}).dump(), "application/json");
    ASSERT_TRUE(accepted);
    EXPECT_EQ(accepted->status, 202);
    EXPECT_EQ(nlohmann::json::parse(accepted->body)["ack_seq"], 1);

    const auto out = command(id, testing::cmd("toggle_joke_mode", {{"on", true}}));
    EXPECT_EQ(out["outcome"]["ok"], true);
    const auto rejected = command(id, testing::cmd("select_bubble", {{"utterance_id", 9}}));
    EXPECT_EQ(rejected["outcome"]["ok"], false);
    EXPECT_EQ(rejected["outcome"]["error"], "unknown_utterance");

    auto log = client->Get("/sessions/" + id + "/log?from_seq=1");
    ASSERT_TRUE(log);
    const auto lines = ndjson_lines(log->body);
    ASSERT_FALSE(lines.empty());
    EXPECT_EQ(lines.front()["seq"], 2);
    for (const auto& l : lines) EXPECT_EQ(l.size(), 5u);
}

TEST_F(Http, ErrorsCarryCodes) {
    auto missing = client->Get("/sessions/sess-404404");
    ASSERT_TRUE(missing);
    EXPECT_EQ(missing->status, 404);
    EXPECT_EQ(nlohmann::json::parse(missing->body)["error"], "session_not_found");

    auto bad_create = client->Post("/sessions", R"({"window_capacity":0})", "application/json");
    ASSERT_TRUE(bad_create);
    EXPECT_EQ(bad_create->status, 400);
    EXPECT_EQ(nlohmann::json::parse(bad_create->body)["error"], "invalid_config");

    const auto id = create();
    auto not_json = client->Post("/sessions/" + id + "/commands", "{oops", "application/json");
    ASSERT_TRUE(not_json);
    EXPECT_EQ(not_json->status, 400);
    auto bad_mode = client->Post("/sessions/" + id + "/commands",
                                 testing::cmd("set_mode", {{"mode", "chaos"}}).dump(), "application/json");
    ASSERT_TRUE(bad_mode);
    EXPECT_EQ(bad_mode->status, 400);
    EXPECT_EQ(nlohmann::json::parse(bad_mode->body)["error"], "invalid_mode");
}

TEST_F(Http, StreamReplaysThenEnds) {
    const auto id = create();
    command(id, testing::cmd("ingest_text", {{"text", "Pizza again?"}}));
    command(id, testing::cmd("toggle_joke_mode", {{"on", true}}));
    std::this_thread::sleep_for(std::chrono::milliseconds(200));
    const auto expected = ndjson_lines(client->Get("/sessions/" + id + "/log")->body);
    auto r = client->Get("/sessions/" + id + "/stream?follow=0");
    ASSERT_TRUE(r);
    EXPECT_EQ(ndjson_lines(r->body), expected);
    auto tail = client->Get("/sessions/" + id + "/stream?follow=0&from_seq=2");
    ASSERT_TRUE(tail);
    EXPECT_EQ(ndjson_lines(tail->body).front()["seq"], 3);
}

TEST_F(Http, FollowingStreamDeliversLiveEvents) {
    const auto id = create();
    std::vector<nlohmann::json> received;
    std::string buffer;
    std::thread reader([&] {
        httplib::Client c("127.0.0.1", port);
        c.set_read_timeout(5, 0);
        c.Get("/sessions/" + id + "/stream", [&](const char* data, std::size_t len) {
            buffer.append(data, len);
            std::size_t nl;
            while ((nl = buffer.find('\n')) != std::string::npos) {
                received.push_back(nlohmann::json::parse(buffer.substr(0, nl)));
                buffer.erase(0, nl + 1);
            }
            return received.size() < 3;
        });
    });
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
    command(id, testing::cmd("ingest_text", {{"text", "First."}}));
    command(id, testing::cmd("ingest_text", {{"text", "Second."}}));
    reader.join();
    ASSERT_EQ(received.size(), 3u);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(received[static_cast<std::size_t>(i)]["seq"], i + 1);
    EXPECT_EQ(received[1]["kind"], "transcript_appended");
    EXPECT_EQ(received[2]["payload"]["interaction"], "transcript_ingested");
}

TEST_F(Http, PostStreamRunsCommandsInOrder) {
    const auto id = create({{"mode", "keywords"}});
    const std::string body = testing::cmd("ingest_text", {{"text", "The plant tripped the boss."}}).dump() + "\n" +
                             testing::cmd("toggle_joke_mode", {{"on", true}}).dump() + "\n\n" +
                             testing::cmd("select_keyword", {{"keyword", "plant"}}).dump() + "\n";
    auto r = client->Post("/sessions/" + id + "/stream?from_seq=1", body, "application/x-ndjson");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 200);
    const auto lines = ndjson_lines(r->body);
    ASSERT_FALSE(lines.empty());
    EXPECT_EQ(lines.front()["seq"], 2);
    EXPECT_EQ(lines.front()["kind"], "transcript_appended");
    bool selected = false;
    for (const auto& l : lines) selected |= l["payload"].value("interaction", "") == "select_keyword";
    EXPECT_TRUE(selected);

    // one bad line rejects the whole batch before anything runs
    const auto before = service.events(id).size();
    auto bad = client->Post("/sessions/" + id + "/stream",
                            testing::cmd("refresh").dump() + "\n" + "{\"kind\":\"fly\"}\n", "application/x-ndjson");
    ASSERT_TRUE(bad);
    EXPECT_EQ(bad->status, 400);
    EXPECT_EQ(service.events(id).size(), before);
}

}  // namespace
}  // namespace quip
