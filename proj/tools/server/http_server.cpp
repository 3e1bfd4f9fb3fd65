#include "http_server.hpp"

#include <sstream>

#include <httplib.h>

#include "quip/text.hpp"

namespace quip {

namespace {

constexpr const char* kJson = "application/json";
constexpr const char* kNdjson = "application/x-ndjson";

void send_error(httplib::Response& res, ErrorCode code, const std::string& message) {
    res.status = http_status(code);
    res.set_content(nlohmann::json{{"error", to_string(code)}, {"message", message}}.dump(), kJson);
}

// Wraps a handler so quip errors become JSON error responses.
template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
        try {
            fn(req, res);
        } catch (const Error& e) {
            send_error(res, e.code(), e.what());
        } catch (const nlohmann::json::exception& e) {
            send_error(res, ErrorCode::schema_violation, e.what());
        }
    };
}

nlohmann::json parse_body(const httplib::Request& req) {
    if (is_blank(req.body)) return nlohmann::json::object();
    try {
        return nlohmann::json::parse(req.body);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::schema_violation, std::string("body is not JSON: ") + e.what());
    }
}

std::int64_t int_param(const httplib::Request& req, const char* name, std::int64_t fallback) {
    if (!req.has_param(name)) return fallback;
    const std::string v = req.get_param_value(name);
    try {
        std::size_t used = 0;
        const std::int64_t n = std::stoll(v, &used);
        if (used != v.size() || n < 0) throw std::invalid_argument(v);
        return n;
    } catch (const std::exception&) {
        throw Error(ErrorCode::schema_violation, std::string(name) + " must be a non-negative integer");
    }
}

bool flag_param(const httplib::Request& req, const char* name, bool fallback) {
    if (!req.has_param(name)) return fallback;
    const std::string v = req.get_param_value(name);
    return !(v == "0" || v == "false" || v == "no");
}

std::string ndjson(const std::vector<ServerEvent>& events) {
    std::string out;
    for (const auto& ev : events) out += ev.to_line() + "\n";
    return out;
}

}  // namespace

int http_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::session_not_found: return 404;
        case ErrorCode::schema_violation:
        case ErrorCode::invalid_mode:
        case ErrorCode::invalid_config:
        case ErrorCode::rejected_empty: return 400;
        case ErrorCode::provider_failure:
        case ErrorCode::malformed_response:
        case ErrorCode::tts_failure: return 502;
        case ErrorCode::provider_timeout: return 504;
        case ErrorCode::corrupt_log:
        case ErrorCode::io_failure: return 500;
        default: return 409;
    }
}

HttpServer::HttpServer(SessionService& service) : service_(service), server_(std::make_unique<httplib::Server>()) {
    routes();
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    if (port == 0) return server_->bind_to_any_port(host);
    return server_->bind_to_port(host, port) ? port : -1;
}

void HttpServer::serve() { server_->listen_after_bind(); }

void HttpServer::stop() {
    stopping_ = true;
    server_->stop();
}

void HttpServer::routes() {
    auto& s = *server_;

    s.Post("/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const SessionId id = service_.create_session(parse_body(req));
        res.status = 201;
        res.set_content(nlohmann::json{{"session_id", id}}.dump(), kJson);
    }));

    s.Get("/sessions", guarded([this](const httplib::Request&, httplib::Response& res) {
        res.set_content(nlohmann::json{{"sessions", service_.sessions()}}.dump(), kJson);
    }));

    s.Get(R"(/sessions/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
        res.set_content(service_.snapshot(req.matches[1]).dump(), kJson);
    }));

    s.Post(R"(/sessions/([^/]+)/commands)", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const Submission sub = service_.submit(req.matches[1], parse_body(req));
        nlohmann::json body = {{"ack_seq", sub.ack_seq}};
        if (flag_param(req, "wait", false)) {
            body["outcome"] = sub.outcome.get().to_json();
            res.status = 200;
        } else {
            res.status = 202;
        }
        res.set_content(body.dump(), kJson);
    }));

    s.Get(R"(/sessions/([^/]+)/log)", guarded([this](const httplib::Request& req, httplib::Response& res) {
        res.set_content(ndjson(service_.events(req.matches[1], int_param(req, "from_seq", 0))), kNdjson);
    }));

    s.Get(R"(/sessions/([^/]+)/stream)", guarded([this](const httplib::Request& req, httplib::Response& res) {
        auto sub = std::make_shared<Subscription>(service_.subscribe(req.matches[1], int_param(req, "from_seq", 0)));
        const bool follow = flag_param(req, "follow", true);
        res.set_chunked_content_provider(kNdjson, [this, sub, follow](std::size_t, httplib::DataSink& sink) {
            if (stopping_ || !sink.is_writable()) return false;
            auto batch = sub->poll(256);
            if (batch.empty()) {
                if (!follow || sub->finished()) {
                    sink.done();
                    return true;
                }
                if (auto ev = sub->next(std::chrono::milliseconds(100))) batch.push_back(std::move(*ev));
            }
            const std::string chunk = ndjson(batch);
            if (!chunk.empty() && !sink.write(chunk.data(), chunk.size())) return false;
            return true;
        });
    }));

    s.Post(R"(/sessions/([^/]+)/stream)", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const SessionId id = req.matches[1];
        const std::int64_t from_seq = int_param(req, "from_seq", 0);
        // validate every line before running any of them
        std::vector<Command> commands;
        std::istringstream in(req.body);
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (is_blank(line)) continue;
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(line);
            } catch (const nlohmann::json::exception&) {
                throw Error(ErrorCode::schema_violation, "line " + std::to_string(line_no) + " is not JSON");
            }
            commands.push_back(parse_command(j, id));
        }
        std::int64_t last = service_.events(id, 0).size();
        for (auto& c : commands) {
            c.session_id = id;
            last = std::max(last, service_.submit(std::move(c)).outcome.get().last_seq);
        }
        auto events = service_.events(id, from_seq);
        while (!events.empty() && events.back().seq > last) events.pop_back();
        res.set_content(ndjson(events), kNdjson);
    }));
}

}  // namespace quip
