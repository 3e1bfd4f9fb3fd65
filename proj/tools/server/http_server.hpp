#pragma once

#include <atomic>
#include <memory>
#include <string>

#include "quip/service.hpp"

namespace httplib {
class Server;
}

namespace quip {

int http_status(ErrorCode code);

// HTTP and NDJSON stream front end for a SessionService.
//
//   POST /sessions                      body: overrides JSON (optional)
//   GET  /sessions                      live session ids
//   GET  /sessions/{id}                 snapshot JSON
//   POST /sessions/{id}/commands        body: command JSON; ?wait=1 for the outcome
//   GET  /sessions/{id}/log             NDJSON events, ?from_seq=N
//   GET  /sessions/{id}/stream          chunked NDJSON, replay from ?from_seq=N then live;
//                                       ?follow=0 ends once caught up
//   POST /sessions/{id}/stream          body: NDJSON commands, run in order; response:
//                                       NDJSON events from ?from_seq=N through the last
//                                       event they produced
class HttpServer {
public:
    explicit HttpServer(SessionService& service);
    ~HttpServer();

    // Binds without serving. Port 0 picks a free port. Returns the bound port
    // or -1.
    int bind(const std::string& host, int port);
    // Serves until stop(); call after bind().
    void serve();
    void stop();

private:
    void routes();

    SessionService& service_;
    std::unique_ptr<httplib::Server> server_;
    std::atomic<bool> stopping_{false};
};

}  // namespace quip
