#pragma once

#include <atomic>
#include <chrono>

#include "quip/types.hpp"

namespace quip {

// Milliseconds since the owning session started. Sessions read time only
// through this interface so replays can run on virtual time.
class Clock {
public:
    virtual ~Clock() = default;
    virtual Millis now_ms() const = 0;
};

class SteadyClock final : public Clock {
public:
    // `offset` continues a session that was reloaded from its log.
    explicit SteadyClock(Millis offset = 0) : start_(std::chrono::steady_clock::now()), offset_(offset) {}

    Millis now_ms() const override {
        return offset_ + std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - start_)
                             .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
    Millis offset_;
};

class ManualClock final : public Clock {
public:
    explicit ManualClock(Millis start = 0) : now_(start) {}

    Millis now_ms() const override { return now_.load(); }
    void advance(Millis delta) { now_ += delta; }
    void set(Millis t) { now_ = t; }

private:
    std::atomic<Millis> now_;
};

}  // namespace quip
