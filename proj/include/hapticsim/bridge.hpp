#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <string>

#include "hapticsim/session.hpp"

namespace hapticsim {

// ---------------------------------------------------------------------------
// Live transport for the session protocol.
//
// A reader thread feeds raw lines into a bounded queue; the scheduler drains
// it on its own single thread.  When the queue is full the producer does not
// block the socket: the line is dropped and the peer gets an Error response.
// ---------------------------------------------------------------------------

class LineQueue {
public:
    explicit LineQueue(std::size_t capacity = 1024);

    // False (and drops the line) when the queue is at capacity or closed.
    bool try_push(std::string line);

    // Blocks while the queue is at capacity (backpressure); false if closed.
    bool push(std::string line);

    // Blocks until a line or close; nullopt means closed and drained.
    std::optional<std::string> pop();

    void close();

    std::size_t size() const;

private:
    mutable std::mutex mutex_;
    std::condition_variable ready_;
    std::condition_variable space_;
    std::deque<std::string> lines_;
    std::size_t capacity_;
    bool closed_ = false;
};

// Builds the material -> stimulus mapping for a session on one physical
// prop: each virtual material gets its recommended stimulus; the prop itself
// needs none.
std::map<MaterialId, std::string> mapping_for_physical(MaterialId physical_material);

// Serves the session protocol on a localhost TCP port (port 0 picks a free
// one; bound_port() tells which).  One connection at a time; each connection
// gets a fresh scheduler.  serve_once() handles a single connection and
// returns; serve_forever() loops until stop().
class SessionListener {
public:
    SessionListener(std::uint16_t port, SchedulerConfig config,
                    std::size_t queue_capacity = 1024);
    ~SessionListener();

    SessionListener(const SessionListener&) = delete;
    SessionListener& operator=(const SessionListener&) = delete;

    std::uint16_t bound_port() const { return bound_port_; }

    void serve_once();
    void serve_forever();
    void stop();

private:
    void serve_connection(int client_fd);

    SchedulerConfig config_;
    std::size_t queue_capacity_;
    int listen_fd_ = -1;
    std::uint16_t bound_port_ = 0;
    bool stopping_ = false;
};

}  // namespace hapticsim
