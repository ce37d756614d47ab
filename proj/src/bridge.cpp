#include "hapticsim/bridge.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <stdexcept>
#include <thread>

#include "hapticsim/perception.hpp"

namespace hapticsim {

LineQueue::LineQueue(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw std::invalid_argument("queue capacity must be positive");
}

bool LineQueue::try_push(std::string line) {
    {
        std::lock_guard<std::mutex> lock(mutex_);
        if (closed_ || lines_.size() >= capacity_) return false;
        lines_.push_back(std::move(line));
    }
    ready_.notify_one();
    return true;
}

bool LineQueue::push(std::string line) {
    {
        std::unique_lock<std::mutex> lock(mutex_);
        space_.wait(lock, [&] { return closed_ || lines_.size() < capacity_; });
        if (closed_) return false;
        lines_.push_back(std::move(line));
    }
    ready_.notify_one();
    return true;
}

std::optional<std::string> LineQueue::pop() {
    std::unique_lock<std::mutex> lock(mutex_);
    ready_.wait(lock, [&] { return closed_ || !lines_.empty(); });
    if (lines_.empty()) return std::nullopt;
    std::string line = std::move(lines_.front());
    lines_.pop_front();
    space_.notify_one();
    return line;
}

void LineQueue::close() {
    {
        std::lock_guard<std::mutex> lock(mutex_);
        closed_ = true;
    }
    ready_.notify_all();
    space_.notify_all();
}

std::size_t LineQueue::size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return lines_.size();
}

std::map<MaterialId, std::string> mapping_for_physical(MaterialId physical_material) {
    std::map<MaterialId, std::string> mapping;
    for (MaterialId virt : test_materials()) {
        if (virt == physical_material ||
            physical_material == MaterialId::Plywood) {
            // Nothing to render on itself; the bare plate has no rating data
            // to recommend from.
            mapping[virt] = "N";
        } else {
            mapping[virt] =
                recommend_stimulus(RatingTable::builtin(), physical_material, virt)
                    .stimulus_label;
        }
    }
    mapping[MaterialId::Plywood] = "N";
    return mapping;
}

namespace {

void throw_errno(const char* what) {
    throw std::runtime_error(std::string(what) + ": " + std::strerror(errno));
}

void write_all(int fd, const std::string& data) {
    std::size_t off = 0;
    while (off < data.size()) {
        const ssize_t n = ::send(fd, data.data() + off, data.size() - off, 0);
        if (n < 0) {
            if (errno == EINTR) continue;
            return;  // peer vanished; nothing useful to do with the rest
        }
        off += static_cast<std::size_t>(n);
    }
}

}  // namespace

SessionListener::SessionListener(std::uint16_t port, SchedulerConfig config,
                                 std::size_t queue_capacity)
    : config_(std::move(config)), queue_capacity_(queue_capacity) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw_errno("socket");

    const int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(port);
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
        throw_errno("bind");
    }
    if (::listen(listen_fd_, 1) < 0) throw_errno("listen");

    socklen_t len = sizeof(addr);
    if (::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len) < 0) {
        throw_errno("getsockname");
    }
    bound_port_ = ntohs(addr.sin_port);
}

SessionListener::~SessionListener() {
    if (listen_fd_ >= 0) ::close(listen_fd_);
}

void SessionListener::stop() {
    stopping_ = true;
    if (listen_fd_ >= 0) {
        ::shutdown(listen_fd_, SHUT_RDWR);
        ::close(listen_fd_);
        listen_fd_ = -1;
    }
}

void SessionListener::serve_once() {
    const int client = ::accept(listen_fd_, nullptr, nullptr);
    if (client < 0) {
        if (stopping_) return;
        throw_errno("accept");
    }
    serve_connection(client);
}

void SessionListener::serve_forever() {
    while (!stopping_) {
        const int client = ::accept(listen_fd_, nullptr, nullptr);
        if (client < 0) {
            if (stopping_ || errno == EBADF || errno == EINVAL) return;
            if (errno == EINTR) continue;
            throw_errno("accept");
        }
        serve_connection(client);
    }
}

void SessionListener::serve_connection(int client_fd) {
    LineQueue queue(queue_capacity_);

    // Reader thread: split the byte stream into lines.  A full queue exerts
    // backpressure on the socket rather than dropping frames, which keeps
    // the response seq numbering a single ordered stream.
    std::thread reader([&] {
        std::string pending;
        char buf[4096];
        for (;;) {
            const ssize_t n = ::recv(client_fd, buf, sizeof(buf), 0);
            if (n < 0 && errno == EINTR) continue;
            if (n <= 0) break;
            pending.append(buf, static_cast<std::size_t>(n));
            std::size_t start = 0;
            for (;;) {
                const std::size_t nl = pending.find('\n', start);
                if (nl == std::string::npos) break;
                std::string line = pending.substr(start, nl - start);
                if (!line.empty() && line.back() == '\r') line.pop_back();
                start = nl + 1;
                if (!line.empty() && !queue.push(std::move(line))) break;
            }
            pending.erase(0, start);
        }
        queue.close();
    });

    StimulusScheduler scheduler(config_);
    while (auto line = queue.pop()) {
        for (const auto& e : scheduler.on_line(*line)) {
            write_all(client_fd, encode_event(e) + "\n");
        }
    }
    for (const auto& e : scheduler.finish()) {
        write_all(client_fd, encode_event(e) + "\n");
    }

    ::shutdown(client_fd, SHUT_WR);
    reader.join();
    ::close(client_fd);
}

}  // namespace hapticsim
