#include "hdcos/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>
#include <thread>

#include "hdcos/detail/binio.hpp"

namespace hdcos {

namespace {

class BlockingQueue {
public:
    explicit BlockingQueue(std::chrono::milliseconds timeout) : timeout_(timeout) {}

    void push(Frame f) {
        {
            std::lock_guard lk(mu_);
            if (closed_) throw TransportError("inproc channel closed");
            q_.push_back(std::move(f));
        }
        cv_.notify_one();
    }

    Frame pop() {
        std::unique_lock lk(mu_);
        if (!cv_.wait_for(lk, timeout_, [&] { return !q_.empty() || closed_; }))
            throw TimeoutError("inproc recv timed out");
        if (q_.empty()) throw TransportError("inproc channel closed by peer");
        Frame f = std::move(q_.front());
        q_.pop_front();
        return f;
    }

    void close() {
        {
            std::lock_guard lk(mu_);
            closed_ = true;
        }
        cv_.notify_all();
    }

private:
    std::mutex mu_;
    std::condition_variable cv_;
    std::deque<Frame> q_;
    bool closed_ = false;
    std::chrono::milliseconds timeout_;
};

struct InProcShared {
    BlockingQueue to_p1;  // party 0 -> party 1
    BlockingQueue to_p0;  // party 1 -> party 0
    InProcShared(std::chrono::milliseconds t) : to_p1(t), to_p0(t) {}
};

class InProcTransport : public Transport {
public:
    InProcTransport(std::shared_ptr<InProcShared> shared, int party)
        : shared_(std::move(shared)), party_(party) {}

    ~InProcTransport() override {
        // wake a peer blocked on a vanished endpoint
        (party_ == 0 ? shared_->to_p1 : shared_->to_p0).close();
    }

    void send(const Frame& f) override {
        (party_ == 0 ? shared_->to_p1 : shared_->to_p0).push(f);
    }

    Frame recv() override { return (party_ == 0 ? shared_->to_p0 : shared_->to_p1).pop(); }

    void shutdown() override {
        shared_->to_p0.close();
        shared_->to_p1.close();
    }

private:
    std::shared_ptr<InProcShared> shared_;
    int party_;
};

std::pair<std::string, std::uint16_t> parse_addr(const std::string& addr) {
    const auto colon = addr.rfind(':');
    if (colon == std::string::npos) throw TransportError("address must be host:port, got " + addr);
    const std::string host = addr.substr(0, colon);
    const int port = std::stoi(addr.substr(colon + 1));
    if (port <= 0 || port > 65535) throw TransportError("bad port in " + addr);
    return {host.empty() ? "0.0.0.0" : host, std::uint16_t(port)};
}

class TcpTransport : public Transport {
public:
    TcpTransport(int fd, std::chrono::milliseconds timeout) : fd_(fd) {
        timeval tv{};
        tv.tv_sec = timeout.count() / 1000;
        tv.tv_usec = (timeout.count() % 1000) * 1000;
        setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
        int one = 1;
        setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    }

    ~TcpTransport() override {
        if (fd_ >= 0) ::close(fd_);
    }

    void shutdown() override { ::shutdown(fd_, SHUT_RDWR); }

    void send(const Frame& f) override {
        std::vector<std::uint8_t> head;
        detail::put_u32le(head, f.round_index);
        detail::put_u16le(head, f.protocol_tag);
        detail::put_u32le(head, std::uint32_t(f.payload.size()));
        send_all(head.data(), head.size());
        if (!f.payload.empty()) send_all(f.payload.data(), f.payload.size());
    }

    Frame recv() override {
        std::uint8_t head[10];
        recv_all(head, sizeof(head));
        Frame f;
        f.round_index = detail::get_u32le(head);
        f.protocol_tag = detail::get_u16le(head + 4);
        f.payload.resize(detail::get_u32le(head + 6));
        if (!f.payload.empty()) recv_all(f.payload.data(), f.payload.size());
        return f;
    }

private:
    void send_all(const std::uint8_t* p, std::size_t n) {
        while (n > 0) {
            const ssize_t w = ::send(fd_, p, n, MSG_NOSIGNAL);
            if (w < 0) {
                if (errno == EINTR) continue;
                throw TransportError(std::string("tcp send failed: ") + std::strerror(errno));
            }
            p += w;
            n -= std::size_t(w);
        }
    }

    void recv_all(std::uint8_t* p, std::size_t n) {
        while (n > 0) {
            const ssize_t r = ::recv(fd_, p, n, 0);
            if (r == 0) throw TransportError("tcp connection closed by peer");
            if (r < 0) {
                if (errno == EINTR) continue;
                if (errno == EAGAIN || errno == EWOULDBLOCK)
                    throw TimeoutError("tcp recv timed out");
                throw TransportError(std::string("tcp recv failed: ") + std::strerror(errno));
            }
            p += r;
            n -= std::size_t(r);
        }
    }

    int fd_;
};

sockaddr_in resolve(const std::string& host, std::uint16_t port) {
    sockaddr_in sa{};
    sa.sin_family = AF_INET;
    sa.sin_port = htons(port);
    if (inet_pton(AF_INET, host.c_str(), &sa.sin_addr) != 1) {
        addrinfo hints{}, *res = nullptr;
        hints.ai_family = AF_INET;
        hints.ai_socktype = SOCK_STREAM;
        if (getaddrinfo(host.c_str(), nullptr, &hints, &res) != 0 || !res)
            throw TransportError("cannot resolve host " + host);
        sa.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
        freeaddrinfo(res);
    }
    return sa;
}

}  // namespace

std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> make_inproc_pair(
    std::chrono::milliseconds timeout) {
    auto shared = std::make_shared<InProcShared>(timeout);
    return {std::make_unique<InProcTransport>(shared, 0),
            std::make_unique<InProcTransport>(shared, 1)};
}

std::unique_ptr<Transport> tcp_listen(const std::string& bind_addr,
                                      std::chrono::milliseconds timeout) {
    auto [host, port] = parse_addr(bind_addr);
    const int lfd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (lfd < 0) throw TransportError("socket() failed");
    int one = 1;
    setsockopt(lfd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in sa = resolve(host, port);
    if (::bind(lfd, reinterpret_cast<sockaddr*>(&sa), sizeof(sa)) != 0) {
        ::close(lfd);
        throw TransportError("bind to " + bind_addr + " failed: " + std::strerror(errno));
    }
    if (::listen(lfd, 1) != 0) {
        ::close(lfd);
        throw TransportError("listen failed");
    }
    timeval tv{};
    tv.tv_sec = timeout.count() / 1000;
    tv.tv_usec = (timeout.count() % 1000) * 1000;
    setsockopt(lfd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
    const int fd = ::accept(lfd, nullptr, nullptr);
    ::close(lfd);
    if (fd < 0) {
        if (errno == EAGAIN || errno == EWOULDBLOCK)
            throw TimeoutError("accept timed out on " + bind_addr);
        throw TransportError("accept failed");
    }
    return std::make_unique<TcpTransport>(fd, timeout);
}

std::unique_ptr<Transport> tcp_connect(const std::string& peer_addr,
                                       std::chrono::milliseconds timeout) {
    auto [host, port] = parse_addr(peer_addr);
    const sockaddr_in sa = resolve(host, port);
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    for (;;) {
        const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
        if (fd < 0) throw TransportError("socket() failed");
        if (::connect(fd, reinterpret_cast<const sockaddr*>(&sa), sizeof(sa)) == 0)
            return std::make_unique<TcpTransport>(fd, timeout);
        ::close(fd);
        if (std::chrono::steady_clock::now() >= deadline)
            throw TimeoutError("connect to " + peer_addr + " timed out");
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
}

}  // namespace hdcos
