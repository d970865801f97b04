#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "hdcos/errors.hpp"

namespace hdcos {

// Unit of traffic between the parties. The round index and tag let the
// receiver detect protocol desync instead of silently consuming bytes
// meant for another step.
struct Frame {
    std::uint32_t round_index = 0;
    std::uint16_t protocol_tag = 0;
    std::vector<std::uint8_t> payload;
};

// Ordered, reliable, duplex frame channel between party 0 and party 1.
class Transport {
public:
    virtual ~Transport() = default;
    virtual void send(const Frame& f) = 0;
    virtual Frame recv() = 0;
    // Abort the channel; a peer blocked in recv wakes with TransportError.
    virtual void shutdown() {}
};

// In-process channel pair backed by two blocking queues. Default transport
// for tests and single-process inference.
std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> make_inproc_pair(
    std::chrono::milliseconds timeout = std::chrono::seconds(30));

// TCP endpoint. Wire frame: round_index u32 LE | protocol_tag u16 LE |
// payload_len u32 LE | payload bytes. Addresses are "host:port".
std::unique_ptr<Transport> tcp_listen(const std::string& bind_addr,
                                      std::chrono::milliseconds timeout = std::chrono::seconds(30));
std::unique_ptr<Transport> tcp_connect(const std::string& peer_addr,
                                       std::chrono::milliseconds timeout = std::chrono::seconds(30));

// Decorator that copies every sent/received frame into caller-owned logs;
// used by the transcript audit.
class RecordingTransport : public Transport {
public:
    RecordingTransport(Transport& inner, std::vector<Frame>* sent, std::vector<Frame>* received)
        : inner_(inner), sent_(sent), received_(received) {}

    void send(const Frame& f) override {
        if (sent_) sent_->push_back(f);
        inner_.send(f);
    }
    Frame recv() override {
        Frame f = inner_.recv();
        if (received_) received_->push_back(f);
        return f;
    }

private:
    Transport& inner_;
    std::vector<Frame>* sent_;
    std::vector<Frame>* received_;
};

}  // namespace hdcos
