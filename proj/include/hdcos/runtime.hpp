#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "hdcos/dealer.hpp"
#include "hdcos/sharing.hpp"
#include "hdcos/transport.hpp"

namespace hdcos {

// Wire-level protocol tags. One tag per kind of exchange; the per-protocol
// cost breakdown is keyed by these names.
enum class ProtocolTag : std::uint16_t {
    reshare = 1,      // resharing of locally-known plaintext values
    beaver_open = 2,  // masked openings (x - a, y - b)
    output = 3,       // output share delivery
    barrier = 4,      // payloadless synchronization
};
const char* protocol_name(ProtocolTag tag);

struct ProtoCost {
    std::uint64_t rounds = 0;
    std::uint64_t bytes = 0;
    bool operator==(const ProtoCost&) const = default;
};

// Online cost accounting per party, following the convention that one
// synchronized bidirectional exchange is one online round and only payload
// bytes count (frame headers are transport overhead, identical across
// transports).
struct CostMeter {
    std::uint64_t online_rounds = 0;
    std::uint64_t bytes_sent = 0;
    std::map<std::string, ProtoCost> by_protocol;

    void add_exchange(ProtocolTag tag, std::size_t payload_bytes) {
        online_rounds += 1;
        bytes_sent += payload_bytes;
        auto& c = by_protocol[protocol_name(tag)];
        c.rounds += 1;
        c.bytes += payload_bytes;
    }

    bool operator==(const CostMeter&) const = default;
};

// Cross-party shadow checker for debug runs. Parties post decoded views of
// shares at named sites; once both halves of a site/sequence pair are
// present the secret is reconstructed and range-checked. Violations poison
// the run and surface as RangeError at the next exchange or at run end.
class DebugOracle {
public:
    void post(const std::string& site, int party, std::span<const Share> vals, double bound);
    void throw_if_poisoned() const;

private:
    struct Pending {
        std::vector<RingVal> vals;
        FixedCfg cfg;
    };
    mutable std::mutex mu_;
    std::map<std::pair<std::string, std::uint64_t>, Pending> pending_;
    std::map<std::string, std::array<std::uint64_t, 2>, std::less<>> seq_;
    std::string violation_;
};

// Serializes the two party threads so at most one executes program code at
// a time (lock released only while blocked in recv). Deterministic results
// never depend on this; it exists for clean single-stepping.
class RunGate {
public:
    void attach() { mu_.lock(); }
    void detach() { mu_.unlock(); }
    void yield_begin() { mu_.unlock(); }
    void yield_end() { mu_.lock(); }

private:
    std::mutex mu_;
};

// Per-party execution context handed to protocol code. Protocols are
// written once and run symmetrically on both parties; the only cross-party
// interaction is exchange().
class PartyContext {
public:
    PartyContext(int party, FixedCfg cfg, TriplePool& pool, Transport& transport,
                 std::uint64_t seed, RunGate* gate = nullptr, DebugOracle* oracle = nullptr);

    int party() const { return party_; }
    const FixedCfg& cfg() const { return cfg_; }
    TriplePool& pool() { return pool_; }
    Rng& rng() { return rng_; }
    CostMeter& meter() { return meter_; }
    std::uint32_t round_index() const { return round_; }

    // One synchronized exchange. Party 0 sends its payload first and then
    // receives; party 1 receives first and responds (the request/response
    // shape of one RPC). Both sends together count as ONE online round;
    // each party's meter charges only the bytes it sent.
    std::vector<std::uint8_t> exchange(ProtocolTag tag, std::span<const std::uint8_t> payload);
    std::vector<RingVal> exchange_rings(ProtocolTag tag, std::span<const RingVal> vals);

    // No-op unless a debug oracle is attached.
    void debug_check_range(const std::string& site, std::span<const Share> vals, double bound);

private:
    int party_;
    FixedCfg cfg_;
    TriplePool& pool_;
    Transport& transport_;
    Rng rng_;
    CostMeter meter_;
    std::uint32_t round_ = 0;
    RunGate* gate_;
    DebugOracle* oracle_;
};

using PartyProgram = std::function<std::vector<Share>(PartyContext&, std::span<const Share>)>;

enum class Scheduler { threads, lockstep };

struct PartyRunResult {
    std::vector<Share> outputs;
    CostMeter meter;
    std::size_t triples_consumed = 0;
};

// Drives one endpoint over an existing transport (the TCP two-process mode).
PartyRunResult run_party(const PartyProgram& prog, std::span<const Share> inputs,
                         TriplePool& pool, Transport& transport, int party, FixedCfg cfg,
                         std::uint64_t seed, RunGate* gate = nullptr,
                         DebugOracle* oracle = nullptr);

struct TwoPartyRun {
    std::array<std::vector<Share>, 2> outputs;
    std::array<CostMeter, 2> meters;
    std::array<std::size_t, 2> triples_consumed{};
};

// Runs both party state machines to completion. With null transports an
// in-process pair is created; pass TCP endpoints to exercise the real wire.
TwoPartyRun run_two_party(const PartyProgram& prog,
                          const std::array<std::vector<Share>, 2>& inputs,
                          std::array<TriplePool, 2>& pools, FixedCfg cfg, std::uint64_t seed,
                          Scheduler sched = Scheduler::threads, DebugOracle* oracle = nullptr,
                          std::array<Transport*, 2> transports = {nullptr, nullptr});

// Party rng seeds derive from the run seed so results are reproducible and
// the two streams are independent.
std::uint64_t party_seed(std::uint64_t run_seed, int party);

}  // namespace hdcos
