#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "hdcos/errors.hpp"
#include "hdcos/sharing.hpp"

namespace hdcos {

// One party's share of a Beaver triple (a, b, c) with a*b = c as a raw ring
// product; truncation happens after the online combination, never in c.
struct TripleShare {
    RingVal a, b, c;
};

// Correlated randomness queue for one party. Both parties must consume in
// identical order; the counter is compared in runtime tests.
class TriplePool {
public:
    TriplePool() = default;
    TriplePool(std::uint8_t party, FixedCfg cfg, std::vector<TripleShare> triples)
        : party_(party), cfg_(cfg), triples_(std::move(triples)) {}

    TripleShare take() {
        if (next_ >= triples_.size())
            throw PoolExhaustedError("triple pool exhausted; offline phase under-provisioned");
        return triples_[next_++];
    }

    std::size_t consumed() const { return next_; }
    std::size_t remaining() const { return triples_.size() - next_; }
    std::size_t size() const { return triples_.size(); }
    const TripleShare& at(std::size_t i) const { return triples_.at(i); }
    std::uint8_t party() const { return party_; }
    const FixedCfg& cfg() const { return cfg_; }

private:
    std::uint8_t party_ = 0;
    FixedCfg cfg_;
    std::vector<TripleShare> triples_;
    std::size_t next_ = 0;
};

// Trusted-dealer offline phase: n triples with uniform a, b and c = a*b,
// each split into additive shares. Zero online rounds by construction.
std::pair<TriplePool, TriplePool> gen_triples(std::size_t n, Rng& rng, const FixedCfg& cfg);

// Triple-file format: "HDTR" magic, version u8, k u8, f u8, party u8,
// count u64 LE, then count * 3 8-byte LE values (a, b, c).
void write_triple_file(const std::string& path, const TriplePool& pool);
TriplePool read_triple_file(const std::string& path);

}  // namespace hdcos
