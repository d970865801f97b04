#pragma once

#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hdcos/fixed_ring.hpp"

namespace hdcos {

// One party's additive share of a ring value. Two shares with val_0 + val_1
// = encode(x) mod 2^64 represent the secret x; a single share is uniform and
// carries no information about x.
struct Share {
    std::uint8_t party = 0;
    RingVal val;
    FixedCfg cfg;
};

using Rng = std::mt19937_64;

// share_1 is drawn uniformly from the ring, share_0 = x - share_1.
inline std::pair<Share, Share> split(RingVal x, Rng& rng, const FixedCfg& cfg) {
    const RingVal r{rng()};
    return {Share{0, ring_sub(x, r), cfg}, Share{1, r, cfg}};
}

inline RingVal reconstruct(const Share& s0, const Share& s1) {
    if (s0.party != 0 || s1.party != 1)
        throw std::invalid_argument("reconstruct: party mismatch");
    if (!(s0.cfg == s1.cfg))
        throw std::invalid_argument("reconstruct: fixed-point cfg mismatch");
    return ring_add(s0.val, s1.val);
}

// Local linear operations: no rounds, no bytes.
inline Share share_add(const Share& a, const Share& b) {
    if (a.party != b.party) throw std::invalid_argument("share_add: party mismatch");
    return {a.party, ring_add(a.val, b.val), a.cfg};
}

inline Share share_sub(const Share& a, const Share& b) {
    if (a.party != b.party) throw std::invalid_argument("share_sub: party mismatch");
    return {a.party, ring_sub(a.val, b.val), a.cfg};
}

inline Share share_neg(const Share& a) { return {a.party, ring_neg(a.val), a.cfg}; }

// Public constants are carried by party 0 so the share sum stays exact.
inline Share share_add_public(const Share& a, RingVal c) {
    return {a.party, a.party == 0 ? ring_add(a.val, c) : a.val, a.cfg};
}

// Both parties scale their share by the public real. Each side rounds once,
// so the reconstructed value is within 1 ulp of round(x*c); as with local
// truncation there is a wrap failure of probability ~|x|*2^f / 2^63.
inline Share share_mul_public(const Share& a, double c) {
    return {a.party, ring_mul_pub_real(a.val, c), a.cfg};
}

// Vector helpers.
std::pair<std::vector<Share>, std::vector<Share>> split_vec(std::span<const RingVal> xs,
                                                            Rng& rng, const FixedCfg& cfg);
std::vector<RingVal> reconstruct_vec(std::span<const Share> s0, std::span<const Share> s1);
std::vector<RingVal> encode_vec(std::span<const double> xs, const FixedCfg& cfg);
std::vector<double> decode_vec(std::span<const RingVal> rs, const FixedCfg& cfg);

// Share-file format: "HDSH" magic, version u8, k u8, f u8, party u8,
// count u64 LE, then count 8-byte LE ring values.
void write_share_file(const std::string& path, std::span<const Share> shares);
std::vector<Share> read_share_file(const std::string& path);

}  // namespace hdcos
