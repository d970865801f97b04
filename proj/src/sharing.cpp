#include "hdcos/sharing.hpp"

#include "hdcos/detail/binio.hpp"
#include "hdcos/errors.hpp"

namespace hdcos {

std::pair<std::vector<Share>, std::vector<Share>> split_vec(std::span<const RingVal> xs,
                                                            Rng& rng, const FixedCfg& cfg) {
    std::vector<Share> s0, s1;
    s0.reserve(xs.size());
    s1.reserve(xs.size());
    for (const RingVal& x : xs) {
        auto [a, b] = split(x, rng, cfg);
        s0.push_back(a);
        s1.push_back(b);
    }
    return {std::move(s0), std::move(s1)};
}

std::vector<RingVal> reconstruct_vec(std::span<const Share> s0, std::span<const Share> s1) {
    if (s0.size() != s1.size()) throw std::invalid_argument("reconstruct_vec: length mismatch");
    std::vector<RingVal> out(s0.size());
    for (std::size_t i = 0; i < s0.size(); ++i) out[i] = reconstruct(s0[i], s1[i]);
    return out;
}

std::vector<RingVal> encode_vec(std::span<const double> xs, const FixedCfg& cfg) {
    std::vector<RingVal> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = encode(xs[i], cfg);
    return out;
}

std::vector<double> decode_vec(std::span<const RingVal> rs, const FixedCfg& cfg) {
    std::vector<double> out(rs.size());
    for (std::size_t i = 0; i < rs.size(); ++i) out[i] = decode(rs[i], cfg);
    return out;
}

namespace {
constexpr char kShareMagic[4] = {'H', 'D', 'S', 'H'};
constexpr std::uint8_t kShareVersion = 1;
}  // namespace

void write_share_file(const std::string& path, std::span<const Share> shares) {
    if (shares.empty()) throw std::invalid_argument("write_share_file: empty share vector");
    const std::uint8_t party = shares.front().party;
    const FixedCfg cfg = shares.front().cfg;
    for (const Share& s : shares)
        if (s.party != party || !(s.cfg == cfg))
            throw std::invalid_argument("write_share_file: mixed party or cfg");

    std::vector<std::uint8_t> buf;
    buf.insert(buf.end(), kShareMagic, kShareMagic + 4);
    buf.push_back(kShareVersion);
    buf.push_back(std::uint8_t(FixedCfg::k));
    buf.push_back(std::uint8_t(cfg.f));
    buf.push_back(party);
    detail::put_u64le(buf, shares.size());
    for (const Share& s : shares) detail::put_u64le(buf, s.val.v);

    auto f = detail::open_out(path);
    detail::write_bytes(f, buf);
}

std::vector<Share> read_share_file(const std::string& path) {
    auto f = detail::open_in(path);
    auto head = detail::read_bytes(f, 16, "share file header");
    if (std::memcmp(head.data(), kShareMagic, 4) != 0)
        throw FormatError("share file: bad magic");
    if (head[4] != kShareVersion) throw FormatError("share file: unsupported version");
    if (head[5] != FixedCfg::k) throw FormatError("share file: unsupported ring width");
    FixedCfg cfg{};
    cfg.f = head[6];
    validate(cfg);
    const std::uint8_t party = head[7];
    if (party > 1) throw FormatError("share file: bad party id");
    const std::uint64_t count = detail::get_u64le(head.data() + 8);

    auto body = detail::read_bytes(f, count * 8, "share file body");
    std::vector<Share> shares(count);
    for (std::uint64_t i = 0; i < count; ++i)
        shares[i] = Share{party, RingVal{detail::get_u64le(body.data() + 8 * i)}, cfg};
    return shares;
}

}  // namespace hdcos
