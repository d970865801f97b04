#include "hdcos/dealer.hpp"

#include <cstring>

#include "hdcos/detail/binio.hpp"

namespace hdcos {

std::pair<TriplePool, TriplePool> gen_triples(std::size_t n, Rng& rng, const FixedCfg& cfg) {
    std::vector<TripleShare> t0(n), t1(n);
    for (std::size_t i = 0; i < n; ++i) {
        const RingVal a{rng()};
        const RingVal b{rng()};
        const RingVal c = ring_mul(a, b);
        const RingVal a1{rng()}, b1{rng()}, c1{rng()};
        t0[i] = {ring_sub(a, a1), ring_sub(b, b1), ring_sub(c, c1)};
        t1[i] = {a1, b1, c1};
    }
    return {TriplePool(0, cfg, std::move(t0)), TriplePool(1, cfg, std::move(t1))};
}

namespace {
constexpr char kTripleMagic[4] = {'H', 'D', 'T', 'R'};
constexpr std::uint8_t kTripleVersion = 1;
}  // namespace

void write_triple_file(const std::string& path, const TriplePool& pool) {
    std::vector<std::uint8_t> buf;
    buf.insert(buf.end(), kTripleMagic, kTripleMagic + 4);
    buf.push_back(kTripleVersion);
    buf.push_back(std::uint8_t(FixedCfg::k));
    buf.push_back(std::uint8_t(pool.cfg().f));
    buf.push_back(pool.party());
    detail::put_u64le(buf, pool.size());

    std::vector<std::uint8_t> body;
    body.reserve(pool.size() * 24);
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const TripleShare& t = pool.at(i);
        detail::put_u64le(body, t.a.v);
        detail::put_u64le(body, t.b.v);
        detail::put_u64le(body, t.c.v);
    }

    auto f = detail::open_out(path);
    detail::write_bytes(f, buf);
    detail::write_bytes(f, body);
}

TriplePool read_triple_file(const std::string& path) {
    auto f = detail::open_in(path);
    auto head = detail::read_bytes(f, 16, "triple file header");
    if (std::memcmp(head.data(), kTripleMagic, 4) != 0)
        throw FormatError("triple file: bad magic");
    if (head[4] != kTripleVersion) throw FormatError("triple file: unsupported version");
    if (head[5] != FixedCfg::k) throw FormatError("triple file: unsupported ring width");
    FixedCfg cfg{};
    cfg.f = head[6];
    validate(cfg);
    const std::uint8_t party = head[7];
    if (party > 1) throw FormatError("triple file: bad party id");
    const std::uint64_t count = detail::get_u64le(head.data() + 8);

    auto body = detail::read_bytes(f, count * 24, "triple file body");
    std::vector<TripleShare> triples(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        const std::uint8_t* p = body.data() + 24 * i;
        triples[i] = {RingVal{detail::get_u64le(p)}, RingVal{detail::get_u64le(p + 8)},
                      RingVal{detail::get_u64le(p + 16)}};
    }
    return TriplePool(party, cfg, std::move(triples));
}

}  // namespace hdcos
