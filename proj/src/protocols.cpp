#include "hdcos/protocols.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "hdcos/detail/binio.hpp"
#include "hdcos/linalg.hpp"

namespace hdcos {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

PhaseLiftCfg PhaseLiftCfg::make(const FixedCfg& cfg) {
    PhaseLiftCfg p;
    p.j = u64(std::llround(std::ldexp(1.0, int(FixedCfg::k - cfg.f)) / kTwoPi));
    p.theta_scale = std::ldexp(kTwoPi, -int(FixedCfg::k));
    return p;
}

PolyCoeffs relu_polyfit3_coeffs() {
    // Exact least-squares fit of relu over 1001 uniform points on [-3, 3],
    // solved in rational arithmetic: c0 = 20916583/74296222,
    // c2 = 52187500/334332999; odd terms are 1/2 and 0 by grid symmetry.
    return {0.28152956418160807, 0.5, 0.15609437344232957, 0.0};
}

PolyCoeffs poly_fixture_from_json(const std::string& json_text) {
    const nlohmann::json j = nlohmann::json::parse(json_text);
    if (j.at("degree").get<int>() != 3) throw FormatError("poly fixture: expected degree 3");
    const auto& cs = j.at("coefficients");
    if (cs.size() != 4) throw FormatError("poly fixture: expected 4 coefficients");
    PolyCoeffs c;
    c.c0 = std::stod(cs[0].get<std::string>());
    c.c1 = std::stod(cs[1].get<std::string>());
    c.c2 = std::stod(cs[2].get<std::string>());
    c.c3 = std::stod(cs[3].get<std::string>());
    return c;
}

PolyCoeffs load_poly_fixture(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw FormatError("cannot open fixture: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return poly_fixture_from_json(ss.str());
}

std::string poly_fixture_to_json(const PolyCoeffs& c) {
    auto dec = [](double v) {
        std::ostringstream os;
        os.precision(17);
        os << v;
        return os.str();
    };
    const nlohmann::json j = {
        {"interval", {-3.0, 3.0}},
        {"degree", 3},
        {"points", 1001},
        {"coefficients", {dec(c.c0), dec(c.c1), dec(c.c2), dec(c.c3)}},
    };
    return j.dump(2);
}

Share truncate_share(const Share& s, unsigned f_bits) {
    if (s.party == 0) return {0, RingVal{s.val.v >> f_bits}, s.cfg};
    return {1, RingVal{0u - ((0u - s.val.v) >> f_bits)}, s.cfg};
}

std::vector<Share> truncate_shares(std::span<const Share> zs, unsigned f_bits) {
    std::vector<Share> out;
    out.reserve(zs.size());
    for (const Share& z : zs) out.push_back(truncate_share(z, f_bits));
    return out;
}

std::vector<Share> reshare_batch(PartyContext& ctx, std::span<const RingVal> values, int owner) {
    const std::uint8_t me = std::uint8_t(ctx.party());
    if (ctx.party() == owner) {
        std::vector<Share> mine;
        mine.reserve(values.size());
        std::vector<RingVal> send;
        send.reserve(values.size());
        for (const RingVal& v : values) {
            const RingVal r{ctx.rng()()};
            mine.push_back(Share{me, ring_sub(v, r), ctx.cfg()});
            send.push_back(r);
        }
        ctx.exchange_rings(ProtocolTag::reshare, send);
        return mine;
    }
    const std::vector<RingVal> recv = ctx.exchange_rings(ProtocolTag::reshare, {});
    std::vector<Share> mine;
    mine.reserve(recv.size());
    for (const RingVal& r : recv) mine.push_back(Share{me, r, ctx.cfg()});
    return mine;
}

std::pair<std::vector<Share>, std::vector<Share>> reshare_bidirectional(
    PartyContext& ctx, std::span<const RingVal> my_values) {
    const std::uint8_t me = std::uint8_t(ctx.party());
    std::vector<Share> keep;
    keep.reserve(my_values.size());
    std::vector<RingVal> send;
    send.reserve(my_values.size());
    for (const RingVal& v : my_values) {
        const RingVal r{ctx.rng()()};
        keep.push_back(Share{me, ring_sub(v, r), ctx.cfg()});
        send.push_back(r);
    }
    const std::vector<RingVal> recv = ctx.exchange_rings(ProtocolTag::reshare, send);
    if (recv.size() != my_values.size())
        throw DesyncError("reshare_bidirectional: peer vector length mismatch");
    std::vector<Share> theirs;
    theirs.reserve(recv.size());
    for (const RingVal& r : recv) theirs.push_back(Share{me, r, ctx.cfg()});
    if (me == 0) return {std::move(keep), std::move(theirs)};
    return {std::move(theirs), std::move(keep)};
}

namespace {

// Beaver combination without the fixed-point truncation; products carry 2f
// fractional bits. All openings for the batch travel in one exchange.
std::vector<Share> raw_mul_batch(PartyContext& ctx, std::span<const Share> xs,
                                 std::span<const Share> ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("mul batch: length mismatch");
    const std::size_t n = xs.size();
    const std::uint8_t me = std::uint8_t(ctx.party());

    std::vector<TripleShare> triples(n);
    std::vector<RingVal> opens(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        triples[i] = ctx.pool().take();
        opens[i] = ring_sub(xs[i].val, triples[i].a);       // share of x - a
        opens[n + i] = ring_sub(ys[i].val, triples[i].b);   // share of y - b
    }
    const std::vector<RingVal> peer = ctx.exchange_rings(ProtocolTag::beaver_open, opens);
    if (peer.size() != 2 * n) throw DesyncError("beaver opening length mismatch");

    std::vector<Share> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const RingVal e = ring_add(opens[i], peer[i]);          // public x - a
        const RingVal f = ring_add(opens[n + i], peer[n + i]);  // public y - b
        RingVal z = ring_add(triples[i].c,
                             ring_add(ring_mul(e, triples[i].b), ring_mul(f, triples[i].a)));
        if (me == 0) z = ring_add(z, ring_mul(e, f));
        out.push_back(Share{me, z, ctx.cfg()});
    }
    return out;
}

double mul_debug_bound(const FixedCfg& cfg) {
    // conservative per-factor bound keeping the raw product inside the ring
    return std::ldexp(1.0, (63 - 2 * int(cfg.f)) / 2);
}

}  // namespace

std::vector<Share> secure_mul_batch(PartyContext& ctx, std::span<const Share> xs,
                                    std::span<const Share> ys) {
    ctx.debug_check_range("secure_mul.x", xs, mul_debug_bound(ctx.cfg()));
    ctx.debug_check_range("secure_mul.y", ys, mul_debug_bound(ctx.cfg()));
    const std::vector<Share> raw = raw_mul_batch(ctx, xs, ys);
    return truncate_shares(raw, ctx.cfg().f);
}

std::vector<Share> secure_square(PartyContext& ctx, std::span<const Share> xs) {
    return secure_mul_batch(ctx, xs, xs);
}

std::vector<Share> secure_cosine(PartyContext& ctx, std::span<const Share> xs) {
    ctx.debug_check_range("secure_cosine.input", xs, PhaseLiftCfg::max_abs_input);
    const std::size_t n = xs.size();
    const PhaseLiftCfg lift = PhaseLiftCfg::make(ctx.cfg());

    // Step 1: local trig on the lifted angle of this party's own share.
    std::vector<RingVal> local(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        const double theta = lift.theta(xs[i].val);
        local[i] = encode(std::cos(theta), ctx.cfg());
        local[n + i] = encode(std::sin(theta), ctx.cfg());
    }

    // Step 2: both parties reshare their cos/sin vectors in one exchange.
    auto [p0_vals, p1_vals] = reshare_bidirectional(ctx, local);

    // Step 3: cos0*cos1 and sin0*sin1 as a single Beaver batch.
    std::vector<Share> lhs(p0_vals.begin(), p0_vals.end());
    std::vector<Share> rhs(p1_vals.begin(), p1_vals.end());
    const std::vector<Share> prods = secure_mul_batch(ctx, lhs, rhs);

    // Step 4: cos(x0 + x1) = cos cos - sin sin, locally.
    std::vector<Share> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(share_sub(prods[i], prods[n + i]));
    return out;
}

std::vector<Share> secure_relu_polyfit3(PartyContext& ctx, std::span<const Share> xs,
                                        const PolyCoeffs& coeffs) {
    const std::vector<Share> x2 = secure_square(ctx, xs);
    const std::vector<Share> x3 = secure_mul_batch(ctx, xs, x2);
    const RingVal c0 = encode(coeffs.c0, ctx.cfg());
    std::vector<Share> out;
    out.reserve(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        Share acc = share_mul_public(xs[i], coeffs.c1);
        acc = share_add(acc, share_mul_public(x2[i], coeffs.c2));
        acc = share_add(acc, share_mul_public(x3[i], coeffs.c3));
        out.push_back(share_add_public(acc, c0));
    }
    return out;
}

namespace {

// Row sums of raw products truncated once per output element.
std::vector<Share> sum_rows_and_truncate(PartyContext& ctx, const std::vector<Share>& raw,
                                         std::size_t rows, std::size_t cols) {
    std::vector<Share> out;
    out.reserve(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        RingVal acc{};
        for (std::size_t c = 0; c < cols; ++c) acc = ring_add(acc, raw[r * cols + c].val);
        out.push_back(truncate_share(Share{std::uint8_t(ctx.party()), acc, ctx.cfg()}, ctx.cfg().f));
    }
    return out;
}

}  // namespace

std::vector<Share> secure_matvec_dense(PartyContext& ctx, const ShareMat& W,
                                       std::span<const Share> x) {
    if (W.cols != x.size()) throw std::invalid_argument("matvec: shape mismatch");
    std::vector<Share> xs, ys;
    xs.reserve(W.rows * W.cols);
    ys.reserve(W.rows * W.cols);
    for (std::size_t r = 0; r < W.rows; ++r)
        for (std::size_t c = 0; c < W.cols; ++c) {
            xs.push_back(W.at(r, c));
            ys.push_back(x[c]);
        }
    const std::vector<Share> raw = raw_mul_batch(ctx, xs, ys);
    return sum_rows_and_truncate(ctx, raw, W.rows, W.cols);
}

std::vector<Share> secure_hd_layer(PartyContext& ctx, std::span<const Share> diag,
                                   std::span<const Share> x) {
    const std::size_t d = x.size();
    if (diag.size() != d) throw std::invalid_argument("hd layer: diag/input length mismatch");
    if (!is_pow2(d))
        throw std::invalid_argument("hd layer: dimension must be a power of two (pad with zeros)");

    std::vector<Share> prod = secure_mul_batch(ctx, diag, x);

    // Hadamard part is public and linear: butterfly directly on own shares,
    // then one public scale by 1/sqrt(d). No communication.
    std::vector<RingVal> vals(d);
    for (std::size_t i = 0; i < d; ++i) vals[i] = prod[i].val;
    fwht_butterfly(vals.data(), d);
    const double scale = 1.0 / std::sqrt(double(d));
    std::vector<Share> out;
    out.reserve(d);
    for (std::size_t i = 0; i < d; ++i)
        out.push_back(share_mul_public(Share{std::uint8_t(ctx.party()), vals[i], ctx.cfg()}, scale));
    return out;
}

std::vector<Share> secure_lowrank_matvec(PartyContext& ctx, const ShareMat& V1,
                                         const ShareMat& V2, std::span<const Share> x) {
    if (V1.rows != 2 || V2.rows != 2) throw std::invalid_argument("lowrank: V1, V2 must have 2 rows");
    if (V2.cols != x.size()) throw std::invalid_argument("lowrank: shape mismatch");
    const std::vector<Share> u = secure_matvec_dense(ctx, V2, x);  // 2d mults, round 1

    const std::size_t k = V1.cols;
    std::vector<Share> xs, ys;
    xs.reserve(2 * k);
    ys.reserve(2 * k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t r = 0; r < 2; ++r) {
            xs.push_back(V1.at(r, i));
            ys.push_back(u[r]);
        }
    const std::vector<Share> raw = raw_mul_batch(ctx, xs, ys);  // 2k mults, round 2
    return sum_rows_and_truncate(ctx, raw, k, 2);
}

namespace {

ShareMat pad_cols(const ShareMat& X, std::size_t target, std::uint8_t party, const FixedCfg& cfg) {
    if (X.cols == target) return X;
    ShareMat out;
    out.rows = X.rows;
    out.cols = target;
    out.data.assign(X.rows * target, Share{party, RingVal{0}, cfg});
    for (std::size_t r = 0; r < X.rows; ++r)
        for (std::size_t c = 0; c < X.cols; ++c) out.at(r, c) = X.at(r, c);
    return out;
}

// Batched linear layer: all samples' products go into single rounds so the
// round count never depends on the batch size.
ShareMat linear_layer_batch(PartyContext& ctx, const SharedLayer& layer, const ShareMat& X) {
    const LayerShape& sh = layer.shape;
    const std::uint8_t me = std::uint8_t(ctx.party());
    const std::size_t n = X.rows;
    ShareMat out;
    out.rows = n;
    out.cols = std::size_t(sh.width);

    switch (sh.structure) {
        case Structure::dense: {
            const std::size_t k = std::size_t(sh.width), d = std::size_t(sh.in);
            std::vector<Share> xs, ys;
            xs.reserve(n * k * d);
            ys.reserve(n * k * d);
            for (std::size_t s = 0; s < n; ++s)
                for (std::size_t r = 0; r < k; ++r)
                    for (std::size_t c = 0; c < d; ++c) {
                        xs.push_back(layer.W.at(r, c));
                        ys.push_back(X.at(s, c));
                    }
            const std::vector<Share> raw = raw_mul_batch(ctx, xs, ys);
            out.data = sum_rows_and_truncate(ctx, raw, n * k, d);
            break;
        }
        case Structure::hd: {
            const std::size_t d = std::size_t(sh.inner);
            const ShareMat Xp = pad_cols(X, d, me, ctx.cfg());
            std::vector<Share> xs, ys;
            xs.reserve(n * d);
            ys.reserve(n * d);
            for (std::size_t s = 0; s < n; ++s)
                for (std::size_t c = 0; c < d; ++c) {
                    xs.push_back(layer.diag[c]);
                    ys.push_back(Xp.at(s, c));
                }
            std::vector<Share> prod = secure_mul_batch(ctx, xs, ys);
            const double scale = 1.0 / std::sqrt(double(d));
            out.data.reserve(n * std::size_t(sh.width));
            std::vector<RingVal> row(d);
            for (std::size_t s = 0; s < n; ++s) {
                for (std::size_t c = 0; c < d; ++c) row[c] = prod[s * d + c].val;
                fwht_butterfly(row.data(), d);
                for (std::size_t c = 0; c < std::size_t(sh.width); ++c)
                    out.data.push_back(share_mul_public(Share{me, row[c], ctx.cfg()}, scale));
            }
            break;
        }
        case Structure::lowrank: {
            const std::size_t d = std::size_t(sh.in), k = std::size_t(sh.width);
            std::vector<Share> xs, ys;
            xs.reserve(n * 2 * d);
            ys.reserve(n * 2 * d);
            for (std::size_t s = 0; s < n; ++s)
                for (std::size_t r = 0; r < 2; ++r)
                    for (std::size_t c = 0; c < d; ++c) {
                        xs.push_back(layer.V2.at(r, c));
                        ys.push_back(X.at(s, c));
                    }
            const std::vector<Share> raw_u = raw_mul_batch(ctx, xs, ys);
            const std::vector<Share> u = sum_rows_and_truncate(ctx, raw_u, n * 2, d);

            xs.clear();
            ys.clear();
            xs.reserve(n * 2 * k);
            ys.reserve(n * 2 * k);
            for (std::size_t s = 0; s < n; ++s)
                for (std::size_t i = 0; i < k; ++i)
                    for (std::size_t r = 0; r < 2; ++r) {
                        xs.push_back(layer.V1.at(r, i));
                        ys.push_back(u[s * 2 + r]);
                    }
            const std::vector<Share> raw_y = raw_mul_batch(ctx, xs, ys);
            out.data = sum_rows_and_truncate(ctx, raw_y, n * k, 2);
            break;
        }
        default:
            throw CapabilityError("structure " + to_string(sh.structure) +
                                  " is plaintext-only; no MPC protocol");
    }

    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t c = 0; c < out.cols; ++c)
            out.at(s, c) = share_add(out.at(s, c), layer.bias[c]);
    return out;
}

ShareMat activation_batch(PartyContext& ctx, Activation act, const ShareMat& Z) {
    ShareMat out = Z;
    switch (act) {
        case Activation::none:
            return out;
        case Activation::square:
            out.data = secure_square(ctx, Z.data);
            return out;
        case Activation::cosine:
            out.data = secure_cosine(ctx, Z.data);
            return out;
        case Activation::relu_polyfit3:
            out.data = secure_relu_polyfit3(ctx, Z.data, relu_polyfit3_coeffs());
            return out;
        default:
            throw CapabilityError("activation " + to_string(act) +
                                  " is plaintext-only; no MPC protocol");
    }
}

}  // namespace

ShareMat secure_forward(PartyContext& ctx, const SharedModel& model, const ShareMat& inputs) {
    ShareMat X = inputs;
    for (const SharedLayer& layer : model.layers) {
        if (std::size_t(layer.shape.in) != X.cols)
            throw std::invalid_argument("secure_forward: layer input width mismatch");
        const ShareMat Z = linear_layer_batch(ctx, layer, X);
        X = activation_batch(ctx, layer.shape.activation, Z);
    }
    return X;
}

}  // namespace hdcos
