#include <json.hpp>

#include <cstring>

#include "hdcos/detail/binio.hpp"
#include "hdcos/nn.hpp"

namespace hdcos {

namespace {
constexpr std::uint32_t kModelVersion = 1;

nlohmann::json spec_to_json_obj(const ModelSpec& spec) {
    return nlohmann::json::parse(model_spec_to_json(spec));
}
}  // namespace

void save_model(const ParamStore& params, const std::string& path, unsigned f_bits) {
    const nlohmann::json header = {
        {"version", kModelVersion},
        {"f_bits", f_bits},
        {"spec", spec_to_json_obj(params.spec)},
    };
    const std::string htext = header.dump();

    std::vector<std::uint8_t> buf;
    detail::put_u32le(buf, std::uint32_t(htext.size()));
    buf.insert(buf.end(), htext.begin(), htext.end());
    params.for_each_tensor([&](const double* p, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) {
            std::uint64_t bits = 0;
            std::memcpy(&bits, &p[i], 8);
            detail::put_u64le(buf, bits);
        }
    });

    auto f = detail::open_out(path);
    detail::write_bytes(f, buf);
}

LoadedModel load_model(const std::string& path) {
    auto f = detail::open_in(path);
    const auto lenb = detail::read_bytes(f, 4, "model header length");
    const std::uint32_t hlen = detail::get_u32le(lenb.data());
    if (hlen == 0 || hlen > (1u << 24)) throw FormatError("model file: implausible header length");
    const auto hraw = detail::read_bytes(f, hlen, "model header");

    nlohmann::json header;
    try {
        header = nlohmann::json::parse(hraw.begin(), hraw.end());
    } catch (const nlohmann::json::exception&) {
        throw FormatError("model file: corrupt JSON header");
    }
    if (header.at("version").get<std::uint32_t>() != kModelVersion)
        throw FormatError("model file: unsupported format version");

    LoadedModel out;
    out.f_bits = header.at("f_bits").get<unsigned>();
    const ModelSpec spec = model_spec_from_json(header.at("spec").dump());
    out.params = init_model(spec);  // shapes + fixed phd P; tensors overwritten below

    const std::size_t count = out.params.param_count();
    const auto body = detail::read_bytes(f, count * 8, "model tensors");
    std::size_t off = 0;
    out.params.for_each_tensor([&](double* p, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint64_t bits = detail::get_u64le(body.data() + off);
            std::memcpy(&p[i], &bits, 8);
            off += 8;
        }
    });
    return out;
}

namespace {

void share_tensor(const double* p, std::size_t n, const FixedCfg& cfg, Rng& rng,
                  std::vector<Share>& out0, std::vector<Share>& out1) {
    for (std::size_t i = 0; i < n; ++i) {
        auto [s0, s1] = split(encode(p[i], cfg), rng, cfg);
        out0.push_back(s0);
        out1.push_back(s1);
    }
}

SharedModel assemble_shared(const ModelSpec& spec, const FixedCfg& cfg,
                            std::span<const Share> flat) {
    SharedModel m;
    m.spec = spec;
    m.cfg = cfg;
    std::size_t off = 0;
    auto take = [&](std::size_t n) {
        if (off + n > flat.size()) throw FormatError("model shares: too few values");
        std::vector<Share> v(flat.begin() + long(off), flat.begin() + long(off + n));
        off += n;
        return v;
    };

    for (const LayerShape& sh : resolve_shapes(spec)) {
        SharedLayer layer;
        layer.shape = sh;
        switch (sh.structure) {
            case Structure::dense:
                layer.W = {std::size_t(sh.width), std::size_t(sh.in),
                           take(std::size_t(sh.width) * std::size_t(sh.in))};
                break;
            case Structure::hd:
                layer.diag = take(std::size_t(sh.inner));
                break;
            case Structure::lowrank:
                layer.V1 = {2, std::size_t(sh.width), take(2 * std::size_t(sh.width))};
                layer.V2 = {2, std::size_t(sh.in), take(2 * std::size_t(sh.in))};
                break;
            default:
                throw CapabilityError("structure " + to_string(sh.structure) +
                                      " cannot be secret-shared for 2PC inference");
        }
        layer.bias = take(std::size_t(sh.width));
        m.layers.push_back(std::move(layer));
    }
    if (off != flat.size()) throw FormatError("model shares: trailing values");
    return m;
}

}  // namespace

std::pair<SharedModel, SharedModel> share_model(const ParamStore& params, const FixedCfg& cfg,
                                                Rng& rng) {
    for (const LayerShape& sh : resolve_shapes(params.spec))
        if (!mpc_supports(sh.structure))
            throw CapabilityError("structure " + to_string(sh.structure) +
                                  " cannot be secret-shared for 2PC inference");

    std::vector<Share> flat0, flat1;
    params.for_each_tensor([&](const double* p, std::size_t n) {
        share_tensor(p, n, cfg, rng, flat0, flat1);
    });
    return {assemble_shared(params.spec, cfg, flat0), assemble_shared(params.spec, cfg, flat1)};
}

void write_model_shares(const SharedModel& m, const std::string& path) {
    std::vector<Share> flat;
    for (const SharedLayer& l : m.layers) {
        flat.insert(flat.end(), l.W.data.begin(), l.W.data.end());
        flat.insert(flat.end(), l.diag.begin(), l.diag.end());
        flat.insert(flat.end(), l.V1.data.begin(), l.V1.data.end());
        flat.insert(flat.end(), l.V2.data.begin(), l.V2.data.end());
        flat.insert(flat.end(), l.bias.begin(), l.bias.end());
    }
    write_share_file(path, flat);
}

SharedModel read_model_shares(const std::string& path, const ModelSpec& spec) {
    const std::vector<Share> flat = read_share_file(path);
    const FixedCfg cfg = flat.empty() ? FixedCfg{} : flat.front().cfg;
    return assemble_shared(spec, cfg, flat);
}

std::uint64_t triples_for_inference(const ModelSpec& spec, std::uint64_t batch) {
    return model_mults_per_sample(spec) * batch;
}

}  // namespace hdcos
