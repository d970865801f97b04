#include "hdcos/runtime.hpp"

#include <thread>

#include "hdcos/detail/binio.hpp"

namespace hdcos {

const char* protocol_name(ProtocolTag tag) {
    switch (tag) {
        case ProtocolTag::reshare: return "reshare";
        case ProtocolTag::beaver_open: return "beaver_open";
        case ProtocolTag::output: return "output";
        case ProtocolTag::barrier: return "barrier";
    }
    return "unknown";
}

void DebugOracle::post(const std::string& site, int party, std::span<const Share> vals,
                       double bound) {
    std::lock_guard lk(mu_);
    if (!violation_.empty()) return;
    const std::uint64_t seq = seq_[site][party]++;
    const auto key = std::make_pair(site, seq);
    auto it = pending_.find(key);
    if (it == pending_.end()) {
        Pending p;
        p.cfg = vals.empty() ? FixedCfg{} : vals.front().cfg;
        p.vals.reserve(vals.size());
        for (const Share& s : vals) p.vals.push_back(s.val);
        pending_.emplace(key, std::move(p));
        return;
    }
    const Pending other = std::move(it->second);
    pending_.erase(it);
    if (other.vals.size() != vals.size()) {
        violation_ = "debug oracle: size mismatch at " + site;
        return;
    }
    for (std::size_t i = 0; i < vals.size(); ++i) {
        const double v = decode(ring_add(other.vals[i], vals[i].val), vals[i].cfg);
        if (!(std::fabs(v) <= bound)) {
            violation_ = "debug oracle: |" + std::to_string(v) + "| > " + std::to_string(bound) +
                         " at " + site + "[" + std::to_string(i) + "]";
            return;
        }
    }
}

void DebugOracle::throw_if_poisoned() const {
    std::lock_guard lk(mu_);
    if (!violation_.empty()) throw RangeError(violation_);
}

PartyContext::PartyContext(int party, FixedCfg cfg, TriplePool& pool, Transport& transport,
                           std::uint64_t seed, RunGate* gate, DebugOracle* oracle)
    : party_(party), cfg_(cfg), pool_(pool), transport_(transport),
      rng_(party_seed(seed, party)), gate_(gate), oracle_(oracle) {
    if (party != 0 && party != 1) throw std::invalid_argument("party id must be 0 or 1");
}

std::vector<std::uint8_t> PartyContext::exchange(ProtocolTag tag,
                                                 std::span<const std::uint8_t> payload) {
    if (oracle_) oracle_->throw_if_poisoned();

    Frame out;
    out.round_index = round_;
    out.protocol_tag = std::uint16_t(tag);
    out.payload.assign(payload.begin(), payload.end());

    Frame in;
    if (party_ == 0) {
        transport_.send(out);
        if (gate_) gate_->yield_begin();
        in = transport_.recv();
        if (gate_) gate_->yield_end();
    } else {
        if (gate_) gate_->yield_begin();
        in = transport_.recv();
        if (gate_) gate_->yield_end();
        transport_.send(out);
    }

    if (in.round_index != round_)
        throw DesyncError("round index mismatch: local " + std::to_string(round_) + ", peer " +
                          std::to_string(in.round_index));
    if (in.protocol_tag != std::uint16_t(tag))
        throw DesyncError(std::string("protocol tag mismatch at round ") + std::to_string(round_) +
                          ": local " + protocol_name(tag) + ", peer " +
                          protocol_name(ProtocolTag(in.protocol_tag)));

    meter_.add_exchange(tag, out.payload.size());
    ++round_;
    return std::move(in.payload);
}

std::vector<RingVal> PartyContext::exchange_rings(ProtocolTag tag,
                                                  std::span<const RingVal> vals) {
    return detail::unpack_rings(exchange(tag, detail::pack_rings(vals)));
}

void PartyContext::debug_check_range(const std::string& site, std::span<const Share> vals,
                                     double bound) {
    if (oracle_) oracle_->post(site, party_, vals, bound);
}

std::uint64_t party_seed(std::uint64_t run_seed, int party) {
    // splitmix64 service as a seed mixer
    std::uint64_t z = run_seed + 0x9e3779b97f4a7c15ull * std::uint64_t(party + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

PartyRunResult run_party(const PartyProgram& prog, std::span<const Share> inputs,
                         TriplePool& pool, Transport& transport, int party, FixedCfg cfg,
                         std::uint64_t seed, RunGate* gate, DebugOracle* oracle) {
    PartyContext ctx(party, cfg, pool, transport, seed, gate, oracle);
    if (gate) gate->attach();
    PartyRunResult res;
    try {
        res.outputs = prog(ctx, inputs);
    } catch (...) {
        if (gate) gate->detach();
        // a poisoned oracle is the root cause of any teardown error
        if (oracle) oracle->throw_if_poisoned();
        throw;
    }
    if (gate) gate->detach();
    res.meter = ctx.meter();
    res.triples_consumed = pool.consumed();
    if (oracle) oracle->throw_if_poisoned();
    return res;
}

TwoPartyRun run_two_party(const PartyProgram& prog,
                          const std::array<std::vector<Share>, 2>& inputs,
                          std::array<TriplePool, 2>& pools, FixedCfg cfg, std::uint64_t seed,
                          Scheduler sched, DebugOracle* oracle,
                          std::array<Transport*, 2> transports) {
    std::unique_ptr<Transport> own0, own1;
    if (!transports[0] || !transports[1]) {
        auto [t0, t1] = make_inproc_pair();
        own0 = std::move(t0);
        own1 = std::move(t1);
        transports = {own0.get(), own1.get()};
    }

    RunGate gate;
    RunGate* gate_ptr = sched == Scheduler::lockstep ? &gate : nullptr;

    TwoPartyRun run;
    std::array<std::exception_ptr, 2> errors{};

    auto body = [&](int party) {
        try {
            auto r = run_party(prog, inputs[party], pools[party], *transports[party], party, cfg,
                               seed, gate_ptr, oracle);
            run.outputs[party] = std::move(r.outputs);
            run.meters[party] = std::move(r.meter);
            run.triples_consumed[party] = r.triples_consumed;
        } catch (...) {
            errors[party] = std::current_exception();
            // wake a peer blocked on us
            transports[party]->shutdown();
        }
    };

    std::thread t1([&] { body(1); });
    body(0);
    t1.join();

    if (oracle) oracle->throw_if_poisoned();
    if (errors[0]) std::rethrow_exception(errors[0]);
    if (errors[1]) std::rethrow_exception(errors[1]);
    return run;
}

}  // namespace hdcos
