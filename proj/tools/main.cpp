// Command-line surface: train/sweep plaintext models, secret-share them,
// run two-party inference over in-process or TCP transports, and print the
// cost tables (rounds, bytes, secure mults) next to measured dry runs.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "hdcos/data.hpp"
#include "hdcos/dealer.hpp"
#include "hdcos/nn.hpp"
#include "hdcos/protocols.hpp"
#include "hdcos/runtime.hpp"

using namespace hdcos;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string default_data_dir() {
    if (const char* env = std::getenv("HDCOS_DATA_DIR")) return env;
    return "data";
}

std::string find_idx(const std::string& dir, const std::string& stem) {
    for (const char* suffix : {".gz", ""}) {
        const std::string p = dir + "/" + stem + suffix;
        if (fs::exists(p)) return p;
    }
    throw FormatError("dataset file not found: " + dir + "/" + stem + "[.gz]");
}

struct DataFlags {
    std::string dataset = "synth";
    std::string data_dir = default_data_dir();
    int train_n = 0;   // 0 = all
    int test_n = 0;
    int synth_n = 4000;
    int synth_d = 16;
    int synth_classes = 2;
    double synth_sep = 4.0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--dataset", dataset, "mnist | fashion-mnist | synth")
            ->check(CLI::IsMember({"mnist", "fashion-mnist", "synth"}));
        cmd->add_option("--data-dir", data_dir, "directory with dataset files ($HDCOS_DATA_DIR)");
        cmd->add_option("--train-n", train_n, "subsample the training split (0 = all)");
        cmd->add_option("--test-n", test_n, "subsample the test split (0 = all)");
        cmd->add_option("--synth-n", synth_n, "synthetic: total samples");
        cmd->add_option("--synth-d", synth_d, "synthetic: feature dimension");
        cmd->add_option("--synth-classes", synth_classes, "synthetic: classes");
        cmd->add_option("--synth-sep", synth_sep, "synthetic: class mean separation");
    }

    std::pair<Dataset, Dataset> load(std::uint64_t seed) const {
        if (dataset == "synth") {
            const Dataset all = synth_gaussians(synth_n, synth_d, synth_classes, synth_sep, seed);
            auto [tr, te] = split_dataset(all, 0.7, seed + 1);
            return {std::move(tr), std::move(te)};
        }
        const std::string sub = dataset == "mnist" ? "mnist" : "fashion-mnist";
        const std::string dir = data_dir + "/" + sub;
        Dataset tr = load_mnist_idx(find_idx(dir, "train-images-idx3-ubyte"),
                                    find_idx(dir, "train-labels-idx1-ubyte"), sub);
        Dataset te = load_mnist_idx(find_idx(dir, "t10k-images-idx3-ubyte"),
                                    find_idx(dir, "t10k-labels-idx1-ubyte"), sub);
        if (train_n > 0) tr = subsample(tr, train_n, seed);
        if (test_n > 0) te = subsample(te, test_n, seed + 1);
        return {std::move(tr), std::move(te)};
    }

    json to_json() const {
        return {{"dataset", dataset}, {"data_dir", data_dir},   {"train_n", train_n},
                {"test_n", test_n},   {"synth_n", synth_n},     {"synth_d", synth_d},
                {"synth_classes", synth_classes}, {"synth_sep", synth_sep}};
    }
};

ModelSpec read_spec_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw FormatError("cannot open model spec: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return model_spec_from_json(ss.str());
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw FormatError("cannot write " + path);
    f << text;
}

void write_resolved_config(const std::string& out_path, const json& cfg) {
    write_text(out_path + ".config.json", cfg.dump(2) + "\n");
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

std::string fmt_double(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

// ---- train ----------------------------------------------------------------

int cmd_train(const std::string& spec_path, const DataFlags& data, const TrainCfg& cfg,
              const std::string& optimizer, const std::string& out_model,
              const std::string& out_metrics) {
    TrainCfg tc = cfg;
    tc.optimizer = optimizer_from_string(optimizer);
    const ModelSpec spec = read_spec_file(spec_path);
    auto [train_ds, test_ds] = data.load(tc.seed);

    const TrainResult res = train(spec, tc, train_ds, test_ds);

    std::ostringstream csv;
    csv << "run_id,epoch,loss,accuracy,diverged\n";
    for (const EpochMetrics& em : res.history)
        csv << tc.seed << "," << em.epoch << "," << em.train_loss << "," << em.eval_accuracy
            << "," << (em.diverged ? 1 : 0) << "\n";
    write_text(out_metrics, csv.str());
    save_model(res.params, out_model);

    const json cfgj = {{"command", "train"},
                       {"spec", spec_path},
                       {"data", data.to_json()},
                       {"optimizer", optimizer},
                       {"learning_rate", tc.learning_rate},
                       {"batch_size", tc.batch_size},
                       {"epochs", tc.epochs},
                       {"seed", tc.seed},
                       {"out_model", out_model},
                       {"out_metrics", out_metrics}};
    write_resolved_config(out_model, cfgj);

    const EvalResult ev = evaluate(res.params, test_ds);
    std::cout << "train: " << res.history.size() << " epochs, final eval accuracy "
              << fmt_double(ev.accuracy) << (res.diverged ? " [DIVERGED]" : "") << "\n";
    return 0;
}

// ---- sweep ----------------------------------------------------------------

int cmd_sweep(const std::string& spec_path, const DataFlags& data, TrainCfg base_cfg,
              const std::string& activations, const std::string& structures,
              const std::string& optimizers, const std::string& lrs, int trials, int jobs,
              const std::string& out_csv) {
    const ModelSpec spec = read_spec_file(spec_path);
    auto [train_ds, test_ds] = data.load(base_cfg.seed);

    std::vector<Activation> acts;
    for (const auto& s : split_csv(activations)) acts.push_back(activation_from_string(s));
    std::vector<Structure> structs;
    for (const auto& s : split_csv(structures)) structs.push_back(structure_from_string(s));
    std::vector<Optimizer> opts;
    for (const auto& s : split_csv(optimizers)) opts.push_back(optimizer_from_string(s));
    std::vector<double> lr_list;
    for (const auto& s : split_csv(lrs)) lr_list.push_back(std::stod(s));

    const auto cells =
        sweep(spec, train_ds, test_ds, acts, structs, lr_list, opts, trials, base_cfg, jobs);

    std::ostringstream csv;
    csv << "activation,structure,optimizer,lr,trials,mean_acc,std_acc,diverged,error\n";
    for (const SweepCell& c : cells)
        csv << to_string(c.activation) << "," << to_string(c.structure) << ","
            << to_string(c.optimizer) << "," << c.learning_rate << "," << c.trials << ","
            << c.mean_accuracy << "," << c.std_accuracy << "," << c.diverged_trials << ",\""
            << c.error << "\"\n";
    write_text(out_csv, csv.str());

    const json cfgj = {{"command", "sweep"},       {"spec", spec_path},
                       {"data", data.to_json()},   {"activations", activations},
                       {"structures", structures}, {"optimizers", optimizers},
                       {"lrs", lrs},               {"trials", trials},
                       {"jobs", jobs},             {"epochs", base_cfg.epochs},
                       {"batch_size", base_cfg.batch_size},
                       {"seed", base_cfg.seed}};
    write_resolved_config(out_csv, cfgj);

    // aligned text render, one row per cell plus best-per-row summary
    std::printf("%-14s %-10s %-5s %-8s %-9s %-9s %-8s\n", "activation", "structure", "opt", "lr",
                "mean", "std", "diverged");
    for (const SweepCell& c : cells)
        std::printf("%-14s %-10s %-5s %-8g %-9.4f %-9.4f %-8d%s\n", to_string(c.activation).c_str(),
                    to_string(c.structure).c_str(), to_string(c.optimizer).c_str(),
                    c.learning_rate, c.mean_accuracy, c.std_accuracy, c.diverged_trials,
                    c.error.empty() ? "" : (" ERROR: " + c.error).c_str());
    for (Activation a : acts)
        for (Structure st : structs)
            for (Optimizer o : opts) {
                double best = 0.0;
                for (const SweepCell& c : cells)
                    if (c.activation == a && c.structure == st && c.optimizer == o)
                        best = std::max(best, c.mean_accuracy);
                std::printf("best %-14s %-10s %-5s = %.4f\n", to_string(a).c_str(),
                            to_string(st).c_str(), to_string(o).c_str(), best);
            }
    return 0;
}

// ---- share-model ----------------------------------------------------------

int cmd_share_model(const std::string& model_path, const std::string& out_prefix, unsigned f_bits,
                    std::uint64_t seed, std::uint64_t batch) {
    const LoadedModel lm = load_model(model_path);
    FixedCfg cfg{};
    cfg.f = f_bits;
    validate(cfg);

    Rng rng(party_seed(seed, 0) ^ 0xD3A1u);
    auto [m0, m1] = share_model(lm.params, cfg, rng);
    write_model_shares(m0, out_prefix + ".share0");
    write_model_shares(m1, out_prefix + ".share1");
    write_text(out_prefix + ".spec.json", model_spec_to_json(lm.params.spec) + "\n");

    const std::uint64_t n_triples = triples_for_inference(lm.params.spec, batch);
    Rng dealer_rng(party_seed(seed, 1) ^ 0x7E11u);
    auto [p0, p1] = gen_triples(n_triples, dealer_rng, cfg);
    write_triple_file(out_prefix + ".triples0", p0);
    write_triple_file(out_prefix + ".triples1", p1);

    const json cfgj = {{"command", "share-model"}, {"model", model_path},
                       {"out_prefix", out_prefix}, {"f", f_bits},
                       {"seed", seed},             {"batch", batch},
                       {"triples", n_triples}};
    write_resolved_config(out_prefix, cfgj);

    std::cout << "share-model: " << lm.params.param_count() << " params shared at f=" << f_bits
              << ", " << n_triples << " triples per party for batch " << batch << "\n";
    return 0;
}

// ---- infer-2pc ------------------------------------------------------------

struct InferOutput {
    std::vector<double> logits;  // n x classes, row major
    CostMeter forward_meter;
    CostMeter total_meter;
    std::size_t triples = 0;
};

PartyProgram make_infer_program(const SharedModel& model, std::size_t n, std::size_t dim,
                                InferOutput* out) {
    return [&model, n, dim, out](PartyContext& ctx, std::span<const Share> inputs) {
        ShareMat X{n, dim, std::vector<Share>(inputs.begin(), inputs.end())};
        const ShareMat L = secure_forward(ctx, model, X);
        out->forward_meter = ctx.meter();

        // open the logits so the caller side of this process can read them
        std::vector<RingVal> mine(L.data.size());
        for (std::size_t i = 0; i < L.data.size(); ++i) mine[i] = L.data[i].val;
        const std::vector<RingVal> peer = ctx.exchange_rings(ProtocolTag::output, mine);
        out->logits.resize(mine.size());
        for (std::size_t i = 0; i < mine.size(); ++i)
            out->logits[i] = decode(ring_add(mine[i], peer[i]), ctx.cfg());
        out->total_meter = ctx.meter();
        out->triples = ctx.pool().consumed();
        return L.data;
    };
}

void print_cost_report(const ModelSpec& spec, const InferOutput& o, std::size_t batch) {
    std::printf("cost report (per party)\n");
    std::printf("  forward online rounds : %llu (analytic %d)\n",
                (unsigned long long)o.forward_meter.online_rounds, model_rounds(spec));
    std::printf("  forward bytes sent    : %llu\n", (unsigned long long)o.forward_meter.bytes_sent);
    std::printf("  secure mults consumed : %llu (analytic %llu)\n", (unsigned long long)o.triples,
                (unsigned long long)(model_mults_per_sample(spec) * batch));
    const auto shapes = resolve_shapes(spec);
    for (std::size_t i = 0; i < shapes.size(); ++i) {
        const LayerShape& sh = shapes[i];
        std::printf("  layer %zu %-8s %4d -> %-4d mults/sample %-8llu rounds %d+%d\n", i,
                    to_string(sh.structure).c_str(), sh.in, sh.width,
                    (unsigned long long)(linear_mults(sh) +
                                         activation_mults(sh.activation, std::uint64_t(sh.width))),
                    linear_rounds(sh.structure), activation_rounds(sh.activation));
    }
    std::printf("  by protocol:\n");
    for (const auto& [name, c] : o.total_meter.by_protocol)
        std::printf("    %-12s rounds %-6llu bytes %llu\n", name.c_str(),
                    (unsigned long long)c.rounds, (unsigned long long)c.bytes);
}

int cmd_infer_2pc(const std::string& prefix, const DataFlags& data, int count,
                  const std::string& party_mode, const std::string& transport,
                  const std::string& bind_addr, const std::string& peer_addr, std::uint64_t seed,
                  const std::string& out_csv) {
    const ModelSpec spec = read_spec_file(prefix + ".spec.json");
    auto [train_ds, test_ds] = data.load(seed);
    Dataset batch_ds = count > 0 && count < test_ds.n() ? subsample(test_ds, count, seed + 2)
                                                        : std::move(test_ds);
    const std::size_t n = std::size_t(batch_ds.n());
    const std::size_t dim = std::size_t(batch_ds.dim());

    // Both endpoints derive the same input sharing from the run seed; each
    // keeps only its own half.
    FixedCfg cfg{};
    {
        const auto probe = read_share_file(prefix + ".share0");
        cfg = probe.front().cfg;
    }
    std::vector<RingVal> flat(n * dim);
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t j = 0; j < dim; ++j)
            flat[s * dim + j] = encode(batch_ds.features(long(s), long(j)), cfg);
    Rng input_rng(party_seed(seed, 2) ^ 0x1895u);
    auto [in0, in1] = split_vec(flat, input_rng, cfg);

    auto run_one = [&](int party, Transport& tr, InferOutput& out) {
        const SharedModel model = read_model_shares(prefix + ".share" + std::to_string(party), spec);
        TriplePool pool = read_triple_file(prefix + ".triples" + std::to_string(party));
        const PartyProgram prog = make_infer_program(model, n, dim, &out);
        (void)run_party(prog, party == 0 ? in0 : in1, pool, tr, party, cfg, seed);
    };

    InferOutput out0, out1;
    if (party_mode == "both") {
        if (transport == "inproc") {
            const SharedModel m0 = read_model_shares(prefix + ".share0", spec);
            const SharedModel m1 = read_model_shares(prefix + ".share1", spec);
            std::array<TriplePool, 2> pools{read_triple_file(prefix + ".triples0"),
                                            read_triple_file(prefix + ".triples1")};
            InferOutput* outs[2] = {&out0, &out1};
            const PartyProgram prog = [&](PartyContext& ctx, std::span<const Share> inputs) {
                const SharedModel& m = ctx.party() == 0 ? m0 : m1;
                return make_infer_program(m, n, dim, outs[ctx.party()])(ctx, inputs);
            };
            (void)run_two_party(prog, {in0, in1}, pools, cfg, seed);
        } else {
            // both parties in this process but over real sockets
            std::thread t0([&] {
                auto tr = tcp_listen(bind_addr);
                run_one(0, *tr, out0);
            });
            auto tr1 = tcp_connect(peer_addr);
            run_one(1, *tr1, out1);
            t0.join();
        }
    } else {
        const int party = std::stoi(party_mode);
        InferOutput& out = party == 0 ? out0 : out1;
        std::unique_ptr<Transport> tr =
            party == 0 ? tcp_listen(bind_addr) : tcp_connect(peer_addr);
        run_one(party, *tr, out);
        if (party == 1) out0 = out1;  // reporting below reads out0
    }

    // argmax per sample
    const int classes = spec.classes;
    std::ostringstream csv;
    csv << "sample,prediction,label\n";
    long correct = 0;
    for (std::size_t s = 0; s < n; ++s) {
        int best = 0;
        double bv = -1e300;
        for (int c = 0; c < classes; ++c) {
            const double v = out0.logits[s * std::size_t(classes) + std::size_t(c)];
            if (v > bv) {
                bv = v;
                best = c;
            }
        }
        if (best == batch_ds.labels[s]) ++correct;
        csv << s << "," << best << "," << batch_ds.labels[s] << "\n";
    }
    write_text(out_csv, csv.str());
    const json cfgj = {{"command", "infer-2pc"}, {"prefix", prefix},
                       {"data", data.to_json()}, {"count", count},
                       {"party", party_mode},    {"transport", transport},
                       {"bind", bind_addr},      {"peer", peer_addr},
                       {"seed", seed},           {"out", out_csv}};
    write_resolved_config(out_csv, cfgj);

    print_cost_report(spec, out0, n);
    std::printf("agreement with labels: %.4f (%ld/%zu)\n", double(correct) / double(n), correct, n);
    return 0;
}

// ---- bench-costs ----------------------------------------------------------

struct MeasuredCost {
    std::uint64_t rounds = 0;
    std::uint64_t mults = 0;
};

MeasuredCost measure(const PartyProgram& prog, std::size_t triples, FixedCfg cfg,
                     std::size_t n_inputs, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<RingVal> xs(n_inputs);
    for (RingVal& x : xs) x = encode(std::uniform_real_distribution<double>(-1.0, 1.0)(rng), cfg);
    auto [in0, in1] = split_vec(xs, rng, cfg);
    auto [p0, p1] = gen_triples(triples, rng, cfg);
    std::array<TriplePool, 2> pools{std::move(p0), std::move(p1)};
    const TwoPartyRun run = run_two_party(prog, {in0, in1}, pools, cfg, seed);
    if (run.meters[0].online_rounds != run.meters[1].online_rounds)
        throw DesyncError("parties disagree on round count");
    return {run.meters[0].online_rounds, run.triples_consumed[0]};
}

int cmd_bench_costs(const std::string& spec_path, std::uint64_t seed) {
    const ModelSpec spec = read_spec_file(spec_path);
    const FixedCfg cfg{};
    bool all_match = true;

    std::printf("%-28s %-10s %-10s %-10s %-10s %s\n", "cell", "rounds", "measured", "mults",
                "measured", "match");

    auto report = [&](const std::string& name, std::uint64_t ar, std::uint64_t am,
                      const MeasuredCost& m) {
        const bool ok = ar == m.rounds && am == m.mults;
        all_match = all_match && ok;
        std::printf("%-28s %-10llu %-10llu %-10llu %-10llu %s\n", name.c_str(),
                    (unsigned long long)ar, (unsigned long long)m.rounds, (unsigned long long)am,
                    (unsigned long long)m.mults, ok ? "yes" : "MISMATCH");
    };

    const auto shapes = resolve_shapes(spec);
    Rng prng(seed);
    for (std::size_t i = 0; i < shapes.size(); ++i) {
        const LayerShape& sh = shapes[i];

        // linear part: random shared parameters, one random input vector
        std::uniform_real_distribution<double> pd(-0.5, 0.5);
        const std::size_t lin_triples = linear_mults(sh);
        PartyProgram lin;
        if (sh.structure == Structure::dense) {
            std::vector<RingVal> w(std::size_t(sh.width) * std::size_t(sh.in));
            for (RingVal& v : w) v = encode(pd(prng), cfg);
            auto [w0, w1] = split_vec(w, prng, cfg);
            lin = [=](PartyContext& ctx, std::span<const Share> in) {
                const ShareMat W{std::size_t(sh.width), std::size_t(sh.in),
                                 ctx.party() == 0 ? w0 : w1};
                return secure_matvec_dense(ctx, W, in);
            };
            report("layer" + std::to_string(i) + " dense",
                   std::uint64_t(linear_rounds(sh.structure)), lin_triples,
                   measure(lin, lin_triples, cfg, std::size_t(sh.in), seed + i));
        } else if (sh.structure == Structure::hd) {
            std::vector<RingVal> d(std::size_t(sh.inner));
            for (RingVal& v : d) v = encode(pd(prng), cfg);
            auto [d0, d1] = split_vec(d, prng, cfg);
            lin = [=](PartyContext& ctx, std::span<const Share> in) {
                std::vector<Share> x(in.begin(), in.end());
                x.resize(std::size_t(sh.inner),
                         Share{std::uint8_t(ctx.party()), RingVal{0}, ctx.cfg()});
                return secure_hd_layer(ctx, ctx.party() == 0 ? d0 : d1, x);
            };
            report("layer" + std::to_string(i) + " hd",
                   std::uint64_t(linear_rounds(sh.structure)), lin_triples,
                   measure(lin, lin_triples, cfg, std::size_t(sh.in), seed + i));
        } else if (sh.structure == Structure::lowrank) {
            std::vector<RingVal> v1(2 * std::size_t(sh.width)), v2(2 * std::size_t(sh.in));
            for (RingVal& v : v1) v = encode(pd(prng), cfg);
            for (RingVal& v : v2) v = encode(pd(prng), cfg);
            auto [a0, a1] = split_vec(v1, prng, cfg);
            auto [b0, b1] = split_vec(v2, prng, cfg);
            lin = [=](PartyContext& ctx, std::span<const Share> in) {
                const ShareMat V1{2, std::size_t(sh.width), ctx.party() == 0 ? a0 : a1};
                const ShareMat V2{2, std::size_t(sh.in), ctx.party() == 0 ? b0 : b1};
                return secure_lowrank_matvec(ctx, V1, V2, in);
            };
            report("layer" + std::to_string(i) + " lowrank",
                   std::uint64_t(linear_rounds(sh.structure)), lin_triples,
                   measure(lin, lin_triples, cfg, std::size_t(sh.in), seed + i));
        } else {
            std::printf("%-28s plaintext-only structure, skipped\n",
                        ("layer" + std::to_string(i) + " " + to_string(sh.structure)).c_str());
            continue;
        }

        // activation part on this layer's width
        if (sh.activation != Activation::none) {
            const std::size_t units = std::size_t(sh.width);
            const std::uint64_t am = activation_mults(sh.activation, units);
            PartyProgram act = [sh](PartyContext& ctx, std::span<const Share> in) {
                switch (sh.activation) {
                    case Activation::square: return secure_square(ctx, in);
                    case Activation::cosine: return secure_cosine(ctx, in);
                    case Activation::relu_polyfit3:
                        return secure_relu_polyfit3(ctx, in, relu_polyfit3_coeffs());
                    default: throw CapabilityError("activation not MPC-supported");
                }
            };
            report("  act " + to_string(sh.activation),
                   std::uint64_t(activation_rounds(sh.activation)), am,
                   measure(act, am, cfg, units, seed + 100 + i));
        }
    }

    std::printf("%s\n", all_match ? "all analytic costs match measured costs"
                                  : "ANALYTIC/MEASURED MISMATCH");
    return all_match ? 0 : 2;
}

// ---- kernel-check ---------------------------------------------------------

int cmd_kernel_check(int d, double sigma, int pairs, std::uint64_t seed,
                     const std::string& out_csv) {
    Rng rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    Mat X(pairs, d), Y(pairs, d);
    for (int i = 0; i < pairs; ++i)
        for (int j = 0; j < d; ++j) {
            X(i, j) = 0.5 * nd(rng);
            Y(i, j) = 0.5 * nd(rng);
        }

    std::ostringstream csv;
    csv << "D,mean_abs_err,sup_abs_err\n";
    std::printf("%-8s %-14s %-14s\n", "D", "mean|err|", "sup|err|");
    double prev_mean = 1e9;
    bool monotone = true;
    for (const std::size_t D : {64u, 256u, 1024u, 4096u}) {
        const RffMap map = make_gaussian_rff(std::size_t(d), D, sigma, seed + D);
        const Mat FX = rff_features(X, map);
        const Mat FY = rff_features(Y, map);
        double mean = 0.0, sup = 0.0;
        for (int i = 0; i < pairs; ++i) {
            const double approx = FX.row(i).dot(FY.row(i));
            const double exact =
                gaussian_kernel(X.row(i).transpose(), Y.row(i).transpose(), sigma);
            const double err = std::fabs(approx - exact);
            mean += err;
            sup = std::max(sup, err);
        }
        mean /= pairs;
        std::printf("%-8zu %-14.6f %-14.6f\n", std::size_t(D), mean, sup);
        csv << D << "," << mean << "," << sup << "\n";
        monotone = monotone && (mean <= prev_mean + 0.005);
        prev_mean = mean;
    }
    // self-kernel row is exact by construction
    std::printf("k(x,x) = %.12f\n", gaussian_kernel(X.row(0).transpose(), X.row(0).transpose(), sigma));
    std::printf("error monotone non-increasing across D: %s\n", monotone ? "yes" : "no");

    if (!out_csv.empty()) {
        write_text(out_csv, csv.str());
        const json cfgj = {{"command", "kernel-check"}, {"d", d},       {"sigma", sigma},
                           {"pairs", pairs},            {"seed", seed}, {"out", out_csv}};
        write_resolved_config(out_csv, cfgj);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"HD-cos 2PC engine and training toolkit"};
    app.require_subcommand(1);

    // train
    auto* train_cmd = app.add_subcommand("train", "train a model in plaintext");
    std::string spec_path, out_model = "model.hdm", out_metrics = "metrics.csv";
    std::string optimizer = "sgd";
    TrainCfg tc;
    DataFlags train_data;
    train_cmd->add_option("--spec", spec_path, "model spec JSON")->required();
    train_data.attach(train_cmd);
    train_cmd->add_option("--optimizer", optimizer)->check(CLI::IsMember({"sgd", "adam"}));
    train_cmd->add_option("--lr", tc.learning_rate, "learning rate");
    train_cmd->add_option("--batch-size", tc.batch_size);
    train_cmd->add_option("--epochs", tc.epochs);
    train_cmd->add_option("--seed", tc.seed);
    train_cmd->add_option("--out", out_model, "output model file");
    train_cmd->add_option("--metrics", out_metrics, "output metrics CSV");

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "learning-rate/architecture grid");
    std::string sw_spec, sw_acts = "cosine,square", sw_structs = "dense",
                sw_opts = "sgd", sw_lrs = "0.0001,0.001,0.01,0.1", sw_out = "sweep.csv";
    int sw_trials = 1, sw_jobs = 1;
    TrainCfg sw_cfg;
    DataFlags sweep_data;
    sweep_cmd->add_option("--spec", sw_spec)->required();
    sweep_data.attach(sweep_cmd);
    sweep_cmd->add_option("--activations", sw_acts, "comma-separated list");
    sweep_cmd->add_option("--structures", sw_structs, "comma-separated list");
    sweep_cmd->add_option("--optimizers", sw_opts, "comma-separated list");
    sweep_cmd->add_option("--lrs", sw_lrs, "comma-separated list");
    sweep_cmd->add_option("--trials", sw_trials);
    sweep_cmd->add_option("--jobs", sw_jobs);
    sweep_cmd->add_option("--epochs", sw_cfg.epochs);
    sweep_cmd->add_option("--batch-size", sw_cfg.batch_size);
    sweep_cmd->add_option("--seed", sw_cfg.seed);
    sweep_cmd->add_option("--out", sw_out);

    // share-model
    auto* share_cmd = app.add_subcommand("share-model", "secret-share a trained model");
    std::string sm_model, sm_prefix = "shared";
    unsigned sm_f = 20;
    std::uint64_t sm_seed = 1, sm_batch = 1;
    share_cmd->add_option("--model", sm_model)->required();
    share_cmd->add_option("--out-prefix", sm_prefix);
    share_cmd->add_option("--f", sm_f, "fractional bits");
    share_cmd->add_option("--seed", sm_seed);
    share_cmd->add_option("--batch", sm_batch, "inference batch to provision triples for");

    // infer-2pc
    auto* infer_cmd = app.add_subcommand("infer-2pc", "two-party inference");
    std::string in_prefix = "shared", in_party = "both", in_transport = "inproc";
    std::string in_bind = "127.0.0.1:19870", in_peer = "127.0.0.1:19870",
                in_out = "predictions.csv";
    int in_count = 0;
    std::uint64_t in_seed = 1;
    DataFlags infer_data;
    infer_cmd->add_option("--prefix", in_prefix, "share/triple file prefix");
    infer_data.attach(infer_cmd);
    infer_cmd->add_option("--count", in_count, "samples from the test split (0 = all)");
    infer_cmd->add_option("--party", in_party, "both | 0 | 1")
        ->check(CLI::IsMember({"both", "0", "1"}));
    infer_cmd->add_option("--transport", in_transport)->check(CLI::IsMember({"inproc", "tcp"}));
    infer_cmd->add_option("--bind", in_bind, "listen address (party 0)");
    infer_cmd->add_option("--peer", in_peer, "peer address (party 1)");
    infer_cmd->add_option("--seed", in_seed);
    infer_cmd->add_option("--out", in_out);

    // bench-costs
    auto* bench_cmd = app.add_subcommand("bench-costs", "analytic vs measured protocol costs");
    std::string bc_spec;
    std::uint64_t bc_seed = 1;
    bench_cmd->add_option("--spec", bc_spec)->required();
    bench_cmd->add_option("--seed", bc_seed);

    // kernel-check
    auto* kc_cmd = app.add_subcommand("kernel-check", "random-feature kernel approximation");
    int kc_d = 8, kc_pairs = 200;
    double kc_sigma = 1.0;
    std::uint64_t kc_seed = 1;
    std::string kc_out;
    kc_cmd->add_option("--d", kc_d);
    kc_cmd->add_option("--sigma", kc_sigma);
    kc_cmd->add_option("--pairs", kc_pairs);
    kc_cmd->add_option("--seed", kc_seed);
    kc_cmd->add_option("--out", kc_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // usage errors are exit 1
    }

    try {
        if (*train_cmd)
            return cmd_train(spec_path, train_data, tc, optimizer, out_model, out_metrics);
        if (*sweep_cmd)
            return cmd_sweep(sw_spec, sweep_data, sw_cfg, sw_acts, sw_structs, sw_opts, sw_lrs,
                             sw_trials, sw_jobs, sw_out);
        if (*share_cmd) return cmd_share_model(sm_model, sm_prefix, sm_f, sm_seed, sm_batch);
        if (*infer_cmd)
            return cmd_infer_2pc(in_prefix, infer_data, in_count, in_party, in_transport, in_bind,
                                 in_peer, in_seed, in_out);
        if (*bench_cmd) return cmd_bench_costs(bc_spec, bc_seed);
        if (*kc_cmd) return cmd_kernel_check(kc_d, kc_sigma, kc_pairs, kc_seed, kc_out);
    } catch (const TransportError& e) {
        std::cerr << "transport error: " << e.what() << "\n";
        return 2;
    } catch (const DesyncError& e) {
        std::cerr << "protocol desync: " << e.what() << "\n";
        return 2;
    } catch (const PoolExhaustedError& e) {
        std::cerr << "offline phase exhausted: " << e.what() << "\n";
        return 2;
    } catch (const CapabilityError& e) {
        std::cerr << "capability error: " << e.what() << "\n";
        return 2;
    } catch (const RangeError& e) {
        std::cerr << "range error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
