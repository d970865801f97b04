#include "hdcos/nn.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

namespace hdcos {

namespace {

std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ull * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

void fill_gaussian(double* data, std::size_t n, double stddev, Rng& rng) {
    std::normal_distribution<double> dist(0.0, stddev);
    for (std::size_t i = 0; i < n; ++i) data[i] = dist(rng);
}

}  // namespace

void ParamStore::for_each_tensor(const std::function<void(double*, std::size_t)>& fn) {
    for (LayerParams& l : layers) {
        switch (l.shape.structure) {
            case Structure::dense: fn(l.W.data(), std::size_t(l.W.size())); break;
            case Structure::hd: fn(l.diag.data(), std::size_t(l.diag.size())); break;
            case Structure::lowrank:
                fn(l.V1.data(), std::size_t(l.V1.size()));
                fn(l.V2.data(), std::size_t(l.V2.size()));
                break;
            case Structure::circulant: fn(l.circ.data(), std::size_t(l.circ.size())); break;
            case Structure::phd: fn(l.diag.data(), std::size_t(l.diag.size())); break;
        }
        fn(l.bias.data(), std::size_t(l.bias.size()));
    }
}

void ParamStore::for_each_tensor(const std::function<void(const double*, std::size_t)>& fn) const {
    const_cast<ParamStore*>(this)->for_each_tensor(
        [&](double* p, std::size_t n) { fn(p, n); });
}

std::size_t ParamStore::param_count() const {
    std::size_t total = 0;
    for_each_tensor([&](const double*, std::size_t n) { total += n; });
    return total;
}

ParamStore init_model(const ModelSpec& spec) {
    ParamStore store;
    store.spec = spec;
    Rng rng(spec.seed);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);

    for (const LayerShape& sh : resolve_shapes(spec)) {
        LayerParams l;
        l.shape = sh;
        const bool cosine = sh.activation == Activation::cosine;
        // Cosine layers mimic a random-feature map at initialization:
        // dense-equivalent entries N(0, 1/fan_in), phases uniform [0, 2pi).
        const double target_var = cosine ? 1.0 / double(sh.in) : 2.0 / double(sh.in + sh.width);

        switch (sh.structure) {
            case Structure::dense:
                l.W = Mat(sh.width, sh.in);
                fill_gaussian(l.W.data(), std::size_t(l.W.size()), std::sqrt(target_var), rng);
                break;
            case Structure::hd:
                l.diag = Vec(sh.inner);
                fill_gaussian(l.diag.data(), std::size_t(l.diag.size()),
                              std::sqrt(double(sh.inner) * target_var), rng);
                break;
            case Structure::lowrank:
                l.V1 = Mat(2, sh.width);
                l.V2 = Mat(2, sh.in);
                fill_gaussian(l.V1.data(), std::size_t(l.V1.size()),
                              std::pow(target_var / 2.0, 0.25), rng);
                fill_gaussian(l.V2.data(), std::size_t(l.V2.size()),
                              std::pow(target_var / 2.0, 0.25), rng);
                break;
            case Structure::circulant:
                l.circ = Vec(sh.inner);
                fill_gaussian(l.circ.data(), std::size_t(l.circ.size()), std::sqrt(target_var),
                              rng);
                break;
            case Structure::phd: {
                l.diag = Vec(sh.inner);
                fill_gaussian(l.diag.data(), std::size_t(l.diag.size()),
                              std::sqrt(double(sh.inner) * target_var), rng);
                // fixed sparse P: one Gaussian nonzero per output row
                l.p_cols.resize(std::size_t(sh.width));
                l.p_vals = Vec(sh.width);
                std::uniform_int_distribution<int> col(0, sh.inner - 1);
                for (int r = 0; r < sh.width; ++r) {
                    l.p_cols[std::size_t(r)] = col(rng);
                    l.p_vals[r] = std::normal_distribution<double>(0.0, 1.0)(rng);
                }
                break;
            }
        }
        l.bias = Vec::Zero(sh.width);
        if (cosine)
            for (int i = 0; i < sh.width; ++i) l.bias[i] = phase(rng);
        store.layers.push_back(std::move(l));
    }
    return store;
}

namespace {

Mat pad_cols_plain(const Mat& X, long target) {
    if (X.cols() == target) return X;
    Mat out = Mat::Zero(X.rows(), target);
    out.leftCols(X.cols()) = X;
    return out;
}

bool pads_input(Structure s) {
    return s == Structure::hd || s == Structure::phd || s == Structure::circulant;
}

Mat fwht_rows(Mat X) {
    for (long r = 0; r < X.rows(); ++r)
        fwht(std::span<double>(X.data() + r * X.cols(), std::size_t(X.cols())));
    return X;
}

Mat apply_activation(Activation act, const Mat& Z) {
    switch (act) {
        case Activation::cosine: return Z.array().cos().matrix();
        case Activation::square: return Z.array().square().matrix();
        case Activation::exp_m1: return (Z.array().exp() - 1.0).matrix();
        case Activation::relu: return Z.array().max(0.0).matrix();
        case Activation::relu_polyfit3: {
            const PolyCoeffs c = relu_polyfit3_coeffs();
            const auto z = Z.array();
            return (c.c0 + z * (c.c1 + z * (c.c2 + z * c.c3))).matrix();
        }
        case Activation::none: return Z;
    }
    return Z;
}

Mat activation_grad(Activation act, const Mat& Z) {
    switch (act) {
        case Activation::cosine: return (-Z.array().sin()).matrix();
        case Activation::square: return (2.0 * Z.array()).matrix();
        case Activation::exp_m1: return Z.array().exp().matrix();
        case Activation::relu: return (Z.array() > 0.0).cast<double>().matrix();
        case Activation::relu_polyfit3: {
            const PolyCoeffs c = relu_polyfit3_coeffs();
            const auto z = Z.array();
            return (c.c1 + z * (2.0 * c.c2 + z * (3.0 * c.c3))).matrix();
        }
        case Activation::none: return Mat::Ones(Z.rows(), Z.cols());
    }
    return Mat::Ones(Z.rows(), Z.cols());
}

// Pre-activation of one layer on a (pre-padded) input batch.
Mat linear_forward(const LayerParams& l, const Mat& Xp) {
    const LayerShape& sh = l.shape;
    switch (sh.structure) {
        case Structure::dense:
            return (Xp * l.W.transpose()).rowwise() + l.bias.transpose();
        case Structure::hd: {
            const Mat H = fwht_rows((Xp.array().rowwise() * l.diag.transpose().array()).matrix());
            return H.leftCols(sh.width).rowwise() + l.bias.transpose();
        }
        case Structure::lowrank:
            return ((Xp * l.V2.transpose()) * l.V1).rowwise() + l.bias.transpose();
        case Structure::circulant: {
            Mat Z(Xp.rows(), sh.width);
            for (long r = 0; r < Xp.rows(); ++r) {
                const Vec y = circulant_matvec(l.circ, Xp.row(r).transpose());
                Z.row(r) = y.head(sh.width).transpose();
            }
            return Z.rowwise() + l.bias.transpose();
        }
        case Structure::phd: {
            const Mat T = fwht_rows((Xp.array().rowwise() * l.diag.transpose().array()).matrix());
            Mat Z(Xp.rows(), sh.width);
            for (long r = 0; r < Xp.rows(); ++r)
                for (int i = 0; i < sh.width; ++i)
                    Z(r, i) = l.p_vals[i] * T(r, l.p_cols[std::size_t(i)]);
            return Z.rowwise() + l.bias.transpose();
        }
    }
    throw std::logic_error("unreachable");
}

}  // namespace

Mat forward_plain(const ParamStore& params, const Mat& batch, ForwardCache* cache) {
    Mat X = batch;
    if (cache) {
        cache->inputs.clear();
        cache->preact.clear();
    }
    for (const LayerParams& l : params.layers) {
        if (X.cols() != l.shape.in)
            throw std::invalid_argument("forward: layer input width mismatch");
        const Mat Xp = pads_input(l.shape.structure) ? pad_cols_plain(X, l.shape.inner) : X;
        const Mat Z = linear_forward(l, Xp);
        if (cache) {
            cache->inputs.push_back(Xp);
            cache->preact.push_back(Z);
        }
        X = apply_activation(l.shape.activation, Z);
    }
    if (cache) cache->logits = X;
    return X;
}

Mat softmax(const Mat& logits) {
    Mat out(logits.rows(), logits.cols());
    for (long r = 0; r < logits.rows(); ++r) {
        const double m = logits.row(r).maxCoeff();
        Eigen::ArrayXd e = (logits.row(r).array() - m).exp();
        out.row(r) = (e / e.sum()).matrix();
    }
    return out;
}

double loss_softmax_ce(const Mat& logits, std::span<const int> labels) {
    if (std::size_t(logits.rows()) != labels.size())
        throw std::invalid_argument("loss: batch size mismatch");
    double total = 0.0;
    for (long r = 0; r < logits.rows(); ++r) {
        const double m = logits.row(r).maxCoeff();
        const double lse = m + std::log((logits.row(r).array() - m).exp().sum());
        total += lse - logits(r, labels[std::size_t(r)]);
    }
    return total / double(logits.rows());
}

ParamStore backward(const ParamStore& params, const ForwardCache& cache,
                    std::span<const int> labels) {
    ParamStore grads;
    grads.spec = params.spec;
    grads.layers.resize(params.layers.size());

    const long n = cache.logits.rows();
    Mat G = softmax(cache.logits);
    for (long r = 0; r < n; ++r) G(r, labels[std::size_t(r)]) -= 1.0;
    G /= double(n);  // dL/dlogits

    for (std::size_t li = params.layers.size(); li-- > 0;) {
        const LayerParams& l = params.layers[li];
        const LayerShape& sh = l.shape;
        LayerParams& g = grads.layers[li];
        g.shape = sh;

        // G holds dL/dA of this layer; fold in the activation derivative.
        if (sh.activation != Activation::none)
            G = (G.array() * activation_grad(sh.activation, cache.preact[li]).array()).matrix();

        const Mat& Xp = cache.inputs[li];
        g.bias = G.colwise().sum().transpose();

        Mat gX;  // gradient w.r.t. this layer's (padded) input
        switch (sh.structure) {
            case Structure::dense:
                g.W = G.transpose() * Xp;
                gX = G * l.W;
                break;
            case Structure::hd: {
                const Mat Gpad = pad_cols_plain(G, sh.inner);
                const Mat HG = fwht_rows(Gpad);
                g.diag = (Xp.array() * HG.array()).colwise().sum().matrix().transpose();
                gX = (HG.array().rowwise() * l.diag.transpose().array()).matrix();
                break;
            }
            case Structure::lowrank: {
                const Mat U = Xp * l.V2.transpose();  // n x 2
                g.V1 = U.transpose() * G;             // 2 x width
                const Mat gU = G * l.V1.transpose();  // n x 2
                g.V2 = gU.transpose() * Xp;           // 2 x in
                gX = gU * l.V2;
                break;
            }
            case Structure::circulant: {
                const Mat Gpad = pad_cols_plain(G, sh.inner);
                const long d = sh.inner;
                g.circ = Vec::Zero(d);
                gX = Mat::Zero(Xp.rows(), d);
                for (long s = 0; s < Xp.rows(); ++s) {
                    for (long i = 0; i < d; ++i) {
                        const double gv = Gpad(s, i);
                        if (gv == 0.0) continue;
                        for (long j = 0; j < d; ++j) {
                            g.circ[(i - j + d) % d] += gv * Xp(s, j);
                            gX(s, j) += l.circ[(i - j + d) % d] * gv;
                        }
                    }
                }
                break;
            }
            case Structure::phd: {
                Mat GT = Mat::Zero(Xp.rows(), sh.inner);  // dL/dt, t = H(diag ⊙ x)
                for (long s = 0; s < Xp.rows(); ++s)
                    for (int i = 0; i < sh.width; ++i)
                        GT(s, l.p_cols[std::size_t(i)]) += l.p_vals[i] * G(s, i);
                const Mat HG = fwht_rows(GT);
                g.diag = (Xp.array() * HG.array()).colwise().sum().matrix().transpose();
                gX = (HG.array().rowwise() * l.diag.transpose().array()).matrix();
                break;
            }
        }

        if (li > 0) {
            const int upstream_width = params.layers[li - 1].shape.width;
            G = gX.leftCols(upstream_width);
        }
    }
    return grads;
}

namespace {

struct AdamState {
    std::vector<Vec> m, v;
    long t = 0;
};

void sgd_step(ParamStore& params, const ParamStore& grads, double lr) {
    std::vector<std::pair<const double*, std::size_t>> gs;
    grads.for_each_tensor([&](const double* p, std::size_t n) { gs.emplace_back(p, n); });
    std::size_t i = 0;
    params.for_each_tensor([&](double* p, std::size_t n) {
        for (std::size_t j = 0; j < n; ++j) p[j] -= lr * gs[i].first[j];
        ++i;
    });
}

void adam_step(ParamStore& params, const ParamStore& grads, double lr, AdamState& st) {
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    std::vector<std::pair<const double*, std::size_t>> gs;
    grads.for_each_tensor([&](const double* p, std::size_t n) { gs.emplace_back(p, n); });
    if (st.m.empty()) {
        for (auto& [p, n] : gs) {
            st.m.push_back(Vec::Zero(long(n)));
            st.v.push_back(Vec::Zero(long(n)));
        }
    }
    st.t += 1;
    const double c1 = 1.0 - std::pow(b1, double(st.t));
    const double c2 = 1.0 - std::pow(b2, double(st.t));
    std::size_t i = 0;
    params.for_each_tensor([&](double* p, std::size_t n) {
        const double* g = gs[i].first;
        Vec& m = st.m[i];
        Vec& v = st.v[i];
        for (std::size_t j = 0; j < n; ++j) {
            m[long(j)] = b1 * m[long(j)] + (1 - b1) * g[j];
            v[long(j)] = b2 * v[long(j)] + (1 - b2) * g[j] * g[j];
            p[j] -= lr * (m[long(j)] / c1) / (std::sqrt(v[long(j)] / c2) + eps);
        }
        ++i;
    });
}

bool all_finite(const ParamStore& params) {
    bool ok = true;
    params.for_each_tensor([&](const double* p, std::size_t n) {
        for (std::size_t j = 0; j < n; ++j)
            if (!std::isfinite(p[j])) ok = false;
    });
    return ok;
}

}  // namespace

std::vector<int> predict(const ParamStore& params, const Mat& batch) {
    const Mat logits = forward_plain(params, batch);
    std::vector<int> out(std::size_t(logits.rows()));
    for (long r = 0; r < logits.rows(); ++r) {
        int best = 0;
        double bv = -std::numeric_limits<double>::infinity();
        for (long c = 0; c < logits.cols(); ++c) {
            const double v = logits(r, c);
            if (std::isfinite(v) && v > bv) {
                bv = v;
                best = int(c);
            }
        }
        out[std::size_t(r)] = best;
    }
    return out;
}

EvalResult evaluate(const ParamStore& params, const Dataset& ds) {
    EvalResult res;
    const long chunk = 2048;
    double loss_sum = 0.0;
    long correct = 0;
    for (long start = 0; start < ds.n(); start += chunk) {
        const long len = std::min(chunk, ds.n() - start);
        const Mat logits = forward_plain(params, ds.features.middleRows(start, len));
        std::vector<int> labels(ds.labels.begin() + start, ds.labels.begin() + start + len);
        const double l = loss_softmax_ce(logits, labels);
        loss_sum += std::isfinite(l) ? l * double(len) : 0.0;
        for (long r = 0; r < len; ++r) {
            int best = 0;
            double bv = -std::numeric_limits<double>::infinity();
            for (long c = 0; c < logits.cols(); ++c)
                if (std::isfinite(logits(r, c)) && logits(r, c) > bv) {
                    bv = logits(r, c);
                    best = int(c);
                }
            if (best == labels[std::size_t(r)]) ++correct;
        }
    }
    res.accuracy = double(correct) / double(ds.n());
    res.loss = loss_sum / double(ds.n());
    return res;
}

TrainResult train(const ModelSpec& spec, const TrainCfg& cfg, const Dataset& train_ds,
                  const Dataset& eval_ds) {
    if (train_ds.dim() != spec.input_dim)
        throw std::invalid_argument("train: dataset dimension does not match spec");

    ModelSpec seeded = spec;
    seeded.seed = mix64(spec.seed, cfg.seed);
    TrainResult res{init_model(seeded), {}, false};

    Rng shuffle_rng(mix64(cfg.seed, 0x5eedu));
    AdamState adam;
    std::vector<long> order(std::size_t(train_ds.n()));
    std::iota(order.begin(), order.end(), 0L);

    for (int epoch = 0; epoch < cfg.epochs && !res.diverged; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        double loss_sum = 0.0;
        long seen = 0;

        for (long start = 0; start < train_ds.n(); start += cfg.batch_size) {
            const long len = std::min(long(cfg.batch_size), train_ds.n() - start);
            Mat batch(len, train_ds.dim());
            std::vector<int> labels(static_cast<std::size_t>(len));
            for (long i = 0; i < len; ++i) {
                batch.row(i) = train_ds.features.row(order[std::size_t(start + i)]);
                labels[std::size_t(i)] = train_ds.labels[std::size_t(order[std::size_t(start + i)])];
            }

            ForwardCache cache;
            forward_plain(res.params, batch, &cache);
            const double loss = loss_softmax_ce(cache.logits, labels);
            if (!std::isfinite(loss)) {
                res.diverged = true;
            } else {
                const ParamStore grads = backward(res.params, cache, labels);
                if (cfg.optimizer == Optimizer::sgd)
                    sgd_step(res.params, grads, cfg.learning_rate);
                else
                    adam_step(res.params, grads, cfg.learning_rate, adam);
                if (!all_finite(res.params)) res.diverged = true;
                loss_sum += loss * double(len);
                seen += len;
            }
            if (res.diverged) break;
        }

        EpochMetrics em;
        em.epoch = epoch;
        em.train_loss = seen > 0 ? loss_sum / double(seen) : std::numeric_limits<double>::quiet_NaN();
        em.diverged = res.diverged;
        em.eval_accuracy = res.diverged ? 0.0 : evaluate(res.params, eval_ds).accuracy;
        res.history.push_back(em);
    }
    return res;
}

std::vector<SweepCell> sweep(const ModelSpec& base_spec, const Dataset& train_ds,
                             const Dataset& eval_ds, const std::vector<Activation>& activations,
                             const std::vector<Structure>& structures,
                             const std::vector<double>& learning_rates,
                             const std::vector<Optimizer>& optimizers, int trials,
                             const TrainCfg& base_cfg, int jobs) {
    std::vector<SweepCell> cells;
    for (Activation a : activations)
        for (Structure s : structures)
            for (Optimizer o : optimizers)
                for (double lr : learning_rates) {
                    SweepCell c;
                    c.activation = a;
                    c.structure = s;
                    c.optimizer = o;
                    c.learning_rate = lr;
                    c.trials = trials;
                    cells.push_back(c);
                }

    auto run_cell = [&](SweepCell& c) {
        try {
            std::vector<double> accs;
            for (int t = 0; t < trials; ++t) {
                ModelSpec spec = base_spec;
                for (LayerSpec& l : spec.layers) {
                    l.activation = c.activation;
                    l.structure = c.structure;
                }
                TrainCfg cfg = base_cfg;
                cfg.optimizer = c.optimizer;
                cfg.learning_rate = c.learning_rate;
                cfg.seed = mix64(base_cfg.seed, std::uint64_t(t) + 1);
                const TrainResult r = train(spec, cfg, train_ds, eval_ds);
                if (r.diverged) c.diverged_trials += 1;
                accs.push_back(r.history.empty() ? 0.0 : r.history.back().eval_accuracy);
            }
            const double mean = std::accumulate(accs.begin(), accs.end(), 0.0) / double(accs.size());
            double var = 0.0;
            for (double a : accs) var += (a - mean) * (a - mean);
            c.mean_accuracy = mean;
            c.std_accuracy = accs.size() > 1 ? std::sqrt(var / double(accs.size() - 1)) : 0.0;
        } catch (const std::exception& e) {
            c.error = e.what();
        }
    };

    if (jobs <= 1) {
        for (SweepCell& c : cells) run_cell(c);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= cells.size()) return;
                run_cell(cells[i]);
            }
        };
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    return cells;
}

}  // namespace hdcos
