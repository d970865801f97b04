#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hdcos/data.hpp"
#include "hdcos/linalg.hpp"
#include "hdcos/model_spec.hpp"
#include "hdcos/protocols.hpp"

namespace hdcos {

// Parameters of one layer; which tensors are live depends on the structure.
// The phd sparse matrix P is fixed (derived from the model seed), so it is
// regenerated rather than serialized.
struct LayerParams {
    LayerShape shape;
    Mat W;                    // dense: width x in
    Vec diag;                 // hd / phd: inner
    Mat V1, V2;               // lowrank: 2 x width, 2 x in
    Vec circ;                 // circulant: inner (first column)
    std::vector<int> p_cols;  // phd: column of the nonzero per row
    Vec p_vals;               // phd: nonzero values
    Vec bias;                 // width
};

struct ParamStore {
    ModelSpec spec;
    std::vector<LayerParams> layers;  // hidden layers + final dense output

    // Visits every learnable tensor as a flat span, in declaration order.
    void for_each_tensor(const std::function<void(double*, std::size_t)>& fn);
    void for_each_tensor(const std::function<void(const double*, std::size_t)>& fn) const;
    std::size_t param_count() const;
};

// Cosine layers get N(0, 1/fan_in)-equivalent weights and phases uniform on
// [0, 2pi); everything else Glorot-style Gaussians with zero bias.
ParamStore init_model(const ModelSpec& spec);

struct ForwardCache {
    std::vector<Mat> inputs;   // per layer, padded to the working width
    std::vector<Mat> preact;   // per layer, n x width
    Mat logits;
};

Mat forward_plain(const ParamStore& params, const Mat& batch, ForwardCache* cache = nullptr);
double loss_softmax_ce(const Mat& logits, std::span<const int> labels);
Mat softmax(const Mat& logits);

// Gradients come back in a ParamStore of identical shapes.
ParamStore backward(const ParamStore& params, const ForwardCache& cache,
                    std::span<const int> labels);

struct TrainCfg {
    Optimizer optimizer = Optimizer::sgd;
    double learning_rate = 0.01;
    int batch_size = 128;
    int epochs = 10;
    std::uint64_t seed = 1;
};

struct EpochMetrics {
    int epoch = 0;
    double train_loss = 0.0;
    double eval_accuracy = 0.0;
    bool diverged = false;
};

struct TrainResult {
    ParamStore params;
    std::vector<EpochMetrics> history;
    bool diverged = false;
};

struct EvalResult {
    double accuracy = 0.0;
    double loss = 0.0;
};

// Divergence (non-finite loss or parameters) sets the flag and stops
// updating; the run still completes and reports.
TrainResult train(const ModelSpec& spec, const TrainCfg& cfg, const Dataset& train_ds,
                  const Dataset& eval_ds);
EvalResult evaluate(const ParamStore& params, const Dataset& ds);
std::vector<int> predict(const ParamStore& params, const Mat& batch);

struct SweepCell {
    Activation activation;
    Structure structure;
    Optimizer optimizer;
    double learning_rate = 0.0;
    int trials = 0;
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;
    int diverged_trials = 0;
    std::string error;  // non-empty if the whole cell failed
};

// Full activation x structure x optimizer x lr grid, `trials` seeds per
// cell, averaged. Cell failures are recorded, not fatal. jobs > 1 runs
// cells on a small worker pool; results are deterministic either way.
std::vector<SweepCell> sweep(const ModelSpec& base_spec, const Dataset& train_ds,
                             const Dataset& eval_ds, const std::vector<Activation>& activations,
                             const std::vector<Structure>& structures,
                             const std::vector<double>& learning_rates,
                             const std::vector<Optimizer>& optimizers, int trials,
                             const TrainCfg& base_cfg, int jobs = 1);

// Model file: u32 LE JSON-header length, JSON {version, spec, f_bits},
// then all tensors as little-endian f64 in declaration order.
void save_model(const ParamStore& params, const std::string& path, unsigned f_bits = 20);
struct LoadedModel {
    ParamStore params;
    unsigned f_bits = 20;
};
LoadedModel load_model(const std::string& path);

// Secret-shares every parameter; the two returned models reconstruct to
// the fixed-point encoding of the plaintext parameters.
std::pair<SharedModel, SharedModel> share_model(const ParamStore& params, const FixedCfg& cfg,
                                                Rng& rng);
void write_model_shares(const SharedModel& m, const std::string& path);
SharedModel read_model_shares(const std::string& path, const ModelSpec& spec);

// Triples needed to push `batch` samples through the model once.
std::uint64_t triples_for_inference(const ModelSpec& spec, std::uint64_t batch);

}  // namespace hdcos
