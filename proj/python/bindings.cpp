// Python bindings over the 2PC engine and trainer. Vectors and matrices
// cross the boundary as numpy arrays; the simulated two-party runs return
// plain dicts of cost counters.

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hdcos/data.hpp"
#include "hdcos/dealer.hpp"
#include "hdcos/nn.hpp"
#include "hdcos/protocols.hpp"
#include "hdcos/runtime.hpp"

namespace py = pybind11;
using namespace hdcos;

namespace {

FixedCfg make_cfg(unsigned f) {
    FixedCfg cfg{};
    cfg.f = f;
    validate(cfg);
    return cfg;
}

py::dict meter_dict(const CostMeter& m, std::size_t triples) {
    py::dict d;
    d["online_rounds"] = m.online_rounds;
    d["bytes_sent"] = m.bytes_sent;
    d["triples_consumed"] = triples;
    py::dict by;
    for (const auto& [name, c] : m.by_protocol) {
        py::dict e;
        e["rounds"] = c.rounds;
        e["bytes"] = c.bytes;
        by[name.c_str()] = e;
    }
    d["by_protocol"] = by;
    return d;
}

// Runs `fn` over shares of xs on an in-process transport pair and returns
// the reconstructed, decoded outputs plus party-0 costs.
template <typename Fn>
std::pair<std::vector<double>, py::dict> simulate(const std::vector<double>& xs,
                                                  std::size_t triples, unsigned f,
                                                  std::uint64_t seed, Fn fn) {
    const FixedCfg cfg = make_cfg(f);
    Rng rng(seed);
    auto [in0, in1] = split_vec(encode_vec(xs, cfg), rng, cfg);
    auto [p0, p1] = gen_triples(triples, rng, cfg);
    std::array<TriplePool, 2> pools{std::move(p0), std::move(p1)};
    const PartyProgram prog = [&](PartyContext& ctx, std::span<const Share> in) {
        return fn(ctx, in);
    };
    TwoPartyRun run;
    {
        py::gil_scoped_release release;
        run = run_two_party(prog, {in0, in1}, pools, cfg, seed);
    }
    const auto rings = reconstruct_vec(run.outputs[0], run.outputs[1]);
    return {decode_vec(rings, cfg), meter_dict(run.meters[0], run.triples_consumed[0])};
}

std::vector<double> to_vec(const py::array_t<double>& a) {
    const auto buf = a.request();
    const double* p = static_cast<const double*>(buf.ptr);
    return std::vector<double>(p, p + buf.size);
}

Dataset make_dataset(const Mat& X, const std::vector<int>& y, int classes) {
    Dataset ds;
    ds.features = X;
    ds.labels = y;
    ds.classes = classes > 0 ? classes : (y.empty() ? 0 : *std::max_element(y.begin(), y.end()) + 1);
    ds.name = "ndarray";
    return ds;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "2PC engine for cosine/Hadamard-Diagonal networks";

    // fixed-point ring
    m.def("encode", [](const py::array_t<double>& xs, unsigned f) {
        const FixedCfg cfg = make_cfg(f);
        const auto v = to_vec(xs);
        py::array_t<std::uint64_t> out(py::ssize_t(v.size()));
        auto* p = out.mutable_data();
        for (std::size_t i = 0; i < v.size(); ++i) p[i] = encode(v[i], cfg).v;
        return out;
    }, py::arg("xs"), py::arg("f") = 20);

    m.def("decode", [](const py::array_t<std::uint64_t>& rs, unsigned f) {
        const FixedCfg cfg = make_cfg(f);
        const auto buf = rs.request();
        const auto* p = static_cast<const std::uint64_t*>(buf.ptr);
        py::array_t<double> out(buf.size);
        auto* q = out.mutable_data();
        for (py::ssize_t i = 0; i < buf.size; ++i) q[i] = decode(RingVal{p[i]}, cfg);
        return out;
    }, py::arg("rs"), py::arg("f") = 20);

    m.def("split", [](const py::array_t<std::uint64_t>& rs, std::uint64_t seed) {
        const FixedCfg cfg = make_cfg(20);
        Rng rng(seed);
        const auto buf = rs.request();
        const auto* p = static_cast<const std::uint64_t*>(buf.ptr);
        py::array_t<std::uint64_t> s0(buf.size), s1(buf.size);
        for (py::ssize_t i = 0; i < buf.size; ++i) {
            auto [a, b] = split(RingVal{p[i]}, rng, cfg);
            s0.mutable_data()[i] = a.val.v;
            s1.mutable_data()[i] = b.val.v;
        }
        return py::make_tuple(s0, s1);
    }, py::arg("ring_values"), py::arg("seed") = 1);

    m.def("reconstruct", [](const py::array_t<std::uint64_t>& s0,
                            const py::array_t<std::uint64_t>& s1) {
        const auto b0 = s0.request(), b1 = s1.request();
        if (b0.size != b1.size) throw std::invalid_argument("share length mismatch");
        py::array_t<std::uint64_t> out(b0.size);
        for (py::ssize_t i = 0; i < b0.size; ++i)
            out.mutable_data()[i] = static_cast<const std::uint64_t*>(b0.ptr)[i] +
                                    static_cast<const std::uint64_t*>(b1.ptr)[i];
        return out;
    });

    // plaintext linalg
    m.def("fwht", [](Vec x) { return fwht(std::move(x)); }, py::arg("x"));
    m.def("hadamard", [](std::size_t d) { return hadamard_naive(d); }, py::arg("d"));
    m.def("hd_matvec", &hd_matvec, py::arg("diag"), py::arg("x"));
    m.def("gaussian_kernel", &gaussian_kernel, py::arg("x"), py::arg("y"), py::arg("sigma"));
    m.def("rff_features",
          [](const Mat& X, std::size_t n_features, double sigma, std::uint64_t seed) {
              return rff_features(X, make_gaussian_rff(std::size_t(X.cols()), n_features, sigma,
                                                       seed));
          },
          py::arg("X"), py::arg("n_features"), py::arg("sigma") = 1.0, py::arg("seed") = 1);
    m.def("relu_polyfit3_coeffs", [] {
        const PolyCoeffs c = relu_polyfit3_coeffs();
        return py::make_tuple(c.c0, c.c1, c.c2, c.c3);
    });

    // simulated two-party protocols
    m.def("mpc_cosine", [](const py::array_t<double>& xs, unsigned f, std::uint64_t seed) {
        const auto v = to_vec(xs);
        return simulate(v, 2 * v.size(), f, seed, [](PartyContext& ctx, auto in) {
            return secure_cosine(ctx, in);
        });
    }, py::arg("xs"), py::arg("f") = 20, py::arg("seed") = 1);

    m.def("mpc_square", [](const py::array_t<double>& xs, unsigned f, std::uint64_t seed) {
        const auto v = to_vec(xs);
        return simulate(v, v.size(), f, seed, [](PartyContext& ctx, auto in) {
            return secure_square(ctx, in);
        });
    }, py::arg("xs"), py::arg("f") = 20, py::arg("seed") = 1);

    m.def("mpc_mul", [](const py::array_t<double>& xs, const py::array_t<double>& ys, unsigned f,
                        std::uint64_t seed) {
        auto v = to_vec(xs);
        const auto w = to_vec(ys);
        if (v.size() != w.size()) throw std::invalid_argument("length mismatch");
        const std::size_t n = v.size();
        v.insert(v.end(), w.begin(), w.end());
        return simulate(v, n, f, seed, [n](PartyContext& ctx, std::span<const Share> in) {
            return secure_mul_batch(ctx, in.subspan(0, n), in.subspan(n));
        });
    }, py::arg("xs"), py::arg("ys"), py::arg("f") = 20, py::arg("seed") = 1);

    m.def("mpc_relu_polyfit3", [](const py::array_t<double>& xs, unsigned f, std::uint64_t seed) {
        const auto v = to_vec(xs);
        return simulate(v, 2 * v.size(), f, seed, [](PartyContext& ctx, auto in) {
            return secure_relu_polyfit3(ctx, in, relu_polyfit3_coeffs());
        });
    }, py::arg("xs"), py::arg("f") = 20, py::arg("seed") = 1);

    m.def("mpc_hd_layer", [](const py::array_t<double>& diag, const py::array_t<double>& xs,
                             unsigned f, std::uint64_t seed) {
        auto d = to_vec(diag);
        const auto x = to_vec(xs);
        if (d.size() != x.size()) throw std::invalid_argument("length mismatch");
        const std::size_t n = x.size();
        d.insert(d.end(), x.begin(), x.end());
        return simulate(d, n, f, seed, [n](PartyContext& ctx, std::span<const Share> in) {
            return secure_hd_layer(ctx, in.subspan(0, n), in.subspan(n));
        });
    }, py::arg("diag"), py::arg("xs"), py::arg("f") = 20, py::arg("seed") = 1);

    // datasets
    py::class_<Dataset>(m, "Dataset")
        .def(py::init(&make_dataset), py::arg("features"), py::arg("labels"),
             py::arg("classes") = 0)
        .def_readonly("features", &Dataset::features)
        .def_readonly("labels", &Dataset::labels)
        .def_readonly("classes", &Dataset::classes)
        .def_readonly("name", &Dataset::name)
        .def_property_readonly("n", &Dataset::n)
        .def_property_readonly("dim", &Dataset::dim);

    m.def("load_mnist_idx", &load_mnist_idx, py::arg("images_path"), py::arg("labels_path"),
          py::arg("name") = "mnist");
    m.def("synth_gaussians", &synth_gaussians, py::arg("n"), py::arg("d"), py::arg("classes"),
          py::arg("separation"), py::arg("seed"));
    m.def("subsample", &subsample, py::arg("ds"), py::arg("n"), py::arg("seed"));
    m.def("split_dataset", &split_dataset, py::arg("ds"), py::arg("fraction"), py::arg("seed"));

    // models and training
    py::class_<ParamStore>(m, "Model")
        .def_property_readonly("spec_json",
                               [](const ParamStore& p) { return model_spec_to_json(p.spec); })
        .def("param_count", &ParamStore::param_count)
        .def("predict", [](const ParamStore& p, const Mat& X) { return predict(p, X); })
        .def("evaluate",
             [](const ParamStore& p, const Dataset& ds) {
                 const EvalResult r = evaluate(p, ds);
                 return py::make_tuple(r.accuracy, r.loss);
             })
        .def("save", [](const ParamStore& p, const std::string& path, unsigned f_bits) {
            save_model(p, path, f_bits);
        }, py::arg("path"), py::arg("f_bits") = 20);

    m.def("init_model",
          [](const std::string& spec_json) { return init_model(model_spec_from_json(spec_json)); },
          py::arg("spec_json"));
    m.def("load_model", [](const std::string& path) { return load_model(path).params; },
          py::arg("path"));

    m.def("train", [](const std::string& spec_json, const Dataset& train_ds,
                      const Dataset& eval_ds, const std::string& optimizer, double lr,
                      int batch_size, int epochs, std::uint64_t seed) {
        TrainCfg cfg;
        cfg.optimizer = optimizer_from_string(optimizer);
        cfg.learning_rate = lr;
        cfg.batch_size = batch_size;
        cfg.epochs = epochs;
        cfg.seed = seed;
        TrainResult res;
        {
            py::gil_scoped_release release;
            res = train(model_spec_from_json(spec_json), cfg, train_ds, eval_ds);
        }
        py::list history;
        for (const EpochMetrics& em : res.history) {
            py::dict row;
            row["epoch"] = em.epoch;
            row["train_loss"] = em.train_loss;
            row["eval_accuracy"] = em.eval_accuracy;
            row["diverged"] = em.diverged;
            history.append(row);
        }
        return py::make_tuple(res.params, history, res.diverged);
    }, py::arg("spec_json"), py::arg("train"), py::arg("eval"), py::arg("optimizer") = "sgd",
       py::arg("lr") = 0.01, py::arg("batch_size") = 128, py::arg("epochs") = 10,
       py::arg("seed") = 1);

    // end-to-end simulated 2PC inference of a trained model
    m.def("mpc_predict", [](const ParamStore& params, const Mat& X, unsigned f,
                            std::uint64_t seed) {
        const FixedCfg cfg = make_cfg(f);
        Rng rng(seed);
        auto [m0, m1] = share_model(params, cfg, rng);
        const std::size_t n = std::size_t(X.rows()), dim = std::size_t(X.cols());

        std::vector<double> flat(n * dim);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < dim; ++j) flat[i * dim + j] = X(long(i), long(j));

        const std::uint64_t triples = triples_for_inference(params.spec, n);
        auto [p0, p1] = gen_triples(triples, rng, cfg);
        std::array<TriplePool, 2> pools{std::move(p0), std::move(p1)};
        auto [in0, in1] = split_vec(encode_vec(flat, cfg), rng, cfg);

        const PartyProgram prog = [&](PartyContext& ctx, std::span<const Share> in) {
            const ShareMat Xs{n, dim, std::vector<Share>(in.begin(), in.end())};
            return secure_forward(ctx, ctx.party() == 0 ? m0 : m1, Xs).data;
        };
        TwoPartyRun run;
        {
            py::gil_scoped_release release;
            run = run_two_party(prog, {in0, in1}, pools, cfg, seed);
        }
        const auto logits = decode_vec(reconstruct_vec(run.outputs[0], run.outputs[1]), cfg);
        const int classes = params.spec.classes;
        py::array_t<int> preds(static_cast<py::ssize_t>(n));
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            for (int c = 1; c < classes; ++c)
                if (logits[i * std::size_t(classes) + std::size_t(c)] >
                    logits[i * std::size_t(classes) + std::size_t(best)])
                    best = c;
            preds.mutable_data()[py::ssize_t(i)] = best;
        }
        return py::make_tuple(preds, meter_dict(run.meters[0], run.triples_consumed[0]));
    }, py::arg("model"), py::arg("X"), py::arg("f") = 20, py::arg("seed") = 1);

    py::register_exception<PoolExhaustedError>(m, "PoolExhaustedError");
    py::register_exception<CapabilityError>(m, "CapabilityError");
    py::register_exception<DesyncError>(m, "DesyncError");
}
