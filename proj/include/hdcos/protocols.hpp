#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hdcos/model_spec.hpp"
#include "hdcos/runtime.hpp"

namespace hdcos {

// Public phase-lift constant. Shares sum to x*2^f only modulo 2^64; naive
// local trig would be wrong whenever the sum wraps. Pre-multiplying each
// share by j = round(2^(k-f) / (2*pi)) maps ring wraps onto exact multiples
// of 2*pi, where the cosine is blind to them. The rounding of j leaves a
// relative phase error below 1e-12 at f = 20.
struct PhaseLiftCfg {
    u64 j = 0;
    double theta_scale = 0.0;  // 2*pi / 2^64

    static PhaseLiftCfg make(const FixedCfg& cfg);
    // |x| bound keeping the j-rounding phase error negligible.
    static constexpr double max_abs_input = 1024.0;

    double theta(RingVal share_val) const {
        return double(to_signed(RingVal{share_val.v * j})) * theta_scale;
    }
};

struct PolyCoeffs {
    double c0 = 0, c1 = 0, c2 = 0, c3 = 0;

    double eval(double x) const { return c0 + x * (c1 + x * (c2 + x * c3)); }
};

// Frozen least-squares degree-3 fit of relu on 1001 uniform points over
// [-3, 3]; must stay in sync with fixtures/relu_polyfit3.json.
PolyCoeffs relu_polyfit3_coeffs();
PolyCoeffs poly_fixture_from_json(const std::string& json_text);
PolyCoeffs load_poly_fixture(const std::string& path);
std::string poly_fixture_to_json(const PolyCoeffs& c);

// Local truncation of a 2f-fractional-bit share back to f bits. Party 0
// floor-divides its share; party 1 negates, floor-divides, negates back.
// Error is at most one ulp except for a wrap failure of probability about
// |value| * 2^2f / 2^64 per element.
Share truncate_share(const Share& s, unsigned f_bits);
std::vector<Share> truncate_shares(std::span<const Share> zs, unsigned f_bits);

// One party holds `values` in plaintext and splits them towards the other.
// Non-owners pass an empty span. One exchange; owner sends 8 bytes/value.
std::vector<Share> reshare_batch(PartyContext& ctx, std::span<const RingVal> values, int owner);

// Both parties contribute a same-length vector of locally-known values in
// one exchange (the simultaneous case of resharing). Returns shares of
// party 0's values and of party 1's values.
std::pair<std::vector<Share>, std::vector<Share>> reshare_bidirectional(
    PartyContext& ctx, std::span<const RingVal> my_values);

// Beaver multiplication of two share vectors, openings batched into one
// round (16 bytes per element per party), truncated back to f bits.
std::vector<Share> secure_mul_batch(PartyContext& ctx, std::span<const Share> xs,
                                    std::span<const Share> ys);

// x^2 in one online round.
std::vector<Share> secure_square(PartyContext& ctx, std::span<const Share> xs);

// cos(x) in exactly two online rounds regardless of batch size:
//   1. each party lifts its share to an angle, takes cos/sin locally, and
//      both reshare the four encoded vectors in one exchange;
//   2. one batched Beaver round for cos0*cos1 and sin0*sin1;
//   3. local subtraction gives cos(x0 + x1) by the angle-addition identity.
std::vector<Share> secure_cosine(PartyContext& ctx, std::span<const Share> xs);

// c0 + c1 x + c2 x^2 + c3 x^3 with public coefficients: round one squares,
// round two forms x^3 = x * x^2, combination is local.
std::vector<Share> secure_relu_polyfit3(PartyContext& ctx, std::span<const Share> xs,
                                        const PolyCoeffs& coeffs);

// Row-major share matrix.
struct ShareMat {
    std::size_t rows = 0, cols = 0;
    std::vector<Share> data;

    Share& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    const Share& at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

// W x with every product in one batched round; rows*cols secure mults.
std::vector<Share> secure_matvec_dense(PartyContext& ctx, const ShareMat& W,
                                       std::span<const Share> x);

// H (diag ⊙ x): d secure mults in one round, then each party runs the
// normalized Walsh-Hadamard butterfly on its own shares (no communication).
std::vector<Share> secure_hd_layer(PartyContext& ctx, std::span<const Share> diag,
                                   std::span<const Share> x);

// V1^T (V2 x): 2(d + k) secure mults in two rounds (the second matvec
// depends on the first).
std::vector<Share> secure_lowrank_matvec(PartyContext& ctx, const ShareMat& V1,
                                         const ShareMat& V2, std::span<const Share> x);

// One party's half of a secret-shared trained model.
struct SharedLayer {
    LayerShape shape;
    ShareMat W;                // dense: width x in
    std::vector<Share> diag;   // hd: inner
    ShareMat V1, V2;           // lowrank: 2 x width, 2 x in
    std::vector<Share> bias;   // width
};

struct SharedModel {
    ModelSpec spec;
    FixedCfg cfg;
    std::vector<SharedLayer> layers;  // includes final output layer
};

// Forward pass over a batch of shared inputs (rows = samples). Rounds do
// not depend on the batch size; per-sample mult counts follow the layer
// cost model. Unsupported structures/activations raise CapabilityError.
ShareMat secure_forward(PartyContext& ctx, const SharedModel& model, const ShareMat& inputs);

}  // namespace hdcos
