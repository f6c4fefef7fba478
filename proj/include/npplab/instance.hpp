#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "npplab/errors.hpp"
#include "npplab/rng.hpp"

namespace npplab {

enum class Mode { Float64, Quantized };

// An NPP instance: n i.i.d. standard normal weights with seed provenance.
// In quantized mode the weights are additionally snapped to a 2^-bits grid
// and carried as exact signed integers, so subset sums can be computed with
// no cancellation error. The optimal discrepancy sinks like sqrt(n) 2^-n,
// which at n around 45 drops below float64 cancellation noise; the integer
// path is the trustworthy oracle there.
struct Instance {
    int n = 0;
    Mode mode = Mode::Float64;
    int bits = 0;  // fractional bits of the quantization grid (quantized mode)
    std::vector<double> weights;
    std::vector<std::int64_t> qweights;  // round(weights[i] * 2^bits)
    std::uint64_t seed = 0;
    std::string label;

    bool quantized() const { return mode == Mode::Quantized; }
    double scale() const { return std::ldexp(1.0, -bits); }
};

inline constexpr int kDefaultQuantBits = 50;

namespace detail {

inline void quantize_weights(Instance& inst) {
    inst.qweights.resize(inst.weights.size());
    const double factor = std::ldexp(1.0, inst.bits);
    // No subset sum may overflow: |q_i| < 2^62 / n.
    const double limit = std::ldexp(1.0, 62) / inst.n;
    for (std::size_t i = 0; i < inst.weights.size(); ++i) {
        const double scaled = inst.weights[i] * factor;
        require(std::abs(scaled) < limit,
                "quantize: weight too large for overflow-free subset sums");
        inst.qweights[i] = std::llround(scaled);
    }
}

}  // namespace detail

// Fresh instance with i.i.d. N(0,1) weights from the stream keyed by seed.
// Identical (n, seed, mode, bits) always reproduces identical bytes.
inline Instance generate(int n, std::uint64_t seed, Mode mode = Mode::Float64,
                         int bits = kDefaultQuantBits) {
    require(n >= 1, "generate: n must be >= 1");
    Instance inst;
    inst.n = n;
    inst.mode = mode;
    inst.bits = (mode == Mode::Quantized) ? bits : 0;
    inst.seed = seed;
    inst.weights.resize(n);
    for (int i = 0; i < n; ++i) inst.weights[i] = rng::normal(seed, i);
    if (mode == Mode::Quantized) detail::quantize_weights(inst);
    return inst;
}

// Instance from explicit weights (fixtures, file loads).
inline Instance from_weights(std::vector<double> w, Mode mode = Mode::Float64,
                             int bits = kDefaultQuantBits, std::uint64_t seed = 0,
                             std::string label = "manual") {
    require(!w.empty(), "from_weights: need at least one weight");
    for (double x : w) require(std::isfinite(x), "from_weights: weights must be finite");
    Instance inst;
    inst.n = static_cast<int>(w.size());
    inst.mode = mode;
    inst.bits = (mode == Mode::Quantized) ? bits : 0;
    inst.seed = seed;
    inst.label = std::move(label);
    inst.weights = std::move(w);
    if (mode == Mode::Quantized) detail::quantize_weights(inst);
    return inst;
}

// Base instance X0 plus T independently seeded perturbations X1..XT, all
// sharing n and mode. Member seeds are derived from the master seed by
// index, so they are pairwise distinct and reproducible.
struct CorrelatedEnsemble {
    Instance base;
    std::vector<Instance> perturbations;
    int n = 0;
    int T = 0;
};

inline CorrelatedEnsemble make_ensemble(int n, int T, std::uint64_t master_seed,
                                        Mode mode = Mode::Float64,
                                        int bits = kDefaultQuantBits) {
    require(T >= 0, "make_ensemble: T must be >= 0");
    CorrelatedEnsemble ens;
    ens.n = n;
    ens.T = T;
    ens.base = generate(n, seed_stream(master_seed, 0), mode, bits);
    ens.perturbations.reserve(T);
    for (int i = 1; i <= T; ++i)
        ens.perturbations.push_back(generate(n, seed_stream(master_seed, i), mode, bits));
    return ens;
}

// Two correlated N(0,1)^n vectors: Y_j = sqrt(1-tau^2) X0_j + tau Xi_j.
// tau=0 returns the base exactly, tau=1 the perturbation exactly.
inline Instance interpolate_pair(const Instance& base, const Instance& pert, double tau) {
    require(base.n == pert.n && base.mode == pert.mode && base.bits == pert.bits,
            "interpolate: members must share n and mode");
    require(tau >= 0.0 && tau <= 1.0, "interpolate: tau must lie in [0,1]");
    Instance out;
    out.n = base.n;
    out.mode = base.mode;
    out.bits = base.bits;
    out.seed = base.seed;
    out.label = "interpolated";
    out.weights.resize(base.n);
    const double gamma = std::sqrt(1.0 - tau * tau);
    for (int j = 0; j < base.n; ++j)
        out.weights[j] = gamma * base.weights[j] + tau * pert.weights[j];
    if (out.mode == Mode::Quantized) detail::quantize_weights(out);
    return out;
}

inline Instance interpolate(const CorrelatedEnsemble& ens, int i, double tau) {
    require(i >= 1 && i <= ens.T, "interpolate: index i out of range");
    return interpolate_pair(ens.base, ens.perturbations[i - 1], tau);
}

// Correlation of Y(tau_k) and Y(tau_next) built from the same pair:
// rho_k = sqrt((1-tau_k^2)(1-tau_next^2)) + tau_k tau_next. Symmetric, in
// [0,1], equal to 1 iff the arguments coincide.
inline double step_correlation(double tau_k, double tau_next) {
    require(tau_k >= 0.0 && tau_k <= 1.0 && tau_next >= 0.0 && tau_next <= 1.0,
            "step_correlation: arguments must lie in [0,1]");
    return std::sqrt((1.0 - tau_k * tau_k) * (1.0 - tau_next * tau_next)) +
           tau_k * tau_next;
}

}  // namespace npplab
