#pragma once

#include <cmath>
#include <cstdint>
#include <optional>

#include "npplab/instance.hpp"
#include "npplab/spin.hpp"

namespace npplab {

// Discrepancy of a spin configuration: raw = |<sigma, X>|, normalized =
// raw / sqrt(n). In quantized mode raw_int carries the exact integer value
// |sum sigma_i q_i| (grid units), from which raw is derived.
struct EnergyRecord {
    SpinConfig sigma;
    double raw = 0.0;
    double normalized = 0.0;
    double log2_normalized = 0.0;
    std::optional<std::int64_t> raw_int;
};

namespace detail {

// Neumaier-compensated signed sum of sigma_i * w_i. Error is of order
// eps * sum|w_i| regardless of cancellation in the result.
inline double signed_sum_float(const Instance& X, const SpinConfig& sigma) {
    double sum = 0.0, comp = 0.0;
    for (int i = 0; i < X.n; ++i) {
        const double term = sigma.bit(i) ? X.weights[i] : -X.weights[i];
        const double t = sum + term;
        if (std::abs(sum) >= std::abs(term))
            comp += (sum - t) + term;
        else
            comp += (term - t) + sum;
        sum = t;
    }
    return sum + comp;
}

inline std::int64_t signed_sum_quantized(const Instance& X, const SpinConfig& sigma) {
    std::int64_t sum = 0;
    for (int i = 0; i < X.n; ++i)
        sum += sigma.bit(i) ? X.qweights[i] : -X.qweights[i];
    return sum;
}

inline EnergyRecord make_record_float(const Instance& X, SpinConfig sigma, double raw) {
    EnergyRecord rec;
    rec.sigma = std::move(sigma);
    rec.raw = std::abs(raw);
    rec.normalized = rec.raw / std::sqrt(static_cast<double>(X.n));
    rec.log2_normalized = std::log2(rec.normalized);
    return rec;
}

inline EnergyRecord make_record_quantized(const Instance& X, SpinConfig sigma,
                                          std::int64_t raw_int) {
    EnergyRecord rec;
    rec.sigma = std::move(sigma);
    rec.raw_int = raw_int < 0 ? -raw_int : raw_int;
    rec.raw = static_cast<double>(*rec.raw_int) * X.scale();
    rec.normalized = rec.raw / std::sqrt(static_cast<double>(X.n));
    rec.log2_normalized = std::log2(rec.normalized);
    return rec;
}

}  // namespace detail

inline EnergyRecord energy(const Instance& X, const SpinConfig& sigma) {
    require(X.n == sigma.n(), "energy: instance/spin length mismatch");
    if (X.quantized())
        return detail::make_record_quantized(X, sigma, detail::signed_sum_quantized(X, sigma));
    return detail::make_record_float(X, sigma, detail::signed_sum_float(X, sigma));
}

}  // namespace npplab
