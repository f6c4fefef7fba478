#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <queue>
#include <vector>

#include "npplab/energy.hpp"
#include "npplab/instance.hpp"
#include "npplab/rng.hpp"
#include "npplab/spin.hpp"

namespace npplab {

namespace detail {

// ---------------------------------------------------------------------------
// Differencing machinery shared by LDM and PDM.
//
// Differencing operates on magnitudes |X_i|; the recovered two-coloring is
// then composed with the weight signs. This keeps the solvers invariant
// under X -> -X and always legal: min |<sigma,X>| absorbs per-coordinate
// signs into sigma.
//
// Ties between equal values are broken by item id, lower id treated as
// larger; ids of combine nodes continue after the leaf ids.
// ---------------------------------------------------------------------------

template <typename T>
struct DiffItem {
    T value;
    int id;
};

template <typename T>
struct DiffHeapLess {
    bool operator()(const DiffItem<T>& a, const DiffItem<T>& b) const {
        if (a.value != b.value) return a.value < b.value;
        return a.id > b.id;
    }
};

// Combine history: node id -> (bigger child, smaller child).
struct DiffTree {
    std::vector<int> hi, lo;

    int combine(int hi_id, int lo_id) {
        hi.push_back(hi_id);
        lo.push_back(lo_id);
        return static_cast<int>(hi.size()) - 1;  // caller offsets by n
    }
};

// Two-color the tree: survivor +1, every combine propagates opposite signs.
inline SpinConfig color_tree(int n, const DiffTree& tree, int root_id) {
    SpinConfig sigma(n, false);
    std::vector<std::pair<int, bool>> stack;
    stack.emplace_back(root_id, true);
    while (!stack.empty()) {
        auto [id, plus] = stack.back();
        stack.pop_back();
        if (id < n) {
            sigma.set(id, plus);
        } else {
            stack.emplace_back(tree.hi[id - n], plus);
            stack.emplace_back(tree.lo[id - n], !plus);
        }
    }
    return sigma;
}

// Compose the magnitude-list coloring with the original weight signs.
inline void apply_weight_signs(const Instance& X, SpinConfig& sigma) {
    for (int i = 0; i < X.n; ++i) {
        const bool negative =
            X.quantized() ? (X.qweights[i] < 0) : std::signbit(X.weights[i]);
        if (negative) sigma.flip(i);
    }
}

template <typename T>
std::vector<T> magnitudes(const Instance& X);

template <>
inline std::vector<double> magnitudes<double>(const Instance& X) {
    std::vector<double> m(X.n);
    for (int i = 0; i < X.n; ++i) m[i] = std::abs(X.weights[i]);
    return m;
}

template <>
inline std::vector<std::int64_t> magnitudes<std::int64_t>(const Instance& X) {
    std::vector<std::int64_t> m(X.n);
    for (int i = 0; i < X.n; ++i)
        m[i] = X.qweights[i] < 0 ? -X.qweights[i] : X.qweights[i];
    return m;
}

template <typename T>
std::pair<T, SpinConfig> run_ldm(const Instance& X) {
    const int n = X.n;
    auto mags = magnitudes<T>(X);
    std::priority_queue<DiffItem<T>, std::vector<DiffItem<T>>, DiffHeapLess<T>> heap;
    for (int i = 0; i < n; ++i) heap.push({mags[i], i});
    DiffTree tree;
    while (heap.size() > 1) {
        const DiffItem<T> a = heap.top();
        heap.pop();
        const DiffItem<T> b = heap.top();
        heap.pop();
        const int id = n + tree.combine(a.id, b.id);
        heap.push({static_cast<T>(a.value - b.value), id});
    }
    const DiffItem<T> root = heap.top();
    SpinConfig sigma = color_tree(n, tree, root.id);
    apply_weight_signs(X, sigma);
    return {root.value, sigma};
}

template <typename T>
std::pair<T, SpinConfig> run_pdm(const Instance& X) {
    const int n = X.n;
    auto mags = magnitudes<T>(X);
    std::vector<DiffItem<T>> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = {mags[i], i};
    DiffTree tree;
    const auto desc = [](const DiffItem<T>& a, const DiffItem<T>& b) {
        if (a.value != b.value) return a.value > b.value;
        return a.id < b.id;
    };
    while (pool.size() > 1) {
        std::sort(pool.begin(), pool.end(), desc);
        std::vector<DiffItem<T>> next;
        next.reserve(pool.size() / 2 + 1);
        std::size_t i = 0;
        for (; i + 1 < pool.size(); i += 2) {
            const int id = n + tree.combine(pool[i].id, pool[i + 1].id);
            next.push_back({static_cast<T>(pool[i].value - pool[i + 1].value), id});
        }
        if (i < pool.size()) next.push_back(pool[i]);  // odd leftover carries over
        pool = std::move(next);
    }
    SpinConfig sigma = color_tree(n, tree, pool[0].id);
    apply_weight_signs(X, sigma);
    return {pool[0].value, sigma};
}

// ---------------------------------------------------------------------------
// Meet-in-the-middle exact search.
// ---------------------------------------------------------------------------

template <typename T>
struct HalfEntry {
    T sum;
    std::uint32_t mask;  // bit j set <=> half index j taken with +
};

// All 2^h signed sums over w[off .. off+h), Gray-code incremental.
template <typename T>
std::vector<HalfEntry<T>> enumerate_half(const std::vector<T>& w, int off, int h) {
    std::vector<HalfEntry<T>> out(std::size_t{1} << h);
    T s = 0;
    for (int j = 0; j < h; ++j) s -= w[off + j];
    std::uint32_t mask = 0;
    out[0] = {s, 0};
    for (std::size_t g = 1; g < out.size(); ++g) {
        const int j = std::countr_zero(g);
        mask ^= 1u << j;
        if ((mask >> j) & 1u)
            s += w[off + j] + w[off + j];
        else
            s -= w[off + j] + w[off + j];
        out[g] = {s, mask};
    }
    return out;
}

template <typename T>
std::vector<T> weights_of(const Instance& X);

template <>
inline std::vector<double> weights_of<double>(const Instance& X) {
    return X.weights;
}

template <>
inline std::vector<std::int64_t> weights_of<std::int64_t>(const Instance& X) {
    return X.qweights;
}

template <typename T>
T abs_of(T v) {
    return v < 0 ? -v : v;
}

// Lexicographically-smallest-canonical tie-break over global minimizers.
template <typename T>
std::pair<T, SpinConfig> run_mitm(const Instance& X) {
    const int n = X.n;
    const int na = (n + 1) / 2;
    const int nb = n - na;
    const auto w = weights_of<T>(X);
    auto a_side = enumerate_half<T>(w, 0, na);
    auto b_side = enumerate_half<T>(w, na, nb);
    std::sort(b_side.begin(), b_side.end(),
              [](const HalfEntry<T>& x, const HalfEntry<T>& y) { return x.sum < y.sum; });

    const auto build = [&](std::uint32_t ma, std::uint32_t mb) {
        SpinConfig s(n, false);
        for (int j = 0; j < na; ++j)
            if ((ma >> j) & 1u) s.set(j, true);
        for (int j = 0; j < nb; ++j)
            if ((mb >> j) & 1u) s.set(na + j, true);
        return s.canonical();
    };

    bool have_best = false;
    T best_val{};
    SpinConfig best_sigma;

    const auto consider = [&](const HalfEntry<T>& ea, const HalfEntry<T>& eb) {
        const T v = abs_of<T>(static_cast<T>(ea.sum + eb.sum));
        if (!have_best || v < best_val) {
            best_val = v;
            best_sigma = build(ea.mask, eb.mask);
            have_best = true;
        } else if (v == best_val) {
            SpinConfig cand = build(ea.mask, eb.mask);
            if (cand < best_sigma) best_sigma = std::move(cand);
        }
    };

    // For each left sum, the closest right sums bracket -sa; on value ties
    // every entry of the equal-sum run competes in the tie-break.
    const auto scan_run = [&](const HalfEntry<T>& ea, std::size_t pos) {
        const T sum = b_side[pos].sum;
        for (std::size_t k = pos; k < b_side.size() && b_side[k].sum == sum; ++k)
            consider(ea, b_side[k]);
    };

    for (const auto& ea : a_side) {
        const T target = static_cast<T>(-ea.sum);
        auto it = std::lower_bound(
            b_side.begin(), b_side.end(), target,
            [](const HalfEntry<T>& e, const T& t) { return e.sum < t; });
        if (it != b_side.end()) scan_run(ea, static_cast<std::size_t>(it - b_side.begin()));
        if (it != b_side.begin()) {
            auto prev = it - 1;
            // step to the head of the equal run below
            while (prev != b_side.begin() && (prev - 1)->sum == prev->sum) --prev;
            scan_run(ea, static_cast<std::size_t>(prev - b_side.begin()));
        }
    }
    return {best_val, best_sigma};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Public solver surface. All calls are pure functions of their arguments.
// ---------------------------------------------------------------------------

inline constexpr int kExactGuard = 44;

// Global minimizer of |<sigma,X>| over all 2^n sign vectors, meet-in-the-
// middle. Deterministic tie-break: lexicographically smallest canonical
// bitset among minimizers.
inline EnergyRecord solve_exact(const Instance& X, int guard = kExactGuard) {
    require_guard(X.n <= guard,
                  "solve_exact: n exceeds the resource guard (" + std::to_string(guard) + ")");
    require(X.n <= 62, "solve_exact: n > 62 is not supported");
    if (X.quantized()) {
        auto [val, sigma] = detail::run_mitm<std::int64_t>(X);
        return detail::make_record_quantized(X, std::move(sigma), val);
    }
    auto [val, sigma] = detail::run_mitm<double>(X);
    // Record re-derived from sigma so raw is consistent with energy().
    return energy(X, sigma);
}

// Largest differencing method: repeatedly replace the two largest items by
// their difference; the survivor is the discrepancy. O(n log n).
inline EnergyRecord solve_ldm(const Instance& X) {
    require(X.n >= 1, "solve_ldm: empty instance");
    if (X.quantized()) {
        auto [val, sigma] = detail::run_ldm<std::int64_t>(X);
        return detail::make_record_quantized(X, std::move(sigma), val);
    }
    auto [val, sigma] = detail::run_ldm<double>(X);
    return detail::make_record_float(X, std::move(sigma), val);
}

// Paired differencing method: per pass, difference items (1,2), (3,4), ...
// of the sorted list; the odd leftover carries over.
inline EnergyRecord solve_pdm(const Instance& X) {
    require(X.n >= 1, "solve_pdm: empty instance");
    if (X.quantized()) {
        auto [val, sigma] = detail::run_pdm<std::int64_t>(X);
        return detail::make_record_quantized(X, std::move(sigma), val);
    }
    auto [val, sigma] = detail::run_pdm<double>(X);
    return detail::make_record_float(X, std::move(sigma), val);
}

// True iff no single-spin flip strictly decreases |<sigma,X>|.
inline bool is_local_optimum(const Instance& X, const SpinConfig& sigma) {
    require(X.n == sigma.n(), "is_local_optimum: length mismatch");
    if (X.quantized()) {
        const std::int64_t s = detail::signed_sum_quantized(X, sigma);
        const std::int64_t as = s < 0 ? -s : s;
        for (int i = 0; i < X.n; ++i) {
            const std::int64_t term = sigma.bit(i) ? X.qweights[i] : -X.qweights[i];
            const std::int64_t f = s - 2 * term;
            if ((f < 0 ? -f : f) < as) return false;
        }
        return true;
    }
    const double s = detail::signed_sum_float(X, sigma);
    const double as = std::abs(s);
    for (int i = 0; i < X.n; ++i) {
        const double term = sigma.bit(i) ? X.weights[i] : -X.weights[i];
        if (std::abs(s - 2.0 * term) < as) return false;
    }
    return true;
}

// First-improvement descent: flips any single spin that strictly decreases
// the discrepancy, scanning in a fresh seeded random order each sweep, until
// no improving flip exists. The result is a local optimum by construction.
// `trace`, when given, records |<sigma,X>| after every accepted flip.
inline EnergyRecord solve_greedy(const Instance& X, const SpinConfig& start,
                                 std::uint64_t rng_seed,
                                 std::vector<double>* trace = nullptr) {
    require(X.n == start.n(), "solve_greedy: length mismatch");
    const int n = X.n;
    SpinConfig sigma = start;
    rng::SplitMix64 gen(rng_seed);
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;

    const auto reshuffle = [&] {
        for (int i = n - 1; i > 0; --i) {
            const int j = static_cast<int>(gen.next_below(static_cast<std::uint64_t>(i) + 1));
            std::swap(order[i], order[j]);
        }
    };

    if (X.quantized()) {
        std::int64_t s = detail::signed_sum_quantized(X, sigma);
        bool improved = true;
        while (improved) {
            improved = false;
            reshuffle();
            for (int idx : order) {
                const std::int64_t term = sigma.bit(idx) ? X.qweights[idx] : -X.qweights[idx];
                const std::int64_t f = s - 2 * term;
                if ((f < 0 ? -f : f) < (s < 0 ? -s : s)) {
                    sigma.flip(idx);
                    s = f;
                    improved = true;
                    if (trace) trace->push_back(std::abs(static_cast<double>(f)) * X.scale());
                    break;
                }
            }
        }
        return detail::make_record_quantized(X, std::move(sigma), s);
    }

    // The baseline sum is recomputed after every accepted flip, so the
    // termination test is arithmetically identical to is_local_optimum().
    double s = detail::signed_sum_float(X, sigma);
    bool improved = true;
    long flips = 0;
    const long flip_cap = 10'000'000;  // guards against ulp-scale ping-pong
    while (improved && flips < flip_cap) {
        improved = false;
        reshuffle();
        for (int idx : order) {
            const double term = sigma.bit(idx) ? X.weights[idx] : -X.weights[idx];
            const double f = s - 2.0 * term;
            if (std::abs(f) < std::abs(s)) {
                sigma.flip(idx);
                s = detail::signed_sum_float(X, sigma);
                improved = true;
                ++flips;
                if (trace) trace->push_back(std::abs(s));
                break;
            }
        }
    }
    return detail::make_record_float(X, std::move(sigma), s);
}

enum class Algo { Exact, Ldm, Pdm, Greedy };

inline EnergyRecord solve(const Instance& X, Algo algo, std::uint64_t rng_seed = 0,
                          int exact_guard = kExactGuard) {
    switch (algo) {
        case Algo::Exact:
            return solve_exact(X, exact_guard);
        case Algo::Ldm:
            return solve_ldm(X);
        case Algo::Pdm:
            return solve_pdm(X);
        case Algo::Greedy:
        default:
            return solve_greedy(X, SpinConfig(X.n, true), rng_seed);
    }
}

}  // namespace npplab
