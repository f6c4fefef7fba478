#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <unordered_set>
#include <vector>

#include "npplab/analysis.hpp"
#include "npplab/energy.hpp"
#include "npplab/instance.hpp"
#include "npplab/parallel.hpp"
#include "npplab/solvers.hpp"
#include "npplab/spin.hpp"

namespace npplab {

// ---------------------------------------------------------------------------
// Overlap bands and near-ground-state enumeration.
// ---------------------------------------------------------------------------

// [lo, hi] on the normalized overlap. signed uses <a,b>/n; unsigned its
// absolute value.
struct OverlapBand {
    double lo = 0.0;
    double hi = 1.0;
    bool is_signed = false;

    bool contains(double v) const { return v >= lo && v <= hi; }
    double value(const SpinConfig& a, const SpinConfig& b) const {
        return overlap(a, b, is_signed);
    }
};

inline OverlapBand make_band(double lo, double hi, bool is_signed) {
    require(lo <= hi, "band: need lo <= hi");
    require(lo >= -1.0 && hi <= 1.0, "band: bounds must lie in [-1,1]");
    if (!is_signed) require(lo >= 0.0, "band: unsigned bands need lo >= 0");
    return OverlapBand{lo, hi, is_signed};
}

// All canonical (sigma_1 = +1) configurations with normalized energy at or
// below threshold = scale * 2^(-E_n).
struct StateSet {
    int n = 0;
    double E_n = 0.0;
    double threshold = 0.0;
    bool exhaustive = false;
    std::vector<SpinConfig> states;
};

namespace detail {

// Visit every canonical sigma (bit 0 = +1) in Gray-code order with an O(1)
// incremental signed-sum update. visit(mask, sum) with mask bit i = sigma_i.
template <typename T, typename F>
void for_each_canonical(const std::vector<T>& w, F&& visit) {
    const int n = static_cast<int>(w.size());
    T s = w[0];
    for (int i = 1; i < n; ++i) s -= w[i];
    std::uint64_t mask = 1ull;
    visit(mask, s);
    const std::uint64_t total = 1ull << (n - 1);
    for (std::uint64_t g = 1; g < total; ++g) {
        const int j = std::countr_zero(g) + 1;
        mask ^= 1ull << j;
        if ((mask >> j) & 1ull)
            s += w[j] + w[j];
        else
            s -= w[j] + w[j];
        visit(mask, s);
    }
}

// Normalized energy from a signed sum, matching energy()'s arithmetic.
inline double normalized_from_sum(const Instance& X, double s) {
    return std::abs(s) / std::sqrt(static_cast<double>(X.n));
}
inline double normalized_from_sum(const Instance& X, std::int64_t s) {
    const double raw = static_cast<double>(s < 0 ? -s : s) * X.scale();
    return raw / std::sqrt(static_cast<double>(X.n));
}

template <typename T>
StateSet enumerate_states_impl(const Instance& X, double E_n, double scale) {
    StateSet set;
    set.n = X.n;
    set.E_n = E_n;
    set.threshold = scale * std::exp2(-E_n);
    set.exhaustive = true;
    const auto w = weights_of<T>(X);
    for_each_canonical<T>(w, [&](std::uint64_t mask, T s) {
        if (normalized_from_sum(X, s) <= set.threshold)
            set.states.push_back(SpinConfig::from_mask(X.n, mask));
    });
    return set;
}

template <typename T>
long count_local_optima_impl(const Instance& X, double threshold) {
    const auto w = weights_of<T>(X);
    const int n = X.n;
    long count = 0;
    for_each_canonical<T>(w, [&](std::uint64_t mask, T s) {
        if (normalized_from_sum(X, s) > threshold) return;
        const T as = s < 0 ? -s : s;
        for (int i = 0; i < n; ++i) {
            const T term = ((mask >> i) & 1ull) ? w[i] : static_cast<T>(-w[i]);
            const T f = s - term - term;
            if ((f < 0 ? -f : f) < as) return;
        }
        ++count;
    });
    return count;
}

}  // namespace detail

inline constexpr int kEnumerateGuard = 28;
inline constexpr int kLocalOptimaGuard = 26;

// Exhaustive sweep of the 2^(n-1) canonical states; energy_scale is the
// constant in front of 2^(-E_n) (1 by convention here).
inline StateSet enumerate_states(const Instance& X, double E_n, int guard = kEnumerateGuard,
                                 double energy_scale = 1.0) {
    require_guard(X.n <= guard,
                  "enumerate_states: n exceeds the resource guard (" + std::to_string(guard) + ")");
    require(X.n <= 64, "enumerate_states: n > 64 is not supported");
    if (X.quantized()) return detail::enumerate_states_impl<std::int64_t>(X, E_n, energy_scale);
    return detail::enumerate_states_impl<double>(X, E_n, energy_scale);
}

// Number of local optima with normalized energy <= 2^(-E_n), counting both
// signs (the canonical count doubled; flipping all spins preserves both
// properties).
inline long count_local_optima(const Instance& X, double E_n, int guard = kLocalOptimaGuard,
                               double energy_scale = 1.0) {
    require_guard(X.n <= guard,
                  "count_local_optima: n exceeds the resource guard (" + std::to_string(guard) + ")");
    require(X.n <= 64, "count_local_optima: n > 64 is not supported");
    const double threshold = energy_scale * std::exp2(-E_n);
    if (X.quantized()) return 2 * detail::count_local_optima_impl<std::int64_t>(X, threshold);
    return 2 * detail::count_local_optima_impl<double>(X, threshold);
}

// ---------------------------------------------------------------------------
// Pair-band witnesses.
// ---------------------------------------------------------------------------

// A pair of states whose overlap lies in the queried band. a == b marks the
// self-negation pair (sigma, -sigma).
struct PairWitness {
    std::size_t a = 0;
    std::size_t b = 0;
    double overlap = 0.0;
};

// All pairs over the +- expanded state set, modulo global flips: distinct
// canonical pairs appear once; (sigma, -sigma) pairs appear as (i, i) when
// their overlap (1 unsigned, -1 signed) lies in the band. An empty result
// certifies the band is empty for this instance at this threshold.
inline std::vector<PairWitness> check_pair_band(const StateSet& set, const OverlapBand& band) {
    require(set.exhaustive, "check_pair_band: state set must be exhaustive");
    std::vector<PairWitness> out;
    const std::size_t k = set.states.size();
    const double self = band.is_signed ? -1.0 : 1.0;
    for (std::size_t i = 0; i < k; ++i) {
        if (band.contains(self)) out.push_back({i, i, self});
        for (std::size_t j = i + 1; j < k; ++j) {
            const double v = overlap(set.states[i], set.states[j], true);
            if (band.is_signed) {
                // (a,b) realizes v, (a,-b) realizes -v; report each class once.
                if (band.contains(v)) out.push_back({i, j, v});
                if (band.contains(-v)) out.push_back({i, j, -v});
            } else if (band.contains(std::abs(v))) {
                out.push_back({i, j, std::abs(v)});
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// m-tuple witnesses.
// ---------------------------------------------------------------------------

struct OgpWitness {
    std::vector<SpinConfig> members;
    std::vector<double> taus;
    std::vector<std::vector<double>> overlaps;  // signed <si,sj>/n
    std::vector<double> energies;               // normalized, per member
};

inline constexpr int kMTupleGuard = 6;

namespace detail {

inline double band_value(int n, std::uint64_t a, std::uint64_t b, bool is_signed) {
    const int d = std::popcount(a ^ b);
    const double v = static_cast<double>(n - 2 * d) / n;
    return is_signed ? v : std::abs(v);
}

// All n-bit masks of popcount d, in increasing numeric order (Gosper).
template <typename F>
void for_each_mask_of_weight(int n, int d, F&& fn) {
    if (d == 0) {
        fn(0ull);
        return;
    }
    if (d > n) return;
    const std::uint64_t limit = n == 64 ? ~0ull : (1ull << n) - 1ull;
    std::uint64_t x = (d == 64) ? ~0ull : ((1ull << d) - 1ull);
    while (true) {
        fn(x);
        if (x == (limit & (limit << (n - d)))) break;  // highest pattern
        const std::uint64_t u = x & (~x + 1ull);
        const std::uint64_t v = x + u;
        x = v | (((x ^ v) / u) >> 2);
    }
}

struct MTupleSearch {
    int n;
    int m;
    const OverlapBand& band;
    std::vector<std::vector<std::uint64_t>> lists;          // per-slot candidates
    std::vector<std::unordered_set<std::uint64_t>> members; // per-slot membership
    std::vector<int> dists;                                  // band-admissible d_H
    double ball_size = 0.0;
    std::vector<std::uint64_t> chosen;

    bool compatible(std::uint64_t c) const {
        for (std::uint64_t prev : chosen)
            if (!band.contains(band_value(n, prev, c, band.is_signed))) return false;
        return true;
    }

    bool try_candidate(int slot, std::uint64_t c) {
        if (!compatible(c)) return false;
        chosen.push_back(c);
        if (descend(slot + 1)) return true;
        chosen.pop_back();
        return false;
    }

    bool descend(int slot) {
        if (slot == m) return true;
        if (slot >= 1 && ball_size < static_cast<double>(lists[slot].size())) {
            // Few admissible distances: walk the Hamming ball around the
            // previous member and test membership.
            const std::uint64_t center = chosen.back();
            for (int d : dists) {
                bool found = false;
                for_each_mask_of_weight(n, d, [&](std::uint64_t p) {
                    if (found) return;
                    const std::uint64_t c = center ^ p;
                    if (members[slot].count(c) && try_candidate(slot, c)) found = true;
                });
                if (found) return true;
            }
            return false;
        }
        for (std::uint64_t c : lists[slot])
            if (try_candidate(slot, c)) return true;
        return false;
    }
};

}  // namespace detail

// One m-tuple with member i drawn from sets[i] (either sign) and every
// pairwise overlap inside the band, by backtracking over the band-compatible
// m-partite graph; std::nullopt certifies that no such tuple exists. Members
// may repeat when the band admits overlap 1. The first member is canonical
// (a global flip is absorbed there).
inline std::optional<OgpWitness> find_mtuple(const std::vector<StateSet>& sets,
                                             const std::vector<Instance>& instances,
                                             const std::vector<double>& taus,
                                             const OverlapBand& band,
                                             int guard = kMTupleGuard) {
    const int m = static_cast<int>(sets.size());
    require(m >= 1, "find_mtuple: need at least one state set");
    require_guard(m <= guard,
                  "find_mtuple: m exceeds the resource guard (" + std::to_string(guard) + ")");
    require(instances.size() == sets.size() && taus.size() == sets.size(),
            "find_mtuple: sets, instances and taus must align");
    const int n = sets[0].n;
    for (const auto& s : sets) require(s.n == n, "find_mtuple: state sets must share n");
    require(n <= 64, "find_mtuple: n > 64 is not supported");

    detail::MTupleSearch search{n, m, band, {}, {}, {}, 0.0, {}};
    search.lists.resize(m);
    search.members.resize(m);
    const std::uint64_t full = n == 64 ? ~0ull : (1ull << n) - 1ull;
    for (int i = 0; i < m; ++i) {
        auto& list = search.lists[i];
        list.reserve(i == 0 ? sets[i].states.size() : 2 * sets[i].states.size());
        for (const auto& s : sets[i].states) {
            list.push_back(s.mask());
            if (i > 0) list.push_back(s.mask() ^ full);
        }
        search.members[i].insert(list.begin(), list.end());
    }
    for (int d = 0; d <= n; ++d) {
        const double v = static_cast<double>(n - 2 * d) / n;
        if (band.contains(band.is_signed ? v : std::abs(v))) {
            search.dists.push_back(d);
            search.ball_size += std::exp2(log2_binomial(n, d));
        }
    }
    search.chosen.reserve(m);

    if (!search.descend(0)) return std::nullopt;

    OgpWitness w;
    w.taus = taus;
    w.members.reserve(m);
    for (std::uint64_t c : search.chosen) w.members.push_back(SpinConfig::from_mask(n, c));
    w.overlaps.assign(m, std::vector<double>(m, 1.0));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (i != j) w.overlaps[i][j] = overlap(w.members[i], w.members[j], true);
    w.energies.reserve(m);
    for (int i = 0; i < m; ++i) w.energies.push_back(energy(instances[i], w.members[i]).normalized);
    return w;
}

// ---------------------------------------------------------------------------
// Algorithm stability under correlated inputs.
// ---------------------------------------------------------------------------

// Per-trial protocol at correlation step rho: tau = 2^-rho, draw independent
// X, X', couple Y = sqrt(1-tau^2) X + tau X', run the algorithm on X and Y
// with shared coin flips, record the signed overlap of the two outputs.
struct StabilityCurve {
    int n = 0;
    Algo algo = Algo::Ldm;
    std::uint64_t master_seed = 0;
    int trials = 0;
    std::vector<double> rho_grid;
    std::vector<double> tau;
    std::vector<double> mean_overlap;
    std::vector<double> std_error;
    // alpha (ln n)^2 / ln 2 with alpha = 1/(2 ln 2): the correlation level
    // where the differencing overlap empirically collapses.
    double predicted_threshold = 0.0;
};

// Same sampling, reporting the raw stability functional instead: mean
// squared input distance and mean output Hamming distance per rho.
struct StabilityProfile {
    int n = 0;
    Algo algo = Algo::Ldm;
    std::uint64_t master_seed = 0;
    int trials = 0;
    std::vector<double> rho_grid;
    std::vector<double> tau;
    std::vector<double> mean_sq_dist;
    std::vector<double> mean_hamming;
};

inline double stability_threshold(int n) {
    const double alpha = 1.0 / (2.0 * std::numbers::ln2);
    const double ln_n = std::log(static_cast<double>(n));
    return alpha * ln_n * ln_n / std::numbers::ln2;
}

namespace detail {

struct StabilityTrial {
    double overlap = 0.0;
    double sq_dist = 0.0;
    int hamming = 0;
};

inline StabilityTrial stability_trial(int n, double tau, Algo algo, std::uint64_t trial_seed) {
    const Instance X = generate(n, rng::stream(trial_seed, 0));
    const Instance Xp = generate(n, rng::stream(trial_seed, 1));
    const Instance Y = interpolate_pair(X, Xp, tau);
    const std::uint64_t coin = rng::stream(trial_seed, 2);  // shared by both runs
    const EnergyRecord a = solve(X, algo, coin);
    const EnergyRecord b = solve(Y, algo, coin);
    StabilityTrial t;
    t.overlap = overlap(a.sigma, b.sigma, true);
    t.hamming = a.sigma.hamming(b.sigma);
    double sq = 0.0;
    for (int j = 0; j < n; ++j) {
        const double d = X.weights[j] - Y.weights[j];
        sq += d * d;
    }
    t.sq_dist = sq;
    return t;
}

}  // namespace detail

inline StabilityCurve stability_curve(int n, const std::vector<double>& rho_grid, int trials,
                                      Algo algo, std::uint64_t master_seed, int threads = 1) {
    require(!rho_grid.empty(), "stability_curve: rho grid must be nonempty");
    require(trials >= 1, "stability_curve: need at least one trial");
    StabilityCurve curve;
    curve.n = n;
    curve.algo = algo;
    curve.master_seed = master_seed;
    curve.trials = trials;
    curve.rho_grid = rho_grid;
    curve.predicted_threshold = stability_threshold(n);

    const std::size_t total = rho_grid.size() * static_cast<std::size_t>(trials);
    std::vector<detail::StabilityTrial> slots(total);
    run_indexed(total, threads, [&](std::size_t i) {
        const double tau = std::exp2(-rho_grid[i / trials]);
        slots[i] = detail::stability_trial(n, tau, algo, seed_stream(master_seed, i));
    });

    for (std::size_t k = 0; k < rho_grid.size(); ++k) {
        curve.tau.push_back(std::exp2(-rho_grid[k]));
        double mean = 0.0;
        for (int t = 0; t < trials; ++t) mean += slots[k * trials + t].overlap;
        mean /= trials;
        double var = 0.0;
        for (int t = 0; t < trials; ++t) {
            const double d = slots[k * trials + t].overlap - mean;
            var += d * d;
        }
        curve.mean_overlap.push_back(mean);
        curve.std_error.push_back(trials > 1 ? std::sqrt(var / (trials - 1.0) / trials) : 0.0);
    }
    return curve;
}

inline StabilityProfile stability_profile(int n, const std::vector<double>& rho_grid, int trials,
                                          Algo algo, std::uint64_t master_seed, int threads = 1) {
    require(!rho_grid.empty(), "stability_profile: rho grid must be nonempty");
    require(trials >= 1, "stability_profile: need at least one trial");
    StabilityProfile prof;
    prof.n = n;
    prof.algo = algo;
    prof.master_seed = master_seed;
    prof.trials = trials;
    prof.rho_grid = rho_grid;

    const std::size_t total = rho_grid.size() * static_cast<std::size_t>(trials);
    std::vector<detail::StabilityTrial> slots(total);
    run_indexed(total, threads, [&](std::size_t i) {
        const double tau = std::exp2(-rho_grid[i / trials]);
        slots[i] = detail::stability_trial(n, tau, algo, seed_stream(master_seed, i));
    });

    for (std::size_t k = 0; k < rho_grid.size(); ++k) {
        prof.tau.push_back(std::exp2(-rho_grid[k]));
        double sq = 0.0, dh = 0.0;
        for (int t = 0; t < trials; ++t) {
            sq += slots[k * trials + t].sq_dist;
            dh += slots[k * trials + t].hamming;
        }
        prof.mean_sq_dist.push_back(sq / trials);
        prof.mean_hamming.push_back(dh / trials);
    }
    return prof;
}

}  // namespace npplab
