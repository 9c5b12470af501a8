#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "reachgrid/game.hpp"
#include "reachgrid/grid.hpp"

namespace reachgrid {

struct SolverConfig {
    double horizon = 10.0;      // seconds of backward time, cap when not converged
    double tolerance = 1e-3;    // sup norm change per sweep declaring convergence
    double cfl_safety = 0.8;
    int threads = 1;            // <= 0 picks hardware concurrency
    std::vector<double> alpha_override;  // empty: bound from the dynamics
};

struct BrtResult {
    ValueField value;
    int iterations = 0;
    double dt = 0.0;
    double final_change = 0.0;
    double max_increase = 0.0;  // largest single node increase over all sweeps
    bool converged = false;
    std::vector<double> alphas;
    double elapsed_seconds = 0.0;
};

template <class Game>
std::vector<double> estimate_alphas(const Grid& grid, const Game& game) {
    auto a = game.alphas(grid);
    return {a.begin(), a.end()};
}

/// Numerical Hamiltonian: the analytic value at the averaged gradient plus
/// per axis dissipation proportional to the one sided gradient gap. The
/// dissipation sign is fixed by the 1D advection limit, where the combined
/// update must collapse to the upwind difference.
inline double lax_friedrichs_hamiltonian(double h_central, std::span<const double> p_minus,
                                         std::span<const double> p_plus,
                                         std::span<const double> alphas) {
    double h = h_central;
    for (std::size_t d = 0; d < alphas.size(); ++d)
        h += alphas[d] * 0.5 * (p_plus[d] - p_minus[d]);
    return h;
}

inline double cfl_timestep(const Grid& grid, std::span<const double> alphas, double safety) {
    if (static_cast<int>(alphas.size()) != grid.ndim())
        throw std::invalid_argument("alpha count does not match grid dimension");
    double denom = 0.0;
    for (int d = 0; d < grid.ndim(); ++d) {
        if (alphas[static_cast<std::size_t>(d)] < 0.0)
            throw std::invalid_argument("dissipation coefficients must be nonnegative");
        denom += alphas[static_cast<std::size_t>(d)] / grid.spacing(d);
    }
    if (!(denom > 0.0))
        throw std::invalid_argument("dynamics admit no motion, timestep undefined");
    return safety / denom;
}

namespace detail {

struct SlabStats {
    double max_change = 0.0;
    double max_increase = -1.0 / 0.0;
};

// One explicit update sweep over outermost indices [slab_begin, slab_end).
// Reads prev, writes next on a disjoint range, so slabs run concurrently.
// First order upwind gradients; non periodic edges extrapolate linearly,
// which collapses the one sided differences onto each other there.
template <class Game>
SlabStats sweep_slab(const Grid& g, const Game& game, const double* prev, double* next,
                     const double* alphas, double dt, int slab_begin, int slab_end) {
    constexpr int D = Game::kDim;
    int n[D];
    std::ptrdiff_t stride[D];
    bool periodic[D];
    double inv_dx[D];
    const double* nodes[D];
    for (int d = 0; d < D; ++d) {
        n[d] = g.axis(d).count;
        stride[d] = static_cast<std::ptrdiff_t>(g.stride(d));
        periodic[d] = g.axis(d).periodic;
        inv_dx[d] = 1.0 / g.spacing(d);
        nodes[d] = g.nodes(d).data();
    }

    int idx[D];
    double z[D];
    idx[0] = slab_begin;
    z[0] = nodes[0][slab_begin];
    for (int d = 1; d < D; ++d) {
        idx[d] = 0;
        z[d] = nodes[d][0];
    }

    std::size_t inner = 1;
    for (int d = 1; d < D; ++d) inner *= static_cast<std::size_t>(n[d]);
    const std::size_t count = inner * static_cast<std::size_t>(slab_end - slab_begin);
    std::size_t flat = static_cast<std::size_t>(slab_begin) * static_cast<std::size_t>(stride[0]);

    SlabStats stats;
    for (std::size_t step = 0; step < count; ++step, ++flat) {
        const double v0 = prev[flat];
        double pbar[D];
        double diss = 0.0;
        for (int d = 0; d < D; ++d) {
            double vm, vp;
            if (idx[d] == 0) {
                vp = prev[flat + static_cast<std::size_t>(stride[d])];
                vm = periodic[d]
                         ? prev[flat + static_cast<std::size_t>((n[d] - 1) * stride[d])]
                         : 2.0 * v0 - vp;
            } else if (idx[d] == n[d] - 1) {
                vm = prev[flat - static_cast<std::size_t>(stride[d])];
                vp = periodic[d]
                         ? prev[flat - static_cast<std::size_t>((n[d] - 1) * stride[d])]
                         : 2.0 * v0 - vm;
            } else {
                vm = prev[flat - static_cast<std::size_t>(stride[d])];
                vp = prev[flat + static_cast<std::size_t>(stride[d])];
            }
            const double pm = (v0 - vm) * inv_dx[d];
            const double pp = (vp - v0) * inv_dx[d];
            pbar[d] = 0.5 * (pm + pp);
            diss += alphas[d] * 0.5 * (pp - pm);
        }

        const double h = game.hamiltonian(idx, z, pbar) + diss;
        const double cand = v0 + dt * h;
        const double nv = cand < v0 ? cand : v0;
        stats.max_increase = std::max(stats.max_increase, nv - v0);
        stats.max_change = std::max(stats.max_change, v0 - nv);
        next[flat] = nv;

        int d = D - 1;
        while (d > 0) {
            if (++idx[d] < n[d]) {
                z[d] = nodes[d][idx[d]];
                break;
            }
            idx[d] = 0;
            z[d] = nodes[d][0];
            --d;
        }
        if (d == 0) {
            ++idx[0];
            if (idx[0] < slab_end) z[0] = nodes[0][idx[0]];
        }
    }
    return stats;
}

}  // namespace detail

/// Backward reachable tube by value iteration on the discounted free
/// Hamilton Jacobi inequality: each sweep applies a global Lax Friedrichs
/// update and then keeps the pointwise minimum with the previous values, so
/// node values never increase and the tube only grows. Stops when the sup
/// norm change drops below tolerance or backward time reaches the horizon.
template <class Game>
BrtResult solve_brt(const ValueField& terminal, Game game, const SolverConfig& cfg) {
    static_assert(Game::kDim >= 1 && Game::kDim <= 5);
    const Grid& g = *terminal.grid;
    if (g.ndim() != Game::kDim)
        throw std::invalid_argument("terminal field dimension does not match dynamics");
    if (!(cfg.horizon > 0.0) || !(cfg.tolerance > 0.0) || !(cfg.cfl_safety > 0.0) ||
        cfg.cfl_safety > 1.0)
        throw std::invalid_argument("solver config out of range");

    const auto t0 = std::chrono::steady_clock::now();
    game.bind(g);

    BrtResult res;
    res.alphas = cfg.alpha_override.empty() ? estimate_alphas(g, game) : cfg.alpha_override;
    if (static_cast<int>(res.alphas.size()) != g.ndim())
        throw std::invalid_argument("alpha override dimension mismatch");
    res.dt = cfl_timestep(g, res.alphas, cfg.cfl_safety);

    int threads = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::clamp(threads, 1, g.axis(0).count);

    std::vector<double> cur = terminal.values;
    std::vector<double> nxt(cur.size());
    res.max_increase = -1.0 / 0.0;

    const int n0 = g.axis(0).count;
    std::vector<int> cut(static_cast<std::size_t>(threads) + 1, 0);
    for (int t = 0; t <= threads; ++t)
        cut[static_cast<std::size_t>(t)] = static_cast<int>(
            static_cast<long long>(n0) * t / threads);

    double t_back = 0.0;
    while (t_back < cfg.horizon - 1e-12) {
        std::vector<detail::SlabStats> stats(static_cast<std::size_t>(threads));
        if (threads == 1) {
            stats[0] = detail::sweep_slab(g, game, cur.data(), nxt.data(), res.alphas.data(),
                                          res.dt, 0, n0);
        } else {
            std::vector<std::thread> pool;
            pool.reserve(static_cast<std::size_t>(threads) - 1);
            for (int t = 1; t < threads; ++t)
                pool.emplace_back([&, t] {
                    stats[static_cast<std::size_t>(t)] =
                        detail::sweep_slab(g, game, cur.data(), nxt.data(), res.alphas.data(),
                                           res.dt, cut[static_cast<std::size_t>(t)],
                                           cut[static_cast<std::size_t>(t) + 1]);
                });
            stats[0] = detail::sweep_slab(g, game, cur.data(), nxt.data(), res.alphas.data(),
                                          res.dt, cut[0], cut[1]);
            for (auto& th : pool) th.join();
        }

        // Slab results combine in slab order so the reduction never depends
        // on thread scheduling.
        double change = 0.0;
        for (const auto& s : stats) {
            change = std::max(change, s.max_change);
            res.max_increase = std::max(res.max_increase, s.max_increase);
        }

        cur.swap(nxt);
        ++res.iterations;
        t_back += res.dt;
        res.final_change = change;
        if (change < cfg.tolerance) {
            res.converged = true;
            break;
        }
    }

    res.value.grid = terminal.grid;
    res.value.label = terminal.label;
    res.value.values = std::move(cur);
    res.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

/// Curb avoidance tube: terminal cost is the signed Chebyshev distance to
/// the occupied cells and the robot steers alone to stay clear.
inline BrtResult solve_curb_brt(GridPtr grid, const std::vector<std::uint8_t>& occupied,
                                const CurbGame& game, const SolverConfig& cfg,
                                std::string label = "curbs") {
    ValueField terminal = signed_distance_occupancy(std::move(grid), occupied, std::move(label));
    return solve_brt(terminal, game, cfg);
}

}  // namespace reachgrid
