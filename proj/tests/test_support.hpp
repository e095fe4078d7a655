#pragma once

// Shared generators and independent oracles for the test suites. Nothing here
// calls into the code paths it is used to check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "graphon_cheeger/core.hpp"

namespace graphon_cheeger::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t uniform_index(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

/// Random connected kernel. Cycles through dense uniform, sparse-with-path and
/// noisy block structures so that properties see varied spectra.
inline Eigen::MatrixXd random_connected_kernel(Rng& rng, std::size_t n) {
    const auto nn = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(nn, nn);
    const std::size_t style = uniform_index(rng, 0, 2);
    if (style == 0) {
        for (Eigen::Index i = 0; i < nn; ++i) {
            for (Eigen::Index j = i; j < nn; ++j) k(i, j) = k(j, i) = uniform(rng);
        }
    } else if (style == 1) {
        const double density = uniform(rng, 0.1, 0.6);
        for (Eigen::Index i = 0; i < nn; ++i) {
            for (Eigen::Index j = i; j < nn; ++j) {
                if (uniform(rng) < density) k(i, j) = k(j, i) = uniform(rng, 0.05, 1.0);
            }
        }
        std::vector<Eigen::Index> perm(n);
        std::iota(perm.begin(), perm.end(), Eigen::Index{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double v = uniform(rng, 0.01, 1.0);
            k(perm[i], perm[i + 1]) = k(perm[i + 1], perm[i]) = std::max(k(perm[i], perm[i + 1]), v);
        }
    } else {
        const std::size_t blocks = uniform_index(rng, 2, std::max<std::size_t>(2, std::min<std::size_t>(5, n)));
        std::vector<std::size_t> block(n);
        for (auto& b : block) b = uniform_index(rng, 0, blocks - 1);
        const double p = uniform(rng, 0.5, 1.0);
        const double q = uniform(rng, 0.01, 0.2);
        for (Eigen::Index i = 0; i < nn; ++i) {
            for (Eigen::Index j = i; j < nn; ++j) {
                const double base = block[static_cast<std::size_t>(i)] == block[static_cast<std::size_t>(j)] ? p : q;
                k(i, j) = k(j, i) = std::clamp(base + uniform(rng, -0.01, 0.01), 0.001, 1.0);
            }
        }
    }
    if (n == 1 && k(0, 0) == 0.0) k(0, 0) = 0.5;
    return k;
}

inline StepGraphon random_connected_graphon(Rng& rng, std::size_t n) {
    return StepGraphon::create(random_connected_kernel(rng, n), true);
}

inline CellSet random_nonempty_set(Rng& rng, std::size_t n) {
    CellSet s(n);
    const double p = uniform(rng, 0.1, 0.9);
    for (std::size_t i = 0; i < n; ++i) {
        if (uniform(rng) < p) s.insert(i);
    }
    if (s.empty()) s.insert(uniform_index(rng, 0, n - 1));
    return s;
}

/// k disjoint nonempty sets; some cells may stay unassigned.
inline std::vector<CellSet> random_disjoint_tuple(Rng& rng, std::size_t n, std::size_t k) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<CellSet> sets(k, CellSet(n));
    for (std::size_t i = 0; i < k; ++i) sets[i].insert(perm[i]);
    for (std::size_t i = k; i < n; ++i) {
        const std::size_t c = uniform_index(rng, 0, k);  // k means unassigned
        if (c < k) sets[c].insert(perm[i]);
    }
    return sets;
}

inline std::vector<double> random_unit_vector(Rng& rng, std::size_t k) {
    std::normal_distribution<double> gauss;
    std::vector<double> v(k);
    double norm = 0.0;
    do {
        norm = 0.0;
        for (double& x : v) {
            x = gauss(rng);
            norm += x * x;
        }
    } while (norm < 1e-12);
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
    return v;
}

/// Cyclic Jacobi rotations on a dense symmetric matrix; ascending eigenvalues.
inline std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd a, double tol = 1e-14, int max_sweeps = 100) {
    const Eigen::Index n = a.rows();
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        }
        if (off < tol * tol) break;
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (Eigen::Index r = 0; r < n; ++r) {
                    const double arp = a(r, p);
                    const double arq = a(r, q);
                    a(r, p) = c * arp - s * arq;
                    a(r, q) = s * arp + c * arq;
                }
                for (Eigen::Index r = 0; r < n; ++r) {
                    const double apr = a(p, r);
                    const double aqr = a(q, r);
                    a(p, r) = c * apr - s * aqr;
                    a(q, r) = s * apr + c * aqr;
                }
            }
        }
    }
    std::vector<double> ev(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = a(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

/// Expansion straight from the definition with plain loops: cut weight over
/// volume, independent of the library's compensated sums.
inline double naive_expansion(const Eigen::MatrixXd& kernel, const std::vector<char>& in) {
    double cut = 0.0;
    double vol = 0.0;
    for (Eigen::Index i = 0; i < kernel.rows(); ++i) {
        if (!in[static_cast<std::size_t>(i)]) continue;
        for (Eigen::Index j = 0; j < kernel.cols(); ++j) {
            vol += kernel(i, j);
            if (!in[static_cast<std::size_t>(j)]) cut += kernel(i, j);
        }
    }
    return cut / vol;
}

/// All level sets {g² > t}, t >= 0, of positive measure, by direct filtering.
inline std::vector<std::vector<char>> threshold_sets(const Eigen::VectorXd& g) {
    std::vector<double> levels;
    for (Eigen::Index i = 0; i < g.size(); ++i) levels.push_back(g[i] * g[i]);
    levels.push_back(0.0);
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    std::vector<std::vector<char>> out;
    for (double t : levels) {
        std::vector<char> in(static_cast<std::size_t>(g.size()), 0);
        bool any = false;
        for (Eigen::Index i = 0; i < g.size(); ++i) {
            if (g[i] * g[i] > t) {
                in[static_cast<std::size_t>(i)] = 1;
                any = true;
            }
        }
        if (any) out.push_back(std::move(in));
    }
    return out;
}

}  // namespace graphon_cheeger::testing
