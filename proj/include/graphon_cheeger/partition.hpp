#pragma once

// Geometric rounding of the spectral embedding into k disjoint low-expansion
// sets:
//   1. radial pseudo-metric d_F on cells,
//   2. a randomly shifted grid of shrunk cubes on the unit sphere, giving
//      well-separated pieces of bounded mass,
//   3. greedy merging of light pieces into k pieces of mass >= 1/2,
//   4. Lipschitz localization g_i = τ_i ‖F‖ around each piece,
//   5. a sweep cut over the level sets of g_i².

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "graphon_cheeger/core.hpp"
#include "graphon_cheeger/error.hpp"
#include "graphon_cheeger/spectral.hpp"

namespace graphon_cheeger {

inline constexpr double kInfiniteDistance = std::numeric_limits<double>::infinity();

/// Side of the grid cubes, 1/(√5 k).
inline double grid_side(std::size_t k) { return 1.0 / (std::sqrt(5.0) * static_cast<double>(k)); }

/// Required separation between pieces, 1/(4√5 k³).
inline double separation_delta(std::size_t k) {
    const double kk = static_cast<double>(k);
    return 1.0 / (4.0 * std::sqrt(5.0) * kk * kk * kk);
}

/// Per-piece mass cap 1 + 1/(4k).
inline double piece_mass_cap(std::size_t k) { return 1.0 + 1.0 / (4.0 * static_cast<double>(k)); }

/// Total retained mass target k − 1/4.
inline double total_mass_target(std::size_t k) { return static_cast<double>(k) - 0.25; }

// ---------------------------------------------------------------------------
// Radial pseudo-metric

/// d_F(x, y): distance of the radial projections when both rows are nonzero,
/// 0 when both vanish, +∞ otherwise.
inline double radial_distance(const Embedding& emb, std::size_t x, std::size_t y) {
    if (x >= emb.n() || y >= emb.n()) {
        throw Error(ErrorCode::IndexOutOfRange, "cell index outside the embedding");
    }
    const bool zx = emb.is_zero(x);
    const bool zy = emb.is_zero(y);
    if (zx && zy) return 0.0;
    if (zx || zy) return kInfiniteDistance;
    if (x == y) return 0.0;
    return (emb.unit_row(x) - emb.unit_row(y)).norm();
}

/// d_F(x, A) = min over y in A of d_F(x, y), by exhaustive scan.
inline double distance_to_set(const Embedding& emb, std::size_t x, const CellSet& a) {
    if (a.empty()) throw Error(ErrorCode::EmptySet, "distance to the empty set");
    if (x >= emb.n()) throw Error(ErrorCode::IndexOutOfRange, "cell index outside the embedding");
    if (a.contains(x)) return 0.0;
    double best = kInfiniteDistance;
    for (std::size_t y : a.members()) {
        best = std::min(best, radial_distance(emb, x, y));
        if (best == 0.0) break;
    }
    return best;
}

/// Minimum d_F between cells of distinct sets; +∞ for fewer than two sets.
inline double min_pairwise_separation(const Embedding& emb, const std::vector<CellSet>& sets) {
    double best = kInfiniteDistance;
    for (std::size_t a = 0; a < sets.size(); ++a) {
        for (std::size_t b = a + 1; b < sets.size(); ++b) {
            for (std::size_t x : sets[a].members()) {
                for (std::size_t y : sets[b].members()) best = std::min(best, radial_distance(emb, x, y));
            }
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Random shifted grid

struct GridShift {
    std::size_t k = 0;
    double side = 0.0;      // s = 1/(√5 k)
    double margin = 0.0;    // s/(8k²)
    std::vector<double> offset;  // w ∈ [0, s)^k
    std::uint64_t seed = 0;
};

inline GridShift make_shift(std::size_t k, std::vector<double> offset, std::uint64_t seed = 0) {
    if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be positive");
    if (offset.size() != k) throw Error(ErrorCode::DimensionMismatch, "shift offset dimension differs from k");
    GridShift g;
    g.k = k;
    g.side = grid_side(k);
    g.margin = g.side / (8.0 * static_cast<double>(k) * static_cast<double>(k));
    for (double w : offset) {
        if (!(w >= 0.0 && w < g.side)) throw Error(ErrorCode::ValueOutOfRange, "shift offset outside [0, s)");
    }
    g.offset = std::move(offset);
    g.seed = seed;
    return g;
}

/// Uniform offset in [0, s)^k drawn from a 64-bit Mersenne twister seeded with `seed`.
inline GridShift sample_shift(std::size_t k, std::uint64_t seed) {
    if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be positive");
    const double s = grid_side(k);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, s);
    std::vector<double> w(k);
    for (double& wi : w) {
        wi = unif(rng);
        if (wi >= s) wi = std::nextafter(s, 0.0);
    }
    return make_shift(k, std::move(w), seed);
}

/// Lattice point whose closed shrunk cube contains `z`, or nothing when `z`
/// lies in a discarded margin.
inline std::optional<std::vector<std::int64_t>> shrunk_cube_of(const GridShift& shift,
                                                               const Eigen::Ref<const Eigen::RowVectorXd>& z) {
    std::vector<std::int64_t> cell(shift.k);
    for (std::size_t i = 0; i < shift.k; ++i) {
        const double t = z[static_cast<Eigen::Index>(i)] - shift.offset[i];
        const double lattice = std::floor(t / shift.side);
        const double r = t - lattice * shift.side;
        if (r < shift.margin || r > shift.side - shift.margin) return std::nullopt;
        cell[i] = static_cast<std::int64_t>(lattice);
    }
    return cell;
}

struct SeparatedFamily {
    std::vector<CellSet> sets;
    std::vector<double> masses;
    double total_mass = 0.0;
    double min_separation = kInfiniteDistance;
    GridShift shift;
    bool accepted = false;      // total_mass reached k − 1/4 − slack
    std::size_t tries_used = 0;
};

/// Groups nonzero cells by the shrunk cube containing F̄(x). Pieces are
/// ordered by lattice point.
inline SeparatedFamily shifted_grid_family(const StepGraphon& w, const Embedding& emb, const GridShift& shift) {
    if (emb.n() != w.n()) throw Error(ErrorCode::DimensionMismatch, "embedding built for a different graphon");
    if (emb.k() != shift.k) throw Error(ErrorCode::DimensionMismatch, "shift dimension differs from embedding");

    std::map<std::vector<std::int64_t>, std::vector<std::size_t>> groups;
    for (std::size_t x = 0; x < emb.n(); ++x) {
        if (emb.is_zero(x)) continue;
        if (auto cell = shrunk_cube_of(shift, emb.unit_row(x))) groups[*cell].push_back(x);
    }

    SeparatedFamily fam;
    fam.shift = shift;
    CompensatedSum total;
    for (const auto& [lattice, members] : groups) {
        fam.sets.emplace_back(w.n(), members);
        fam.masses.push_back(emb.mass(fam.sets.back()));
        total += fam.masses.back();
    }
    fam.total_mass = total.value();
    fam.min_separation = min_pairwise_separation(emb, fam.sets);
    return fam;
}

struct SeparationOptions {
    std::size_t max_tries = 64;
    double slack = 0.0;
    bool allow_shortfall = true;  // return the best family flagged instead of throwing
};

/// Tries shifts seeded seed, seed+1, ... and returns the first family with
/// total mass >= k − 1/4 − slack, or the heaviest one (flagged not accepted).
inline SeparatedFamily separated_family(const StepGraphon& w, const Embedding& emb, std::uint64_t seed,
                                        const SeparationOptions& opts = {}) {
    if (opts.max_tries == 0) throw Error(ErrorCode::MassShortfall, "no shifts tried (max_tries = 0)");
    if (!(opts.slack >= 0.0)) throw Error(ErrorCode::InvalidArgument, "slack must be nonnegative");
    const std::size_t k = emb.k();
    const double threshold = total_mass_target(k) - opts.slack;

    SeparatedFamily best;
    bool have_best = false;
    for (std::size_t t = 0; t < opts.max_tries; ++t) {
        SeparatedFamily fam = shifted_grid_family(w, emb, sample_shift(k, seed + t));
        fam.tries_used = t + 1;
        if (fam.total_mass >= threshold) {
            fam.accepted = true;
            return fam;
        }
        if (!have_best || fam.total_mass > best.total_mass) {
            best = std::move(fam);
            have_best = true;
        }
    }
    if (!opts.allow_shortfall) {
        throw Error(ErrorCode::MassShortfall, "best total mass " + std::to_string(best.total_mass) +
                                                  " below " + std::to_string(threshold) + " after " +
                                                  std::to_string(opts.max_tries) + " shifts");
    }
    best.accepted = false;
    best.tries_used = opts.max_tries;
    return best;
}

// ---------------------------------------------------------------------------
// Merging

struct MergedFamily {
    std::vector<CellSet> sets;   // k pieces, heaviest first
    std::vector<double> masses;
    std::size_t merges = 0;
    std::size_t survivors = 0;   // pieces of mass >= 1/2 before selection
    double min_separation = kInfiniteDistance;
};

/// Repeatedly unites the two lightest pieces of mass < 1/2, then keeps the k
/// heaviest pieces of mass >= 1/2 (ties: smallest contained cell first).
inline MergedFamily merge_to_k(const SeparatedFamily& family, std::size_t k, const StepGraphon& w,
                               const Embedding& emb) {
    if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be positive");
    if (emb.n() != w.n()) throw Error(ErrorCode::DimensionMismatch, "embedding built for a different graphon");

    struct Piece {
        CellSet set;
        double mass;
    };
    std::vector<Piece> pieces;
    for (const CellSet& s : family.sets) pieces.push_back({s, emb.mass(s)});

    const auto lighter = [](const Piece& a, const Piece& b) {
        if (a.mass != b.mass) return a.mass < b.mass;
        return a.set.front() < b.set.front();
    };

    MergedFamily out;
    for (;;) {
        std::vector<std::size_t> light;
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            if (pieces[i].mass < 0.5) light.push_back(i);
        }
        if (light.size() < 2) break;
        std::sort(light.begin(), light.end(),
                  [&](std::size_t a, std::size_t b) { return lighter(pieces[a], pieces[b]); });
        const std::size_t a = std::min(light[0], light[1]);
        const std::size_t b = std::max(light[0], light[1]);
        CellSet merged = pieces[a].set.united(pieces[b].set);
        const double m = emb.mass(merged);
        pieces.erase(pieces.begin() + static_cast<std::ptrdiff_t>(b));
        pieces[a] = {std::move(merged), m};
        ++out.merges;
    }

    std::vector<Piece> heavy;
    for (Piece& p : pieces) {
        if (p.mass >= 0.5) heavy.push_back(std::move(p));
    }
    out.survivors = heavy.size();
    if (heavy.size() < k) {
        throw Error(ErrorCode::InsufficientSets, std::to_string(heavy.size()) + " pieces of mass >= 1/2, need " +
                                                     std::to_string(k));
    }
    std::sort(heavy.begin(), heavy.end(), [](const Piece& a, const Piece& b) {
        if (a.mass != b.mass) return a.mass > b.mass;
        return a.set.front() < b.set.front();
    });
    for (std::size_t i = 0; i < k; ++i) {
        out.sets.push_back(heavy[i].set);
        out.masses.push_back(heavy[i].mass);
    }
    out.min_separation = min_pairwise_separation(emb, out.sets);
    return out;
}

// ---------------------------------------------------------------------------
// Localization

struct LocalizedFamily {
    double delta = 0.0;
    std::vector<CellSet> anchors;
    std::vector<VertexFunction> functions;  // g_i
    std::vector<CellSet> supports;
    std::vector<double> norms_sq;           // ‖g_i‖_v²
};

/// τ(d) = max{0, 1 − (2/δ) d}; zero for d = +∞.
inline double localization_ramp(double distance, double delta) {
    if (std::isinf(distance)) return 0.0;
    return std::max(0.0, 1.0 - (2.0 / delta) * distance);
}

/// g_i(x) = τ_i(x) ‖F(x)‖ with τ_i the ramp in d_F(x, A_i).
inline LocalizedFamily localize(const StepGraphon& w, const Embedding& emb, const std::vector<CellSet>& anchors) {
    if (emb.n() != w.n()) throw Error(ErrorCode::DimensionMismatch, "embedding built for a different graphon");
    const std::size_t k = emb.k();
    if (anchors.size() != k) {
        throw Error(ErrorCode::DimensionMismatch, std::to_string(anchors.size()) + " anchors for k = " + std::to_string(k));
    }
    LocalizedFamily fam;
    fam.delta = separation_delta(k);
    for (const CellSet& a : anchors) {
        detail::require_same_n(w, a);
        if (a.empty()) throw Error(ErrorCode::EmptySet, "empty anchor set");
        const double m = emb.mass(a);
        if (m < 0.5) throw Error(ErrorCode::MassViolation, "anchor mass " + std::to_string(m) + " below 1/2");
    }
    const double sep = min_pairwise_separation(emb, anchors);
    if (sep < fam.delta) {
        throw Error(ErrorCode::SeparationViolation,
                    "anchors " + std::to_string(sep) + " apart, need " + std::to_string(fam.delta));
    }

    fam.anchors = anchors;
    for (const CellSet& a : anchors) {
        VertexFunction g = VertexFunction::Zero(static_cast<Eigen::Index>(w.n()));
        CellSet support(w.n());
        for (std::size_t x = 0; x < w.n(); ++x) {
            const double tau = localization_ramp(distance_to_set(emb, x, a), fam.delta);
            const double v = tau * emb.norm(x);
            g[static_cast<Eigen::Index>(x)] = v;
            if (v != 0.0) support.insert(x);
        }
        fam.norms_sq.push_back(inner_v(w, g, g));
        fam.functions.push_back(std::move(g));
        fam.supports.push_back(std::move(support));
    }
    return fam;
}

struct LocalizationCertificate {
    std::vector<double> rayleigh;      // R(g_i)
    double max_basis_rayleigh = 0.0;   // max_j R(f_j)
    double lambda_discrete = 0.0;
    double bound = 0.0;                // 4000 k⁷ λ_k
    double lipschitz_constant = 0.0;   // 1 + 4/δ
    double lipschitz_slack = kInfiniteDistance;  // min over pairs of bound − |g_i(x) − g_i(y)|
    bool supports_disjoint = true;
    double min_norm_sq = kInfiniteDistance;
    bool passed = true;
};

inline constexpr double kLocalizationRayleighTolerance = 1e-8;

/// Checks disjoint supports, ‖g_i‖² >= 1/2, the Lipschitz estimate and
/// R(g_i) <= 4000 k⁷ λ_k. Throws CertificateViolation on any failure.
inline LocalizationCertificate localized_rayleigh_certificate(const StepGraphon& w, const Embedding& emb,
                                                              const LocalizedFamily& fam,
                                                              const SpectralBasis& basis) {
    const std::size_t k = emb.k();
    LocalizationCertificate cert;
    cert.lambda_discrete = basis.eigenvalues.back();
    for (const VertexFunction& f : basis.functions) {
        cert.max_basis_rayleigh = std::max(cert.max_basis_rayleigh, rayleigh(w, f));
    }
    const double kk = static_cast<double>(k);
    cert.bound = 4000.0 * std::pow(kk, 7.0) * std::max(cert.lambda_discrete, 0.0);
    cert.lipschitz_constant = 1.0 + 4.0 / fam.delta;

    for (std::size_t i = 0; i < fam.supports.size(); ++i) {
        for (std::size_t j = i + 1; j < fam.supports.size(); ++j) {
            if (fam.supports[i].intersects(fam.supports[j])) cert.supports_disjoint = false;
        }
    }
    for (double m : fam.norms_sq) cert.min_norm_sq = std::min(cert.min_norm_sq, m);

    const std::size_t n = w.n();
    for (const VertexFunction& g : fam.functions) {
        cert.rayleigh.push_back(rayleigh(w, g));
        for (std::size_t x = 0; x < n; ++x) {
            for (std::size_t y = x + 1; y < n; ++y) {
                const double lhs = std::abs(g[static_cast<Eigen::Index>(x)] - g[static_cast<Eigen::Index>(y)]);
                const double rhs = cert.lipschitz_constant * (emb.row(x) - emb.row(y)).norm();
                cert.lipschitz_slack = std::min(cert.lipschitz_slack, rhs - lhs);
            }
        }
    }

    std::string failure;
    if (!cert.supports_disjoint) failure += " overlapping supports;";
    if (cert.min_norm_sq < 0.5 - 1e-10) failure += " ‖g_i‖² below 1/2;";
    if (cert.lipschitz_slack < -1e-12) failure += " Lipschitz estimate violated;";
    for (std::size_t i = 0; i < cert.rayleigh.size(); ++i) {
        if (cert.rayleigh[i] > cert.bound + kLocalizationRayleighTolerance) {
            failure += " R(g_" + std::to_string(i + 1) + ") = " + std::to_string(cert.rayleigh[i]) + " exceeds bound;";
        }
    }
    if (!failure.empty()) {
        cert.passed = false;
        throw Error(ErrorCode::CertificateViolation, "localization:" + failure);
    }
    return cert;
}

// ---------------------------------------------------------------------------
// Sweep cut

struct SweepLevel {
    double level = 0.0;      // the set is {x : g(x)² >= level}
    std::size_t size = 0;
    double expansion = 0.0;
};

struct SweepResult {
    CellSet set;
    double expansion = 0.0;
    double rayleigh = 0.0;
    double bound = 0.0;      // √(2 R(g))
    std::vector<SweepLevel> profile;  // descending level
    std::size_t best_index = 0;
};

/// Best level set {g² > t} by expansion. Ties keep the smaller set.
inline SweepResult sweep_cut(const StepGraphon& w, const VertexFunction& g) {
    detail::require_same_n(w, g);
    SweepResult out;
    out.rayleigh = rayleigh(w, g);  // throws ZeroFunction for g = 0
    out.bound = std::sqrt(2.0 * std::max(out.rayleigh, 0.0));

    const std::size_t n = w.n();
    std::vector<std::size_t> order;
    for (std::size_t x = 0; x < n; ++x) {
        if (g[static_cast<Eigen::Index>(x)] != 0.0) order.push_back(x);
    }
    const auto sq = [&](std::size_t x) {
        const double v = g[static_cast<Eigen::Index>(x)];
        return v * v;
    };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sq(a) > sq(b); });

    std::vector<double> row_sum(n);
    for (std::size_t x = 0; x < n; ++x) row_sum[x] = w.degree(x) * static_cast<double>(n);

    std::vector<char> inside(n, 0);
    CompensatedSum cut;  // Σ_{i∈S, j∉S} W_ij
    CompensatedSum vol;  // Σ_{i∈S} d_i
    const double h = w.cell_measure();
    bool have_best = false;
    for (std::size_t pos = 0; pos < order.size();) {
        const double level = sq(order[pos]);
        std::size_t end = pos;
        while (end < order.size() && sq(order[end]) == level) {
            const std::size_t x = order[end];
            CompensatedSum to_inside;
            for (std::size_t y = 0; y < n; ++y) {
                if (inside[y]) to_inside += w(x, y);
            }
            cut += row_sum[x] - w(x, x) - 2.0 * to_inside.value();
            vol += w.degree(x);
            inside[x] = 1;
            ++end;
        }
        const double v = vol.value() * h;
        if (v > 0.0) {
            const double hx = std::max(cut.value(), 0.0) * h * h / v;
            out.profile.push_back({level, end, hx});
            if (!have_best || hx < out.profile[out.best_index].expansion) {
                out.best_index = out.profile.size() - 1;
                have_best = true;
            }
        }
        pos = end;
    }
    if (!have_best) throw Error(ErrorCode::ZeroVolume, "no level set of g has positive vertex measure");

    const std::size_t size = out.profile[out.best_index].size;
    out.set = CellSet(n, std::span<const std::size_t>(order.data(), size));
    out.expansion = expansion(w, out.set);
    return out;
}

}  // namespace graphon_cheeger
