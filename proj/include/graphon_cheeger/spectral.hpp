#pragma once

// Spectrum of the graphon Laplacian restricted to step functions, and the
// spectral embedding F(x) = (f_1(x), ..., f_k(x)).
//
// With u_i = f_i sqrt(d_i / n) the quotient <Δ_W f, f>_v / <f, f>_v becomes the
// ordinary Rayleigh quotient of L = I - D^{-1/2} (W/n) D^{-1/2}, so a dense
// symmetric eigensolve of L yields λ_1..λ_n of the step space.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "graphon_cheeger/core.hpp"
#include "graphon_cheeger/error.hpp"

namespace graphon_cheeger {

/// Rows with norm at or below this are the zero vector of the embedding.
inline constexpr double kZeroRowThreshold = 1e-300;

struct SpectralBasis {
    std::size_t k = 0;
    std::vector<double> eigenvalues;          // ascending
    std::vector<VertexFunction> functions;    // orthonormal in <.,.>_v
    Eigen::MatrixXd symmetric_vectors;        // n×k columns u_j of L
};

/// Normalized operator L[i][j] = δ_ij − W_ij / (n sqrt(d_i d_j)).
inline Eigen::MatrixXd normalized_operator(const StepGraphon& w) {
    const auto n = static_cast<Eigen::Index>(w.n());
    for (std::size_t i = 0; i < w.n(); ++i) {
        if (!(w.degree(i) > 0.0)) {
            throw Error(ErrorCode::ZeroDegreeCell, "cell " + std::to_string(i) + " has zero degree");
        }
    }
    Eigen::VectorXd inv_sqrt(n);
    for (Eigen::Index i = 0; i < n; ++i) inv_sqrt[i] = 1.0 / std::sqrt(w.degree(static_cast<std::size_t>(i)));
    const double inv_n = w.cell_measure();
    Eigen::MatrixXd l(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double v = (i == j ? 1.0 : 0.0) - w.kernel()(i, j) * inv_n * inv_sqrt[i] * inv_sqrt[j];
            l(i, j) = v;
            l(j, i) = v;
        }
    }
    return l;
}

namespace detail {

// Flip so that the first coordinate that is nonzero relative to the largest
// entry is positive.
inline void canonical_sign(Eigen::Ref<Eigen::VectorXd> u) {
    const double scale = u.cwiseAbs().maxCoeff();
    if (scale == 0.0) return;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        if (std::abs(u[i]) > 1e-9 * scale) {
            if (u[i] < 0.0) u = -u;
            return;
        }
    }
}

/// The operator is positive semidefinite with spectrum in [0, 2]; rounding
/// residue outside that range is clamped away.
inline double clamp_eigenvalue(double v) { return std::clamp(v, 0.0, 2.0); }

inline void require_connected(const StepGraphon& w) {
    if (!w.connected()) throw Error(ErrorCode::Disconnected, "spectral operations need a connected graphon");
}

}  // namespace detail

/// Full ascending spectrum of the normalized operator.
inline std::vector<double> discrete_spectrum(const StepGraphon& w) {
    detail::require_connected(w);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(normalized_operator(w), Eigen::EigenvaluesOnly);
    std::vector<double> out;
    for (double v : solver.eigenvalues()) out.push_back(detail::clamp_eigenvalue(v));
    return out;
}

/// The k smallest eigenvalues with eigenfunctions orthonormal under <.,.>_v.
inline SpectralBasis eigen_k(const StepGraphon& w, std::size_t k) {
    if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be positive");
    if (k > w.n()) {
        throw Error(ErrorCode::KTooLarge, "k = " + std::to_string(k) + " exceeds n = " + std::to_string(w.n()));
    }
    detail::require_connected(w);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(normalized_operator(w));
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::NonFinite, "eigensolver did not converge");
    }
    const auto n = static_cast<Eigen::Index>(w.n());
    const auto kk = static_cast<Eigen::Index>(k);

    SpectralBasis basis;
    basis.k = k;
    basis.symmetric_vectors = solver.eigenvectors().leftCols(kk);
    Eigen::VectorXd scale(n);
    for (Eigen::Index i = 0; i < n; ++i) scale[i] = std::sqrt(w.degree(static_cast<std::size_t>(i)) * w.cell_measure());
    for (Eigen::Index j = 0; j < kk; ++j) {
        detail::canonical_sign(basis.symmetric_vectors.col(j));
        basis.eigenvalues.push_back(detail::clamp_eigenvalue(solver.eigenvalues()[j]));
        basis.functions.push_back(basis.symmetric_vectors.col(j).cwiseQuotient(scale));
    }
    return basis;
}

/// λ_k of the graphon itself. Step-space complements satisfy Δ_W f = f, so the
/// graphon value is min(discrete λ_k, 1), and 1 once k exceeds n.
inline double lambda_k_graphon(const StepGraphon& w, std::size_t k) {
    if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be positive");
    detail::require_connected(w);
    if (k > w.n()) return 1.0;
    return std::min(eigen_k(w, k).eigenvalues.back(), 1.0);
}

inline double graphon_lambda_from_discrete(double discrete) { return std::min(discrete, 1.0); }

/// Row table of F(x) = (f_1(x), ..., f_k(x)) together with row norms, radial
/// projections F̄(x) = F(x)/‖F(x)‖ and the graphon degrees.
class Embedding {
public:
    Embedding() = default;

    Embedding(Eigen::MatrixXd table, std::vector<double> degrees)
        : table_(std::move(table)), degrees_(std::move(degrees)) {
        const Eigen::Index n = table_.rows();
        if (static_cast<std::size_t>(n) != degrees_.size()) {
            throw Error(ErrorCode::DimensionMismatch, "embedding rows and degrees disagree");
        }
        norms_.resize(static_cast<std::size_t>(n));
        unit_ = Eigen::MatrixXd::Zero(n, table_.cols());
        for (Eigen::Index x = 0; x < n; ++x) {
            const double r = table_.row(x).stableNorm();
            norms_[static_cast<std::size_t>(x)] = r;
            if (r > kZeroRowThreshold) unit_.row(x) = table_.row(x) / r;
        }
    }

    std::size_t n() const noexcept { return norms_.size(); }
    std::size_t k() const noexcept { return static_cast<std::size_t>(table_.cols()); }
    const Eigen::MatrixXd& table() const noexcept { return table_; }
    const Eigen::MatrixXd& unit_rows() const noexcept { return unit_; }
    const std::vector<double>& norms() const noexcept { return norms_; }
    const std::vector<double>& degrees() const noexcept { return degrees_; }

    double norm(std::size_t x) const { return norms_[x]; }
    bool is_zero(std::size_t x) const { return norms_[x] <= kZeroRowThreshold; }
    auto row(std::size_t x) const { return table_.row(static_cast<Eigen::Index>(x)); }
    auto unit_row(std::size_t x) const { return unit_.row(static_cast<Eigen::Index>(x)); }

    /// Mass ‖F(x)‖² d_x / n of a single cell.
    double cell_mass(std::size_t x) const {
        return norms_[x] * norms_[x] * degrees_[x] / static_cast<double>(n());
    }

    /// Mass ∫_A ‖F‖² d_W of a cell set.
    double mass(const CellSet& a) const {
        CompensatedSum s;
        for (std::size_t x : a.members()) s += norms_[x] * norms_[x] * degrees_[x];
        return s.value() / static_cast<double>(n());
    }

private:
    Eigen::MatrixXd table_;
    Eigen::MatrixXd unit_;
    std::vector<double> norms_;
    std::vector<double> degrees_;
};

inline Embedding build_embedding(const StepGraphon& w, const SpectralBasis& basis) {
    const auto n = static_cast<Eigen::Index>(w.n());
    Eigen::MatrixXd table(n, static_cast<Eigen::Index>(basis.k));
    for (std::size_t j = 0; j < basis.k; ++j) {
        if (basis.functions[j].size() != n) {
            throw Error(ErrorCode::DimensionMismatch, "basis function length differs from n");
        }
        table.col(static_cast<Eigen::Index>(j)) = basis.functions[j];
    }
    return Embedding(std::move(table), w.degrees());
}

/// (1/n) Σ_x <F(x), v>² d_x for a unit vector v; equals 1 for an orthonormal basis.
inline double spread_check(const StepGraphon& w, const Embedding& emb, std::span<const double> v) {
    if (v.size() != emb.k()) {
        throw Error(ErrorCode::DimensionMismatch, "direction has dimension " + std::to_string(v.size()));
    }
    if (emb.n() != w.n()) throw Error(ErrorCode::DimensionMismatch, "embedding built for a different graphon");
    const Eigen::Map<const Eigen::VectorXd> dir(v.data(), static_cast<Eigen::Index>(v.size()));
    if (std::abs(dir.norm() - 1.0) > 1e-12) {
        throw Error(ErrorCode::NonUnitVector, "direction has norm " + std::to_string(dir.norm()));
    }
    CompensatedSum s;
    for (std::size_t x = 0; x < emb.n(); ++x) {
        const double p = emb.row(x).dot(dir);
        s += p * p * w.degree(x);
    }
    return s.value() * w.cell_measure();
}

}  // namespace graphon_cheeger
