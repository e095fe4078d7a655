#pragma once

// Discrete graphon model: a step graphon on n uniform cells of [0,1], with the
// measures, degrees, expansion and Rayleigh quotient evaluated as exact finite
// sums over cells.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "graphon_cheeger/error.hpp"
#include "graphon_cheeger/numeric.hpp"

namespace graphon_cheeger {

/// Kernels asymmetric by at most this much are symmetrized by averaging.
inline constexpr double kSymmetryTolerance = 1e-12;

using VertexFunction = Eigen::VectorXd;

/// A subset of the n grid cells. Members are kept sorted; membership is O(1).
class CellSet {
public:
    CellSet() = default;

    explicit CellSet(std::size_t n) : mask_(n, 0) {}

    CellSet(std::size_t n, std::span<const std::size_t> members) : mask_(n, 0) {
        for (std::size_t i : members) insert(i);
    }

    CellSet(std::size_t n, std::initializer_list<std::size_t> members) : mask_(n, 0) {
        for (std::size_t i : members) insert(i);
    }

    static CellSet full(std::size_t n) {
        CellSet s(n);
        for (std::size_t i = 0; i < n; ++i) s.insert(i);
        return s;
    }

    std::size_t n() const noexcept { return mask_.size(); }
    std::size_t size() const noexcept { return members_.size(); }
    bool empty() const noexcept { return members_.empty(); }

    bool contains(std::size_t i) const noexcept { return i < mask_.size() && mask_[i] != 0; }

    const std::vector<std::size_t>& members() const noexcept { return members_; }

    /// Smallest member; only meaningful for nonempty sets.
    std::size_t front() const { return members_.front(); }

    void insert(std::size_t i) {
        if (i >= mask_.size()) {
            throw Error(ErrorCode::IndexOutOfRange,
                        "cell " + std::to_string(i) + " outside 0.." + std::to_string(mask_.size()));
        }
        if (mask_[i]) return;
        mask_[i] = 1;
        members_.insert(std::lower_bound(members_.begin(), members_.end(), i), i);
    }

    CellSet complement() const {
        CellSet c(n());
        for (std::size_t i = 0; i < n(); ++i) {
            if (!mask_[i]) c.insert(i);
        }
        return c;
    }

    CellSet united(const CellSet& other) const {
        CellSet u = *this;
        for (std::size_t i : other.members_) u.insert(i);
        return u;
    }

    bool intersects(const CellSet& other) const {
        for (std::size_t i : members_) {
            if (other.contains(i)) return true;
        }
        return false;
    }

    bool is_subset_of(const CellSet& other) const {
        return std::all_of(members_.begin(), members_.end(),
                           [&](std::size_t i) { return other.contains(i); });
    }

    VertexFunction indicator() const {
        VertexFunction f = VertexFunction::Zero(static_cast<Eigen::Index>(n()));
        for (std::size_t i : members_) f[static_cast<Eigen::Index>(i)] = 1.0;
        return f;
    }

    friend bool operator==(const CellSet& a, const CellSet& b) {
        return a.n() == b.n() && a.members_ == b.members_;
    }

private:
    std::vector<char> mask_;
    std::vector<std::size_t> members_;
};

/// Symmetric [0,1]-valued kernel constant on the n×n grid cells, with cached
/// degrees d_i = (1/n) Σ_j W_ij. Immutable after construction.
class StepGraphon {
public:
    /// Validates and symmetrizes `kernel`. With `require_connected`, rejects
    /// kernels with a zero-degree cell or a disconnected positive-weight graph.
    static StepGraphon create(const Eigen::MatrixXd& kernel, bool require_connected = true) {
        if (kernel.rows() != kernel.cols()) {
            throw Error(ErrorCode::NonSquare, "kernel is " + std::to_string(kernel.rows()) + "x" +
                                                  std::to_string(kernel.cols()));
        }
        if (kernel.rows() == 0) {
            throw Error(ErrorCode::NonSquare, "kernel is empty");
        }
        const Eigen::Index n = kernel.rows();
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                const double v = kernel(i, j);
                if (!(v >= 0.0 && v <= 1.0)) {
                    throw Error(ErrorCode::ValueOutOfRange, "entry (" + std::to_string(i) + ", " +
                                                                std::to_string(j) + ") = " +
                                                                std::to_string(v) + " not in [0,1]");
                }
            }
        }
        Eigen::MatrixXd sym = kernel;
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = i + 1; j < n; ++j) {
                const double a = kernel(i, j);
                const double b = kernel(j, i);
                if (std::abs(a - b) > kSymmetryTolerance) {
                    throw Error(ErrorCode::Asymmetric, "entries (" + std::to_string(i) + ", " +
                                                           std::to_string(j) + ") differ by " +
                                                           std::to_string(std::abs(a - b)));
                }
                const double avg = a == b ? a : 0.5 * (a + b);
                sym(i, j) = avg;
                sym(j, i) = avg;
            }
        }
        StepGraphon w(std::move(sym));
        if (require_connected) {
            for (std::size_t i = 0; i < w.n(); ++i) {
                if (!(w.degrees_[i] > 0.0)) {
                    throw Error(ErrorCode::ZeroDegreeCell, "cell " + std::to_string(i) + " has zero degree");
                }
            }
            if (!w.connected_) {
                throw Error(ErrorCode::Disconnected, "positive-weight cell graph is disconnected");
            }
        }
        return w;
    }

    std::size_t n() const noexcept { return degrees_.size(); }
    const Eigen::MatrixXd& kernel() const noexcept { return kernel_; }
    double operator()(std::size_t i, std::size_t j) const {
        return kernel_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    const std::vector<double>& degrees() const noexcept { return degrees_; }
    double degree(std::size_t i) const { return degrees_[i]; }

    /// True when every degree is positive and the positive-weight graph is connected.
    bool connected() const noexcept { return connected_; }

    /// Lebesgue measure of one cell.
    double cell_measure() const noexcept { return 1.0 / static_cast<double>(n()); }

private:
    explicit StepGraphon(Eigen::MatrixXd kernel) : kernel_(std::move(kernel)) {
        const std::size_t n = static_cast<std::size_t>(kernel_.rows());
        const double inv_n = 1.0 / static_cast<double>(n);
        degrees_.resize(n);
        bool all_positive = true;
        for (std::size_t i = 0; i < n; ++i) {
            CompensatedSum row;
            for (std::size_t j = 0; j < n; ++j) row += (*this)(i, j);
            degrees_[i] = row.value() * inv_n;
            all_positive = all_positive && degrees_[i] > 0.0;
        }
        connected_ = all_positive && graph_connected();
    }

    bool graph_connected() const {
        const std::size_t n = this->n();
        std::vector<char> seen(n, 0);
        std::queue<std::size_t> frontier;
        frontier.push(0);
        seen[0] = 1;
        std::size_t reached = 1;
        while (!frontier.empty()) {
            const std::size_t i = frontier.front();
            frontier.pop();
            for (std::size_t j = 0; j < n; ++j) {
                if (!seen[j] && (*this)(i, j) > 0.0) {
                    seen[j] = 1;
                    ++reached;
                    frontier.push(j);
                }
            }
        }
        return reached == n;
    }

    Eigen::MatrixXd kernel_;
    std::vector<double> degrees_;
    bool connected_ = false;
};

namespace detail {

inline void require_same_n(const StepGraphon& w, const CellSet& a) {
    if (a.n() != w.n()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "cell set over " + std::to_string(a.n()) + " cells, graphon has " + std::to_string(w.n()));
    }
}

inline void require_same_n(const StepGraphon& w, const VertexFunction& f) {
    if (static_cast<std::size_t>(f.size()) != w.n()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "function of length " + std::to_string(f.size()) + ", graphon has " + std::to_string(w.n()));
    }
}

inline void require_finite(const VertexFunction& f) {
    if (!f.allFinite()) throw Error(ErrorCode::NonFinite, "function has NaN or infinite entries");
}

}  // namespace detail

/// Vertex measure ν(A) = ∫_{A×I} W = (1/n) Σ_{i∈A} d_i.
inline double nu(const StepGraphon& w, const CellSet& a) {
    detail::require_same_n(w, a);
    CompensatedSum s;
    for (std::size_t i : a.members()) s += w.degree(i);
    return s.value() * w.cell_measure();
}

/// Edge measure η(A×B) = (1/n²) Σ_{i∈A, j∈B} W_ij.
inline double eta(const StepGraphon& w, const CellSet& a, const CellSet& b) {
    detail::require_same_n(w, a);
    detail::require_same_n(w, b);
    CompensatedSum s;
    for (std::size_t i : a.members()) {
        for (std::size_t j : b.members()) s += w(i, j);
    }
    const double h = w.cell_measure();
    return s.value() * h * h;
}

/// Expansion h_W(A) = η(A×A^c) / ν(A).
inline double expansion(const StepGraphon& w, const CellSet& a) {
    detail::require_same_n(w, a);
    if (a.empty()) throw Error(ErrorCode::EmptySet, "expansion of the empty set");
    const double vol = nu(w, a);
    if (!(vol > 0.0)) throw Error(ErrorCode::ZeroVolume, "set has zero vertex measure");
    return eta(w, a, a.complement()) / vol;
}

/// ⟨f,g⟩_v = (1/n) Σ_i f_i g_i d_i.
inline double inner_v(const StepGraphon& w, const VertexFunction& f, const VertexFunction& g) {
    detail::require_same_n(w, f);
    detail::require_same_n(w, g);
    CompensatedSum s;
    for (std::size_t i = 0; i < w.n(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        s += f[ii] * g[ii] * w.degree(i);
    }
    return s.value() * w.cell_measure();
}

/// Dirichlet energy ⟨Δ_W f, f⟩_v = ½ (1/n²) Σ_{i,j} (f_i − f_j)² W_ij.
inline double dirichlet_energy(const StepGraphon& w, const VertexFunction& f) {
    detail::require_same_n(w, f);
    CompensatedSum s;
    const std::size_t n = w.n();
    for (std::size_t i = 0; i < n; ++i) {
        const double fi = f[static_cast<Eigen::Index>(i)];
        for (std::size_t j = 0; j < n; ++j) {
            const double diff = fi - f[static_cast<Eigen::Index>(j)];
            s += diff * diff * w(i, j);
        }
    }
    const double h = w.cell_measure();
    return 0.5 * s.value() * h * h;
}

/// Rayleigh quotient R_{Δ_W}(f) = ⟨Δ_W f, f⟩_v / ⟨f, f⟩_v.
inline double rayleigh(const StepGraphon& w, const VertexFunction& f) {
    detail::require_same_n(w, f);
    detail::require_finite(f);
    const double den = inner_v(w, f, f);
    if (!(den > 0.0)) throw Error(ErrorCode::ZeroFunction, "function vanishes in <.,.>_v");
    return dirichlet_energy(w, f) / den;
}

/// Splits each cell into r equal subcells. The result is the same graphon on
/// a finer grid.
inline StepGraphon refine(const StepGraphon& w, std::size_t r) {
    if (r == 0) throw Error(ErrorCode::InvalidArgument, "refinement factor must be positive");
    const auto n = static_cast<Eigen::Index>(w.n());
    const auto rr = static_cast<Eigen::Index>(r);
    Eigen::MatrixXd k(n * rr, n * rr);
    for (Eigen::Index i = 0; i < n * rr; ++i) {
        for (Eigen::Index j = 0; j < n * rr; ++j) k(i, j) = w.kernel()(i / rr, j / rr);
    }
    return StepGraphon::create(k, w.connected());
}

}  // namespace graphon_cheeger
