#pragma once

// Exact references: sector enumeration, dense / iterative diagonalization and
// the deterministic one-loop superoperator map
//
//   M' = F .* (M - (H_int M + M H_int) / (2r)),   F_ij = r / (r - S + (h_i + h_j)/2)
//
// whose stochastic unravelling the walker engine implements.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tmc/errors.hpp"
#include "tmc/lanczos.hpp"
#include "tmc/model.hpp"

namespace tmc {

inline constexpr std::uint64_t kEnumerationCap = 10'000'000;
inline constexpr std::uint64_t kDenseCap = 100'000;
inline constexpr int kDenseSolverCap = 4096; // dense eigensolve below, Lanczos above
inline constexpr int kSuperoperatorCap = 200;

template <typename State>
struct SectorBasis {
    std::vector<State> states; // ascending bit-pattern order

    std::size_t size() const noexcept { return states.size(); }

    bool contains(State s) const noexcept {
        return std::binary_search(states.begin(), states.end(), s);
    }

    std::size_t index(State s) const {
        const auto it = std::lower_bound(states.begin(), states.end(), s);
        if (it == states.end() || *it != s)
            throw ConfigError("sector basis: state not in the conserved sector");
        return static_cast<std::size_t>(it - states.begin());
    }
};

template <LatticeModel M>
SectorBasis<typename M::state_type> enumerate_sector(const M& model,
                                                     std::uint64_t cap = kEnumerationCap) {
    return {model.sector_states(cap)};
}

// Full sector Hamiltonian as a dense matrix, H(a, b) = <b|H|a> (= <a|H|b>).
template <LatticeModel M>
Eigen::MatrixXd dense_hamiltonian(const M& model,
                                  const SectorBasis<typename M::state_type>& basis) {
    const std::size_t dim = basis.size();
    if (dim > kDenseCap)
        throw CapacityError("dense_hamiltonian: dimension " + std::to_string(dim) +
                            " exceeds the dense cap " + std::to_string(kDenseCap));
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim),
                                              static_cast<Eigen::Index>(dim));
    std::vector<Connection<typename M::state_type>> conns;
    for (std::size_t a = 0; a < dim; ++a) {
        h(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)) =
            model.diagonal_energy(basis.states[a]);
        model.connections(basis.states[a], conns);
        for (const auto& c : conns) {
            const std::size_t b = basis.index(c.state);
            h(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = c.element;
        }
    }
    return h;
}

template <LatticeModel M>
CsrMatrix sector_csr(const M& model, const SectorBasis<typename M::state_type>& basis) {
    const std::size_t dim = basis.size();
    CsrMatrix csr;
    csr.dim = static_cast<int>(dim);
    csr.row_ptr.assign(dim + 1, 0);
    std::vector<Connection<typename M::state_type>> conns;
    for (std::size_t a = 0; a < dim; ++a) {
        csr.cols.push_back(static_cast<int>(a));
        csr.vals.push_back(model.diagonal_energy(basis.states[a]));
        model.connections(basis.states[a], conns);
        for (const auto& c : conns) {
            csr.cols.push_back(static_cast<int>(basis.index(c.state)));
            csr.vals.push_back(c.element);
        }
        csr.row_ptr[a + 1] = static_cast<std::int64_t>(csr.cols.size());
    }
    return csr;
}

struct GroundState {
    double energy = 0.0;
    Eigen::VectorXd vector;
    int degeneracy = -1; // eigenvalue count within tolerance of E0; -1 = not computed
};

// Smallest eigenpair of the sector Hamiltonian: dense solver for dimensions
// up to kDenseSolverCap, Lanczos above.
template <LatticeModel M>
GroundState ground_state_energy(const M& model) {
    const auto basis = enumerate_sector(model);
    const std::size_t dim = basis.size();
    if (dim == 0) throw ConfigError("ground_state_energy: empty sector");

    GroundState gs;
    if (dim <= static_cast<std::size_t>(kDenseSolverCap)) {
        const Eigen::MatrixXd h = dense_hamiltonian(model, basis);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
        if (es.info() != Eigen::Success)
            throw ConvergenceError("ground_state_energy: dense eigensolver failed");
        gs.energy = es.eigenvalues()(0);
        gs.vector = es.eigenvectors().col(0);
        const double tol = 1e-8 * std::max(1.0, std::abs(gs.energy));
        gs.degeneracy = 0;
        for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
            if (es.eigenvalues()(k) <= gs.energy + tol) ++gs.degeneracy;
    } else {
        const CsrMatrix csr = sector_csr(model, basis);
        const LanczosResult lr = lowest_eigenpair(csr);
        gs.energy = lr.energy;
        gs.vector = Eigen::Map<const Eigen::VectorXd>(lr.vector.data(),
                                                      static_cast<Eigen::Index>(dim));
    }
    return gs;
}

// Precomputed pieces of the deterministic one-loop map on a fixed sector.
template <typename State>
class ExactMap {
public:
    template <LatticeModel M>
    ExactMap(const M& model, const SectorBasis<State>& basis) {
        const std::size_t dim = basis.size();
        if (dim > static_cast<std::size_t>(kSuperoperatorCap))
            throw CapacityError("exact map: dimension " + std::to_string(dim) +
                                " exceeds the superoperator cap " +
                                std::to_string(kSuperoperatorCap));
        diag_.resize(static_cast<Eigen::Index>(dim));
        for (std::size_t a = 0; a < dim; ++a)
            diag_(static_cast<Eigen::Index>(a)) = model.diagonal_energy(basis.states[a]);
        h_int_ = dense_hamiltonian(model, basis);
        h_int_.diagonal().setZero();
    }

    const Eigen::VectorXd& free_diagonal() const noexcept { return diag_; }
    const Eigen::MatrixXd& interaction() const noexcept { return h_int_; }

    // One application of rR_free (1 + L_int / r), symmetrized to suppress
    // floating-point drift (the map preserves symmetry analytically).
    Eigen::MatrixXd apply(const Eigen::MatrixXd& m, double r, double shift) const {
        const Eigen::Index dim = diag_.size();
        Eigen::MatrixXd next = m - (h_int_ * m + m * h_int_) / (2.0 * r);
        for (Eigen::Index i = 0; i < dim; ++i) {
            for (Eigen::Index j = 0; j < dim; ++j) {
                const double denom = r - shift + 0.5 * (diag_(i) + diag_(j));
                if (denom <= 0.0)
                    throw ResolventError(
                        "exact map: resolvent denominator " + std::to_string(denom) +
                        " <= 0 at diagonal pair (" + std::to_string(diag_(i)) + ", " +
                        std::to_string(diag_(j)) + "); increase r or lower the shift");
                next(i, j) *= r / denom;
            }
        }
        next = 0.5 * (next + next.transpose()).eval();
        return next;
    }

private:
    Eigen::VectorXd diag_;
    Eigen::MatrixXd h_int_;
};

template <LatticeModel M>
Eigen::MatrixXd exact_one_step(const Eigen::MatrixXd& m, const M& model, double r,
                               double shift) {
    const auto basis = enumerate_sector(model);
    if (static_cast<std::size_t>(m.rows()) != basis.size() ||
        static_cast<std::size_t>(m.cols()) != basis.size())
        throw ConfigError("exact_one_step: matrix shape does not match the sector");
    return ExactMap<typename M::state_type>(model, basis).apply(m, r, shift);
}

using ShiftSchedule = std::function<double(int iteration)>;

inline ShiftSchedule constant_shift(double s) {
    return [s](int) { return s; };
}

struct FixedPointResult {
    Eigen::MatrixXd matrix;
    std::vector<double> energy_trace; // projected energy; entry 0 is the initial dyad's
};

// Iterates the exact map from the uniform mixture of free-ground-state dyads.
// With renormalization the matrix is rescaled by its trace (Frobenius norm on
// a zero-trace step) so constant-shift runs cannot overflow.
template <LatticeModel M>
FixedPointResult fixed_point_iterate(const M& model, double r, const ShiftSchedule& shift,
                                     int iterations, bool renormalize = true) {
    const auto basis = enumerate_sector(model);
    const Eigen::Index dim = static_cast<Eigen::Index>(basis.size());
    const ExactMap<typename M::state_type> map(model, basis);

    Eigen::MatrixXd h_full = map.interaction();
    h_full.diagonal() = map.free_diagonal();

    CounterRng rng = CounterRng::from_seed(0);
    const auto ground = model.free_ground_states(basis.size(), rng);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
    for (const auto& g : ground) {
        const Eigen::Index a = static_cast<Eigen::Index>(basis.index(g));
        m(a, a) += 1.0 / static_cast<double>(ground.size());
    }

    const auto projected_energy = [&](const Eigen::MatrixXd& mat) {
        const double tr = mat.trace();
        if (tr == 0.0) throw EstimateError("fixed_point_iterate: zero-trace matrix");
        return (h_full * mat).trace() / tr;
    };

    FixedPointResult result;
    result.energy_trace.reserve(static_cast<std::size_t>(iterations) + 1);
    result.energy_trace.push_back(projected_energy(m));
    for (int it = 0; it < iterations; ++it) {
        m = map.apply(m, r, shift(it));
        if (!m.allFinite())
            throw ConvergenceError("fixed_point_iterate: overflow at iteration " +
                                   std::to_string(it) +
                                   "; enable renormalization or use shift control");
        if (renormalize) {
            const double tr = m.trace();
            const double scale = (std::abs(tr) > 1e-300) ? tr : m.norm();
            if (scale != 0.0) m /= scale;
        }
        result.energy_trace.push_back(projected_energy(m));
    }
    result.matrix = std::move(m);
    return result;
}

} // namespace tmc
