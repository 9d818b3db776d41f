#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "qcavqe/statevector.hpp"

namespace qcavqe {

/// Ground-state oracle output. Polarizations use P = -<Z> per device qubit.
struct GroundStateResult {
    double energy = 0.0; // meV
    StateVector state;
    std::vector<double> polarizations;
    bool degenerate = false;
    bool converged = true;
    int iterations = 0;
};

namespace detail {

/// y += H x for a real vector, using the X/Z string action.
inline void apply_pauli_sum(const PauliSum& h, const std::vector<double>& x,
                            std::vector<double>& y) {
    const std::uint64_t dim = x.size();
    for (const auto& term : h.terms) {
        const std::uint64_t xm = term.x_mask();
        const std::uint64_t zm = term.z_mask();
        const double c = term.coefficient;
        for (std::uint64_t i = 0; i < dim; ++i) {
            const double sign = std::popcount(i & zm) & 1 ? -1.0 : 1.0;
            y[i ^ xm] += c * sign * x[i];
        }
    }
}

inline std::vector<double> polarizations_from_probabilities(const std::vector<double>& probs,
                                                            int n_qubits) {
    std::vector<double> pol(n_qubits, 0.0);
    for (std::uint64_t i = 0; i < probs.size(); ++i) {
        if (probs[i] == 0.0) continue;
        for (int q = 0; q < n_qubits; ++q) {
            // P = -<Z>: bit 1 contributes +1
            pol[q] += (i >> q & 1 ? 1.0 : -1.0) * probs[i];
        }
    }
    return pol;
}

inline std::vector<double> polarizations_from_state(const StateVector& state) {
    std::vector<double> probs(state.dim());
    for (std::uint64_t i = 0; i < state.dim(); ++i) probs[i] = std::norm(state.amplitudes[i]);
    return polarizations_from_probabilities(probs, state.n_qubits);
}

} // namespace detail

/// Full Hermitian eigendecomposition of the 2^N matrix; lowest eigenpair.
/// The degenerate flag is set when the spectral gap is below
/// 1e-9 * max|coefficient|.
inline GroundStateResult ground_state_dense(const PauliSum& h) {
    if (h.n_qubits < 1) throw std::invalid_argument("ground_state_dense: need >= 1 qubit");
    if (h.n_qubits > 12)
        throw std::invalid_argument("ground_state_dense: limited to 12 qubits");
    const std::uint64_t dim = std::uint64_t{1} << h.n_qubits;

    Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(dim, dim);
    for (const auto& term : h.terms) {
        const std::uint64_t xm = term.x_mask();
        const std::uint64_t zm = term.z_mask();
        for (std::uint64_t i = 0; i < dim; ++i) {
            const double sign = std::popcount(i & zm) & 1 ? -1.0 : 1.0;
            mat(i ^ xm, i) += term.coefficient * sign;
        }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(mat);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("ground_state_dense: eigensolver failed");

    GroundStateResult result;
    result.energy = solver.eigenvalues()(0);
    result.state.n_qubits = h.n_qubits;
    result.state.amplitudes.resize(dim);
    for (std::uint64_t i = 0; i < dim; ++i)
        result.state.amplitudes[i] = solver.eigenvectors()(i, 0);
    result.polarizations = detail::polarizations_from_state(result.state);
    if (dim > 1) {
        const double gap = solver.eigenvalues()(1) - solver.eigenvalues()(0);
        result.degenerate = gap < 1e-9 * h.max_abs_coefficient();
    }
    return result;
}

/// Restarted Lanczos ground-state solve with matrix-free Pauli application.
/// Start vector is the normalized all-ones vector with seeded 1e-3 noise;
/// converged when the Ritz value changes by less than `tol` meV.
inline GroundStateResult ground_state_lanczos(const PauliSum& h, double tol = 1e-9,
                                              int max_iter = 2000, std::uint64_t seed = 0) {
    if (h.n_qubits < 1) throw std::invalid_argument("ground_state_lanczos: need >= 1 qubit");
    if (h.n_qubits > 26)
        throw std::invalid_argument("ground_state_lanczos: limited to 26 qubits");
    const std::uint64_t dim = std::uint64_t{1} << h.n_qubits;

    GroundStateResult result;
    result.state.n_qubits = h.n_qubits;

    if (h.terms.empty()) {
        result.energy = 0.0;
        result.state.amplitudes.assign(dim, Amplitude{});
        result.state.amplitudes[0] = 1.0;
        result.polarizations.assign(h.n_qubits, -1.0);
        result.degenerate = true;
        return result;
    }

    std::vector<double> v(dim, 1.0);
    {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        for (auto& x : v) x += 1e-3 * unif(rng);
    }

    const auto normalize = [](std::vector<double>& x) {
        double s = 0.0;
        for (double xi : x) s += xi * xi;
        s = std::sqrt(s);
        for (auto& xi : x) xi /= s;
        return s;
    };
    normalize(v);

    // Krylov block size, capped so the stored basis stays within memory for
    // wide systems (each basis vector is 2^N doubles).
    int block = std::min<int>(40, static_cast<int>(std::min<std::uint64_t>(dim, 4096)));
    if (h.n_qubits >= 24) block = 1 << (28 - h.n_qubits);
    double ritz_prev = std::numeric_limits<double>::infinity();
    double gap_estimate = std::numeric_limits<double>::infinity();
    int total_matvecs = 0;
    bool converged = false;

    while (total_matvecs < max_iter && !converged) {
        std::vector<std::vector<double>> basis;
        std::vector<double> alpha, beta;
        basis.push_back(v);

        for (int j = 0; j < block && total_matvecs < max_iter; ++j) {
            std::vector<double> w(dim, 0.0);
            detail::apply_pauli_sum(h, basis[j], w);
            ++total_matvecs;

            double a = 0.0;
            for (std::uint64_t i = 0; i < dim; ++i) a += basis[j][i] * w[i];
            alpha.push_back(a);

            for (std::uint64_t i = 0; i < dim; ++i) w[i] -= a * basis[j][i];
            if (j > 0)
                for (std::uint64_t i = 0; i < dim; ++i) w[i] -= beta[j - 1] * basis[j - 1][i];
            // full reorthogonalization inside the block
            for (const auto& u : basis) {
                double d = 0.0;
                for (std::uint64_t i = 0; i < dim; ++i) d += u[i] * w[i];
                for (std::uint64_t i = 0; i < dim; ++i) w[i] -= d * u[i];
            }
            double b = 0.0;
            for (double wi : w) b += wi * wi;
            b = std::sqrt(b);
            if (b < 1e-13 * std::max(1.0, h.max_abs_coefficient()) ||
                basis.size() >= dim) { // invariant subspace found
                break;
            }
            beta.push_back(b);
            for (auto& wi : w) wi /= b;
            basis.push_back(std::move(w));
        }

        const int m = static_cast<int>(alpha.size());
        Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            tri(i, i) = alpha[i];
            if (i + 1 < m && i < static_cast<int>(beta.size())) {
                tri(i, i + 1) = beta[i];
                tri(i + 1, i) = beta[i];
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(tri);
        const double ritz = solver.eigenvalues()(0);
        if (m > 1) gap_estimate = solver.eigenvalues()(1) - solver.eigenvalues()(0);

        std::vector<double> next(dim, 0.0);
        for (int j = 0; j < static_cast<int>(basis.size()) && j < m; ++j) {
            const double c = solver.eigenvectors()(j, 0);
            for (std::uint64_t i = 0; i < dim; ++i) next[i] += c * basis[j][i];
        }
        normalize(next);
        v = std::move(next);

        if (std::abs(ritz - ritz_prev) < tol) converged = true;
        ritz_prev = ritz;
    }

    // Rayleigh quotient of the final vector is the reported energy.
    std::vector<double> hv(dim, 0.0);
    detail::apply_pauli_sum(h, v, hv);
    double energy = 0.0;
    for (std::uint64_t i = 0; i < dim; ++i) energy += v[i] * hv[i];

    result.energy = energy;
    result.converged = converged;
    result.iterations = total_matvecs;
    result.state.amplitudes.resize(dim);
    for (std::uint64_t i = 0; i < dim; ++i) result.state.amplitudes[i] = v[i];
    result.polarizations = detail::polarizations_from_state(result.state);
    result.degenerate = gap_estimate < 1e-9 * h.max_abs_coefficient();
    return result;
}

} // namespace qcavqe
