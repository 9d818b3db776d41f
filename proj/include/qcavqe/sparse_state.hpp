#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <vector>

#include "qcavqe/statevector.hpp"

namespace qcavqe {

/// Amplitude-map state for circuits whose support stays small: RotY is the
/// only branching gate here, so a k-rotation program touches at most 2^k
/// basis states regardless of qubit count. Backs simulation of wires too
/// wide for the dense engine. Keys are basis indices; a std::map keeps
/// iteration order deterministic.
struct SparseState {
    int n_qubits = 0;
    std::map<std::uint64_t, Amplitude> amplitudes;

    static SparseState zero_state(int n_qubits) {
        if (n_qubits < 1 || n_qubits > 63)
            throw std::invalid_argument("sparse state supports 1..63 qubits");
        SparseState s;
        s.n_qubits = n_qubits;
        s.amplitudes[0] = 1.0;
        return s;
    }

    double norm() const {
        double s = 0.0;
        for (const auto& [_, a] : amplitudes) s += std::norm(a);
        return std::sqrt(s);
    }

    void prune(double eps = 1e-14) {
        std::erase_if(amplitudes, [eps](const auto& kv) { return std::abs(kv.second) < eps; });
    }
};

inline void apply(SparseState& state, const GateOp& gate) {
    const auto check = [&](int q, const char* what) {
        if (q < 0 || q >= state.n_qubits)
            throw std::out_of_range(std::string(what) + ": qubit index out of range");
    };
    switch (gate.kind) {
    case GateOp::Kind::RotY: {
        check(gate.qubit, "RotY");
        const double c = std::cos(gate.angle / 2.0);
        const double s = std::sin(gate.angle / 2.0);
        const std::uint64_t mask = std::uint64_t{1} << gate.qubit;
        std::map<std::uint64_t, Amplitude> next;
        for (const auto& [b, a] : state.amplitudes) {
            const std::uint64_t b0 = b & ~mask;
            if (next.count(b0) || next.count(b0 | mask)) continue; // pair already handled
            const auto it0 = state.amplitudes.find(b0);
            const auto it1 = state.amplitudes.find(b0 | mask);
            const Amplitude a0 = it0 != state.amplitudes.end() ? it0->second : Amplitude{};
            const Amplitude a1 = it1 != state.amplitudes.end() ? it1->second : Amplitude{};
            next[b0] = c * a0 - s * a1;
            next[b0 | mask] = s * a0 + c * a1;
        }
        state.amplitudes = std::move(next);
        state.prune();
        break;
    }
    case GateOp::Kind::CNot: {
        check(gate.qubit, "CNot target");
        check(gate.control, "CNot control");
        const std::uint64_t cmask = std::uint64_t{1} << gate.control;
        const std::uint64_t tmask = std::uint64_t{1} << gate.qubit;
        std::map<std::uint64_t, Amplitude> next;
        for (const auto& [b, a] : state.amplitudes) next[b & cmask ? b ^ tmask : b] = a;
        state.amplitudes = std::move(next);
        break;
    }
    case GateOp::Kind::BasisChangeToX:
        // Would blow up the support; X-basis results come from
        // measure_all_x_once instead.
        throw std::invalid_argument("sparse state does not support dense basis changes");
    }
}

inline void apply(SparseState& state, const std::vector<GateOp>& gates) {
    for (const auto& g : gates) apply(state, g);
}

inline void apply(SparseState& state, std::vector<GateOp>&& gates) {
    apply(state, static_cast<const std::vector<GateOp>&>(gates));
}

inline void apply_pauli(SparseState& state, int axis, int qubit) {
    const std::uint64_t mask = std::uint64_t{1} << qubit;
    std::map<std::uint64_t, Amplitude> next;
    switch (axis) {
    case 0:
        for (const auto& [b, a] : state.amplitudes) next[b ^ mask] = a;
        state.amplitudes = std::move(next);
        break;
    case 1:
        for (const auto& [b, a] : state.amplitudes)
            next[b ^ mask] = (b & mask ? Amplitude{0.0, -1.0} : Amplitude{0.0, 1.0}) * a;
        state.amplitudes = std::move(next);
        break;
    case 2:
        for (auto& [b, a] : state.amplitudes)
            if (b & mask) a = -a;
        break;
    default:
        throw std::invalid_argument("Pauli axis must be 0 (X), 1 (Y) or 2 (Z)");
    }
}

inline double expectation(const SparseState& state, const PauliSum& h) {
    if (h.n_qubits != state.n_qubits)
        throw std::invalid_argument("expectation: qubit count mismatch");
    double energy = 0.0;
    for (const auto& term : h.terms) {
        const std::uint64_t xm = term.x_mask();
        const std::uint64_t zm = term.z_mask();
        double value = 0.0;
        for (const auto& [b, a] : state.amplitudes) {
            const auto it = state.amplitudes.find(b ^ xm);
            if (it == state.amplitudes.end()) continue;
            const double sign = std::popcount(b & zm) & 1 ? -1.0 : 1.0;
            value += sign * std::real(std::conj(it->second) * a);
        }
        energy += term.coefficient * value;
    }
    return energy;
}

inline std::vector<double> polarizations(const SparseState& state) {
    std::vector<double> pol(state.n_qubits, 0.0);
    for (const auto& [b, a] : state.amplitudes) {
        const double p = std::norm(a);
        for (int q = 0; q < state.n_qubits; ++q) pol[q] += (b >> q & 1 ? 1.0 : -1.0) * p;
    }
    return pol;
}

namespace detail {

/// Draws one computational-basis outcome from the support.
inline std::uint64_t draw_outcome_sparse(const SparseState& state, ShotRng& rng) {
    std::vector<std::pair<std::uint64_t, double>> cum;
    cum.reserve(state.amplitudes.size());
    double acc = 0.0;
    for (const auto& [b, a] : state.amplitudes) {
        acc += std::norm(a);
        cum.emplace_back(b, acc);
    }
    const double u = rng.uniform() * acc;
    for (const auto& [b, c] : cum)
        if (u < c) return b;
    return cum.back().first;
}

/// Measures every qubit in the X basis, one qubit at a time, collapsing the
/// state as it goes. Each step quotients the measured qubit out, so the
/// support never grows. Consumes one uniform per qubit.
inline std::uint64_t measure_all_x_once(SparseState state, ShotRng& rng) {
    std::uint64_t outcome = 0;
    for (int q = 0; q < state.n_qubits; ++q) {
        const std::uint64_t mask = std::uint64_t{1} << q;
        std::map<std::uint64_t, Amplitude> plus, minus;
        double p_plus = 0.0, p_minus = 0.0;
        for (const auto& [b, a] : state.amplitudes) {
            if (b & mask) continue;
            const auto it = state.amplitudes.find(b | mask);
            const Amplitude a1 = it != state.amplitudes.end() ? it->second : Amplitude{};
            const Amplitude ap = (a + a1) * (1.0 / std::numbers::sqrt2);
            const Amplitude am = (a - a1) * (1.0 / std::numbers::sqrt2);
            if (std::abs(ap) > 1e-14) {
                plus[b] = ap;
                p_plus += std::norm(ap);
            }
            if (std::abs(am) > 1e-14) {
                minus[b] = am;
                p_minus += std::norm(am);
            }
            // keys with the bit set and no cleared partner pair with amplitude 0
        }
        for (const auto& [b, a] : state.amplitudes) {
            if (!(b & mask) || state.amplitudes.count(b & ~mask)) continue;
            const Amplitude ap = a * (1.0 / std::numbers::sqrt2);
            plus[b & ~mask] = ap;
            minus[b & ~mask] = -ap;
            p_plus += std::norm(ap);
            p_minus += std::norm(ap);
        }
        const double total = p_plus + p_minus;
        const bool got_minus = rng.uniform() * total >= p_plus;
        // X eigenvalue +1 reads as bit 0 after the basis change
        if (got_minus) outcome |= mask;
        state.amplitudes = got_minus ? std::move(minus) : std::move(plus);
        const double renorm = std::sqrt(got_minus ? p_minus : p_plus);
        for (auto& [_, a] : state.amplitudes) a /= renorm;
    }
    return outcome;
}

} // namespace detail

/// Per-shot sampler for sparse programs, mirroring sample_program(): with
/// gate noise each shot runs its own Pauli trajectory. X-basis outcomes come
/// from sequential single-qubit X measurements.
inline ShotCounts sample_sparse_program(int n_qubits, const std::vector<GateOp>& gates,
                                        std::uint64_t shots, MeasurementBasis basis,
                                        std::uint64_t seed, const NoiseModel* noise = nullptr) {
    if (shots == 0) throw std::invalid_argument("sample_sparse_program: shots must be >= 1");
    if (noise) noise->validate();
    const bool gate_noise = noise && noise->has_gate_noise();
    const double p_readout = noise ? noise->p_readout : 0.0;

    ShotCounts result;
    result.n_qubits = n_qubits;
    result.shots = shots;

    SparseState ideal = SparseState::zero_state(n_qubits);
    if (!gate_noise) apply(ideal, gates);

    for (std::uint64_t shot = 0; shot < shots; ++shot) {
        detail::ShotRng rng(detail::mix_seed(seed, shot));
        SparseState traj = ideal;
        if (gate_noise) {
            traj = SparseState::zero_state(n_qubits);
            for (const auto& g : gates) {
                apply(traj, g);
                if (g.kind == GateOp::Kind::CNot) {
                    if (noise->p2 > 0.0 && rng.uniform() < noise->p2) {
                        apply_pauli(traj, rng.pauli_axis(), g.control);
                        apply_pauli(traj, rng.pauli_axis(), g.qubit);
                    }
                } else {
                    if (noise->p1 > 0.0 && rng.uniform() < noise->p1)
                        apply_pauli(traj, rng.pauli_axis(), g.qubit);
                }
            }
        }
        std::uint64_t outcome = basis == MeasurementBasis::Computational
                                    ? detail::draw_outcome_sparse(traj, rng)
                                    : detail::measure_all_x_once(std::move(traj), rng);
        outcome = detail::apply_readout_flips(outcome, n_qubits, p_readout, rng);
        ++result.counts[outcome];
    }
    return result;
}

} // namespace qcavqe
