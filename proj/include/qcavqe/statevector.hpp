#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcavqe/pauli.hpp"

namespace qcavqe {

using Amplitude = std::complex<double>;

/// Dense 2^N statevector. Qubit 0 is the least significant bit of the basis
/// index; bitstring rendering puts qubit 0 rightmost.
struct StateVector {
    int n_qubits = 0;
    std::vector<Amplitude> amplitudes;

    static constexpr int kDefaultMaxQubits = 26;

    static StateVector zero_state(int n_qubits, bool allow_large = false) {
        if (n_qubits < 1) throw std::invalid_argument("state needs at least one qubit");
        if (n_qubits > kDefaultMaxQubits && !allow_large)
            throw std::invalid_argument("state size over default cap of " +
                                        std::to_string(kDefaultMaxQubits) +
                                        " qubits; pass allow_large to override");
        if (n_qubits > 30) throw std::invalid_argument("dense state over 30 qubits unsupported");
        StateVector s;
        s.n_qubits = n_qubits;
        s.amplitudes.assign(std::uint64_t{1} << n_qubits, Amplitude{0.0, 0.0});
        s.amplitudes[0] = 1.0;
        return s;
    }

    std::uint64_t dim() const { return amplitudes.size(); }

    double norm() const {
        double s = 0.0;
        for (const auto& a : amplitudes) s += std::norm(a);
        return std::sqrt(s);
    }
};

struct GateOp {
    enum class Kind { RotY, CNot, BasisChangeToX };
    Kind kind = Kind::RotY;
    int qubit = 0;   // target (RotY, BasisChangeToX, CNot)
    int control = -1; // CNot only
    double angle = 0.0; // RotY only

    static GateOp rot_y(int qubit, double angle) { return {Kind::RotY, qubit, -1, angle}; }
    static GateOp cnot(int control, int target) { return {Kind::CNot, target, control, 0.0}; }
    static GateOp basis_change_to_x(int qubit) { return {Kind::BasisChangeToX, qubit, -1, 0.0}; }
};

namespace detail {

inline void check_qubit(const StateVector& state, int q, const char* what) {
    if (q < 0 || q >= state.n_qubits)
        throw std::out_of_range(std::string(what) + ": qubit index out of range");
}

/// In-place action of a real 2x2 matrix [[m00,m01],[m10,m11]] on `qubit`.
inline void apply_real_1q(StateVector& state, int qubit, double m00, double m01, double m10,
                          double m11) {
    const std::uint64_t mask = std::uint64_t{1} << qubit;
    const std::uint64_t lo = mask - 1;
    const std::uint64_t hi = ~lo;
    const std::uint64_t half = state.dim() >> 1;
    for (std::uint64_t i = 0; i < half; ++i) {
        const std::uint64_t i0 = ((i & hi) << 1) | (i & lo);
        const std::uint64_t i1 = i0 | mask;
        const Amplitude a0 = state.amplitudes[i0];
        const Amplitude a1 = state.amplitudes[i1];
        state.amplitudes[i0] = m00 * a0 + m01 * a1;
        state.amplitudes[i1] = m10 * a0 + m11 * a1;
    }
}

} // namespace detail

/// Applies one gate in place. RotY(theta) = [[cos t/2, -sin t/2],
/// [sin t/2, cos t/2]]; CNot flips the target where the control is 1;
/// BasisChangeToX is the Hadamard.
inline void apply(StateVector& state, const GateOp& gate) {
    switch (gate.kind) {
    case GateOp::Kind::RotY: {
        detail::check_qubit(state, gate.qubit, "RotY");
        const double c = std::cos(gate.angle / 2.0);
        const double s = std::sin(gate.angle / 2.0);
        detail::apply_real_1q(state, gate.qubit, c, -s, s, c);
        break;
    }
    case GateOp::Kind::BasisChangeToX: {
        detail::check_qubit(state, gate.qubit, "BasisChangeToX");
        const double h = (1.0 / std::numbers::sqrt2);
        detail::apply_real_1q(state, gate.qubit, h, h, h, -h);
        break;
    }
    case GateOp::Kind::CNot: {
        detail::check_qubit(state, gate.qubit, "CNot target");
        detail::check_qubit(state, gate.control, "CNot control");
        if (gate.qubit == gate.control)
            throw std::invalid_argument("CNot control equals target");
        const std::uint64_t cmask = std::uint64_t{1} << gate.control;
        const std::uint64_t tmask = std::uint64_t{1} << gate.qubit;
        for (std::uint64_t i = 0; i < state.dim(); ++i)
            if ((i & cmask) && !(i & tmask))
                std::swap(state.amplitudes[i], state.amplitudes[i | tmask]);
        break;
    }
    }
}

inline void apply(StateVector& state, const std::vector<GateOp>& gates) {
    for (const auto& g : gates) apply(state, g);
}

// Keeps rvalue gate lists away from std::apply during overload resolution.
inline void apply(StateVector& state, std::vector<GateOp>&& gates) {
    apply(state, static_cast<const std::vector<GateOp>&>(gates));
}

/// Applies a bare Pauli (noise insertion). axis: 0 = X, 1 = Y, 2 = Z.
inline void apply_pauli(StateVector& state, int axis, int qubit) {
    detail::check_qubit(state, qubit, "Pauli");
    const std::uint64_t mask = std::uint64_t{1} << qubit;
    switch (axis) {
    case 0:
        for (std::uint64_t i = 0; i < state.dim(); ++i)
            if (!(i & mask)) std::swap(state.amplitudes[i], state.amplitudes[i | mask]);
        break;
    case 1:
        for (std::uint64_t i = 0; i < state.dim(); ++i) {
            if (i & mask) continue;
            const Amplitude a0 = state.amplitudes[i];
            const Amplitude a1 = state.amplitudes[i | mask];
            state.amplitudes[i] = Amplitude{0.0, -1.0} * a1;
            state.amplitudes[i | mask] = Amplitude{0.0, 1.0} * a0;
        }
        break;
    case 2:
        for (std::uint64_t i = 0; i < state.dim(); ++i)
            if (i & mask) state.amplitudes[i] = -state.amplitudes[i];
        break;
    default:
        throw std::invalid_argument("Pauli axis must be 0 (X), 1 (Y) or 2 (Z)");
    }
}

/// Exact <state|h|state> in meV. Terms are X/Z strings: the string maps
/// |i> -> (-1)^{popcount(i & zmask)} |i ^ xmask>.
inline double expectation(const StateVector& state, const PauliSum& h) {
    if (h.n_qubits != state.n_qubits)
        throw std::invalid_argument("expectation: qubit count mismatch");
    double energy = 0.0;
    for (const auto& term : h.terms) {
        const std::uint64_t xm = term.x_mask();
        const std::uint64_t zm = term.z_mask();
        double value = 0.0;
        for (std::uint64_t i = 0; i < state.dim(); ++i) {
            const Amplitude& a = state.amplitudes[i];
            if (a == Amplitude{}) continue;
            const double sign = std::popcount(i & zm) & 1 ? -1.0 : 1.0;
            value += sign * std::real(std::conj(state.amplitudes[i ^ xm]) * a);
        }
        energy += term.coefficient * value;
    }
    return energy;
}

/// Stochastic noise channel: a uniformly random Pauli after each gate with
/// the per-gate probability (two-qubit gates twirl both qubits), plus an
/// independent readout bit flip.
struct NoiseModel {
    double p1 = 0.001;       // per 1-qubit gate
    double p2 = 0.02;        // per 2-qubit gate
    double p_readout = 0.02; // per measured bit
    std::uint64_t seed = 0;

    void validate() const {
        for (double p : {p1, p2, p_readout})
            if (p < 0.0 || p > 1.0)
                throw std::invalid_argument("noise probabilities must be in [0,1]");
    }

    bool has_gate_noise() const { return p1 > 0.0 || p2 > 0.0; }
    bool is_trivial() const { return !has_gate_noise() && p_readout == 0.0; }
};

struct ShotCounts {
    int n_qubits = 0;
    std::uint64_t shots = 0;
    std::map<std::uint64_t, std::uint64_t> counts;

    /// Mean of (-1)^{popcount(outcome & mask)} over shots.
    double parity_mean(std::uint64_t mask) const {
        double s = 0.0;
        for (const auto& [outcome, count] : counts)
            s += (std::popcount(outcome & mask) & 1 ? -1.0 : 1.0) * static_cast<double>(count);
        return s / static_cast<double>(shots);
    }

    /// Fraction-weighted bit value of `qubit` mapped to P in [-1, 1]
    /// (bit 1 <-> P = +1).
    double bit_polarization(int qubit) const { return -parity_mean(std::uint64_t{1} << qubit); }

    static std::string render(std::uint64_t outcome, int n_qubits) {
        std::string s(n_qubits, '0');
        for (int q = 0; q < n_qubits; ++q)
            if (outcome >> q & 1) s[n_qubits - 1 - q] = '1'; // qubit 0 rightmost
        return s;
    }
};

enum class MeasurementBasis { Computational, AllX };

namespace detail {

/// Mixes a base seed and a shot index into one RNG stream. Per-shot streams
/// make sampling independent of evaluation order and thread count.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t shot) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (shot + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Counter-based generator for per-shot streams; construction is free, which
/// matters when every shot gets its own stream.
struct ShotRng {
    std::uint64_t state;

    explicit ShotRng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    int pauli_axis() { return static_cast<int>(next() % 3); }
};

inline std::uint64_t draw_outcome(const std::vector<double>& cumulative, ShotRng& rng) {
    const double u = rng.uniform() * cumulative.back();
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    auto idx = static_cast<std::uint64_t>(it - cumulative.begin());
    if (idx >= cumulative.size()) idx = cumulative.size() - 1;
    return idx;
}

inline std::uint64_t apply_readout_flips(std::uint64_t outcome, int n_qubits, double p_readout,
                                         ShotRng& rng) {
    if (p_readout <= 0.0) return outcome;
    for (int q = 0; q < n_qubits; ++q)
        if (rng.uniform() < p_readout) outcome ^= std::uint64_t{1} << q;
    return outcome;
}

/// Applies one gate followed by its stochastic Pauli insertion(s).
inline void apply_noisy(StateVector& state, const GateOp& gate, const NoiseModel& noise,
                        ShotRng& rng) {
    apply(state, gate);
    if (gate.kind == GateOp::Kind::CNot) {
        if (noise.p2 > 0.0 && rng.uniform() < noise.p2) {
            apply_pauli(state, rng.pauli_axis(), gate.control);
            apply_pauli(state, rng.pauli_axis(), gate.qubit);
        }
    } else {
        if (noise.p1 > 0.0 && rng.uniform() < noise.p1) apply_pauli(state, rng.pauli_axis(), gate.qubit);
    }
}

inline std::vector<double> cumulative_probabilities(const StateVector& state) {
    std::vector<double> cum(state.dim());
    double acc = 0.0;
    for (std::uint64_t i = 0; i < state.dim(); ++i) {
        acc += std::norm(state.amplitudes[i]);
        cum[i] = acc;
    }
    return cum;
}

} // namespace detail

/// Samples `shots` projective measurements of a prepared state. AllX measures
/// every qubit in the X basis (a basis change precedes the measurement; with
/// gate noise present those basis-change gates run as noisy trajectories).
/// Deterministic given (state, shots, basis, seed, noise).
inline ShotCounts sample(const StateVector& state, std::uint64_t shots, MeasurementBasis basis,
                         std::uint64_t seed, const NoiseModel* noise = nullptr) {
    if (shots == 0) throw std::invalid_argument("sample: shots must be >= 1");
    if (noise) noise->validate();
    const double p_readout = noise ? noise->p_readout : 0.0;

    ShotCounts result;
    result.n_qubits = state.n_qubits;
    result.shots = shots;

    const bool noisy_basis_change =
        noise && noise->has_gate_noise() && basis == MeasurementBasis::AllX;

    if (!noisy_basis_change) {
        StateVector measured = state;
        if (basis == MeasurementBasis::AllX)
            for (int q = 0; q < state.n_qubits; ++q)
                apply(measured, GateOp::basis_change_to_x(q));
        const auto cum = detail::cumulative_probabilities(measured);
        for (std::uint64_t shot = 0; shot < shots; ++shot) {
            detail::ShotRng rng(detail::mix_seed(seed, shot));
            std::uint64_t outcome = detail::draw_outcome(cum, rng);
            outcome = detail::apply_readout_flips(outcome, state.n_qubits, p_readout, rng);
            ++result.counts[outcome];
        }
        return result;
    }

    for (std::uint64_t shot = 0; shot < shots; ++shot) {
        detail::ShotRng rng(detail::mix_seed(seed, shot));
        StateVector traj = state;
        for (int q = 0; q < state.n_qubits; ++q)
            detail::apply_noisy(traj, GateOp::basis_change_to_x(q), *noise, rng);
        const auto cum = detail::cumulative_probabilities(traj);
        std::uint64_t outcome = detail::draw_outcome(cum, rng);
        outcome = detail::apply_readout_flips(outcome, state.n_qubits, p_readout, rng);
        ++result.counts[outcome];
    }
    return result;
}

/// Runs a gate program from |0...0> and samples it. With gate noise, every
/// shot executes its own stochastic-Pauli trajectory; with zero noise this
/// reproduces sample() on the ideal state bit for bit at equal seed.
inline ShotCounts sample_program(int n_qubits, const std::vector<GateOp>& gates,
                                 std::uint64_t shots, MeasurementBasis basis, std::uint64_t seed,
                                 const NoiseModel* noise = nullptr) {
    if (shots == 0) throw std::invalid_argument("sample_program: shots must be >= 1");
    if (noise) noise->validate();

    if (!noise || !noise->has_gate_noise()) {
        StateVector state = StateVector::zero_state(n_qubits);
        apply(state, gates);
        return sample(state, shots, basis, seed, noise);
    }

    ShotCounts result;
    result.n_qubits = n_qubits;
    result.shots = shots;
    for (std::uint64_t shot = 0; shot < shots; ++shot) {
        detail::ShotRng rng(detail::mix_seed(seed, shot));
        StateVector traj = StateVector::zero_state(n_qubits);
        for (const auto& g : gates) detail::apply_noisy(traj, g, *noise, rng);
        if (basis == MeasurementBasis::AllX)
            for (int q = 0; q < n_qubits; ++q)
                detail::apply_noisy(traj, GateOp::basis_change_to_x(q), *noise, rng);
        const auto cum = detail::cumulative_probabilities(traj);
        std::uint64_t outcome = detail::draw_outcome(cum, rng);
        outcome = detail::apply_readout_flips(outcome, n_qubits, noise->p_readout, rng);
        ++result.counts[outcome];
    }
    return result;
}

} // namespace qcavqe
