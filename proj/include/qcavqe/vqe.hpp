#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qcavqe/ansatz.hpp"
#include "qcavqe/exact.hpp"
#include "qcavqe/optimize.hpp"
#include "qcavqe/pauli.hpp"
#include "qcavqe/sparse_state.hpp"
#include "qcavqe/statevector.hpp"

namespace qcavqe {

enum class EstimatorMode { ExactExpectation, Sampled, NoisySampled };

inline std::string to_string(EstimatorMode mode) {
    switch (mode) {
    case EstimatorMode::ExactExpectation: return "exact";
    case EstimatorMode::Sampled: return "sampled";
    case EstimatorMode::NoisySampled: return "noisy";
    }
    return "?";
}

/// How energies are estimated: exact expectation values, shot sampling, or
/// shot sampling with stochastic gate/readout noise.
struct EstimatorConfig {
    EstimatorMode mode = EstimatorMode::ExactExpectation;
    std::uint64_t shots = 4096;
    std::uint64_t seed = 0;
    std::optional<NoiseModel> noise; // NoisySampled without an explicit model uses defaults

    bool sampling() const { return mode != EstimatorMode::ExactExpectation; }

    NoiseModel effective_noise() const {
        NoiseModel n = noise.value_or(NoiseModel{});
        n.validate();
        return n;
    }

    void validate() const {
        if (sampling() && shots < 1)
            throw std::invalid_argument("estimator: shots must be >= 1 when sampling");
        if (noise) noise->validate();
    }
};

struct EnergyEstimate {
    double energy = 0.0;    // meV
    double std_error = 0.0; // meV; 0 for exact expectation
};

struct VqeResult {
    std::vector<double> theta_star;
    double energy = 0.0;
    std::vector<std::pair<int, double>> energy_trace; // (iteration, best energy)
    int iterations = 0;
    std::vector<double> polarizations;
    std::uint64_t shots_used = 0;
    bool converged = false;
    bool unphysical_polarization = false; // |P| > 1 (readout-bias artifacts)
    std::vector<int> restart_starts;      // iteration index where each restart began
    nlohmann::json config_echo;
};

namespace detail {

// Above this width the dense engine is replaced by the amplitude-map state;
// the RotY/CNot family keeps the support at 2^n_params entries.
constexpr int kSparsePathQubits = 20;

inline bool use_sparse_path(int n_qubits) { return n_qubits > kSparsePathQubits; }

inline std::uint64_t stream_seed(const EstimatorConfig& cfg, std::uint64_t tag) {
    const std::uint64_t extra = cfg.noise ? cfg.noise->seed : 0;
    return mix_seed(cfg.seed + extra, tag);
}

inline ShotCounts sample_bound_program(int n_qubits, const std::vector<GateOp>& gates,
                                       std::uint64_t shots, MeasurementBasis basis,
                                       std::uint64_t seed, const NoiseModel* noise) {
    if (use_sparse_path(n_qubits))
        return sample_sparse_program(n_qubits, gates, shots, basis, seed, noise);
    return sample_program(n_qubits, gates, shots, basis, seed, noise);
}

} // namespace detail

/// Energy of the bound ansatz state under `h`. Sampling modes measure the
/// Z-diagonal group in the computational basis and the X group after an
/// all-qubit basis change, `shots` each; the standard error combines
/// per-term binomial variances assuming independence.
inline EnergyEstimate estimate_energy(const AnsatzSpec& spec, const std::vector<double>& theta,
                                      const PauliSum& h, const EstimatorConfig& cfg) {
    cfg.validate();
    if (spec.n_qubits != h.n_qubits)
        throw std::invalid_argument("estimate_energy: ansatz/Hamiltonian qubit mismatch");
    const auto gates = bind_parameters(spec, theta);

    if (cfg.mode == EstimatorMode::ExactExpectation) {
        if (detail::use_sparse_path(spec.n_qubits)) {
            SparseState state = SparseState::zero_state(spec.n_qubits);
            apply(state, gates);
            return {expectation(state, h), 0.0};
        }
        StateVector state = StateVector::zero_state(spec.n_qubits);
        apply(state, gates);
        return {expectation(state, h), 0.0};
    }

    const auto [z_group, x_group] = group_by_basis(h);
    const NoiseModel noise_model =
        cfg.mode == EstimatorMode::NoisySampled ? cfg.effective_noise() : NoiseModel{0, 0, 0, 0};
    const NoiseModel* noise = cfg.mode == EstimatorMode::NoisySampled ? &noise_model : nullptr;

    double energy = 0.0;
    double variance = 0.0;
    const auto shots = static_cast<double>(cfg.shots);

    const auto accumulate = [&](const PauliSum& group, const ShotCounts& counts) {
        for (const auto& term : group.terms) {
            const std::uint64_t mask = term.is_pure(PauliAxis::Z) ? term.z_mask() : term.x_mask();
            const double mean = counts.parity_mean(mask);
            energy += term.coefficient * mean;
            variance += term.coefficient * term.coefficient *
                        std::max(0.0, 1.0 - mean * mean) / shots;
        }
    };

    if (!z_group.terms.empty()) {
        const auto counts =
            detail::sample_bound_program(spec.n_qubits, gates, cfg.shots,
                                         MeasurementBasis::Computational,
                                         detail::stream_seed(cfg, 1), noise);
        accumulate(z_group, counts);
    }
    if (!x_group.terms.empty()) {
        const auto counts =
            detail::sample_bound_program(spec.n_qubits, gates, cfg.shots, MeasurementBasis::AllX,
                                         detail::stream_seed(cfg, 2), noise);
        accumulate(x_group, counts);
    }
    return {energy, std::sqrt(variance)};
}

/// Per-cell polarizations of the bound ansatz state: P_k = -<Z_k> exactly,
/// or the signed bit fraction from a computational-basis sample.
inline std::vector<double> read_polarizations(const AnsatzSpec& spec,
                                              const std::vector<double>& theta_star,
                                              const EstimatorConfig& cfg) {
    cfg.validate();
    const auto gates = bind_parameters(spec, theta_star);

    if (cfg.mode == EstimatorMode::ExactExpectation) {
        if (detail::use_sparse_path(spec.n_qubits)) {
            SparseState state = SparseState::zero_state(spec.n_qubits);
            apply(state, gates);
            return polarizations(state);
        }
        StateVector state = StateVector::zero_state(spec.n_qubits);
        apply(state, gates);
        return detail::polarizations_from_state(state);
    }

    const NoiseModel noise_model =
        cfg.mode == EstimatorMode::NoisySampled ? cfg.effective_noise() : NoiseModel{0, 0, 0, 0};
    const NoiseModel* noise = cfg.mode == EstimatorMode::NoisySampled ? &noise_model : nullptr;
    const auto counts = detail::sample_bound_program(spec.n_qubits, gates, cfg.shots,
                                                     MeasurementBasis::Computational,
                                                     detail::stream_seed(cfg, 3), noise);
    std::vector<double> pol(spec.n_qubits);
    for (int q = 0; q < spec.n_qubits; ++q) pol[q] = counts.bit_polarization(q);
    return pol;
}

/// VQE-level knobs on top of OptimizerConfig: multi-start count and the
/// default all-pi/2 starting vector.
struct VqeOptimizerConfig : OptimizerConfig {
    int restarts = 1;
};

/// Full VQE run: derivative-free minimization of the estimated energy over
/// theta, then polarization readout at the optimum. Restarts (when > 1) are
/// seeded perturbed starts; the best final energy wins. All randomness flows
/// from est.seed, so reruns are reproducible.
inline VqeResult run_vqe(const CircuitLayout& layout, const ModelConfig& model,
                         const AnsatzSpec& spec, const EstimatorConfig& est,
                         const VqeOptimizerConfig& opt = {}) {
    est.validate();
    opt.validate();
    const PauliSum h = build_hamiltonian(layout, model);
    if (spec.n_qubits != h.n_qubits)
        throw std::invalid_argument("run_vqe: ansatz does not match device-cell count");
    if (opt.restarts < 1) throw std::invalid_argument("run_vqe: restarts must be >= 1");

    std::vector<double> base_theta = opt.initial_theta;
    if (base_theta.empty()) base_theta.assign(spec.n_params, std::numbers::pi / 2.0);
    if (static_cast<int>(base_theta.size()) != spec.n_params)
        throw std::invalid_argument("run_vqe: initial_theta length mismatch");

    VqeResult result;
    std::uint64_t shots_used = 0;
    std::uint64_t circuits_per_eval = 0;
    if (est.sampling()) {
        const auto [zg, xg] = group_by_basis(h);
        circuits_per_eval = (zg.terms.empty() ? 0 : 1) + (xg.terms.empty() ? 0 : 1);
    }
    int eval_offset = 0;
    bool have_best = false;
    double best_energy = 0.0;

    for (int restart = 0; restart < opt.restarts; ++restart) {
        std::vector<double> start = base_theta;
        if (restart > 0) {
            std::mt19937_64 rng(detail::mix_seed(est.seed, 0xA5A5u + restart));
            std::uniform_real_distribution<double> unif(0.15, std::numbers::pi - 0.15);
            for (auto& t : start) t = unif(rng);
        }

        int eval_index = 0;
        EstimatorConfig eval_cfg = est;
        const Objective objective = [&](const std::vector<double>& theta) {
            eval_cfg.seed = detail::mix_seed(est.seed, 0x10000u * (restart + 1) + eval_index);
            ++eval_index;
            const auto estimate = estimate_energy(spec, theta, h, eval_cfg);
            shots_used += est.shots * circuits_per_eval;
            return estimate.energy;
        };

        OptimizeResult run = minimize(objective, start, opt);

        result.restart_starts.push_back(eval_offset);
        for (const auto& [it, e] : run.trace)
            result.energy_trace.emplace_back(eval_offset + it, e);
        eval_offset += run.evaluations;

        if (!have_best || run.value < best_energy) {
            have_best = true;
            best_energy = run.value;
            result.theta_star = run.x;
            result.energy = run.value;
            result.converged = run.converged;
        }
    }
    result.iterations = eval_offset;

    EstimatorConfig readout_cfg = est;
    readout_cfg.seed = detail::mix_seed(est.seed, 0xFEED);
    result.polarizations = read_polarizations(spec, result.theta_star, readout_cfg);
    if (est.sampling()) shots_used += est.shots;
    result.shots_used = shots_used;
    for (double p : result.polarizations)
        if (std::abs(p) > 1.0) result.unphysical_polarization = true;

    result.config_echo = {
        {"layout", layout.name},
        {"mode", to_string(est.mode)},
        {"shots", est.shots},
        {"seed", est.seed},
        {"driver_bias_scale", model.driver_bias_scale},
        {"e_k", model.e_k},
        {"e_k_diag", model.e_k_diag},
        {"gamma", model.constants.gamma},
        {"optimizer", opt.method == OptimizerMethod::CobylaLike ? "cobyla-like" : "nelder-mead"},
        {"f_tol", opt.f_tol},
        {"max_iter", opt.max_iter},
        {"restarts", opt.restarts},
        {"ansatz", ansatz_to_json(spec)},
    };
    if (est.mode == EstimatorMode::NoisySampled) {
        const NoiseModel n = est.effective_noise();
        result.config_echo["noise"] = {
            {"p1", n.p1}, {"p2", n.p2}, {"p_readout", n.p_readout}, {"seed", n.seed}};
    }
    return result;
}

inline nlohmann::json vqe_result_to_json(const VqeResult& r) {
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& [it, e] : r.energy_trace) trace.push_back({it, e});
    return {
        {"theta_star", r.theta_star},
        {"energy_meV", r.energy},
        {"iterations", r.iterations},
        {"polarizations", r.polarizations},
        {"shots_used", r.shots_used},
        {"converged", r.converged},
        {"unphysical_polarization", r.unphysical_polarization},
        {"restart_starts", r.restart_starts},
        {"energy_trace", std::move(trace)},
        {"config", r.config_echo},
    };
}

} // namespace qcavqe
