#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qcavqe/foundation.hpp"

namespace qcavqe {

enum class PauliAxis : char { X = 'X', Z = 'Z' };

/// One weighted Pauli string; factors sorted by qubit, at most one per qubit.
struct PauliTerm {
    double coefficient = 0.0; // meV
    std::vector<std::pair<int, PauliAxis>> factors;

    bool is_pure(PauliAxis axis) const {
        return std::all_of(factors.begin(), factors.end(),
                           [axis](const auto& f) { return f.second == axis; });
    }

    /// Bitmasks over qubits carrying an X / Z factor.
    std::uint64_t x_mask() const { return mask(PauliAxis::X); }
    std::uint64_t z_mask() const { return mask(PauliAxis::Z); }

private:
    std::uint64_t mask(PauliAxis axis) const {
        std::uint64_t m = 0;
        for (const auto& [q, ax] : factors)
            if (ax == axis) m |= std::uint64_t{1} << q;
        return m;
    }
};

/// A real-weighted sum of Pauli strings over n_qubits; Hermitian by
/// construction. Duplicate strings are merged on add().
struct PauliSum {
    int n_qubits = 0;
    std::vector<PauliTerm> terms;

    void add(double coefficient, std::vector<std::pair<int, PauliAxis>> factors) {
        std::sort(factors.begin(), factors.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (size_t i = 0; i < factors.size(); ++i) {
            const int q = factors[i].first;
            if (q < 0 || q >= n_qubits) throw LayoutError("Pauli factor qubit out of range");
            if (i > 0 && factors[i - 1].first == q)
                throw LayoutError("duplicate qubit in Pauli term");
        }
        for (auto& t : terms) {
            if (t.factors == factors) {
                t.coefficient += coefficient;
                return;
            }
        }
        terms.push_back({coefficient, std::move(factors)});
    }

    double max_abs_coefficient() const {
        double m = 0.0;
        for (const auto& t : terms) m = std::max(m, std::abs(t.coefficient));
        return m;
    }
};

/// Builds the circuit Hamiltonian: a -gamma*X term per device cell, ZZ
/// couplings between device pairs by neighbor class, and driver terms folded
/// into single-qubit Z biases with the Z eigenvalue convention P = -<Z>
/// (driver Z value is -P_drv).
inline PauliSum build_hamiltonian(const CircuitLayout& layout, const ModelConfig& config = {}) {
    layout.validate();
    config.constants.validate();
    const auto devices = layout.devices();
    if (devices.empty()) throw LayoutError("build_hamiltonian: layout has no device cells");

    PauliSum h;
    h.n_qubits = static_cast<int>(devices.size());

    for (int n = 0; n < h.n_qubits; ++n)
        h.add(-config.constants.gamma, {{n, PauliAxis::X}});

    for (int m = 0; m < h.n_qubits; ++m) {
        for (int n = m + 1; n < h.n_qubits; ++n) {
            switch (classify_pair(devices[m]->position, devices[n]->position)) {
            case NeighborClass::Nearest:
                h.add(config.e_k, {{m, PauliAxis::Z}, {n, PauliAxis::Z}});
                break;
            case NeighborClass::Diagonal:
                h.add(config.e_k_diag, {{m, PauliAxis::Z}, {n, PauliAxis::Z}});
                break;
            case NeighborClass::None:
                break;
            }
        }
    }

    for (const Cell* drv : layout.drivers()) {
        const double z_d = -drv->driver_polarization.value();
        if (z_d == 0.0) continue;
        for (int n = 0; n < h.n_qubits; ++n) {
            double coupling = 0.0;
            switch (classify_pair(drv->position, devices[n]->position)) {
            case NeighborClass::Nearest:
                coupling = config.e_k;
                break;
            case NeighborClass::Diagonal:
                if (config.include_driver_diagonals) coupling = config.e_k_diag;
                break;
            case NeighborClass::None:
                break;
            }
            if (coupling != 0.0)
                h.add(config.driver_bias_scale * coupling * z_d, {{n, PauliAxis::Z}});
        }
    }

    std::erase_if(h.terms, [](const PauliTerm& t) { return t.coefficient == 0.0; });
    return h;
}

/// Splits a Hamiltonian into the Z-diagonal group (computational-basis
/// measurement) and the single-qubit X group (all-qubit X-basis measurement).
inline std::pair<PauliSum, PauliSum> group_by_basis(const PauliSum& h) {
    PauliSum z_group{h.n_qubits, {}};
    PauliSum x_group{h.n_qubits, {}};
    for (const auto& t : h.terms) {
        if (t.is_pure(PauliAxis::Z))
            z_group.terms.push_back(t);
        else if (t.is_pure(PauliAxis::X))
            x_group.terms.push_back(t);
        else
            throw std::invalid_argument("group_by_basis: mixed-axis Pauli term unsupported");
    }
    return {std::move(z_group), std::move(x_group)};
}

inline nlohmann::json pauli_sum_to_json(const PauliSum& h) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : h.terms) {
        nlohmann::json factors = nlohmann::json::array();
        for (const auto& [q, axis] : t.factors)
            factors.push_back({q, std::string(1, static_cast<char>(axis))});
        terms.push_back({{"coeff_meV", t.coefficient}, {"paulis", std::move(factors)}});
    }
    return terms;
}

inline PauliSum pauli_sum_from_json(const nlohmann::json& j, int n_qubits) {
    PauliSum h{n_qubits, {}};
    for (const auto& jt : j) {
        std::vector<std::pair<int, PauliAxis>> factors;
        for (const auto& jf : jt.at("paulis")) {
            const std::string axis = jf.at(1).get<std::string>();
            if (axis != "X" && axis != "Z")
                throw std::invalid_argument("pauli_sum_from_json: axis must be X or Z");
            factors.emplace_back(jf.at(0).get<int>(),
                                 axis == "X" ? PauliAxis::X : PauliAxis::Z);
        }
        h.add(jt.at("coeff_meV").get<double>(), std::move(factors));
    }
    return h;
}

} // namespace qcavqe
