#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcavqe/statevector.hpp"

namespace qcavqe {

/// A parametric gate program: rotation slots referencing parameter indices,
/// interleaved with a CNot chain connecting qubit k to k+1.
struct AnsatzSpec {
    struct Slot {
        enum class Kind { RotSlot, CNot };
        Kind kind = Kind::RotSlot;
        int qubit = 0;      // RotSlot target / CNot target
        int control = -1;   // CNot only
        int param_index = -1; // RotSlot only
    };

    int n_qubits = 0;
    int n_params = 0;
    std::vector<Slot> gates;

    void validate() const {
        std::vector<bool> used(n_params, false);
        for (const auto& g : gates) {
            if (g.kind == Slot::Kind::RotSlot) {
                if (g.param_index < 0 || g.param_index >= n_params)
                    throw std::invalid_argument("ansatz: parameter index out of range");
                used[g.param_index] = true;
                if (g.qubit < 0 || g.qubit >= n_qubits)
                    throw std::invalid_argument("ansatz: rotation qubit out of range");
            } else {
                if (g.qubit != g.control + 1)
                    throw std::invalid_argument("ansatz: CNot must connect qubit k to k+1");
                if (g.control < 0 || g.qubit >= n_qubits)
                    throw std::invalid_argument("ansatz: CNot qubit out of range");
            }
        }
        if (!std::all_of(used.begin(), used.end(), [](bool b) { return b; }))
            throw std::invalid_argument("ansatz: unused parameter index");
    }
};

/// Chain ansatz for an n-cell wire. One rotation per entry of `ry_qubits`
/// (which must start with qubit 0), each placed right after the CNot that
/// first entangles its qubit; CNots connect k to k+1 down the chain.
inline AnsatzSpec wire_ansatz(int n, const std::vector<int>& ry_qubits) {
    if (n < 1) throw std::invalid_argument("wire_ansatz: need n >= 1");
    if (ry_qubits.empty() || ry_qubits.front() != 0)
        throw std::invalid_argument("wire_ansatz: ry_qubits must start with qubit 0");
    if (!std::is_sorted(ry_qubits.begin(), ry_qubits.end()) ||
        std::adjacent_find(ry_qubits.begin(), ry_qubits.end()) != ry_qubits.end())
        throw std::invalid_argument("wire_ansatz: ry_qubits must be sorted and unique");
    if (ry_qubits.back() >= n) throw std::invalid_argument("wire_ansatz: rotation qubit >= n");

    AnsatzSpec spec;
    spec.n_qubits = n;
    spec.n_params = static_cast<int>(ry_qubits.size());
    spec.gates.push_back({AnsatzSpec::Slot::Kind::RotSlot, 0, -1, 0});
    int next_param = 1;
    for (int k = 0; k + 1 < n; ++k) {
        spec.gates.push_back({AnsatzSpec::Slot::Kind::CNot, k + 1, k, -1});
        if (next_param < spec.n_params && ry_qubits[next_param] == k + 1) {
            spec.gates.push_back({AnsatzSpec::Slot::Kind::RotSlot, k + 1, -1, next_param});
            ++next_param;
        }
    }
    spec.validate();
    return spec;
}

/// Evenly spaced rotation qubits for an n-cell wire with k parameters,
/// always including qubit 0.
inline std::vector<int> spread_rotations(int n, int k) {
    if (k < 1 || k > n) throw std::invalid_argument("spread_rotations: need 1 <= k <= n");
    std::vector<int> qubits;
    for (int j = 0; j < k; ++j) qubits.push_back(j * n / k);
    qubits.erase(std::unique(qubits.begin(), qubits.end()), qubits.end());
    return qubits;
}

/// Two-parameter inverter ansatz: a rotation on qubit 0, the copy chain,
/// and a final rotation on qubit 5 that lets the output bit flip.
inline AnsatzSpec inverter_ansatz() {
    AnsatzSpec spec;
    spec.n_qubits = 6;
    spec.n_params = 2;
    spec.gates.push_back({AnsatzSpec::Slot::Kind::RotSlot, 0, -1, 0});
    for (int k = 0; k < 5; ++k) spec.gates.push_back({AnsatzSpec::Slot::Kind::CNot, k + 1, k, -1});
    spec.gates.push_back({AnsatzSpec::Slot::Kind::RotSlot, 5, -1, 1});
    spec.validate();
    return spec;
}

/// Full six-parameter ansatz for the six-cell majority gate: one rotation
/// per qubit, then the CNot ladder.
inline AnsatzSpec majority6_ansatz() {
    AnsatzSpec spec;
    spec.n_qubits = 6;
    spec.n_params = 6;
    for (int k = 0; k < 6; ++k) spec.gates.push_back({AnsatzSpec::Slot::Kind::RotSlot, k, -1, k});
    for (int k = 0; k < 5; ++k) spec.gates.push_back({AnsatzSpec::Slot::Kind::CNot, k + 1, k, -1});
    spec.validate();
    return spec;
}

/// Compact two-cell majority ansatz: rotation, one CNot, rotation.
inline AnsatzSpec majority2_ansatz() {
    AnsatzSpec spec;
    spec.n_qubits = 2;
    spec.n_params = 2;
    spec.gates.push_back({AnsatzSpec::Slot::Kind::RotSlot, 0, -1, 0});
    spec.gates.push_back({AnsatzSpec::Slot::Kind::CNot, 1, 0, -1});
    spec.gates.push_back({AnsatzSpec::Slot::Kind::RotSlot, 1, -1, 1});
    spec.validate();
    return spec;
}

/// Binds parameter values to the rotation slots; order preserved.
inline std::vector<GateOp> bind_parameters(const AnsatzSpec& spec, const std::vector<double>& theta) {
    if (static_cast<int>(theta.size()) != spec.n_params)
        throw std::invalid_argument("bind: expected " + std::to_string(spec.n_params) +
                                    " parameters, got " + std::to_string(theta.size()));
    std::vector<GateOp> gates;
    gates.reserve(spec.gates.size());
    for (const auto& g : spec.gates) {
        if (g.kind == AnsatzSpec::Slot::Kind::RotSlot)
            gates.push_back(GateOp::rot_y(g.qubit, theta[g.param_index]));
        else
            gates.push_back(GateOp::cnot(g.control, g.qubit));
    }
    return gates;
}

inline nlohmann::json ansatz_to_json(const AnsatzSpec& spec) {
    nlohmann::json gates = nlohmann::json::array();
    for (const auto& g : spec.gates) {
        if (g.kind == AnsatzSpec::Slot::Kind::RotSlot)
            gates.push_back({{"type", "ry"}, {"qubit", g.qubit}, {"param", g.param_index}});
        else
            gates.push_back({{"type", "cx"}, {"control", g.control}, {"target", g.qubit}});
    }
    return {{"n_qubits", spec.n_qubits}, {"n_params", spec.n_params}, {"gates", std::move(gates)}};
}

} // namespace qcavqe
