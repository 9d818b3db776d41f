#pragma once

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace qcavqe {

/// Thrown when a layout, config, or argument violates a precondition.
class LayoutError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Physical constants of the cell model. Energies in meV, lengths in nm.
/// coulomb_scale is q^2/(4*pi*eps0) expressed in meV*nm.
struct PhysicalConstants {
    double coulomb_scale = 1439.964; // meV*nm
    double gamma = 50.0;             // meV, tunneling energy
    double a = 1.0;                  // nm, dot-square side; cell pitch is 2a
    double kT_room = 25.85;          // meV at 300 K

    void validate() const {
        if (coulomb_scale <= 0.0 || gamma <= 0.0 || a <= 0.0)
            throw LayoutError("PhysicalConstants: coulomb_scale, gamma, a must be positive");
    }
};

/// Cell-center coordinates in integer units of a. Adjacent cell pitch is 2a.
struct GridPosition {
    int x = 0;
    int y = 0;

    friend bool operator==(const GridPosition&, const GridPosition&) = default;
};

enum class CellRole { Device, Driver };

struct Cell {
    std::string id;
    GridPosition position;
    CellRole role = CellRole::Device;
    // Present iff role == Driver; fixed input polarization in [-1, 1].
    std::optional<double> driver_polarization;

    void validate() const {
        if (role == CellRole::Driver) {
            if (!driver_polarization)
                throw LayoutError("driver cell '" + id + "' has no polarization");
            if (std::abs(*driver_polarization) > 1.0)
                throw LayoutError("driver polarization out of [-1,1] on cell '" + id + "'");
        } else if (driver_polarization) {
            throw LayoutError("device cell '" + id + "' must not carry a polarization");
        }
    }
};

/// Cells on the grid. Device cells are qubits, numbered 0..N-1 in order of
/// appearance; drivers are classical inputs.
struct CircuitLayout {
    std::string name;
    std::vector<Cell> cells;

    int device_count() const {
        int n = 0;
        for (const auto& c : cells)
            if (c.role == CellRole::Device) ++n;
        return n;
    }

    int driver_count() const { return static_cast<int>(cells.size()) - device_count(); }

    /// Device cells in qubit order (qubit k <-> k-th device cell).
    std::vector<const Cell*> devices() const {
        std::vector<const Cell*> out;
        for (const auto& c : cells)
            if (c.role == CellRole::Device) out.push_back(&c);
        return out;
    }

    std::vector<const Cell*> drivers() const {
        std::vector<const Cell*> out;
        for (const auto& c : cells)
            if (c.role == CellRole::Driver) out.push_back(&c);
        return out;
    }

    void validate() const {
        for (size_t i = 0; i < cells.size(); ++i) {
            cells[i].validate();
            for (size_t j = i + 1; j < cells.size(); ++j)
                if (cells[i].position == cells[j].position)
                    throw LayoutError("cells '" + cells[i].id + "' and '" + cells[j].id +
                                      "' share position");
        }
    }

    /// Returns a copy with every driver polarization negated.
    CircuitLayout with_flipped_drivers() const {
        CircuitLayout out = *this;
        for (auto& c : out.cells)
            if (c.driver_polarization) c.driver_polarization = -*c.driver_polarization;
        return out;
    }

    /// Returns a copy with all driver polarizations set from `values`
    /// (one per driver, in driver order).
    CircuitLayout with_driver_polarizations(const std::vector<double>& values) const {
        CircuitLayout out = *this;
        size_t k = 0;
        for (auto& c : out.cells) {
            if (c.role != CellRole::Driver) continue;
            if (k >= values.size()) throw LayoutError("too few driver polarizations");
            if (std::abs(values[k]) > 1.0) throw LayoutError("driver polarization out of [-1,1]");
            c.driver_polarization = values[k++];
        }
        if (k != values.size()) throw LayoutError("too many driver polarizations");
        return out;
    }
};

/// Hamiltonian coefficients and knobs. e_k / e_k_diag are the ZZ couplings
/// used for nearest / diagonal pairs; driver_bias_scale selects how driver
/// bias terms are scaled (1.0 = plain coupling substitution, 0.5 = the
/// single-cell bias convention).
struct ModelConfig {
    PhysicalConstants constants{};
    double e_k = -294.3;      // meV, nearest-neighbor ZZ coefficient
    double e_k_diag = 85.7;   // meV, diagonal ZZ coefficient
    double driver_bias_scale = 1.0;
    bool include_driver_diagonals = true;
};

enum class NeighborClass { Nearest, Diagonal, None };

/// Classifies a cell pair by center offset: (+-2, 0)/(0, +-2) -> Nearest,
/// (+-2, +-2) -> Diagonal, anything else -> None.
inline NeighborClass classify_pair(const GridPosition& p1, const GridPosition& p2) {
    if (p1 == p2) throw LayoutError("classify_pair: identical positions");
    const int dx = std::abs(p1.x - p2.x);
    const int dy = std::abs(p1.y - p2.y);
    if ((dx == 2 && dy == 0) || (dx == 0 && dy == 2)) return NeighborClass::Nearest;
    if (dx == 2 && dy == 2) return NeighborClass::Diagonal;
    return NeighborClass::None;
}

namespace detail {
inline Cell device(std::string id, int x, int y) {
    return Cell{std::move(id), {x, y}, CellRole::Device, std::nullopt};
}
inline Cell driver(std::string id, int x, int y, double p) {
    return Cell{std::move(id), {x, y}, CellRole::Driver, p};
}
} // namespace detail

/// Driver at the origin, N device cells in a row at pitch 2a.
inline CircuitLayout wire_layout(int n_cells, double p_drv = 1.0) {
    if (n_cells < 1) throw LayoutError("wire layout needs at least one device cell");
    CircuitLayout layout;
    layout.name = "wire" + std::to_string(n_cells);
    layout.cells.push_back(detail::driver("D", 0, 0, p_drv));
    for (int k = 0; k < n_cells; ++k)
        layout.cells.push_back(detail::device("c" + std::to_string(k), 2 * k + 2, 0));
    layout.validate();
    return layout;
}

/// Six-cell inverter: the driver bit fans out over c1/c2 into c3/c4, whose
/// diagonal coupling to c5 flips the output bit.
inline CircuitLayout inverter_layout(double p_drv = 1.0) {
    CircuitLayout layout;
    layout.name = "inverter";
    layout.cells = {
        detail::driver("D", 0, 0, p_drv), detail::device("c0", 2, 0),
        detail::device("c1", 2, 2),       detail::device("c2", 2, -2),
        detail::device("c3", 4, 2),       detail::device("c4", 4, -2),
        detail::device("c5", 6, 0),
    };
    layout.validate();
    return layout;
}

/// Six-cell majority gate: drivers A/B/C feed c0/c1/c2, c3 decides,
/// c4/c5 copy the output.
inline CircuitLayout majority6_layout(double p_a = 1.0, double p_b = 1.0, double p_c = 1.0) {
    CircuitLayout layout;
    layout.name = "majority6";
    layout.cells = {
        detail::driver("A", 0, 4, p_a),  detail::driver("B", -4, 0, p_b),
        detail::driver("C", 0, -4, p_c), detail::device("c0", 0, 2),
        detail::device("c1", -2, 0),     detail::device("c2", 0, -2),
        detail::device("c3", 0, 0),      detail::device("c4", 2, 0),
        detail::device("c5", 4, 0),
    };
    layout.validate();
    return layout;
}

/// Two-cell majority gate: the three drivers act directly on the decision
/// cell c0; c1 is the output copy.
inline CircuitLayout majority2_layout(double p_a = 1.0, double p_b = 1.0, double p_c = 1.0) {
    CircuitLayout layout;
    layout.name = "majority2";
    layout.cells = {
        detail::driver("A", 0, 2, p_a),  detail::driver("B", -2, 0, p_b),
        detail::driver("C", 0, -2, p_c), detail::device("c0", 0, 0),
        detail::device("c1", 2, 0),
    };
    layout.validate();
    return layout;
}

/// Builds a canonical layout by name: "wire" (params = {N}), "inverter",
/// "majority6", "majority2".
inline CircuitLayout builtin_layout(const std::string& name, const std::vector<int>& params = {}) {
    if (name == "wire") {
        if (params.size() != 1 || params[0] < 1)
            throw LayoutError("wire layout needs one parameter N >= 1");
        return wire_layout(params[0]);
    }
    if (name == "inverter") return inverter_layout();
    if (name == "majority6") return majority6_layout();
    if (name == "majority2") return majority2_layout();
    throw LayoutError("unknown builtin layout '" + name + "'");
}

// ---------------------------------------------------------------------------
// Layout file format: {"name", "cells":[{"id","x","y","role","p"?}]},
// x/y in units of a. Unknown fields are rejected.

inline CircuitLayout layout_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw LayoutError("layout JSON must be an object");
    for (const auto& [key, _] : j.items())
        if (key != "name" && key != "cells")
            throw LayoutError("layout JSON has unknown field '" + key + "'");
    if (!j.contains("name") || !j["name"].is_string())
        throw LayoutError("layout JSON needs a string 'name'");
    if (!j.contains("cells") || !j["cells"].is_array())
        throw LayoutError("layout JSON needs a 'cells' array");

    CircuitLayout layout;
    layout.name = j["name"].get<std::string>();
    for (const auto& jc : j["cells"]) {
        if (!jc.is_object()) throw LayoutError("cell entry must be an object");
        for (const auto& [key, _] : jc.items())
            if (key != "id" && key != "x" && key != "y" && key != "role" && key != "p")
                throw LayoutError("cell entry has unknown field '" + key + "'");
        for (const char* req : {"id", "x", "y", "role"})
            if (!jc.contains(req))
                throw LayoutError(std::string("cell entry missing field '") + req + "'");
        if (!jc["x"].is_number_integer() || !jc["y"].is_number_integer())
            throw LayoutError("cell coordinates must be integers (units of a)");

        Cell cell;
        cell.id = jc["id"].get<std::string>();
        cell.position = {jc["x"].get<int>(), jc["y"].get<int>()};
        const std::string role = jc["role"].get<std::string>();
        if (role == "device") {
            cell.role = CellRole::Device;
            if (jc.contains("p")) throw LayoutError("device cell '" + cell.id + "' must not set 'p'");
        } else if (role == "driver") {
            cell.role = CellRole::Driver;
            if (!jc.contains("p") || !jc["p"].is_number())
                throw LayoutError("driver cell '" + cell.id + "' needs numeric 'p'");
            cell.driver_polarization = jc["p"].get<double>();
        } else {
            throw LayoutError("cell role must be 'device' or 'driver', got '" + role + "'");
        }
        layout.cells.push_back(std::move(cell));
    }
    layout.validate();
    return layout;
}

inline nlohmann::json layout_to_json(const CircuitLayout& layout) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : layout.cells) {
        nlohmann::json jc{{"id", c.id},
                          {"x", c.position.x},
                          {"y", c.position.y},
                          {"role", c.role == CellRole::Driver ? "driver" : "device"}};
        if (c.driver_polarization) jc["p"] = *c.driver_polarization;
        cells.push_back(std::move(jc));
    }
    return nlohmann::json{{"name", layout.name}, {"cells", std::move(cells)}};
}

inline CircuitLayout load_layout(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LayoutError("cannot open layout file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw LayoutError("layout file '" + path + "' is not valid JSON: " + e.what());
    }
    return layout_from_json(j);
}

} // namespace qcavqe
