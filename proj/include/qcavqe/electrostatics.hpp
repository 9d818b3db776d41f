#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "qcavqe/foundation.hpp"

namespace qcavqe {

/// Mobile-charge placement of one cell: four dots on the corners of a square
/// of side a, two electrons on one diagonal. State 1 occupies dots 1 and 3
/// (P = +1), state 0 occupies dots 2 and 4 (P = -1). Charges in units of q;
/// the optional neutralizing background of +q/2 per dot is added at
/// evaluation time.
struct CellChargeConfiguration {
    std::array<std::array<double, 2>, 4> dot_positions{}; // nm
    std::array<double, 4> dot_charges{};                  // mobile charge only
    int state = 0;
};

/// Builds the charge configuration of a cell in `state`, centered at
/// (cx, cy) in nm. Dot numbering runs counterclockwise from the top-right
/// corner, so dots 1 and 3 form one diagonal.
inline CellChargeConfiguration cell_charge_configuration(int state, double a, double cx = 0.0,
                                                         double cy = 0.0) {
    if (state != 0 && state != 1) throw LayoutError("cell state must be 0 or 1");
    if (a <= 0.0) throw LayoutError("cell side a must be positive");
    CellChargeConfiguration cfg;
    cfg.state = state;
    const double h = 0.5 * a;
    cfg.dot_positions = {{{cx + h, cy + h}, {cx + h, cy - h}, {cx - h, cy - h}, {cx - h, cy + h}}};
    // dots 1..4 map to indices 0..3; electrons of -q each on one diagonal
    if (state == 1) {
        cfg.dot_charges = {-1.0, 0.0, -1.0, 0.0};
    } else {
        cfg.dot_charges = {0.0, -1.0, 0.0, -1.0};
    }
    return cfg;
}

/// Coulomb energy between two cells' charges, in meV. `offset` shifts cell B
/// by offset*a relative to A's stored coordinates. With `neutralized`, every
/// dot carries an extra +q/2 so each cell is net neutral.
inline double pairwise_interaction(const CellChargeConfiguration& cell_a,
                                   const CellChargeConfiguration& cell_b, GridPosition offset,
                                   bool neutralized, const PhysicalConstants& constants = {}) {
    constants.validate();
    const double background = neutralized ? 0.5 : 0.0;
    const double ox = offset.x * constants.a;
    const double oy = offset.y * constants.a;
    double energy = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double qi = cell_a.dot_charges[i] + background;
        if (qi == 0.0) continue;
        for (int j = 0; j < 4; ++j) {
            const double qj = cell_b.dot_charges[j] + background;
            if (qj == 0.0) continue;
            const double dx = cell_b.dot_positions[j][0] + ox - cell_a.dot_positions[i][0];
            const double dy = cell_b.dot_positions[j][1] + oy - cell_a.dot_positions[i][1];
            const double r = std::hypot(dx, dy);
            if (r <= 0.0) throw std::domain_error("pairwise_interaction: coincident charges");
            energy += constants.coulomb_scale * qi * qj / r;
        }
    }
    return energy;
}

/// The four interaction energies of a cell pair; e_ba is cell A in state a,
/// cell B in state b.
struct InteractionEnergies {
    double e00 = 0.0;
    double e01 = 0.0;
    double e10 = 0.0;
    double e11 = 0.0;
};

inline InteractionEnergies interaction_table(GridPosition offset, bool neutralized,
                                             const PhysicalConstants& constants = {}) {
    const auto c0 = cell_charge_configuration(0, constants.a);
    const auto c1 = cell_charge_configuration(1, constants.a);
    InteractionEnergies t;
    t.e00 = pairwise_interaction(c0, c0, offset, neutralized, constants);
    t.e01 = pairwise_interaction(c1, c0, offset, neutralized, constants); // A=1, B=0
    t.e10 = pairwise_interaction(c0, c1, offset, neutralized, constants); // A=0, B=1
    t.e11 = pairwise_interaction(c1, c1, offset, neutralized, constants);
    return t;
}

/// Point-charge kink energies (anti-aligned minus aligned), computed from the
/// charge model. Nearest uses offset (2,0); diagonal uses (2,2) with the
/// aligned-state average as reference.
struct OracleKinkEnergies {
    double nearest = 0.0;  // e01 - e11 at offset (2,0)
    double diagonal = 0.0; // e01 - (e00+e11)/2 at offset (2,2); negative: anti-aligned favored
};

inline OracleKinkEnergies oracle_kink_energies(const PhysicalConstants& constants = {},
                                               bool neutralized = true) {
    const auto near = interaction_table({2, 0}, neutralized, constants);
    const auto diag = interaction_table({2, 2}, neutralized, constants);
    return {near.e01 - near.e11, diag.e01 - 0.5 * (diag.e00 + diag.e11)};
}

/// The ZZ coefficients the Hamiltonian actually uses (model constants, not
/// the oracle values; see oracle_kink_energies for the cross-check).
struct KinkEnergies {
    double e_k = 0.0;      // nearest, meV
    double e_k_diag = 0.0; // diagonal, meV
};

inline KinkEnergies kink_energies(const ModelConfig& config) {
    return {config.e_k, config.e_k_diag};
}

/// Bias energy a fully specified driver imposes on a nearest-neighbor cell:
/// Delta = (coulomb_scale * P_drv / a) * (-1/3 - (2*sqrt(2)-sqrt(5)-1)/sqrt(10)).
inline double driver_delta(double p_drv, const PhysicalConstants& constants = {}) {
    constants.validate();
    if (std::abs(p_drv) > 1.0) throw std::domain_error("driver_delta: |p_drv| > 1");
    const double factor =
        -1.0 / 3.0 - (2.0 * std::sqrt(2.0) - std::sqrt(5.0) - 1.0) / std::sqrt(10.0);
    return constants.coulomb_scale * p_drv / constants.a * factor;
}

} // namespace qcavqe
