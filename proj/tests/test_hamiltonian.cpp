#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "qcavqe/pauli.hpp"

using namespace qcavqe;

namespace {

const PauliTerm* find_term(const PauliSum& h, std::vector<std::pair<int, PauliAxis>> factors) {
    std::sort(factors.begin(), factors.end());
    for (const auto& t : h.terms)
        if (t.factors == factors) return &t;
    return nullptr;
}

double coeff(const PauliSum& h, std::vector<std::pair<int, PauliAxis>> factors) {
    const auto* t = find_term(h, std::move(factors));
    return t ? t->coefficient : 0.0;
}

} // namespace

TEST_CASE("single driven cell Hamiltonian") {
    const auto h = build_hamiltonian(wire_layout(1, 1.0));
    REQUIRE(h.n_qubits == 1);
    REQUIRE(h.terms.size() == 2);
    CHECK(coeff(h, {{0, PauliAxis::X}}) == Catch::Approx(-50.0));
    CHECK(coeff(h, {{0, PauliAxis::Z}}) == Catch::Approx(294.3));
}

TEST_CASE("driver bias scale 0.5 reproduces the single-cell bias convention") {
    ModelConfig config;
    config.driver_bias_scale = 0.5;
    const auto h = build_hamiltonian(wire_layout(1, 1.0), config);
    CHECK(coeff(h, {{0, PauliAxis::Z}}) == Catch::Approx(147.15));
}

TEST_CASE("two free devices: transverse fields plus one coupling") {
    CircuitLayout layout;
    layout.name = "pair";
    layout.cells = {Cell{"c0", {0, 0}, CellRole::Device, {}},
                    Cell{"c1", {2, 0}, CellRole::Device, {}}};
    const auto h = build_hamiltonian(layout);
    REQUIRE(h.terms.size() == 3);
    CHECK(coeff(h, {{0, PauliAxis::X}}) == Catch::Approx(-50.0));
    CHECK(coeff(h, {{1, PauliAxis::X}}) == Catch::Approx(-50.0));
    CHECK(coeff(h, {{0, PauliAxis::Z}, {1, PauliAxis::Z}}) == Catch::Approx(-294.3));
}

TEST_CASE("majority2 bias terms fold three drivers per class") {
    const auto h = build_hamiltonian(majority2_layout(1.0, 1.0, 1.0));
    CHECK(coeff(h, {{0, PauliAxis::Z}}) == Catch::Approx(882.9));
    CHECK(coeff(h, {{1, PauliAxis::Z}}) == Catch::Approx(-171.4));
    CHECK(coeff(h, {{0, PauliAxis::Z}, {1, PauliAxis::Z}}) == Catch::Approx(-294.3));
}

TEST_CASE("driver diagonals can be switched off") {
    ModelConfig config;
    config.include_driver_diagonals = false;
    const auto h = build_hamiltonian(majority2_layout(1.0, 1.0, 1.0), config);
    CHECK(coeff(h, {{1, PauliAxis::Z}}) == 0.0);
}

TEST_CASE("wire term counts follow the build rule") {
    for (int n : {1, 3, 7}) {
        const auto h = build_hamiltonian(wire_layout(n, 1.0));
        int x_terms = 0, zz_terms = 0, z_terms = 0;
        for (const auto& t : h.terms) {
            if (t.is_pure(PauliAxis::X))
                ++x_terms;
            else if (t.factors.size() == 2)
                ++zz_terms;
            else
                ++z_terms;
        }
        CHECK(x_terms == n);
        CHECK(zz_terms == n - 1);
        CHECK(z_terms == 1);
    }
}

TEST_CASE("zero driver polarization removes all bias terms") {
    const auto h = build_hamiltonian(wire_layout(3, 0.0));
    for (const auto& t : h.terms)
        CHECK((t.factors.size() == 2 || t.is_pure(PauliAxis::X)));
}

TEST_CASE("driver order does not change the Hamiltonian") {
    const auto a = majority6_layout(1.0, -1.0, 1.0);
    CircuitLayout b = a;
    std::swap(b.cells[0], b.cells[2]); // reorder drivers only
    const auto ha = build_hamiltonian(a);
    const auto hb = build_hamiltonian(b);
    REQUIRE(ha.terms.size() == hb.terms.size());
    for (const auto& t : ha.terms)
        CHECK(coeff(hb, t.factors) == Catch::Approx(t.coefficient));
}

TEST_CASE("build rejects device-free layouts") {
    CircuitLayout layout;
    layout.name = "drivers-only";
    layout.cells = {Cell{"D", {0, 0}, CellRole::Driver, 1.0}};
    CHECK_THROWS_AS(build_hamiltonian(layout), LayoutError);
}

TEST_CASE("group_by_basis partitions and rejects mixed terms") {
    const auto h = build_hamiltonian(wire_layout(3, 1.0));
    const auto [z_group, x_group] = group_by_basis(h);
    CHECK(x_group.terms.size() == 3);
    CHECK(z_group.terms.size() == 3); // one bias + two couplings
    CHECK(z_group.terms.size() + x_group.terms.size() == h.terms.size());

    PauliSum empty{2, {}};
    const auto [ze, xe] = group_by_basis(empty);
    CHECK(ze.terms.empty());
    CHECK(xe.terms.empty());

    PauliSum mixed{2, {}};
    mixed.add(1.0, {{0, PauliAxis::X}, {1, PauliAxis::Z}});
    CHECK_THROWS_AS(group_by_basis(mixed), std::invalid_argument);
}

TEST_CASE("PauliSum merges duplicate strings and validates indices") {
    PauliSum h{2, {}};
    h.add(1.5, {{0, PauliAxis::Z}});
    h.add(2.0, {{0, PauliAxis::Z}});
    REQUIRE(h.terms.size() == 1);
    CHECK(h.terms[0].coefficient == Catch::Approx(3.5));
    CHECK_THROWS_AS(h.add(1.0, {{3, PauliAxis::X}}), LayoutError);
    CHECK_THROWS_AS(h.add(1.0, {{0, PauliAxis::X}, {0, PauliAxis::Z}}), LayoutError);
}

TEST_CASE("PauliSum JSON round trip") {
    const auto h = build_hamiltonian(majority2_layout(1.0, -1.0, 1.0));
    const auto j = pauli_sum_to_json(h);
    const auto back = pauli_sum_from_json(j, h.n_qubits);
    REQUIRE(back.terms.size() == h.terms.size());
    for (const auto& t : h.terms) {
        const auto* bt = find_term(back, t.factors);
        REQUIRE(bt != nullptr);
        CHECK(bt->coefficient == Catch::Approx(t.coefficient));
    }
}
