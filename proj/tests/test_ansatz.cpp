#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "qcavqe/ansatz.hpp"

using namespace qcavqe;

namespace {

StateVector prepare(const AnsatzSpec& spec, const std::vector<double>& theta) {
    auto s = StateVector::zero_state(spec.n_qubits);
    apply(s, bind_parameters(spec, theta));
    return s;
}

// Test-only <Y> on one qubit; Y does not occur in PauliSum terms.
double expect_y(const StateVector& s, int qubit) {
    const std::uint64_t mask = std::uint64_t{1} << qubit;
    std::complex<double> acc{};
    for (std::uint64_t i = 0; i < s.dim(); ++i) {
        if (i & mask) continue;
        acc += std::conj(s.amplitudes[i]) * Amplitude{0.0, -1.0} * s.amplitudes[i | mask];
        acc += std::conj(s.amplitudes[i | mask]) * Amplitude{0.0, 1.0} * s.amplitudes[i];
    }
    return acc.real();
}

} // namespace

TEST_CASE("wire ansatz structure") {
    const auto three = wire_ansatz(3, {0});
    CHECK(three.n_params == 1);
    REQUIRE(three.gates.size() == 3);
    CHECK(three.gates[0].kind == AnsatzSpec::Slot::Kind::RotSlot);
    CHECK(three.gates[1].kind == AnsatzSpec::Slot::Kind::CNot);
    CHECK(three.gates[1].control == 0);
    CHECK(three.gates[2].control == 1);

    const auto one = wire_ansatz(1, {0});
    CHECK(one.gates.size() == 1);
    CHECK(one.n_params == 1);

    const auto fifteen = wire_ansatz(15, {0, 5, 10});
    CHECK(fifteen.n_qubits == 15);
    CHECK(fifteen.n_params == 3);
    int cnots = 0;
    for (const auto& g : fifteen.gates) cnots += g.kind == AnsatzSpec::Slot::Kind::CNot;
    CHECK(cnots == 14);
    // each extra rotation sits right after the CNot that entangles its qubit
    for (size_t i = 0; i < fifteen.gates.size(); ++i) {
        const auto& g = fifteen.gates[i];
        if (g.kind == AnsatzSpec::Slot::Kind::RotSlot && g.qubit > 0) {
            const auto& prev = fifteen.gates[i - 1];
            CHECK(prev.kind == AnsatzSpec::Slot::Kind::CNot);
            CHECK(prev.qubit == g.qubit);
        }
    }
}

TEST_CASE("wire ansatz rejects slots that cannot move the state") {
    CHECK_THROWS_AS(wire_ansatz(3, {1}), std::invalid_argument);
    CHECK_THROWS_AS(wire_ansatz(3, {}), std::invalid_argument);
    CHECK_THROWS_AS(wire_ansatz(3, {0, 3}), std::invalid_argument);
    CHECK_THROWS_AS(wire_ansatz(3, {0, 0}), std::invalid_argument);
}

TEST_CASE("spread_rotations picks even placements including qubit 0") {
    CHECK(spread_rotations(15, 3) == std::vector<int>{0, 5, 10});
    CHECK(spread_rotations(30, 3) == std::vector<int>{0, 10, 20});
    CHECK(spread_rotations(3, 1) == std::vector<int>{0});
    CHECK(spread_rotations(8, 8) == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7});
}

TEST_CASE("inverter ansatz shape and bindings") {
    const auto spec = inverter_ansatz();
    CHECK(spec.n_qubits == 6);
    CHECK(spec.n_params == 2);
    REQUIRE(spec.gates.size() == 7);

    const auto zero = prepare(spec, {0.0, 0.0});
    CHECK(std::abs(zero.amplitudes[0]) == Catch::Approx(1.0));

    // chain copies the 1; the final rotation flips qubit 5 back to 0
    const auto flipped = prepare(spec, {std::numbers::pi, std::numbers::pi});
    CHECK(std::abs(flipped.amplitudes[0b011111]) == Catch::Approx(1.0));
}

TEST_CASE("majority ansatz shapes") {
    const auto m6 = majority6_ansatz();
    CHECK(m6.n_qubits == 6);
    CHECK(m6.n_params == 6);
    CHECK(m6.gates.size() == 11);

    const auto zero = prepare(m6, std::vector<double>(6, 0.0));
    CHECK(std::abs(zero.amplitudes[0]) == Catch::Approx(1.0));

    const auto m2 = majority2_ansatz();
    CHECK(m2.n_params == 2);
    CHECK(m2.gates.size() == 3);
}

TEST_CASE("bind validates parameter count and is pure") {
    const auto spec = wire_ansatz(3, {0});
    CHECK_THROWS_AS(bind_parameters(spec, {}), std::invalid_argument);
    CHECK_THROWS_AS(bind_parameters(spec, {1.0, 2.0}), std::invalid_argument);

    const auto a = bind_parameters(spec, {std::numbers::pi / 2.0});
    const auto b = bind_parameters(spec, {std::numbers::pi / 2.0});
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].kind == b[i].kind);
        CHECK(a[i].qubit == b[i].qubit);
        CHECK(a[i].angle == b[i].angle);
    }
    CHECK(a[0].kind == GateOp::Kind::RotY);
    CHECK(a[0].angle == Catch::Approx(std::numbers::pi / 2.0));
}

TEST_CASE("single-cell ansatz stays in the xz plane") {
    const auto spec = wire_ansatz(1, {0});
    for (double theta : {-2.0, -0.5, 0.1, 1.3, 3.0}) {
        const auto s = prepare(spec, {theta});
        CHECK(std::abs(expect_y(s, 0)) < 1e-12);
    }
}

TEST_CASE("wire ansatz states are real") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(-std::numbers::pi, std::numbers::pi);
    const auto spec = wire_ansatz(6, {0, 2, 4});
    for (int trial = 0; trial < 5; ++trial) {
        const auto s = prepare(spec, {unif(rng), unif(rng), unif(rng)});
        for (const auto& a : s.amplitudes) CHECK(std::abs(a.imag()) < 1e-12);
    }
}

TEST_CASE("one-parameter wire states are GHZ-like") {
    const auto spec = wire_ansatz(5, {0});
    for (double theta : {0.4, 1.2, 2.8}) {
        const auto s = prepare(spec, {theta});
        const double p0 = std::norm(s.amplitudes[0]);
        const double p1 = std::norm(s.amplitudes[s.dim() - 1]);
        CHECK(p0 == Catch::Approx(std::cos(theta / 2) * std::cos(theta / 2)).margin(1e-12));
        CHECK(p1 == Catch::Approx(std::sin(theta / 2) * std::sin(theta / 2)).margin(1e-12));
        CHECK(p0 + p1 == Catch::Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("ansatz JSON carries the gate program") {
    const auto j = ansatz_to_json(wire_ansatz(3, {0, 1}));
    CHECK(j["n_qubits"] == 3);
    CHECK(j["n_params"] == 2);
    CHECK(j["gates"].size() == 4);
    CHECK(j["gates"][0]["type"] == "ry");
    CHECK(j["gates"][1]["type"] == "cx");
}
