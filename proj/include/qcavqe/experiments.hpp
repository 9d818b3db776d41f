#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qcavqe/ansatz.hpp"
#include "qcavqe/exact.hpp"
#include "qcavqe/vqe.hpp"

namespace qcavqe {

/// One output row: a single cell of a single run.
struct ExperimentRecord {
    std::string run_id;
    std::string experiment;
    std::string layout;
    std::vector<double> driver_polarizations;
    std::string mode;
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
    int cell_index = 0;
    double polarization = 0.0;
    double energy_meV = 0.0;
    std::optional<double> oracle_energy_meV;
    int iterations = 0;
};

struct ExperimentResult {
    std::vector<ExperimentRecord> records;
    nlohmann::json meta = nlohmann::json::object();
    bool all_converged = true;
};

/// Shared experiment knobs.
struct ExperimentConfig {
    ModelConfig model{};
    EstimatorConfig estimator{};
    VqeOptimizerConfig optimizer{};
    bool with_oracle = false;
};

namespace detail {

inline std::string format_g6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

inline std::string join_g6(const std::vector<double>& values, char sep = ';') {
    std::string out;
    for (size_t i = 0; i < values.size(); ++i) {
        if (i) out.push_back(sep);
        out += format_g6(values[i]);
    }
    return out;
}

/// Runs `count` independent tasks over a small worker pool; tasks must not
/// share mutable state beyond their own output slot.
inline void run_parallel(int count, const std::function<void(int)>& task) {
    const unsigned workers =
        std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()),
                           static_cast<unsigned>(count));
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) task(i);
        });
    for (auto& t : pool) t.join();
}

/// Exact ground-state oracle sized to the problem: dense up to 10 qubits,
/// Lanczos beyond.
inline GroundStateResult oracle_ground_state(const PauliSum& h) {
    if (h.n_qubits <= 10) return ground_state_dense(h);
    return ground_state_lanczos(h);
}

inline std::vector<double> sweep_values(double lo, double hi, int steps) {
    if (steps < 2) return {lo};
    std::vector<double> v(steps);
    for (int i = 0; i < steps; ++i) v[i] = lo + (hi - lo) * i / (steps - 1);
    return v;
}

inline std::vector<double> driver_values(const CircuitLayout& layout) {
    std::vector<double> out;
    for (const Cell* d : layout.drivers()) out.push_back(d->driver_polarization.value());
    return out;
}

} // namespace detail

/// Root-mean-square error between a series and its reference.
inline double rmse(const std::vector<double>& series, const std::vector<double>& reference) {
    if (series.size() != reference.size() || series.empty())
        throw std::invalid_argument("rmse: size mismatch or empty");
    double s = 0.0;
    for (size_t i = 0; i < series.size(); ++i) {
        const double d = series[i] - reference[i];
        s += d * d;
    }
    return std::sqrt(s / series.size());
}

/// Least-squares line fit; r is the Pearson correlation.
struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r = 0.0;
};

inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("linear_fit: need matching series of length >= 2");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        syy += y[i] * y[i];
        sxy += x[i] * y[i];
    }
    const double cov = sxy - sx * sy / n;
    const double vx = sxx - sx * sx / n;
    const double vy = syy - sy * sy / n;
    LinearFit fit;
    fit.slope = cov / vx;
    fit.intercept = (sy - fit.slope * sx) / n;
    fit.r = vx > 0 && vy > 0 ? cov / std::sqrt(vx * vy) : 0.0;
    return fit;
}

/// Default reduced wire ansatz: one rotation up to seven cells, three
/// evenly spaced rotations beyond.
inline AnsatzSpec default_wire_ansatz(int n_cells) {
    const int k = n_cells <= 7 ? 1 : 3;
    return wire_ansatz(n_cells, spread_rotations(n_cells, std::min(k, n_cells)));
}

/// General-purpose ansatz for user layouts: one rotation per qubit plus the
/// CNot chain.
inline AnsatzSpec full_chain_ansatz(int n_qubits) {
    std::vector<int> all(n_qubits);
    for (int i = 0; i < n_qubits; ++i) all[i] = i;
    return n_qubits == 1 ? wire_ansatz(1, {0}) : wire_ansatz(n_qubits, all);
}

/// Runs VQE (and optionally the exact oracle) on one layout and expands the
/// result into per-cell records.
inline ExperimentResult run_layout_experiment(const CircuitLayout& layout,
                                              const AnsatzSpec& ansatz,
                                              const ExperimentConfig& cfg,
                                              const std::string& experiment,
                                              const std::string& run_id) {
    ExperimentResult out;
    EstimatorConfig est = cfg.estimator;
    const VqeResult vqe = run_vqe(layout, cfg.model, ansatz, est, cfg.optimizer);
    out.all_converged = vqe.converged;

    std::optional<double> oracle_energy;
    nlohmann::json oracle_meta;
    if (cfg.with_oracle) {
        const auto oracle = detail::oracle_ground_state(build_hamiltonian(layout, cfg.model));
        oracle_energy = oracle.energy;
        oracle_meta = {{"energy_meV", oracle.energy},
                       {"polarizations", oracle.polarizations},
                       {"degenerate", oracle.degenerate}};
    }

    for (int cell = 0; cell < static_cast<int>(vqe.polarizations.size()); ++cell) {
        ExperimentRecord rec;
        rec.run_id = run_id;
        rec.experiment = experiment;
        rec.layout = layout.name;
        rec.driver_polarizations = detail::driver_values(layout);
        rec.mode = to_string(est.mode);
        rec.shots = est.sampling() ? est.shots : 0;
        rec.seed = est.seed;
        rec.cell_index = cell;
        rec.polarization = vqe.polarizations[cell];
        rec.energy_meV = vqe.energy;
        rec.oracle_energy_meV = oracle_energy;
        rec.iterations = vqe.iterations;
        out.records.push_back(std::move(rec));
    }
    out.meta["runs"] = nlohmann::json::array();
    nlohmann::json run_meta = {{"run_id", run_id},
                               {"converged", vqe.converged},
                               {"vqe", vqe_result_to_json(vqe)}};
    if (!oracle_meta.is_null()) run_meta["oracle"] = oracle_meta;
    out.meta["runs"].push_back(std::move(run_meta));
    return out;
}

/// Sweeps the first driver's polarization over [lo, hi] on an N-cell wire,
/// running one VQE per point.
inline ExperimentResult wire_sweep(int n_cells, double lo, double hi, int steps,
                                   const ExperimentConfig& cfg,
                                   const std::string& experiment = "wire") {
    const auto values = detail::sweep_values(lo, hi, steps);
    const AnsatzSpec ansatz = default_wire_ansatz(n_cells);

    std::vector<ExperimentResult> partial(values.size());
    detail::run_parallel(static_cast<int>(values.size()), [&](int i) {
        const CircuitLayout layout = wire_layout(n_cells, values[i]);
        ExperimentConfig point_cfg = cfg;
        point_cfg.estimator.seed = detail::mix_seed(cfg.estimator.seed, 0x5EEDu + i);
        const std::string run_id = experiment + std::to_string(n_cells) + "_p" +
                                   detail::format_g6(values[i]) + "_" +
                                   to_string(cfg.estimator.mode) + "_s" +
                                   std::to_string(cfg.estimator.seed);
        partial[i] = run_layout_experiment(layout, ansatz, point_cfg, experiment, run_id);
        // records report the user-facing base seed, not the derived stream
        for (auto& r : partial[i].records) r.seed = cfg.estimator.seed;
    });

    ExperimentResult out;
    out.meta["runs"] = nlohmann::json::array();
    for (auto& p : partial) {
        out.all_converged = out.all_converged && p.all_converged;
        for (auto& r : p.records) out.records.push_back(std::move(r));
        for (auto& m : p.meta["runs"]) out.meta["runs"].push_back(std::move(m));
    }
    return out;
}

/// The cell-cell response study: polarization of every cell as a function of
/// driver polarization over [-1, 1].
inline ExperimentResult response_curve(int n_points, const ExperimentConfig& cfg,
                                       int n_cells = 1) {
    if (n_points < 2) throw std::invalid_argument("response_curve: need n_points >= 2");
    return wire_sweep(n_cells, -1.0, 1.0, n_points, cfg, "response");
}

enum class TruthTableVariant { Majority6, Majority2, Inverter };

inline std::string to_string(TruthTableVariant v) {
    switch (v) {
    case TruthTableVariant::Majority6: return "majority6";
    case TruthTableVariant::Majority2: return "majority2";
    case TruthTableVariant::Inverter: return "inverter";
    }
    return "?";
}

/// Enumerates all fully polarized inputs of a logic circuit, runs VQE (and
/// oracle) per row, and reports the output-cell sign verdict in the metadata.
inline ExperimentResult truth_table(TruthTableVariant variant, const ExperimentConfig& cfg) {
    const bool majority = variant != TruthTableVariant::Inverter;
    const int n_rows = majority ? 8 : 2;

    std::vector<ExperimentResult> partial(n_rows);
    std::vector<nlohmann::json> verdicts(n_rows);

    detail::run_parallel(n_rows, [&](int row) {
        CircuitLayout layout;
        AnsatzSpec ansatz;
        std::vector<double> inputs;
        ExperimentConfig row_cfg = cfg;
        double expected_sign = 0.0;
        int output_cell = 0;
        bool hard_case = false;

        if (variant == TruthTableVariant::Inverter) {
            const double p = row == 0 ? 1.0 : -1.0;
            inputs = {p};
            layout = inverter_layout(p);
            ansatz = inverter_ansatz();
            output_cell = 5;
            expected_sign = -p;
        } else {
            const double a = row & 4 ? 1.0 : -1.0;
            const double b = row & 2 ? 1.0 : -1.0;
            const double c = row & 1 ? 1.0 : -1.0;
            inputs = {a, b, c};
            expected_sign = a + b + c > 0 ? 1.0 : -1.0;
            hard_case = a == c && b == -a;
            if (variant == TruthTableVariant::Majority6) {
                layout = majority6_layout(a, b, c);
                ansatz = majority6_ansatz();
                output_cell = 5;
                if (row_cfg.optimizer.restarts < 3) row_cfg.optimizer.restarts = 3;
            } else {
                layout = majority2_layout(a, b, c);
                ansatz = majority2_ansatz();
                output_cell = 1;
            }
        }

        row_cfg.estimator.seed = detail::mix_seed(cfg.estimator.seed, 0xBEEFu + row);
        const std::string run_id = to_string(variant) + "_row" + std::to_string(row) + "_" +
                                   to_string(cfg.estimator.mode) + "_s" +
                                   std::to_string(cfg.estimator.seed);
        partial[row] =
            run_layout_experiment(layout, ansatz, row_cfg, to_string(variant), run_id);
        for (auto& r : partial[row].records) r.seed = cfg.estimator.seed;

        const double p_out = partial[row].records[output_cell].polarization;
        nlohmann::json verdict = {{"run_id", run_id},
                                  {"inputs", inputs},
                                  {"output_cell", output_cell},
                                  {"output_polarization", p_out},
                                  {"expected_sign", expected_sign},
                                  {"correct", p_out * expected_sign > 0.0},
                                  {"hard_case", hard_case}};
        if (cfg.with_oracle) {
            const auto& oracle = partial[row].meta["runs"][0]["oracle"];
            const double p_oracle = oracle["polarizations"][output_cell].get<double>();
            verdict["oracle_output_sign"] = p_oracle > 0 ? 1.0 : -1.0;
            verdict["matches_oracle_sign"] = p_out * p_oracle > 0.0;
        }
        verdicts[row] = std::move(verdict);
    });

    ExperimentResult out;
    out.meta["runs"] = nlohmann::json::array();
    out.meta["verdicts"] = nlohmann::json::array();
    for (int row = 0; row < n_rows; ++row) {
        out.all_converged = out.all_converged && partial[row].all_converged;
        for (auto& r : partial[row].records) out.records.push_back(std::move(r));
        for (auto& m : partial[row].meta["runs"]) out.meta["runs"].push_back(std::move(m));
        out.meta["verdicts"].push_back(std::move(verdicts[row]));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Shot-count accuracy study

struct ShotsStudyRow {
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
    double rmse = 0.0;
};

struct ShotsStudyResult {
    std::vector<ShotsStudyRow> rows;
    std::vector<std::pair<std::uint64_t, double>> mean_rmse; // per shot budget
    nlohmann::json meta = nlohmann::json::object();
};

/// Sweeps the three-cell wire at each shot budget over `repeats` seeds and
/// reports the polarization RMSE against the dense oracle, per (point, cell).
/// The default grid has an even point count: at exactly zero driver bias the
/// ground state is degenerate and the one-parameter landscape is flat, so
/// that point measures optimizer wander instead of shot noise.
inline ShotsStudyResult shots_study(const std::vector<std::uint64_t>& shot_list, int repeats,
                                    const ExperimentConfig& cfg, int n_points = 20,
                                    int n_cells = 3) {
    if (shot_list.empty()) throw std::invalid_argument("shots_study: empty shot list");
    if (repeats < 1) throw std::invalid_argument("shots_study: repeats must be >= 1");

    const auto sweep = detail::sweep_values(-1.0, 1.0, n_points);
    const AnsatzSpec ansatz = default_wire_ansatz(n_cells);

    // Oracle polarizations per sweep point, shared by all budgets.
    std::vector<std::vector<double>> oracle_pol(sweep.size());
    for (size_t i = 0; i < sweep.size(); ++i) {
        const auto h = build_hamiltonian(wire_layout(n_cells, sweep[i]), cfg.model);
        oracle_pol[i] = ground_state_dense(h).polarizations;
    }

    ShotsStudyResult out;
    const int n_tasks = static_cast<int>(shot_list.size()) * repeats;
    std::vector<ShotsStudyRow> rows(n_tasks);
    detail::run_parallel(n_tasks, [&](int task) {
        const int budget_index = task / repeats;
        const int rep = task % repeats;
        const std::uint64_t shots = shot_list[budget_index];

        std::vector<double> estimates, reference;
        for (size_t i = 0; i < sweep.size(); ++i) {
            ExperimentConfig run_cfg = cfg;
            if (run_cfg.estimator.mode == EstimatorMode::ExactExpectation)
                run_cfg.estimator.mode = EstimatorMode::Sampled;
            run_cfg.estimator.shots = shots;
            run_cfg.estimator.seed = detail::mix_seed(
                cfg.estimator.seed, 0xC0FFEEu + 1000003ull * shots + 1009ull * rep + i);
            const VqeResult vqe = run_vqe(wire_layout(n_cells, sweep[i]), run_cfg.model, ansatz,
                                          run_cfg.estimator, run_cfg.optimizer);
            for (int c = 0; c < n_cells; ++c) {
                estimates.push_back(vqe.polarizations[c]);
                reference.push_back(oracle_pol[i][c]);
            }
        }
        rows[task] = {shots, static_cast<std::uint64_t>(rep), rmse(estimates, reference)};
    });

    out.rows = std::move(rows);
    for (size_t b = 0; b < shot_list.size(); ++b) {
        double mean = 0.0;
        for (int rep = 0; rep < repeats; ++rep) mean += out.rows[b * repeats + rep].rmse;
        out.mean_rmse.emplace_back(shot_list[b], mean / repeats);
    }
    out.meta = {{"experiment", "shots-study"},
                {"n_cells", n_cells},
                {"n_points", n_points},
                {"repeats", repeats},
                {"mode", to_string(cfg.estimator.mode == EstimatorMode::ExactExpectation
                                       ? EstimatorMode::Sampled
                                       : cfg.estimator.mode)}};
    return out;
}

// ---------------------------------------------------------------------------
// Iterations-versus-parameters study

struct ParamsStudyRow {
    int n_params = 0;
    std::uint64_t seed = 0;
    int iterations = 0;
};

struct ParamsStudyResult {
    std::vector<ParamsStudyRow> rows;
    std::vector<double> mean_iterations; // indexed by k-1
    std::vector<double> sigma_iterations;
    LinearFit fit;
    nlohmann::json meta = nlohmann::json::object();
};

/// Noise-free VQE on k-cell wires with the full per-qubit rotation ansatz,
/// k = 1..max_params; per-seed jitter of the starting angles provides the
/// iteration-count spread.
inline ParamsStudyResult params_study(int max_params, int repeats, const ExperimentConfig& cfg) {
    if (max_params < 2) throw std::invalid_argument("params_study: need max_params >= 2");
    if (repeats < 1) throw std::invalid_argument("params_study: repeats must be >= 1");

    ParamsStudyResult out;
    const int n_tasks = max_params * repeats;
    std::vector<ParamsStudyRow> rows(n_tasks);
    detail::run_parallel(n_tasks, [&](int task) {
        const int k = task / repeats + 1;
        const int rep = task % repeats;
        std::mt19937_64 rng(detail::mix_seed(cfg.estimator.seed, 7919ull * k + rep));
        std::uniform_real_distribution<double> jitter(-0.4, 0.4);

        ExperimentConfig run_cfg = cfg;
        run_cfg.estimator.mode = EstimatorMode::ExactExpectation;
        run_cfg.optimizer.initial_theta.assign(k, 0.0);
        for (auto& t : run_cfg.optimizer.initial_theta) t = std::numbers::pi / 2.0 + jitter(rng);

        const AnsatzSpec ansatz = full_chain_ansatz(k);
        const VqeResult vqe = run_vqe(wire_layout(k, 1.0), run_cfg.model, ansatz,
                                      run_cfg.estimator, run_cfg.optimizer);
        rows[task] = {k, static_cast<std::uint64_t>(rep), vqe.iterations};
    });
    out.rows = std::move(rows);

    std::vector<double> ks;
    for (int k = 1; k <= max_params; ++k) {
        double mean = 0.0;
        for (int rep = 0; rep < repeats; ++rep) mean += out.rows[(k - 1) * repeats + rep].iterations;
        mean /= repeats;
        double var = 0.0;
        for (int rep = 0; rep < repeats; ++rep) {
            const double d = out.rows[(k - 1) * repeats + rep].iterations - mean;
            var += d * d;
        }
        out.mean_iterations.push_back(mean);
        out.sigma_iterations.push_back(std::sqrt(var / repeats));
        ks.push_back(k);
    }
    out.fit = linear_fit(ks, out.mean_iterations);
    out.meta = {{"experiment", "params-study"},
                {"max_params", max_params},
                {"repeats", repeats},
                {"fit", {{"slope", out.fit.slope}, {"intercept", out.fit.intercept},
                         {"r", out.fit.r}}}};
    return out;
}

// ---------------------------------------------------------------------------
// CSV and JSON emission. The record CSV header is fixed to the
// ExperimentRecord field order; floats carry six significant digits; rows are
// deterministic for fixed flags and seeds.

inline const char* kRecordCsvHeader =
    "run_id,experiment,layout,driver_polarizations,mode,shots,seed,cell_index,"
    "polarization,energy_meV,oracle_energy_meV,iterations";

inline std::string record_csv_row(const ExperimentRecord& r) {
    std::ostringstream os;
    os << r.run_id << ',' << r.experiment << ',' << r.layout << ','
       << detail::join_g6(r.driver_polarizations) << ',' << r.mode << ',' << r.shots << ','
       << r.seed << ',' << r.cell_index << ',' << detail::format_g6(r.polarization) << ','
       << detail::format_g6(r.energy_meV) << ','
       << (r.oracle_energy_meV ? detail::format_g6(*r.oracle_energy_meV) : std::string{}) << ','
       << r.iterations;
    return os.str();
}

inline std::string records_to_csv(const std::vector<ExperimentRecord>& records) {
    std::string out = kRecordCsvHeader;
    out.push_back('\n');
    for (const auto& r : records) {
        out += record_csv_row(r);
        out.push_back('\n');
    }
    return out;
}

inline nlohmann::json record_to_json(const ExperimentRecord& r) {
    nlohmann::json j{{"run_id", r.run_id},
                     {"experiment", r.experiment},
                     {"layout", r.layout},
                     {"driver_polarizations", r.driver_polarizations},
                     {"mode", r.mode},
                     {"shots", r.shots},
                     {"seed", r.seed},
                     {"cell_index", r.cell_index},
                     {"polarization", r.polarization},
                     {"energy_meV", r.energy_meV},
                     {"iterations", r.iterations}};
    if (r.oracle_energy_meV) j["oracle_energy_meV"] = *r.oracle_energy_meV;
    return j;
}

inline nlohmann::json experiment_to_json(const ExperimentResult& result) {
    nlohmann::json records = nlohmann::json::array();
    for (const auto& r : result.records) records.push_back(record_to_json(r));
    return {{"records", std::move(records)}, {"meta", result.meta}};
}

inline std::string shots_study_to_csv(const ShotsStudyResult& result) {
    std::string out = "shots,seed,rmse\n";
    for (const auto& row : result.rows)
        out += std::to_string(row.shots) + "," + std::to_string(row.seed) + "," +
               detail::format_g6(row.rmse) + "\n";
    return out;
}

inline nlohmann::json shots_study_to_json(const ShotsStudyResult& result) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : result.rows)
        rows.push_back({{"shots", row.shots}, {"seed", row.seed}, {"rmse", row.rmse}});
    nlohmann::json means = nlohmann::json::array();
    for (const auto& [shots, mean] : result.mean_rmse)
        means.push_back({{"shots", shots}, {"mean_rmse", mean}});
    return {{"records", std::move(rows)}, {"mean_rmse", std::move(means)}, {"meta", result.meta}};
}

inline std::string params_study_to_csv(const ParamsStudyResult& result) {
    std::string out = "n_params,seed,iterations\n";
    for (const auto& row : result.rows)
        out += std::to_string(row.n_params) + "," + std::to_string(row.seed) + "," +
               std::to_string(row.iterations) + "\n";
    return out;
}

inline nlohmann::json params_study_to_json(const ParamsStudyResult& result) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : result.rows)
        rows.push_back(
            {{"n_params", row.n_params}, {"seed", row.seed}, {"iterations", row.iterations}});
    return {{"records", std::move(rows)},
            {"mean_iterations", result.mean_iterations},
            {"sigma_iterations", result.sigma_iterations},
            {"meta", result.meta}};
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file '" + path + "'");
    out << content;
}

} // namespace qcavqe
