#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qcavqe/qcavqe.hpp"

namespace {

using namespace qcavqe;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitUnconverged = 3;

struct SweepArg {
    double lo = 1.0;
    double hi = 1.0;
    int steps = 1;
};

SweepArg parse_pdrv(const std::string& text) {
    SweepArg sweep;
    const auto c1 = text.find(':');
    if (c1 == std::string::npos) {
        sweep.lo = sweep.hi = std::stod(text);
        sweep.steps = 1;
        return sweep;
    }
    const auto c2 = text.find(':', c1 + 1);
    if (c2 == std::string::npos)
        throw LayoutError("--pdrv expects a value or LO:HI:STEPS");
    sweep.lo = std::stod(text.substr(0, c1));
    sweep.hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    sweep.steps = std::stoi(text.substr(c2 + 1));
    if (sweep.steps < 1) throw LayoutError("--pdrv sweep needs at least one step");
    if (std::abs(sweep.lo) > 1.0 || std::abs(sweep.hi) > 1.0)
        throw LayoutError("--pdrv values must lie in [-1, 1]");
    return sweep;
}

EstimatorMode parse_mode(const std::string& text) {
    if (text == "exact") return EstimatorMode::ExactExpectation;
    if (text == "sampled") return EstimatorMode::Sampled;
    if (text == "noisy") return EstimatorMode::NoisySampled;
    throw LayoutError("--mode must be exact, sampled or noisy");
}

struct OutputArgs {
    std::string csv_path;
    std::string json_path;
};

void emit(const std::string& csv, const nlohmann::json& json, const OutputArgs& out) {
    if (!out.csv_path.empty()) {
        write_text_file(out.csv_path, csv);
        std::cout << "wrote " << out.csv_path << "\n";
    } else {
        std::cout << csv;
    }
    if (!out.json_path.empty()) {
        write_text_file(out.json_path, json.dump(2) + "\n");
        std::cout << "wrote " << out.json_path << "\n";
    }
}

int finish_records(const ExperimentResult& result, const OutputArgs& out) {
    emit(records_to_csv(result.records), experiment_to_json(result), out);
    if (!result.all_converged) {
        std::cerr << "warning: at least one VQE run did not converge\n";
        return kExitUnconverged;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ground-state models of quantum-dot cellular automata circuits via VQE"};
    app.require_subcommand(1);

    std::string pdrv_text = "1";
    std::string mode_text = "exact";
    std::string layout_path;
    std::string shot_list_text = "1024,4096,16384,65536";
    OutputArgs out;
    int n_cells = 3;
    int majority_n = 6;
    int points = 21;
    int repeats = 10;
    int max_params = 8;
    std::uint64_t shots = 4096;
    std::uint64_t seed = 1;
    double scale = 1.0;
    int max_iter = 500;
    bool with_oracle = false;
    int offset_x = 2;
    int offset_y = 0;
    std::string charge_model = "both";

    const auto add_common = [&](CLI::App* cmd, bool with_pdrv = true) {
        cmd->add_option("--mode", mode_text, "estimator: exact, sampled or noisy")
            ->default_str("exact");
        cmd->add_option("--shots", shots, "shots per measured basis")->default_val(4096);
        cmd->add_option("--seed", seed, "base RNG seed")->default_val(1);
        cmd->add_option("--scale", scale, "driver bias scale (1.0 or 0.5)")->default_val(1.0);
        cmd->add_option("--max-iter", max_iter, "optimizer evaluation budget per run")
            ->default_val(500);
        cmd->add_flag("--oracle", with_oracle, "also solve each point exactly");
        cmd->add_option("--out", out.csv_path, "CSV output file (default: stdout)");
        cmd->add_option("--json", out.json_path, "JSON log file");
        if (with_pdrv)
            cmd->add_option("--pdrv", pdrv_text, "driver polarization V or sweep LO:HI:STEPS")
                ->default_str("1");
    };

    auto* wire = app.add_subcommand("wire", "driven N-cell binary wire");
    wire->add_option("--n", n_cells, "number of device cells")->default_val(3);
    wire->add_option("--layout", layout_path, "run a layout file instead of the builtin wire");
    add_common(wire);

    auto* inverter = app.add_subcommand("inverter", "six-cell inverter truth table");
    add_common(inverter, false);

    auto* majority = app.add_subcommand("majority", "majority-gate truth table");
    majority->add_option("--n", majority_n, "variant: 6 (full) or 2 (compact)")->default_val(6);
    add_common(majority, false);

    auto* response = app.add_subcommand("response", "cell response vs driver polarization");
    response->add_option("--n", n_cells, "number of device cells")->default_val(1);
    response->add_option("--points", points, "sweep points over [-1, 1]")->default_val(21);
    add_common(response, false);

    auto* shots_cmd = app.add_subcommand("shots-study", "polarization RMSE vs shot budget");
    shots_cmd->add_option("--shot-list", shot_list_text, "comma-separated shot budgets")
        ->default_str("1024,4096,16384,65536");
    shots_cmd->add_option("--repeats", repeats, "seeds per budget")->default_val(10);
    add_common(shots_cmd, false);

    auto* params_cmd = app.add_subcommand("params-study", "optimizer iterations vs parameters");
    params_cmd->add_option("--max-params", max_params, "largest parameter count")->default_val(8);
    params_cmd->add_option("--repeats", repeats, "seeds per parameter count")->default_val(10);
    add_common(params_cmd, false);

    auto* interactions = app.add_subcommand("interactions", "dump the cell-pair energy table");
    interactions->add_option("--dx", offset_x, "center offset x in units of a")->default_val(2);
    interactions->add_option("--dy", offset_y, "center offset y in units of a")->default_val(0);
    interactions->add_option("--charges", charge_model, "neutralized, bare or both")
        ->default_str("both");
    interactions->add_option("--out", out.csv_path, "CSV output file (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        ExperimentConfig cfg;
        cfg.model.driver_bias_scale = scale;
        cfg.estimator.mode = parse_mode(mode_text);
        cfg.estimator.shots = shots;
        cfg.estimator.seed = seed;
        cfg.optimizer.max_iter = max_iter;
        cfg.with_oracle = with_oracle;

        if (wire->parsed()) {
            if (!layout_path.empty()) {
                const CircuitLayout layout = load_layout(layout_path);
                const auto result = run_layout_experiment(
                    layout, full_chain_ansatz(layout.device_count()), cfg, "custom",
                    "custom_" + layout.name + "_" + to_string(cfg.estimator.mode) + "_s" +
                        std::to_string(seed));
                return finish_records(result, out);
            }
            const SweepArg sweep = parse_pdrv(pdrv_text);
            const auto result =
                wire_sweep(n_cells, sweep.lo, sweep.hi, sweep.steps, cfg, "wire");
            return finish_records(result, out);
        }
        if (inverter->parsed())
            return finish_records(truth_table(TruthTableVariant::Inverter, cfg), out);
        if (majority->parsed()) {
            if (majority_n != 6 && majority_n != 2)
                throw LayoutError("majority --n must be 6 or 2");
            const auto variant =
                majority_n == 6 ? TruthTableVariant::Majority6 : TruthTableVariant::Majority2;
            return finish_records(truth_table(variant, cfg), out);
        }
        if (response->parsed())
            return finish_records(response_curve(points, cfg, n_cells), out);
        if (shots_cmd->parsed()) {
            std::vector<std::uint64_t> budgets;
            std::string item;
            std::istringstream is(shot_list_text);
            while (std::getline(is, item, ',')) budgets.push_back(std::stoull(item));
            const auto study = shots_study(budgets, repeats, cfg);
            emit(shots_study_to_csv(study), shots_study_to_json(study), out);
            for (const auto& [budget, mean] : study.mean_rmse)
                std::cerr << "shots " << budget << ": mean RMSE " << mean << "\n";
            return kExitOk;
        }
        if (params_cmd->parsed()) {
            const auto study = params_study(max_params, repeats, cfg);
            emit(params_study_to_csv(study), params_study_to_json(study), out);
            std::cerr << "fit: slope " << study.fit.slope << ", r " << study.fit.r << "\n";
            return kExitOk;
        }
        if (interactions->parsed()) {
            if (charge_model != "neutralized" && charge_model != "bare" && charge_model != "both")
                throw LayoutError("--charges must be neutralized, bare or both");
            std::string csv = "offset_x,offset_y,model,e00_meV,e01_meV,e10_meV,e11_meV\n";
            const auto add_row = [&](bool neutralized) {
                const auto t = interaction_table({offset_x, offset_y}, neutralized);
                char buf[160];
                std::snprintf(buf, sizeof(buf), "%d,%d,%s,%.6g,%.6g,%.6g,%.6g\n", offset_x,
                              offset_y, neutralized ? "neutralized" : "bare", t.e00, t.e01, t.e10,
                              t.e11);
                csv += buf;
            };
            if (charge_model != "bare") add_row(true);
            if (charge_model != "neutralized") add_row(false);
            emit(csv, nlohmann::json::object(), out);
            return kExitOk;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitOk;
}
