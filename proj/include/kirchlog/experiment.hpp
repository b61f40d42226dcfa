#pragma once

// Orchestration behind the command-line subcommands. Every command returns
// its JSON report and writes its files into an output directory.

#include "kirchlog/analysis.hpp"
#include "kirchlog/config.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace kirchlog {

/// Discrete landscape of one (model, grid): constants, well depth and the
/// curve builder used for delta roots.
struct Landscape {
    EmbeddingConstants constants;
    std::shared_ptr<DeltaCurveBuilder> curve;

    double d() const { return curve->depth(); }
    WellContext context() const { return {d(), constants}; }
};

Landscape compute_landscape(const ExperimentConfig& cfg, const Grid& g);

/// Initial field requested by the config. Scaling requests use the fibering
/// map of the shape: to_I picks lambda*/2 or 2 lambda*, to_J solves
/// J(c u) = fraction * d on the requested branch.
Field make_initial(const ExperimentConfig& cfg, const Grid& g, double d);

struct SimulationProduct {
    RunResult run;
    Classification classification;
    nlohmann::json summary;
};

/// Classify, evolve, evaluate every applicable bound and track convergence.
SimulationProduct simulate(const ExperimentConfig& cfg, const Grid& g, const Landscape& land);

struct SweepCell {
    double axis1 = 0.0;
    double axis2 = 0.0;
    bool hasAxis2 = false;
    Classification classification;
    Outcome outcome;
    nlohmann::json summary;
};

/// Cells in row-major order (axis1 outer). Cells run on a worker pool and
/// are collected in order, so the result does not depend on scheduling.
std::vector<SweepCell> run_sweep(const ExperimentConfig& cfg);

inline constexpr const char* kPhaseMapCsvHeader =
    "axis1,axis2,J0,I0,d,regime,outcome,tEstimate";

void write_phase_map_csv(std::ostream& os, const std::vector<SweepCell>& cells);

nlohmann::json to_json(const EmbeddingConstants& c);
nlohmann::json to_json(const Classification& c);
nlohmann::json to_json(const Outcome& o);
nlohmann::json to_json(const DecayReport& r);
nlohmann::json to_json(const LifespanReport& r);
nlohmann::json to_json(const ConvergenceReport& r);

nlohmann::json cmd_constants(const ExperimentConfig& cfg, const std::string& outDir);
nlohmann::json cmd_well(const ExperimentConfig& cfg, const std::string& outDir);
nlohmann::json cmd_ground_state(const ExperimentConfig& cfg, const std::string& outDir);
nlohmann::json cmd_classify(const ExperimentConfig& cfg, const std::string& outDir);
nlohmann::json cmd_simulate(const ExperimentConfig& cfg, const std::string& outDir);
nlohmann::json cmd_sweep(const ExperimentConfig& cfg, const std::string& outDir);

std::string library_version();

}  // namespace kirchlog
