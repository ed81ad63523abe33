#pragma once

#include "transrev/io.hpp"
#include "transrev/pod.hpp"
#include "transrev/reversal_integer.hpp"
#include "transrev/solvers.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace transrev {

enum class ReversalMethod { Integer, Real, Varspeed };

struct ExperimentConfig {
    std::string preset = "custom";
    ProblemSpec spec;
    /// Also emit the characteristic variables r1, r2 of acoustic runs.
    bool characteristics = false;

    ReversalMethod method = ReversalMethod::Integer;
    ReversalConfig greedy;
    double gamma = 0.15;   ///< pivot-map trigger for variable speed
    bool sharpen = true;   ///< sharpen real-shift reconstructions

    RankCriterion pod = RankCriterion::energy(0.01);
    bool subtract_mean = false;

    std::string output_dir = ".";
    std::uint64_t seed = 0;

    void validate() const;
};

std::vector<std::string> preset_names();
ExperimentConfig preset(const std::string& name);

std::string to_json_text(const ExperimentConfig& cfg);
/// Strict: unknown keys are rejected. Missing keys keep the preset named by
/// "preset" (or the defaults).
ExperimentConfig config_from_json_text(const std::string& text);
/// Applies a dotted override such as "problem.n_cells=64" or "reversal.method=real".
void apply_override(ExperimentConfig& cfg, const std::string& assignment);

/// Runs the solver; acoustic results carry r1 and r2 as extra fields when requested.
SolveResult generate(const ExperimentConfig& cfg);

/// Velocity used for variable-speed reversal of the configured problem.
VelocityField experiment_velocity(const ExperimentConfig& cfg);

AnyModel reverse(const ExperimentConfig& cfg, const SnapshotMatrix& a);

/// Reconstruction of the snapshots from a model; real and variable-speed
/// models are truncated to `rank` first (0 means no truncation).
Matrix model_reconstruction(const ExperimentConfig& cfg, const AnyModel& model, std::size_t rank);

/// Snapshot matrix in the model frame (reversed by the first iteration for integer models).
Matrix model_reversed(const AnyModel& model, const SnapshotMatrix& a);

struct Comparison {
    Table errors;  ///< snapshot_index, time, err_reversal, err_pod
    Table modes;   ///< mode_index, sigma_reversed, sigma_plain
    std::size_t rank = 0;
};

Comparison compare(const ExperimentConfig& cfg, const SnapshotMatrix& a, const AnyModel& model);

/// mode_index, sigma, energy_fraction, cumulative_energy; also the chosen rank.
Table pod_table(const ExperimentConfig& cfg, const SnapshotMatrix& a, std::size_t* rank = nullptr);

/// iteration, residual_frobenius, residual_time_space, pivot for iterations 1..K.
/// Integer models only.
Table residual_table(const AnyModel& model);

/// column, then one shift column per iteration (integer) or a single shift column.
Table shift_table(const AnyModel& model);

struct SharpenReport {
    SnapshotMatrix sharpened;  ///< full-rank sharpened reconstruction
    Table errors;              ///< snapshot_index, time, err_plain, err_sharpened
};

/// Compares plain and sharpened forward transport of a real-shift model.
SharpenReport sharpen_report(const SnapshotMatrix& a, const AnyModel& model);

}  // namespace transrev
