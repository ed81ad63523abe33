#pragma once

#include "transrev/grid.hpp"
#include "transrev/reversal_varspeed.hpp"

#include <optional>
#include <string>
#include <vector>

namespace transrev {

enum class ProblemKind {
    AdvectionPeriodic,
    AdvectionSource,
    AdvectionAbsorbing,
    AcousticHomogeneous,
    AcousticHeterogeneous,
    Burgers,
};

enum class InitialKind { DeltaAtFirstCell, GaussianPulse, TwinGaussians };

enum class Sampling { Uniform, Chebyshev };

struct ProblemSpec {
    ProblemKind problem = ProblemKind::AdvectionPeriodic;
    std::size_t n_cells = 100;
    std::size_t n_snapshots = 100;
    double final_time = 1.0;
    double courant = 0.9;
    double speed = 1.0;  ///< advection speed
    double decay = 1.0;  ///< source coefficient gamma for AdvectionSource

    double density = 1.0;  ///< homogeneous acoustics
    double bulk_modulus = 1.0;
    double density_left = 1.0;  ///< heterogeneous acoustics, x < interface
    double bulk_left = 1.0;
    double density_right = 4.0;
    double bulk_right = 1.0;
    double interface = 0.5;

    InitialKind initial = InitialKind::GaussianPulse;
    double center = 0.25;
    double width = 0.05;
    double amplitude = 1.0;
    /// Second pulse of TwinGaussians: offset from `center` and relative height.
    double twin_offset = 0.25;
    double twin_ratio = 0.5;

    Sampling sampling = Sampling::Uniform;

    void validate() const;
    bool acoustic() const noexcept {
        return problem == ProblemKind::AcousticHomogeneous || problem == ProblemKind::AcousticHeterogeneous;
    }
};

struct SolveResult {
    std::vector<std::string> names;       ///< "u", or "p" and "u" for acoustics
    std::vector<SnapshotMatrix> fields;   ///< one snapshot matrix per name
    std::optional<AcousticMedium> medium; ///< set for acoustic problems
    double time_step = 0.0;
    std::size_t n_steps = 0;

    const SnapshotMatrix& field(const std::string& name) const;
};

/// M Chebyshev nodes on [0, T]: T (1 - cos(pi (2k - 1) / (2M))) / 2, k = 1..M.
std::vector<double> chebyshev_times(std::size_t m, double final_time);

/// Snapshot times for the problem's sampling.
std::vector<double> snapshot_times(const ProblemSpec& spec);

/// Initial cell averages (point values at cell centres for the smooth profiles).
GridField initial_condition(const ProblemSpec& spec);

AcousticMedium make_medium(const ProblemSpec& spec);

SolveResult solve(const ProblemSpec& spec);

/// solve() with Chebyshev sampling.
SolveResult snapshot_at_chebyshev_times(ProblemSpec spec);

/// Column-wise characteristic variables of acoustic snapshots: {r1, r2}.
std::pair<SnapshotMatrix, SnapshotMatrix> characteristic_snapshots(const SolveResult& acoustic);

std::string to_string(ProblemKind kind);
ProblemKind problem_from_string(const std::string& name);
std::string to_string(InitialKind kind);
InitialKind initial_from_string(const std::string& name);
std::string to_string(Sampling s);
Sampling sampling_from_string(const std::string& name);

}  // namespace transrev
