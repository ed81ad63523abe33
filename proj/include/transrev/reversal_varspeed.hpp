#pragma once

#include "transrev/grid.hpp"

#include <utility>
#include <vector>

namespace transrev {

/// Piecewise-constant positive speed on the cells of a grid over [0, 1].
class VelocityField {
public:
    /// Uniform grid with one speed per cell.
    explicit VelocityField(std::vector<double> speeds);
    /// General grid: edges x_0 = 0 < ... < x_N = 1.
    VelocityField(std::vector<double> speeds, std::vector<double> edges);

    static VelocityField constant(std::size_t n_cells, double speed);

    std::size_t n_cells() const noexcept { return speeds_.size(); }
    const std::vector<double>& speeds() const noexcept { return speeds_; }
    const std::vector<double>& edges() const noexcept { return edges_; }
    double width(std::size_t cell) const { return edges_[cell + 1] - edges_[cell]; }
    /// Time to cross cell i.
    double cell_time(std::size_t cell) const { return width(cell) / speeds_[cell]; }
    /// Time for one full traversal of the domain.
    double period() const noexcept { return travel_.back(); }
    /// |domain| / period, the harmonic mean of the speed.
    double mean_speed() const noexcept { return 1.0 / period(); }
    /// Travel-time coordinate of each edge, from 0 to period().
    const std::vector<double>& travel_times() const noexcept { return travel_; }
    bool uniform_grid() const noexcept { return uniform_; }

    /// Cell containing x in [0, 1).
    std::size_t locate(double x) const;

private:
    void init();

    std::vector<double> speeds_;
    std::vector<double> edges_;
    std::vector<double> travel_;
    bool uniform_ = true;
};

/// Exact trajectories of the grid edges under dx/dt = c(x) on the periodic domain.
struct TrajectorySolution {
    std::vector<double> positions;  ///< final position of edge j, in [0, 1)
    /// Nonzero (cell, time) pairs: time particle j spent in each cell.
    std::vector<std::vector<std::pair<std::size_t, double>>> cell_times;
    double period = 0.0;
    double mean_speed = 0.0;
    double duration = 0.0;
};

enum class TimeDirection { Forward, Backward };

/// Event-driven integration of the N edge particles for `duration` >= 0.
TrajectorySolution integrate_trajectories(const VelocityField& c, double duration, TimeDirection dir);

enum class TransportPath {
    TravelTime,   ///< departure points from the travel-time coordinate
    Trajectory,   ///< fluxes from integrate_trajectories
};

/// Conservative variable-speed transport by nu_tilde cells: duration
/// dt = nu_tilde T / N, positive values move mass in the +x direction.
/// Values are cell averages; the cell masses u_i dx_i are conserved.
GridField apply_variable_shift(const GridField& f, const VelocityField& c, double nu_tilde,
                               TransportPath path = TransportPath::TravelTime);

struct PivotMap {
    std::vector<std::size_t> map;  ///< pivot column for each column
    double trigger_gamma = 0.0;

    std::size_t changes() const;
};

/// Column j becomes the pivot when |a_j - a_{j-1}| / |a_{j-1}| >= gamma;
/// before the first trigger the pivot is column 0.
PivotMap build_pivot_map(const SnapshotMatrix& a, double gamma);

struct VarspeedReversal {
    std::vector<double> shifts;  ///< in [0, N)
    SnapshotMatrix reversed;     ///< column j is K_c(-nu_j) a_j
};

/// |b - K_c(-w) a|^2
double varspeed_objective(const GridField& a, const GridField& b, const VelocityField& c, double omega);

/// Seeds 4N shifts on [0, N) and refines the best by golden-section search.
double best_varspeed_shift(const GridField& a, const GridField& b, const VelocityField& c);

VarspeedReversal reverse_varspeed(const SnapshotMatrix& a, const VelocityField& c, const PivotMap& pivots);

/// Column-wise K_c(nu_j) applied to the reversed snapshots.
SnapshotMatrix varspeed_forward(const SnapshotMatrix& reversed, const VelocityField& c,
                                const std::vector<double>& shifts);

/// Per-cell acoustic material.
struct AcousticMedium {
    std::vector<double> density;
    std::vector<double> bulk_modulus;

    std::size_t n_cells() const noexcept { return density.size(); }
    double sound_speed(std::size_t i) const;
    double impedance(std::size_t i) const;
    void validate() const;
    VelocityField velocity() const;
};

/// r1 = (-p/(rho c) + u)/2 (left-going), r2 = (p/(rho c) + u)/2 (right-going).
std::pair<GridField, GridField> characteristic_decompose(const GridField& p, const GridField& u,
                                                         const AcousticMedium& medium);
/// Inverse: p = rho c (r2 - r1), u = r1 + r2.
std::pair<GridField, GridField> characteristic_compose(const GridField& r1, const GridField& r2,
                                                       const AcousticMedium& medium);

}  // namespace transrev
