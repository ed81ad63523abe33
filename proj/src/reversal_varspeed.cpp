#include "transrev/reversal_varspeed.hpp"

#include "transrev/errors.hpp"
#include "transrev/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace transrev {

VelocityField::VelocityField(std::vector<double> speeds) : speeds_(std::move(speeds)) {
    const std::size_t n = speeds_.size();
    edges_.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) edges_[i] = static_cast<double>(i) / static_cast<double>(n);
    uniform_ = true;
    init();
}

VelocityField::VelocityField(std::vector<double> speeds, std::vector<double> edges)
    : speeds_(std::move(speeds)), edges_(std::move(edges)) {
    uniform_ = false;
    init();
}

VelocityField VelocityField::constant(std::size_t n_cells, double speed) {
    return VelocityField(std::vector<double>(n_cells, speed));
}

void VelocityField::init() {
    const std::size_t n = speeds_.size();
    if (n == 0) throw DimensionError("velocity field needs at least one cell");
    if (edges_.size() != n + 1) throw DimensionError("velocity field needs N+1 edges");
    if (edges_.front() != 0.0 || edges_.back() != 1.0) {
        throw InvalidArgument("velocity grid must start at 0 and end at 1");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(speeds_[i] > 0.0) || !std::isfinite(speeds_[i])) {
            throw InvalidArgument("speed in cell " + std::to_string(i) + " must be positive and finite");
        }
        if (!(edges_[i + 1] > edges_[i])) throw InvalidArgument("velocity grid edges must increase");
    }
    travel_.assign(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) travel_[i + 1] = travel_[i] + cell_time(i);
}

std::size_t VelocityField::locate(double x) const {
    const std::size_t n = n_cells();
    x -= std::floor(x);
    std::size_t i;
    if (uniform_) {
        i = static_cast<std::size_t>(x * static_cast<double>(n));
    } else {
        i = static_cast<std::size_t>(std::upper_bound(edges_.begin(), edges_.end(), x) - edges_.begin());
        i = i == 0 ? 0 : i - 1;
    }
    return std::min(i, n - 1);
}

TrajectorySolution integrate_trajectories(const VelocityField& c, double duration, TimeDirection dir) {
    if (!(duration >= 0.0) || !std::isfinite(duration)) {
        throw InvalidArgument("trajectory duration must be finite and nonnegative");
    }
    const std::size_t n = c.n_cells();
    const double period = c.period();
    const double full = std::floor(duration / period);
    const double rest = std::max(0.0, duration - full * period);

    TrajectorySolution sol;
    sol.period = period;
    sol.mean_speed = c.mean_speed();
    sol.duration = duration;
    sol.positions.resize(n);
    sol.cell_times.resize(n);
    std::vector<double> spent(n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) spent[i] = full * c.cell_time(i);
        double left = rest;
        std::size_t cell = dir == TimeDirection::Forward ? j : (j + n - 1) % n;
        double position = c.edges()[j];
        while (left > 0.0) {
            const double cross = c.cell_time(cell);
            if (left >= cross) {
                spent[cell] += cross;
                left -= cross;
                if (dir == TimeDirection::Forward) {
                    cell = (cell + 1) % n;
                    position = c.edges()[cell];
                } else {
                    position = c.edges()[cell];
                    cell = (cell + n - 1) % n;
                }
            } else {
                spent[cell] += left;
                const double step = c.speeds()[cell] * left;
                position = dir == TimeDirection::Forward ? c.edges()[cell] + step : c.edges()[cell + 1] - step;
                left = 0.0;
            }
        }
        position -= std::floor(position);
        sol.positions[j] = position >= 1.0 ? 0.0 : position;
        for (std::size_t i = 0; i < n; ++i) {
            if (spent[i] > 0.0) sol.cell_times[j].emplace_back(i, spent[i]);
        }
    }
    return sol;
}

namespace {

/// Cumulative mass evaluated at travel-time coordinate theta, periodically extended.
class CumulativeMass {
public:
    CumulativeMass(const VelocityField& c, const std::vector<double>& mass) : c_(c), mass_(mass) {
        prefix_.assign(mass.size() + 1, 0.0);
        for (std::size_t i = 0; i < mass.size(); ++i) prefix_[i + 1] = prefix_[i] + mass[i];
    }

    double operator()(double theta) const {
        const auto& tt = c_.travel_times();
        const double period = c_.period();
        double wraps = std::floor(theta / period);
        double r = theta - wraps * period;
        if (r >= period) {
            r -= period;
            wraps += 1.0;
        }
        if (r < 0.0) r = 0.0;
        std::size_t i = static_cast<std::size_t>(std::upper_bound(tt.begin(), tt.end(), r) - tt.begin());
        i = std::min(i == 0 ? 0 : i - 1, mass_.size() - 1);
        const double frac = std::clamp((r - tt[i]) / c_.cell_time(i), 0.0, 1.0);
        return wraps * prefix_.back() + prefix_[i] + mass_[i] * frac;
    }

private:
    const VelocityField& c_;
    const std::vector<double>& mass_;
    std::vector<double> prefix_;
};

}  // namespace

GridField apply_variable_shift(const GridField& f, const VelocityField& c, double nu_tilde, TransportPath path) {
    const std::size_t n = f.size();
    if (c.n_cells() != n) throw DimensionError("apply_variable_shift: field and velocity sizes differ");
    if (!std::isfinite(nu_tilde)) throw NumericalError("apply_variable_shift: shift is not finite");
    const double dt = nu_tilde * c.period() / static_cast<double>(n);
    std::vector<double> mass(n);
    for (std::size_t i = 0; i < n; ++i) mass[i] = f[i] * c.width(i);

    Vector out(static_cast<Eigen::Index>(n));
    if (path == TransportPath::TravelTime) {
        const CumulativeMass cumulative(c, mass);
        const auto& tt = c.travel_times();
        double lower = cumulative(tt[0] - dt);
        for (std::size_t k = 0; k < n; ++k) {
            const double upper = cumulative(tt[k + 1] - dt);
            out[static_cast<Eigen::Index>(k)] = (upper - lower) / c.width(k);
            lower = upper;
        }
        return GridField(std::move(out));
    }

    const auto sol = integrate_trajectories(c, std::abs(dt), dt >= 0.0 ? TimeDirection::Backward
                                                                      : TimeDirection::Forward);
    const double sign = dt >= 0.0 ? 1.0 : -1.0;
    std::vector<double> flux(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        double swept = 0.0;
        for (const auto& [cell, time] : sol.cell_times[k]) {
            swept += f[cell] * c.speeds()[cell] * time;
        }
        flux[k] = sign * swept;
    }
    for (std::size_t k = 0; k < n; ++k) {
        out[static_cast<Eigen::Index>(k)] = f[k] + (flux[k] - flux[(k + 1) % n]) / c.width(k);
    }
    return GridField(std::move(out));
}

std::size_t PivotMap::changes() const {
    std::size_t count = 0;
    for (std::size_t j = 1; j < map.size(); ++j) count += map[j] != map[j - 1];
    return count;
}

PivotMap build_pivot_map(const SnapshotMatrix& a, double gamma) {
    if (!(gamma > 0.0)) throw InvalidArgument("pivot trigger gamma must be positive");
    const std::size_t m = a.n_snaps();
    PivotMap pm;
    pm.trigger_gamma = gamma;
    pm.map.assign(m, 0);
    for (std::size_t j = 1; j < m; ++j) {
        pm.map[j] = pm.map[j - 1];
        const auto prev = a.data().col(static_cast<Eigen::Index>(j - 1));
        const double base = prev.norm();
        if (base == 0.0) continue;
        const double change = (a.data().col(static_cast<Eigen::Index>(j)) - prev).norm() / base;
        if (change >= gamma) pm.map[j] = j;
    }
    return pm;
}

double varspeed_objective(const GridField& a, const GridField& b, const VelocityField& c, double omega) {
    if (a.size() != b.size()) throw DimensionError("varspeed_objective: length mismatch");
    return (b.values() - apply_variable_shift(a, c, -omega).values()).squaredNorm();
}

double best_varspeed_shift(const GridField& a, const GridField& b, const VelocityField& c) {
    const std::size_t n = a.size();
    const std::size_t seeds = 4 * n;
    std::vector<double> values(seeds);
    for (std::size_t i = 0; i < seeds; ++i) values[i] = varspeed_objective(a, b, c, 0.25 * static_cast<double>(i));

    std::size_t best_seed = 0;
    for (std::size_t i = 1; i < seeds; ++i) {
        if (values[i] < values[best_seed]) best_seed = i;
    }
    // Refine the three lowest local minima among the seeds.
    std::vector<std::size_t> minima;
    for (std::size_t i = 0; i < seeds; ++i) {
        const double prev = values[(i + seeds - 1) % seeds];
        const double next = values[(i + 1) % seeds];
        if (values[i] <= prev && values[i] <= next) minima.push_back(i);
    }
    std::sort(minima.begin(), minima.end(), [&](std::size_t x, std::size_t y) {
        return values[x] < values[y] || (values[x] == values[y] && x < y);
    });
    if (minima.size() > 3) minima.resize(3);

    double best = 0.25 * static_cast<double>(best_seed);
    double best_value = values[best_seed];
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    for (std::size_t seed : minima) {
        const double centre = 0.25 * static_cast<double>(seed);
        double lo = centre - 0.25, hi = centre + 0.25;
        double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
        double f1 = varspeed_objective(a, b, c, x1), f2 = varspeed_objective(a, b, c, x2);
        while (hi - lo > 1e-4) {
            if (f1 < f2) {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - inv_phi * (hi - lo);
                f1 = varspeed_objective(a, b, c, x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + inv_phi * (hi - lo);
                f2 = varspeed_objective(a, b, c, x2);
            }
        }
        const double x = f1 < f2 ? x1 : x2;
        const double fx = std::min(f1, f2);
        if (fx < best_value) {
            best_value = fx;
            best = x;
        }
    }
    const double ln = static_cast<double>(n);
    best = std::fmod(best, ln);
    if (best < 0.0) best += ln;
    if (best >= ln) best -= ln;
    return best;
}

VarspeedReversal reverse_varspeed(const SnapshotMatrix& a, const VelocityField& c, const PivotMap& pivots) {
    const std::size_t m = a.n_snaps();
    if (c.n_cells() != a.n_cells()) throw DimensionError("reverse_varspeed: velocity size mismatch");
    if (pivots.map.size() != m) throw DimensionError("reverse_varspeed: pivot map size mismatch");
    for (std::size_t j = 0; j < m; ++j) {
        if (pivots.map[j] > j) throw InvalidArgument("pivot map must satisfy l(j) <= j");
    }
    VarspeedReversal out{std::vector<double>(m), a};
    Matrix reversed(a.data().rows(), a.data().cols());
    parallel_for(m, [&](std::size_t j) {
        const GridField column = a.column(j);
        const GridField pivot = a.column(pivots.map[j]);
        const double nu = best_varspeed_shift(column, pivot, c);
        out.shifts[j] = nu;
        reversed.col(static_cast<Eigen::Index>(j)) = apply_variable_shift(column, c, -nu).values();
    });
    out.reversed = a.with_data(std::move(reversed));
    return out;
}

SnapshotMatrix varspeed_forward(const SnapshotMatrix& reversed, const VelocityField& c,
                                const std::vector<double>& shifts) {
    const std::size_t m = reversed.n_snaps();
    if (shifts.size() != m) throw DimensionError("varspeed_forward: one shift per column expected");
    Matrix out(reversed.data().rows(), reversed.data().cols());
    parallel_for(m, [&](std::size_t j) {
        out.col(static_cast<Eigen::Index>(j)) = apply_variable_shift(reversed.column(j), c, shifts[j]).values();
    });
    return reversed.with_data(std::move(out));
}

double AcousticMedium::sound_speed(std::size_t i) const { return std::sqrt(bulk_modulus.at(i) / density.at(i)); }

double AcousticMedium::impedance(std::size_t i) const { return density.at(i) * sound_speed(i); }

void AcousticMedium::validate() const {
    if (density.size() != bulk_modulus.size()) throw DimensionError("medium: density and bulk modulus sizes differ");
    if (density.empty()) throw DimensionError("medium: no cells");
    for (std::size_t i = 0; i < density.size(); ++i) {
        if (!(density[i] > 0.0) || !(bulk_modulus[i] > 0.0) || !std::isfinite(density[i]) ||
            !std::isfinite(bulk_modulus[i])) {
            throw InvalidArgument("medium: material parameters must be positive in cell " + std::to_string(i));
        }
    }
}

VelocityField AcousticMedium::velocity() const {
    validate();
    std::vector<double> speeds(n_cells());
    for (std::size_t i = 0; i < speeds.size(); ++i) speeds[i] = sound_speed(i);
    return VelocityField(std::move(speeds));
}

std::pair<GridField, GridField> characteristic_decompose(const GridField& p, const GridField& u,
                                                         const AcousticMedium& medium) {
    medium.validate();
    const std::size_t n = medium.n_cells();
    if (p.size() != n || u.size() != n) throw DimensionError("characteristic_decompose: size mismatch");
    Vector r1(static_cast<Eigen::Index>(n)), r2(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const double z = medium.impedance(i);
        const auto ii = static_cast<Eigen::Index>(i);
        r1[ii] = 0.5 * (-p[i] / z + u[i]);
        r2[ii] = 0.5 * (p[i] / z + u[i]);
    }
    return {GridField(std::move(r1)), GridField(std::move(r2))};
}

std::pair<GridField, GridField> characteristic_compose(const GridField& r1, const GridField& r2,
                                                       const AcousticMedium& medium) {
    medium.validate();
    const std::size_t n = medium.n_cells();
    if (r1.size() != n || r2.size() != n) throw DimensionError("characteristic_compose: size mismatch");
    Vector p(static_cast<Eigen::Index>(n)), u(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        p[ii] = medium.impedance(i) * (r2[i] - r1[i]);
        u[ii] = r1[i] + r2[i];
    }
    return {GridField(std::move(p)), GridField(std::move(u))};
}

}  // namespace transrev
