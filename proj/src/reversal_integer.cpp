#include "transrev/reversal_integer.hpp"

#include "transrev/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace transrev {

namespace {

int sign(double x) { return (x > 0.0) - (x < 0.0); }

bool keep_entry(double a, double b) {
    double d = a - b;
    // an exact match can come out as a sign flip in the last bits of the scaling
    if (std::abs(d) <= 64.0 * std::numeric_limits<double>::epsilon() * std::abs(a)) d = 0.0;
    return sign(d) * sign(a) >= 0 && std::abs(d) <= std::abs(a);
}

/// Shift candidates in tie-break order: 0, 1, -1, 2, -2, ... within (-N/2, N/2].
std::vector<long> scan_order(std::size_t n) {
    std::vector<long> order;
    order.reserve(n);
    if (n == 0) return order;
    order.push_back(0);
    const long ln = static_cast<long>(n);
    for (long d = 1; static_cast<std::size_t>(order.size()) < n; ++d) {
        order.push_back(d);
        if (2 * d < ln) order.push_back(-d);
    }
    return order;
}

long wrapped_distance(long a, long b, std::size_t n) { return wrap_shift(a - b, n); }

double penalty_value(long omega, const ShiftPenalty& p, std::size_t n) {
    double value = 0.0;
    if (p.previous) {
        const double d1 = static_cast<double>(wrapped_distance(omega, *p.previous, n));
        value += p.lambda * d1 * d1;
        if (p.before_previous && p.second_order > 0.0) {
            const double d0 =
                static_cast<double>(wrapped_distance(*p.previous, *p.before_previous, n));
            value += p.second_order * (d1 - d0) * (d1 - d0);
        }
    }
    return value;
}

/// Misfit of a against rho (.) P(a; K^k b), with optional outputs.
double misfit_at(std::span<const double> a, std::span<const double> b, double b_norm2,
                 std::size_t k, double* scaling_out, std::vector<bool>* mask_out) {
    const std::size_t n = a.size();
    double dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) dot += b[(i + n - k) % n] * a[i];
    const double h = b_norm2 > 0.0 ? dot / b_norm2 : 0.0;
    if (scaling_out) *scaling_out = h;
    if (mask_out) mask_out->assign(n, false);
    double j = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double p = h * b[(i + n - k) % n];
        double r = a[i];
        if (keep_entry(a[i], p)) {
            r = a[i] - p;
            if (mask_out) (*mask_out)[i] = true;
        }
        j += r * r;
    }
    return j;
}

double lambda_from_misfits(const std::vector<double>& misfits, double coefficient) {
    if (misfits.empty()) return 0.0;
    const auto [lo, hi] = std::minmax_element(misfits.begin(), misfits.end());
    const double c = *hi - *lo;
    if (!(c > 0.0)) return 0.0;
    return coefficient / (c * static_cast<double>(misfits.size()));
}

ShiftFit select_shift(const GridField& a, const GridField& b, const std::vector<double>& misfits,
                      const ShiftPenalty& penalty) {
    const std::size_t n = a.size();
    long best = 0;
    double best_value = std::numeric_limits<double>::infinity();
    for (long omega : scan_order(n)) {
        const double v = misfits[mod_index(omega, n)] + penalty_value(omega, penalty, n);
        if (v < best_value) {
            best_value = v;
            best = omega;
        }
    }
    ShiftFit fit;
    fit.shift = best;
    const double b2 = b.values().squaredNorm();
    fit.misfit = misfit_at(a.span(), b.span(), b2, mod_index(best, n), &fit.scaling, &fit.mask);
    return fit;
}

}  // namespace

Projection project(const GridField& a, const GridField& b) {
    if (a.size() != b.size()) throw DimensionError("project: length mismatch");
    const double b2 = b.values().squaredNorm();
    if (!(b2 > 0.0)) return {0.0, GridField(b.size())};
    const double h = b.values().dot(a.values()) / b2;
    return {h, GridField(Vector(h * b.values()))};
}

std::vector<bool> cutoff(const GridField& a, const GridField& scaled_pivot) {
    if (a.size() != scaled_pivot.size()) throw DimensionError("cutoff: length mismatch");
    std::vector<bool> rho(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) rho[i] = keep_entry(a[i], scaled_pivot[i]);
    return rho;
}

std::vector<double> shift_misfits(const GridField& a, const GridField& b) {
    if (a.size() != b.size()) throw DimensionError("shift_misfits: length mismatch");
    const std::size_t n = a.size();
    const double b2 = b.values().squaredNorm();
    std::vector<double> misfits(n);
    for (std::size_t k = 0; k < n; ++k) {
        misfits[k] = misfit_at(a.span(), b.span(), b2, k, nullptr, nullptr);
    }
    return misfits;
}

ShiftFit find_shift(const GridField& a, const GridField& b, const ShiftPenalty& penalty) {
    if (penalty.lambda < 0.0 || penalty.second_order < 0.0) {
        throw InvalidArgument("penalty weights must be nonnegative");
    }
    return select_shift(a, b, shift_misfits(a, b), penalty);
}

double adaptive_lambda(const GridField& a, const GridField& b, double coefficient) {
    return lambda_from_misfits(shift_misfits(a, b), coefficient);
}

void ReversalConfig::validate() const {
    if (max_iterations < 1) throw InvalidArgument("max_iterations must be at least 1");
    if (!(residual_tolerance >= 0.0)) throw InvalidArgument("residual tolerance must be >= 0");
    if (!(pivot_trigger > 0.0 && pivot_trigger <= 1.0)) {
        throw InvalidArgument("pivot trigger must lie in (0, 1]");
    }
    if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be >= 0");
    if (!(adaptive_coefficient >= 0.0)) throw InvalidArgument("adaptive coefficient must be >= 0");
    if (!(second_order_penalty >= 0.0)) throw InvalidArgument("second-order penalty must be >= 0");
}

double ReversalModel::final_residual_time_space() const {
    if (residual_history.empty() || n_cells == 0 || n_snaps == 0) return 0.0;
    return residual_history.back() / std::sqrt(static_cast<double>(n_cells * n_snaps));
}

void ReversalModel::validate() const {
    const std::size_t k = shifts.size();
    if (scalings.size() != k || cutoffs.size() != k || pivot_schedule.size() != k) {
        throw DimensionError("reversal model: per-iteration blocks disagree in count");
    }
    if (residual_history.size() != k + 1) {
        throw DimensionError("reversal model: residual history must have K+1 entries");
    }
    if (times.size() != n_snaps) throw DimensionError("reversal model: times length mismatch");
    for (const auto& b : pivots) {
        if (b.size() != n_cells) throw DimensionError("reversal model: pivot length mismatch");
    }
    for (std::size_t it = 0; it < k; ++it) {
        if (shifts[it].size() != n_snaps || scalings[it].size() != n_snaps) {
            throw DimensionError("reversal model: iteration block has wrong width");
        }
        if (cutoffs[it].rows() != n_cells || cutoffs[it].cols() != n_snaps) {
            throw DimensionError("reversal model: cut-off block has wrong shape");
        }
        if (pivot_schedule[it] >= pivots.size()) {
            throw DimensionError("reversal model: pivot index out of range");
        }
    }
}

ReversalModel greedy_reversal(const SnapshotMatrix& a, const ReversalConfig& cfg) {
    cfg.validate();
    const std::size_t n = a.n_cells();
    const std::size_t m = a.n_snaps();
    if (n == 0 || m == 0) throw DimensionError("greedy_reversal: empty snapshot matrix");
    if (!a.data().allFinite()) throw NumericalError("greedy_reversal: non-finite data");

    ReversalModel model;
    model.n_cells = n;
    model.n_snaps = m;
    model.times = a.times();

    Matrix residual = a.data();
    double r_old = residual.norm();
    model.residual_history.push_back(r_old);
    model.pivots.push_back(a.column(0));
    std::size_t next_column = 0;
    // misfit ranges below this are rounding noise
    const double flat_level = 1e-24 * r_old * r_old / static_cast<double>(m);

    std::size_t k = 0;
    while (r_old > cfg.residual_tolerance && k < cfg.max_iterations) {
        ++k;
        const std::size_t pivot_index = model.pivots.size() - 1;
        const GridField& b = model.pivots[pivot_index];

        std::vector<long> shifts(m);
        std::vector<double> scalings(m);
        // A column whose misfit is flat in omega got its shift by tie-break
        // only; it does not anchor the penalty of the next column.
        std::vector<bool> informative(m, false);
        CutoffMatrix mask(n, m, false);
        for (std::size_t j = 0; j < m; ++j) {
            const GridField column(Vector(residual.col(static_cast<Eigen::Index>(j))));
            const auto misfits = shift_misfits(column, b);
            const auto [lo, hi] = std::minmax_element(misfits.begin(), misfits.end());
            informative[j] = *hi - *lo > flat_level;
            ShiftPenalty penalty;
            penalty.lambda =
                cfg.adaptive_lambda ? lambda_from_misfits(misfits, cfg.adaptive_coefficient) : cfg.lambda;
            penalty.second_order = cfg.second_order_penalty;
            if (j >= 1 && informative[j - 1]) {
                penalty.previous = shifts[j - 1];
                if (j >= 2 && informative[j - 2]) penalty.before_previous = shifts[j - 2];
            }
            const ShiftFit fit = select_shift(column, b, misfits, penalty);
            shifts[j] = fit.shift;
            scalings[j] = fit.scaling;
            mask.set_column(j, fit.mask);
        }
        residual -= transport_pivot(b, shifts, scalings, &mask);
        if (!residual.allFinite()) throw NumericalError("greedy_reversal: residual became non-finite");

        const double r_new = residual.norm();
        model.shifts.push_back(std::move(shifts));
        model.scalings.push_back(std::move(scalings));
        model.cutoffs.push_back(std::move(mask));
        model.pivot_schedule.push_back(pivot_index);
        model.residual_history.push_back(r_new);

        const bool more = r_new > cfg.residual_tolerance && k < cfg.max_iterations;
        if (more && r_old > 0.0 && r_new / r_old > cfg.pivot_trigger) {
            switch (cfg.pivot_strategy) {
            case PivotStrategy::NextColumn:
                if (next_column + 1 < m) {
                    ++next_column;
                    model.pivots.emplace_back(Vector(residual.col(static_cast<Eigen::Index>(next_column))));
                }
                break;
            case PivotStrategy::MaxNormColumn: {
                Eigen::Index best = 0;
                residual.colwise().squaredNorm().maxCoeff(&best);
                model.pivots.emplace_back(Vector(residual.col(best)));
                break;
            }
            case PivotStrategy::Orthogonal:
                if (next_column + 1 < m) {
                    ++next_column;
                    Vector r = residual.col(static_cast<Eigen::Index>(next_column));
                    const double b2 = b.values().squaredNorm();
                    if (b2 > 0.0) r -= (r.dot(b.values()) / b2) * b.values();
                    model.pivots.emplace_back(std::move(r));
                }
                break;
            }
        }
        r_old = r_new;
    }
    return model;
}

Matrix iteration_contribution(const ReversalModel& model, std::size_t iteration) {
    if (iteration >= model.iterations()) throw DimensionError("iteration index out of range");
    const GridField& b = model.pivots.at(model.pivot_schedule[iteration]);
    return transport_pivot(b, model.shifts[iteration], model.scalings[iteration],
                           &model.cutoffs[iteration]);
}

SnapshotMatrix reconstruct(const ReversalModel& model) {
    model.validate();
    Matrix sum = Matrix::Zero(static_cast<Eigen::Index>(model.n_cells),
                              static_cast<Eigen::Index>(model.n_snaps));
    for (std::size_t k = 0; k < model.iterations(); ++k) sum += iteration_contribution(model, k);
    return SnapshotMatrix(std::move(sum), model.times);
}

}  // namespace transrev
