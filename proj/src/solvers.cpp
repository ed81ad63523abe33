#include "transrev/solvers.hpp"

#include "transrev/core_ops.hpp"
#include "transrev/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace transrev {

namespace {

using State = std::vector<Vector>;

double periodic_distance(double x, double y) {
    double d = std::abs(x - y);
    d -= std::floor(d);
    return std::min(d, 1.0 - d);
}

double gaussian(double x, double centre, double width, bool periodic) {
    const double d = periodic ? periodic_distance(x, centre) : x - centre;
    return std::exp(-d * d / (2.0 * width * width));
}

double max_wave_speed(const ProblemSpec& spec, const GridField& u0, const std::optional<AcousticMedium>& medium) {
    switch (spec.problem) {
    case ProblemKind::AdvectionPeriodic:
    case ProblemKind::AdvectionSource:
    case ProblemKind::AdvectionAbsorbing:
        return spec.speed;
    case ProblemKind::AcousticHomogeneous:
    case ProblemKind::AcousticHeterogeneous: {
        double c = 0.0;
        for (std::size_t i = 0; i < medium->n_cells(); ++i) c = std::max(c, medium->sound_speed(i));
        return c;
    }
    case ProblemKind::Burgers: {
        const double m = u0.max_abs();
        return m > 0.0 ? m : 1.0;
    }
    }
    return 1.0;
}

class Stepper {
public:
    Stepper(const ProblemSpec& spec, std::optional<AcousticMedium> medium)
        : spec_(spec), medium_(std::move(medium)), h_(1.0 / static_cast<double>(spec.n_cells)) {}

    /// Courant numbers within 1e-12 of an integer are snapped so that unit
    /// steps stay exact permutations.
    double courant_for(double dt, double speed) const {
        double nu = speed * dt / h_;
        const double r = std::round(nu);
        if (std::abs(nu - r) <= 1e-12) nu = r;
        if (nu > 1.0) throw CflError("Courant number " + std::to_string(nu) + " exceeds 1");
        return nu;
    }

    void advance(State& s, double dt) const {
        switch (spec_.problem) {
        case ProblemKind::AdvectionPeriodic:
            s[0] = shift_fractional(GridField(s[0]), courant_for(dt, spec_.speed)).values();
            break;
        case ProblemKind::AdvectionSource:
            s[0] = shift_fractional(GridField(s[0]), courant_for(dt, spec_.speed)).values();
            s[0] *= std::exp(-spec_.decay * dt);
            break;
        case ProblemKind::AdvectionAbsorbing: {
            const double nu = courant_for(dt, spec_.speed);
            Vector& u = s[0];
            const Eigen::Index n = u.size();
            // Zero-order extrapolation ghosts: the inflow ghost equals u_0,
            // the outflow side needs no ghost for upwinding.
            for (Eigen::Index i = n - 1; i >= 1; --i) u[i] = (1.0 - nu) * u[i] + nu * u[i - 1];
            break;
        }
        case ProblemKind::AcousticHomogeneous:
        case ProblemKind::AcousticHeterogeneous:
            acoustic_step(s, dt);
            break;
        case ProblemKind::Burgers:
            burgers_step(s[0], dt);
            break;
        }
    }

private:
    void acoustic_step(State& s, double dt) const {
        const AcousticMedium& m = *medium_;
        Vector& p = s[0];
        Vector& u = s[1];
        const std::size_t n = m.n_cells();
        const double ratio = dt / h_;
        Vector dp = Vector::Zero(static_cast<Eigen::Index>(n));
        Vector du = Vector::Zero(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t l = (i + n - 1) % n;
            const auto li = static_cast<Eigen::Index>(l), ri = static_cast<Eigen::Index>(i);
            const double zl = m.impedance(l), zr = m.impedance(i);
            const double cl = courant_for(dt, m.sound_speed(l)) / ratio;
            const double cr = courant_for(dt, m.sound_speed(i)) / ratio;
            const double jp = p[ri] - p[li];
            const double ju = u[ri] - u[li];
            const double a1 = (-jp + zr * ju) / (zl + zr);
            const double a2 = (jp + zl * ju) / (zl + zr);
            // left-going wave a1 (-zl, 1) with speed -cl updates the left cell
            dp[li] -= ratio * (-cl) * a1 * (-zl);
            du[li] -= ratio * (-cl) * a1;
            // right-going wave a2 (zr, 1) with speed cr updates the right cell
            dp[ri] -= ratio * cr * a2 * zr;
            du[ri] -= ratio * cr * a2;
        }
        p += dp;
        u += du;
    }

    static double godunov_flux(double ul, double ur) {
        auto f = [](double v) { return 0.5 * v * v; };
        if (ul <= ur) {
            if (ul > 0.0) return f(ul);
            if (ur < 0.0) return f(ur);
            return 0.0;
        }
        return std::max(f(ul), f(ur));
    }

    void burgers_step(Vector& u, double dt) const {
        const Eigen::Index n = u.size();
        const double peak = u.cwiseAbs().maxCoeff();
        if (peak * dt / h_ > 1.0 + 1e-12) throw CflError("Burgers step violates the CFL condition");
        Vector flux(n);  // flux[i] at the left face of cell i
        for (Eigen::Index i = 0; i < n; ++i) flux[i] = godunov_flux(u[(i + n - 1) % n], u[i]);
        const double ratio = dt / h_;
        for (Eigen::Index i = 0; i < n; ++i) u[i] -= ratio * (flux[(i + 1) % n] - flux[i]);
    }

    const ProblemSpec& spec_;
    std::optional<AcousticMedium> medium_;
    double h_;
};

}  // namespace

void ProblemSpec::validate() const {
    if (n_cells < 1 || n_snapshots < 1) throw InvalidArgument("n_cells and n_snapshots must be at least 1");
    if (!(final_time > 0.0) || !std::isfinite(final_time)) throw InvalidArgument("final_time must be positive");
    if (!(courant > 0.0 && courant <= 1.0)) throw CflError("courant must lie in (0, 1]");
    if (!(speed > 0.0)) throw InvalidArgument("advection speed must be positive");
    if (!(decay > 0.0)) throw InvalidArgument("decay rate must be positive");
    if (!(density > 0.0 && bulk_modulus > 0.0 && density_left > 0.0 && bulk_left > 0.0 && density_right > 0.0 &&
          bulk_right > 0.0)) {
        throw InvalidArgument("material parameters must be positive");
    }
    if (!(interface > 0.0 && interface < 1.0)) throw InvalidArgument("interface must lie in (0, 1)");
    if (!(width > 0.0)) throw InvalidArgument("pulse width must be positive");
    if (!std::isfinite(amplitude) || !std::isfinite(center)) throw InvalidArgument("pulse parameters must be finite");
}

const SnapshotMatrix& SolveResult::field(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return fields[i];
    }
    throw InvalidArgument("no field named '" + name + "'");
}

std::vector<double> chebyshev_times(std::size_t m, double final_time) {
    std::vector<double> t(m);
    for (std::size_t k = 1; k <= m; ++k) {
        const double angle = std::numbers::pi * static_cast<double>(2 * k - 1) / static_cast<double>(2 * m);
        t[k - 1] = final_time * (1.0 - std::cos(angle)) / 2.0;
    }
    return t;
}

std::vector<double> snapshot_times(const ProblemSpec& spec) {
    const std::size_t m = spec.n_snapshots;
    if (spec.sampling == Sampling::Chebyshev) return chebyshev_times(m, spec.final_time);
    if (m == 1) return {spec.final_time};
    std::vector<double> t(m);
    for (std::size_t j = 0; j < m; ++j) {
        t[j] = spec.final_time * static_cast<double>(j) / static_cast<double>(m - 1);
    }
    return t;
}

GridField initial_condition(const ProblemSpec& spec) {
    const std::size_t n = spec.n_cells;
    const double h = 1.0 / static_cast<double>(n);
    Vector u = Vector::Zero(static_cast<Eigen::Index>(n));
    const bool periodic = spec.problem != ProblemKind::AdvectionAbsorbing;
    switch (spec.initial) {
    case InitialKind::DeltaAtFirstCell:
        u[0] = spec.amplitude / h;
        break;
    case InitialKind::GaussianPulse:
        for (std::size_t i = 0; i < n; ++i) {
            const double x = (static_cast<double>(i) + 0.5) * h;
            u[static_cast<Eigen::Index>(i)] = spec.amplitude * gaussian(x, spec.center, spec.width, periodic);
        }
        break;
    case InitialKind::TwinGaussians:
        for (std::size_t i = 0; i < n; ++i) {
            const double x = (static_cast<double>(i) + 0.5) * h;
            u[static_cast<Eigen::Index>(i)] =
                spec.amplitude * (gaussian(x, spec.center, spec.width, periodic) +
                                  spec.twin_ratio * gaussian(x, spec.center + spec.twin_offset, spec.width, periodic));
        }
        break;
    }
    return GridField(std::move(u));
}

AcousticMedium make_medium(const ProblemSpec& spec) {
    const std::size_t n = spec.n_cells;
    AcousticMedium m{std::vector<double>(n), std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        const double x = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        if (spec.problem == ProblemKind::AcousticHeterogeneous) {
            const bool left = x < spec.interface;
            m.density[i] = left ? spec.density_left : spec.density_right;
            m.bulk_modulus[i] = left ? spec.bulk_left : spec.bulk_right;
        } else {
            m.density[i] = spec.density;
            m.bulk_modulus[i] = spec.bulk_modulus;
        }
    }
    m.validate();
    return m;
}

SolveResult solve(const ProblemSpec& spec) {
    spec.validate();
    const std::size_t n = spec.n_cells;
    const std::size_t m = spec.n_snapshots;
    const double h = 1.0 / static_cast<double>(n);

    SolveResult result;
    if (spec.acoustic()) result.medium = make_medium(spec);

    const GridField u0 = initial_condition(spec);
    State state;
    if (spec.acoustic()) {
        // p carries the pulse; for the heterogeneous case u = p / Z makes it right-going.
        Vector p = u0.values();
        Vector u = Vector::Zero(p.size());
        if (spec.problem == ProblemKind::AcousticHeterogeneous) {
            for (std::size_t i = 0; i < n; ++i) {
                u[static_cast<Eigen::Index>(i)] = p[static_cast<Eigen::Index>(i)] / result.medium->impedance(i);
            }
        }
        state = {p, u};
        result.names = {"p", "u"};
    } else {
        state = {u0.values()};
        result.names = {"u"};
    }

    const double speed = max_wave_speed(spec, u0, result.medium);
    const double dt_target = spec.courant * h / speed;
    const std::size_t intervals = std::max<std::size_t>(m - 1, 1);
    const double per = spec.final_time / (static_cast<double>(intervals) * dt_target);
    const auto steps_per_interval = static_cast<std::size_t>(std::max(1.0, std::ceil(per - 1e-9)));
    const std::size_t n_steps = intervals * steps_per_interval;
    const double dt = spec.final_time / static_cast<double>(n_steps);
    result.time_step = dt;
    result.n_steps = n_steps;

    const std::vector<double> times = snapshot_times(spec);
    // Target step index and leftover time for every snapshot.
    std::vector<std::size_t> base(m);
    std::vector<double> leftover(m, 0.0);
    if (spec.sampling == Sampling::Uniform) {
        for (std::size_t j = 0; j < m; ++j) base[j] = m == 1 ? n_steps : j * steps_per_interval;
    } else {
        for (std::size_t j = 0; j < m; ++j) {
            auto k = static_cast<std::size_t>(std::floor(times[j] / dt + 1e-9));
            k = std::min(k, n_steps);
            const double rest = times[j] - static_cast<double>(k) * dt;
            base[j] = k;
            leftover[j] = rest > 1e-12 * dt ? rest : 0.0;
        }
    }

    const Stepper stepper(spec, result.medium);
    std::vector<Matrix> data(state.size(), Matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m)));
    std::size_t step = 0;
    for (std::size_t j = 0; j < m; ++j) {
        while (step < base[j]) {
            stepper.advance(state, dt);
            ++step;
        }
        State snap = state;
        if (leftover[j] > 0.0) stepper.advance(snap, leftover[j]);
        for (std::size_t f = 0; f < state.size(); ++f) {
            if (!snap[f].allFinite()) throw NumericalError("solver produced non-finite values");
            data[f].col(static_cast<Eigen::Index>(j)) = snap[f];
        }
    }
    for (auto& d : data) result.fields.emplace_back(std::move(d), times);
    return result;
}

SolveResult snapshot_at_chebyshev_times(ProblemSpec spec) {
    spec.sampling = Sampling::Chebyshev;
    return solve(spec);
}

std::pair<SnapshotMatrix, SnapshotMatrix> characteristic_snapshots(const SolveResult& acoustic) {
    if (!acoustic.medium) throw InvalidArgument("characteristic variables need an acoustic solution");
    const SnapshotMatrix& p = acoustic.field("p");
    const SnapshotMatrix& u = acoustic.field("u");
    Matrix r1(p.data().rows(), p.data().cols()), r2(p.data().rows(), p.data().cols());
    for (std::size_t j = 0; j < p.n_snaps(); ++j) {
        auto [a, b] = characteristic_decompose(p.column(j), u.column(j), *acoustic.medium);
        r1.col(static_cast<Eigen::Index>(j)) = a.values();
        r2.col(static_cast<Eigen::Index>(j)) = b.values();
    }
    return {p.with_data(std::move(r1)), p.with_data(std::move(r2))};
}

namespace {

template <class E>
struct Named {
    E value;
    const char* name;
};

constexpr Named<ProblemKind> kProblems[] = {
    {ProblemKind::AdvectionPeriodic, "advection-periodic"},
    {ProblemKind::AdvectionSource, "advection-source"},
    {ProblemKind::AdvectionAbsorbing, "advection-absorbing"},
    {ProblemKind::AcousticHomogeneous, "acoustic-homogeneous"},
    {ProblemKind::AcousticHeterogeneous, "acoustic-heterogeneous"},
    {ProblemKind::Burgers, "burgers"},
};

constexpr Named<InitialKind> kInitials[] = {
    {InitialKind::DeltaAtFirstCell, "delta"},
    {InitialKind::GaussianPulse, "gaussian"},
    {InitialKind::TwinGaussians, "twin-gaussians"},
};

constexpr Named<Sampling> kSamplings[] = {
    {Sampling::Uniform, "uniform"},
    {Sampling::Chebyshev, "chebyshev"},
};

template <class E, std::size_t N>
std::string name_of(const Named<E> (&table)[N], E value) {
    for (const auto& e : table) {
        if (e.value == value) return e.name;
    }
    return "unknown";
}

template <class E, std::size_t N>
E value_of(const Named<E> (&table)[N], const std::string& name, const char* what) {
    for (const auto& e : table) {
        if (name == e.name) return e.value;
    }
    throw InvalidArgument(std::string("unknown ") + what + " '" + name + "'");
}

}  // namespace

std::string to_string(ProblemKind kind) { return name_of(kProblems, kind); }
ProblemKind problem_from_string(const std::string& name) { return value_of(kProblems, name, "problem"); }
std::string to_string(InitialKind kind) { return name_of(kInitials, kind); }
InitialKind initial_from_string(const std::string& name) { return value_of(kInitials, name, "initial condition"); }
std::string to_string(Sampling s) { return name_of(kSamplings, s); }
Sampling sampling_from_string(const std::string& name) { return value_of(kSamplings, name, "sampling"); }

}  // namespace transrev
