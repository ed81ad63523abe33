#include "transrev/experiment.hpp"

#include "transrev/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace transrev {

using json = nlohmann::ordered_json;

namespace {

std::string to_string(ReversalMethod m) {
    switch (m) {
    case ReversalMethod::Integer: return "integer";
    case ReversalMethod::Real: return "real";
    case ReversalMethod::Varspeed: return "varspeed";
    }
    return "integer";
}

ReversalMethod method_from_string(const std::string& s) {
    if (s == "integer") return ReversalMethod::Integer;
    if (s == "real") return ReversalMethod::Real;
    if (s == "varspeed") return ReversalMethod::Varspeed;
    throw InvalidArgument("unknown reversal method '" + s + "'");
}

std::string to_string(PivotStrategy p) {
    switch (p) {
    case PivotStrategy::NextColumn: return "next-column";
    case PivotStrategy::MaxNormColumn: return "max-norm-column";
    case PivotStrategy::Orthogonal: return "orthogonal";
    }
    return "next-column";
}

PivotStrategy strategy_from_string(const std::string& s) {
    if (s == "next-column") return PivotStrategy::NextColumn;
    if (s == "max-norm-column") return PivotStrategy::MaxNormColumn;
    if (s == "orthogonal") return PivotStrategy::Orthogonal;
    throw InvalidArgument("unknown pivot strategy '" + s + "'");
}

json to_json(const ExperimentConfig& c) {
    const ProblemSpec& p = c.spec;
    json j;
    j["preset"] = c.preset;
    j["problem"] = {
        {"kind", to_string(p.problem)}, {"n_cells", p.n_cells}, {"n_snapshots", p.n_snapshots},
        {"final_time", p.final_time}, {"courant", p.courant}, {"speed", p.speed}, {"decay", p.decay},
        {"density", p.density}, {"bulk_modulus", p.bulk_modulus}, {"density_left", p.density_left},
        {"bulk_left", p.bulk_left}, {"density_right", p.density_right}, {"bulk_right", p.bulk_right},
        {"interface", p.interface}, {"initial", to_string(p.initial)}, {"center", p.center},
        {"width", p.width}, {"amplitude", p.amplitude}, {"twin_offset", p.twin_offset},
        {"twin_ratio", p.twin_ratio}, {"sampling", to_string(p.sampling)},
    };
    j["generate"] = {{"characteristics", c.characteristics}};
    j["reversal"] = {
        {"method", to_string(c.method)},
        {"max_iterations", c.greedy.max_iterations},
        {"residual_tolerance", c.greedy.residual_tolerance},
        {"pivot_trigger", c.greedy.pivot_trigger},
        {"adaptive_lambda", c.greedy.adaptive_lambda},
        {"lambda", c.greedy.lambda},
        {"adaptive_coefficient", c.greedy.adaptive_coefficient},
        {"second_order_penalty", c.greedy.second_order_penalty},
        {"pivot_strategy", to_string(c.greedy.pivot_strategy)},
        {"gamma", c.gamma},
        {"sharpen", c.sharpen},
    };
    j["pod"] = {
        {"criterion", c.pod.kind == RankCriterion::Kind::Energy ? "energy" : "rank"},
        {"epsilon", c.pod.epsilon},
        {"rank", c.pod.rank},
        {"subtract_mean", c.subtract_mean},
    };
    j["output_dir"] = c.output_dir;
    j["seed"] = c.seed;
    return j;
}

template <class T>
void take(const json& obj, const char* key, T& target) {
    if (obj.contains(key)) target = obj.at(key).get<T>();
}

void check_keys(const json& obj, const json& reference, const std::string& where) {
    if (!obj.is_object()) throw InvalidArgument("config: '" + where + "' must be an object");
    for (const auto& [key, value] : obj.items()) {
        if (!reference.contains(key)) throw InvalidArgument("config: unknown key '" + where + key + "'");
        if (reference.at(key).is_object()) check_keys(value, reference.at(key), where + key + ".");
    }
}

ExperimentConfig from_json(const json& j) {
    ExperimentConfig c;
    check_keys(j, to_json(c), "");
    if (j.contains("preset")) c = preset(j.at("preset").get<std::string>());
    if (j.contains("problem")) {
        const json& p = j.at("problem");
        ProblemSpec& s = c.spec;
        if (p.contains("kind")) s.problem = problem_from_string(p.at("kind").get<std::string>());
        take(p, "n_cells", s.n_cells);
        take(p, "n_snapshots", s.n_snapshots);
        take(p, "final_time", s.final_time);
        take(p, "courant", s.courant);
        take(p, "speed", s.speed);
        take(p, "decay", s.decay);
        take(p, "density", s.density);
        take(p, "bulk_modulus", s.bulk_modulus);
        take(p, "density_left", s.density_left);
        take(p, "bulk_left", s.bulk_left);
        take(p, "density_right", s.density_right);
        take(p, "bulk_right", s.bulk_right);
        take(p, "interface", s.interface);
        if (p.contains("initial")) s.initial = initial_from_string(p.at("initial").get<std::string>());
        take(p, "center", s.center);
        take(p, "width", s.width);
        take(p, "amplitude", s.amplitude);
        take(p, "twin_offset", s.twin_offset);
        take(p, "twin_ratio", s.twin_ratio);
        if (p.contains("sampling")) s.sampling = sampling_from_string(p.at("sampling").get<std::string>());
    }
    if (j.contains("generate")) take(j.at("generate"), "characteristics", c.characteristics);
    if (j.contains("reversal")) {
        const json& r = j.at("reversal");
        if (r.contains("method")) c.method = method_from_string(r.at("method").get<std::string>());
        take(r, "max_iterations", c.greedy.max_iterations);
        take(r, "residual_tolerance", c.greedy.residual_tolerance);
        take(r, "pivot_trigger", c.greedy.pivot_trigger);
        take(r, "adaptive_lambda", c.greedy.adaptive_lambda);
        take(r, "lambda", c.greedy.lambda);
        take(r, "adaptive_coefficient", c.greedy.adaptive_coefficient);
        take(r, "second_order_penalty", c.greedy.second_order_penalty);
        if (r.contains("pivot_strategy")) {
            c.greedy.pivot_strategy = strategy_from_string(r.at("pivot_strategy").get<std::string>());
        }
        take(r, "gamma", c.gamma);
        take(r, "sharpen", c.sharpen);
    }
    if (j.contains("pod")) {
        const json& p = j.at("pod");
        if (p.contains("criterion")) {
            const auto kind = p.at("criterion").get<std::string>();
            if (kind == "energy") c.pod.kind = RankCriterion::Kind::Energy;
            else if (kind == "rank") c.pod.kind = RankCriterion::Kind::FixedRank;
            else throw InvalidArgument("pod.criterion must be 'energy' or 'rank'");
        }
        take(p, "epsilon", c.pod.epsilon);
        take(p, "rank", c.pod.rank);
        take(p, "subtract_mean", c.subtract_mean);
    }
    take(j, "output_dir", c.output_dir);
    take(j, "seed", c.seed);
    c.validate();
    return c;
}

}  // namespace

void ExperimentConfig::validate() const {
    spec.validate();
    greedy.validate();
    if (!(gamma > 0.0)) throw InvalidArgument("reversal.gamma must be positive");
    if (pod.kind == RankCriterion::Kind::Energy && !(pod.epsilon > 0.0 && pod.epsilon < 1.0)) {
        throw InvalidArgument("pod.epsilon must lie in (0, 1)");
    }
}

std::vector<std::string> preset_names() {
    return {"identity", "p1-advection-source", "p2-advection-absorbing", "p3-acoustic-homogeneous",
            "acoustic-heterogeneous", "p4-burgers"};
}

ExperimentConfig preset(const std::string& name) {
    ExperimentConfig c;
    c.preset = name;
    ProblemSpec& s = c.spec;
    if (name == "custom") return c;
    if (name == "identity") {
        s.problem = ProblemKind::AdvectionPeriodic;
        s.initial = InitialKind::DeltaAtFirstCell;
        s.courant = 1.0;
        s.final_time = static_cast<double>(s.n_snapshots - 1) / static_cast<double>(s.n_cells);
    } else if (name == "p1-advection-source") {
        s.problem = ProblemKind::AdvectionSource;
        s.decay = 1.0;
    } else if (name == "p2-advection-absorbing") {
        s.problem = ProblemKind::AdvectionAbsorbing;
    } else if (name == "p3-acoustic-homogeneous") {
        s.problem = ProblemKind::AcousticHomogeneous;
        c.greedy.max_iterations = 15;
        c.greedy.pivot_trigger = 1.0;
        // the adaptive weight grows as the residual shrinks and freezes the shifts
        c.greedy.adaptive_lambda = false;
    } else if (name == "acoustic-heterogeneous") {
        s.problem = ProblemKind::AcousticHeterogeneous;
        c.characteristics = true;
        c.method = ReversalMethod::Varspeed;
        c.gamma = 0.15;
        c.pod = RankCriterion::energy(0.1);
    } else if (name == "p4-burgers") {
        s.problem = ProblemKind::Burgers;
        s.initial = InitialKind::TwinGaussians;
        s.amplitude = 0.5;
        c.greedy.max_iterations = 30;
        c.greedy.pivot_trigger = 0.9;
        c.greedy.adaptive_lambda = false;
    } else {
        throw InvalidArgument("unknown preset '" + name + "'");
    }
    return c;
}

std::string to_json_text(const ExperimentConfig& cfg) { return to_json(cfg).dump(2); }

ExperimentConfig config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
    }
    try {
        return from_json(j);
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("config has a value of the wrong type: ") + e.what());
    }
}

void apply_override(ExperimentConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw InvalidArgument("override must look like key=value");
    const std::string key = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    json j = to_json(cfg);
    json* node = &j;
    std::size_t start = 0;
    for (;;) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (!node->is_object() || !node->contains(part)) throw InvalidArgument("unknown config key '" + key + "'");
        node = &(*node)[part];
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    if (node->is_object()) throw InvalidArgument("config key '" + key + "' is a section");
    json value;
    if (node->is_string()) {
        value = raw;
    } else {
        try {
            value = json::parse(raw);
        } catch (const json::exception&) {
            throw InvalidArgument("cannot parse value '" + raw + "' for '" + key + "'");
        }
    }
    *node = value;
    if (key == "preset") {
        // selecting a preset replaces every other setting
        cfg = preset(raw);
        return;
    }
    j.erase("preset");
    ExperimentConfig updated = [&] {
        try {
            return from_json(j);
        } catch (const json::exception& e) {
            throw InvalidArgument("bad value for '" + key + "': " + e.what());
        }
    }();
    updated.preset = cfg.preset;
    cfg = std::move(updated);
}

SolveResult generate(const ExperimentConfig& cfg) {
    cfg.validate();
    SolveResult r = solve(cfg.spec);
    if (cfg.characteristics && r.medium) {
        auto [r1, r2] = characteristic_snapshots(r);
        r.names.push_back("r1");
        r.fields.push_back(std::move(r1));
        r.names.push_back("r2");
        r.fields.push_back(std::move(r2));
    }
    return r;
}

VelocityField experiment_velocity(const ExperimentConfig& cfg) {
    if (cfg.spec.acoustic()) return make_medium(cfg.spec).velocity();
    return VelocityField::constant(cfg.spec.n_cells, cfg.spec.speed);
}

AnyModel reverse(const ExperimentConfig& cfg, const SnapshotMatrix& a) {
    cfg.validate();
    switch (cfg.method) {
    case ReversalMethod::Integer:
        return greedy_reversal(a, cfg.greedy);
    case ReversalMethod::Real: {
        if (a.n_snaps() == 0) throw DimensionError("no snapshots to reverse");
        GridField pivot = a.column(0);
        RealReversal rev = reverse_real(a, pivot);
        return RealModel{std::move(pivot), std::move(rev)};
    }
    case ReversalMethod::Varspeed: {
        VelocityField c = experiment_velocity(cfg);
        if (c.n_cells() != a.n_cells()) throw DimensionError("snapshot size does not match the configured grid");
        PivotMap pm = build_pivot_map(a, cfg.gamma);
        VarspeedReversal rev = reverse_varspeed(a, c, pm);
        return VarspeedModel{std::move(c), std::move(pm), std::move(rev)};
    }
    }
    throw InvalidArgument("unknown reversal method");
}

namespace {

Matrix truncated(const SnapshotMatrix& a, std::size_t rank) {
    if (rank == 0 || rank >= std::min(a.n_cells(), a.n_snaps())) return a.data();
    return reduce(a, RankCriterion::fixed(rank)).reconstruct();
}

}  // namespace

Matrix model_reconstruction(const ExperimentConfig& cfg, const AnyModel& model, std::size_t rank) {
    if (const auto* m = std::get_if<ReversalModel>(&model)) return reconstruct(*m).data();
    if (const auto* m = std::get_if<RealModel>(&model)) {
        const auto& r = m->reversal;
        const SnapshotMatrix low = r.reversed.with_data(truncated(r.reversed, rank));
        if (cfg.sharpen) return sharpened_reconstruct(low, r.shifts, r.boundaries).data();
        return forward_transport(low, r.shifts).data();
    }
    const auto& m = std::get<VarspeedModel>(model);
    const SnapshotMatrix low = m.reversal.reversed.with_data(truncated(m.reversal.reversed, rank));
    return varspeed_forward(low, m.velocity, m.reversal.shifts).data();
}

Matrix model_reversed(const AnyModel& model, const SnapshotMatrix& a) {
    if (const auto* m = std::get_if<ReversalModel>(&model)) {
        if (m->iterations() == 0) return a.data();
        std::vector<long> back(m->shifts[0].size());
        std::transform(m->shifts[0].begin(), m->shifts[0].end(), back.begin(), [](long s) { return -s; });
        return transport_columns(a, back).data();
    }
    if (const auto* m = std::get_if<RealModel>(&model)) return m->reversal.reversed.data();
    return std::get<VarspeedModel>(model).reversal.reversed.data();
}

Comparison compare(const ExperimentConfig& cfg, const SnapshotMatrix& a, const AnyModel& model) {
    const Matrix reversed = model_reversed(model, a);
    if (reversed.rows() != a.data().rows() || reversed.cols() != a.data().cols()) {
        throw DimensionError("model and snapshot shapes differ");
    }
    Comparison out;
    const Vector sigma_rev = singular_values(reversed);
    const Vector sigma_plain = singular_values(a.data());
    std::size_t rank;
    if (cfg.pod.kind == RankCriterion::Kind::FixedRank) {
        rank = cfg.pod.rank;
    } else if (std::holds_alternative<ReversalModel>(model)) {
        rank = std::get<ReversalModel>(model).iterations();
    } else {
        rank = energy_rank(sigma_rev, cfg.pod.epsilon);
    }
    rank = std::min<std::size_t>(rank, static_cast<std::size_t>(sigma_plain.size()));
    out.rank = rank;

    const Matrix recon = model_reconstruction(cfg, model, rank);
    const Matrix pod = reduce(a, RankCriterion::fixed(rank), cfg.subtract_mean).reconstruct();
    const auto err_rev = column_errors(a.data(), recon);
    const auto err_pod = column_errors(a.data(), pod);

    out.errors.columns = {"snapshot_index", "time", "err_reversal", "err_pod"};
    for (std::size_t j = 0; j < a.n_snaps(); ++j) {
        out.errors.rows.push_back({static_cast<double>(j), a.times()[j], err_rev[j], err_pod[j]});
    }
    out.modes.columns = {"mode_index", "sigma_reversed", "sigma_plain"};
    for (Eigen::Index k = 0; k < sigma_plain.size(); ++k) {
        out.modes.rows.push_back({static_cast<double>(k + 1), sigma_rev[k], sigma_plain[k]});
    }
    return out;
}

Table pod_table(const ExperimentConfig& cfg, const SnapshotMatrix& a, std::size_t* rank) {
    const SvdReduction red = reduce(a, cfg.pod, cfg.subtract_mean);
    if (rank) *rank = red.rank;
    Table t;
    t.columns = {"mode_index", "sigma", "energy_fraction", "cumulative_energy"};
    const double total = red.singular_values.squaredNorm();
    double cumulative = 0.0;
    for (Eigen::Index k = 0; k < red.singular_values.size(); ++k) {
        const double e = total > 0.0 ? red.singular_values[k] * red.singular_values[k] / total : 0.0;
        cumulative += e;
        t.rows.push_back({static_cast<double>(k + 1), red.singular_values[k], e, cumulative});
    }
    return t;
}

Table residual_table(const AnyModel& model) {
    const auto* m = std::get_if<ReversalModel>(&model);
    if (!m) throw InvalidArgument("residual history exists only for integer greedy models");
    Table t;
    t.columns = {"iteration", "residual_frobenius", "residual_time_space", "pivot"};
    const double scale = std::sqrt(static_cast<double>(m->n_cells * m->n_snaps));
    // one row per iteration, residual after it; the starting norm is |A|
    for (std::size_t k = 1; k < m->residual_history.size(); ++k) {
        const double pivot = static_cast<double>(m->pivot_schedule[k - 1]);
        t.rows.push_back({static_cast<double>(k), m->residual_history[k],
                          scale > 0.0 ? m->residual_history[k] / scale : 0.0, pivot});
    }
    return t;
}

Table shift_table(const AnyModel& model) {
    Table t;
    t.columns = {"column"};
    if (const auto* m = std::get_if<ReversalModel>(&model)) {
        for (std::size_t k = 0; k < m->iterations(); ++k) t.columns.push_back("shift_" + std::to_string(k + 1));
        for (std::size_t j = 0; j < m->n_snaps; ++j) {
            std::vector<double> row{static_cast<double>(j)};
            for (std::size_t k = 0; k < m->iterations(); ++k) row.push_back(static_cast<double>(m->shifts[k][j]));
            t.rows.push_back(std::move(row));
        }
        return t;
    }
    const std::vector<double>& shifts = std::holds_alternative<RealModel>(model)
                                            ? std::get<RealModel>(model).reversal.shifts
                                            : std::get<VarspeedModel>(model).reversal.shifts;
    t.columns.push_back("shift");
    for (std::size_t j = 0; j < shifts.size(); ++j) t.rows.push_back({static_cast<double>(j), shifts[j]});
    return t;
}

SharpenReport sharpen_report(const SnapshotMatrix& a, const AnyModel& model) {
    const auto* m = std::get_if<RealModel>(&model);
    if (!m) throw InvalidArgument("sharpening needs a real-shift model");
    const auto& r = m->reversal;
    if (r.reversed.n_cells() != a.n_cells() || r.reversed.n_snaps() != a.n_snaps()) {
        throw DimensionError("model and snapshot shapes differ");
    }
    SharpenReport out{sharpened_reconstruct(r.reversed, r.shifts, r.boundaries), {}};
    const Matrix plain = forward_transport(r.reversed, r.shifts).data();
    const auto e_plain = column_errors(a.data(), plain);
    const auto e_sharp = column_errors(a.data(), out.sharpened.data());
    out.errors.columns = {"snapshot_index", "time", "err_plain", "err_sharpened"};
    for (std::size_t j = 0; j < a.n_snaps(); ++j) {
        out.errors.rows.push_back({static_cast<double>(j), a.times()[j], e_plain[j], e_sharp[j]});
    }
    return out;
}

}  // namespace transrev
