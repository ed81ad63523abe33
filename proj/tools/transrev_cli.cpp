// Command-line driver over the C interface.
#include "transrev/transrev.h"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitIo = 3;

struct Failure {
    tr_status status;
    std::string message;
};

int exit_code(tr_status s) {
    switch (s) {
    case TR_OK: return kExitOk;
    case TR_ERR_INVALID_ARGUMENT: return kExitUsage;
    case TR_ERR_IO: return kExitIo;
    default: return kExitNumerical;
    }
}

void check(tr_status s, const std::string& context) {
    if (s != TR_OK) throw Failure{s, context + ": " + tr_last_error()};
}

template <class T, void (*Destroy)(T*)>
struct Handle {
    T* ptr = nullptr;
    Handle() = default;
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    ~Handle() { Destroy(ptr); }
    T** out() { return &ptr; }
    T* get() const { return ptr; }
};

using Experiment = Handle<tr_experiment, tr_experiment_destroy>;
using SnapshotSet = Handle<tr_snapshot_set, tr_snapshot_set_destroy>;
using Snapshots = Handle<tr_snapshots, tr_snapshots_destroy>;
using Model = Handle<tr_model, tr_model_destroy>;
using TableHandle = Handle<tr_table, tr_table_destroy>;

struct Options {
    std::string config;
    std::string preset;
    std::string out;
    bool quiet = false;
    std::vector<std::string> overrides;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Failure{TR_ERR_IO, "cannot read config '" + path + "'"};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void load_experiment(const Options& opt, Experiment& exp) {
    if (!opt.config.empty()) {
        check(tr_experiment_from_json(read_file(opt.config).c_str(), exp.out()), "config");
        if (!opt.preset.empty()) check(tr_experiment_set(exp.get(), ("preset=" + opt.preset).c_str()), "preset");
    } else {
        check(tr_experiment_create(opt.preset.empty() ? "custom" : opt.preset.c_str(), exp.out()), "preset");
    }
    for (const auto& o : opt.overrides) check(tr_experiment_set(exp.get(), o.c_str()), "--set " + o);
    if (!opt.out.empty()) check(tr_experiment_set(exp.get(), ("output_dir=" + opt.out).c_str()), "--out");
}

fs::path output_dir(const Experiment& exp) {
    char* dir = nullptr;
    check(tr_experiment_output_dir(exp.get(), &dir), "output_dir");
    fs::path p(dir);
    tr_string_free(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw Failure{TR_ERR_IO, "cannot create output directory '" + p.string() + "': " + ec.message()};
    return p;
}

void say(const Options& opt, const std::string& line) {
    if (!opt.quiet) std::cout << line << '\n';
}

void save_table(const TableHandle& t, const fs::path& path, const Options& opt) {
    check(tr_table_save_csv(t.get(), path.string().c_str()), "write " + path.string());
    say(opt, "wrote " + path.string());
}

void run_generate(const Options& opt) {
    Experiment exp;
    load_experiment(opt, exp);
    const fs::path dir = output_dir(exp);
    SnapshotSet set;
    check(tr_generate(exp.get(), set.out()), "generate");
    for (size_t i = 0; i < tr_snapshot_set_count(set.get()); ++i) {
        Snapshots s;
        check(tr_snapshot_set_get(set.get(), i, s.out()), "generate");
        const fs::path path = dir / (std::string(tr_snapshot_set_name(set.get(), i)) + ".snap");
        check(tr_snapshots_save(s.get(), path.string().c_str()), "write " + path.string());
        say(opt, "wrote " + path.string());
    }
}

void run_reverse(const Options& opt, const std::string& input, const std::string& model_name) {
    Experiment exp;
    load_experiment(opt, exp);
    const fs::path dir = output_dir(exp);
    Snapshots s;
    check(tr_snapshots_load(input.c_str(), s.out()), "read " + input);
    Model m;
    check(tr_reverse(exp.get(), s.get(), m.out()), "reverse");
    const fs::path model_path = dir / model_name;
    check(tr_model_save(m.get(), model_path.string().c_str()), "write " + model_path.string());
    say(opt, "wrote " + model_path.string());
    if (std::string(tr_model_kind(m.get())) == "integer") {
        TableHandle r;
        check(tr_model_residuals(m.get(), r.out()), "residuals");
        save_table(r, dir / "residuals.csv", opt);
        const size_t rows = tr_table_rows(r.get());
        double res = 0.0;
        if (rows > 0) check(tr_table_value(r.get(), rows - 1, 2, &res), "residuals");
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6e", res);
        say(opt, "iterations " + std::to_string(rows) + ", time-space residual " + buf);
    }
    TableHandle sh;
    check(tr_model_shifts(m.get(), sh.out()), "shifts");
    save_table(sh, dir / "shifts.csv", opt);
}

void run_pod(const Options& opt, const std::string& input) {
    Experiment exp;
    load_experiment(opt, exp);
    const fs::path dir = output_dir(exp);
    Snapshots s;
    check(tr_snapshots_load(input.c_str(), s.out()), "read " + input);
    TableHandle t;
    size_t rank = 0;
    check(tr_pod(exp.get(), s.get(), t.out(), &rank), "pod");
    save_table(t, dir / "pod.csv", opt);
    say(opt, "rank " + std::to_string(rank));
}

void run_compare(const Options& opt, const std::string& input, const std::string& model_path) {
    Experiment exp;
    load_experiment(opt, exp);
    const fs::path dir = output_dir(exp);
    Snapshots s;
    check(tr_snapshots_load(input.c_str(), s.out()), "read " + input);
    Model m;
    check(tr_model_load(model_path.c_str(), m.out()), "read " + model_path);
    TableHandle errors, modes;
    size_t rank = 0;
    check(tr_compare(exp.get(), s.get(), m.get(), errors.out(), modes.out(), &rank), "compare");
    save_table(errors, dir / "compare_errors.csv", opt);
    save_table(modes, dir / "compare_modes.csv", opt);
    Snapshots rev, pod;
    check(tr_model_reconstruct(exp.get(), m.get(), rank, rev.out()), "reconstruct");
    check(tr_pod_reconstruct(exp.get(), s.get(), rank, pod.out()), "reconstruct");
    for (const auto& [snaps, name] : {std::pair{&rev, "reconstruction.snap"}, std::pair{&pod, "pod_reconstruction.snap"}}) {
        const fs::path path = dir / name;
        check(tr_snapshots_save(snaps->get(), path.string().c_str()), "write " + path.string());
        say(opt, "wrote " + path.string());
    }
    size_t wins = 0;
    const size_t rows = tr_table_rows(errors.get());
    for (size_t r = 0; r < rows; ++r) {
        double er = 0, ep = 0;
        check(tr_table_value(errors.get(), r, 2, &er), "compare");
        check(tr_table_value(errors.get(), r, 3, &ep), "compare");
        wins += er <= ep;
    }
    say(opt, "rank " + std::to_string(rank) + ", reversal error <= POD error on " + std::to_string(wins) + "/" +
                 std::to_string(rows) + " snapshots");
}

void run_sharpen(const Options& opt, const std::string& input, const std::string& model_path) {
    Experiment exp;
    load_experiment(opt, exp);
    const fs::path dir = output_dir(exp);
    Snapshots s;
    check(tr_snapshots_load(input.c_str(), s.out()), "read " + input);
    Model m;
    check(tr_model_load(model_path.c_str(), m.out()), "read " + model_path);
    Snapshots sharp;
    TableHandle errors;
    check(tr_sharpen(s.get(), m.get(), sharp.out(), errors.out()), "sharpen");
    const fs::path out = dir / "sharpened.snap";
    check(tr_snapshots_save(sharp.get(), out.string().c_str()), "write " + out.string());
    say(opt, "wrote " + out.string());
    save_table(errors, dir / "sharpen_errors.csv", opt);
}

void run_config(const Options& opt) {
    Experiment exp;
    load_experiment(opt, exp);
    char* text = nullptr;
    check(tr_experiment_to_json(exp.get(), &text), "config");
    std::cout << text << '\n';
    tr_string_free(text);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Transport reversal for snapshot matrices of hyperbolic problems"};
    app.require_subcommand(1);
    Options opt;
    app.add_option("--config", opt.config, "JSON experiment configuration")->check(CLI::ExistingFile);
    std::string preset_help = "Problem preset:";
    for (size_t i = 0; i < tr_preset_count(); ++i) preset_help += std::string(" ") + tr_preset_name(i);
    app.add_option("--preset", opt.preset, preset_help);
    app.add_option("--out", opt.out, "Output directory");
    app.add_flag("--quiet", opt.quiet, "Suppress progress output");
    app.add_option("--set", opt.overrides, "Override a config value, e.g. problem.n_cells=64")->take_all();

    std::string input, model, model_name = "model.txt";
    auto* gen = app.add_subcommand("generate", "Solve the configured problem and write snapshot files");
    auto* rev = app.add_subcommand("reverse", "Reverse a snapshot file and write the model");
    rev->add_option("snapshots", input, "Snapshot file")->required();
    rev->add_option("--model-name", model_name, "Model file name inside the output directory");
    auto* pod = app.add_subcommand("pod", "Singular values and energy rank of a snapshot file");
    pod->add_option("snapshots", input, "Snapshot file")->required();
    auto* cmp = app.add_subcommand("compare", "Per-snapshot errors of reversal versus plain POD");
    cmp->add_option("snapshots", input, "Snapshot file")->required();
    cmp->add_option("model", model, "Model file")->required();
    auto* shp = app.add_subcommand("sharpen", "Sharpened reconstruction of a real-shift model");
    shp->add_option("snapshots", input, "Snapshot file")->required();
    shp->add_option("model", model, "Model file")->required();
    auto* cfg = app.add_subcommand("config", "Print the effective configuration as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*gen) run_generate(opt);
        else if (*rev) run_reverse(opt, input, model_name);
        else if (*pod) run_pod(opt, input);
        else if (*cmp) run_compare(opt, input, model);
        else if (*shp) run_sharpen(opt, input, model);
        else if (*cfg) run_config(opt);
    } catch (const Failure& f) {
        std::cerr << "error: " << f.message << '\n';
        return exit_code(f.status);
    }
    return kExitOk;
}
