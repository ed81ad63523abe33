#include "oracles.hpp"

#include "transrev/errors.hpp"
#include "transrev/experiment.hpp"
#include "transrev/io.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace transrev;

namespace {

std::string model_text(const AnyModel& m) {
    std::ostringstream out;
    write_model(out, m);
    return out.str();
}

AnyModel round_trip(const AnyModel& m) {
    std::istringstream in(model_text(m));
    return read_model(in);
}

ExperimentConfig small(const std::string& name) {
    ExperimentConfig c = preset(name);
    c.spec.n_cells = 40;
    c.spec.n_snapshots = 12;
    return c;
}

}  // namespace

TEST_CASE("numbers print and parse exactly") {
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int t = 0; t < 200; ++t) {
        const double x = u(rng) * std::pow(10.0, double(t % 40) - 20.0);
        CHECK(parse_double(format_double(x)) == x);
    }
    CHECK(parse_double(format_double(0.1)) == 0.1);
    CHECK_THROWS_AS(parse_double("1.5x"), IoError);
    CHECK_THROWS_AS(parse_double(""), IoError);
    CHECK_THROWS_AS(parse_long("3.5"), IoError);
    CHECK(parse_double_list("1, 2.5,-3") == std::vector<double>{1, 2.5, -3});
}

TEST_CASE("snapshot files round-trip bit for bit") {
    std::mt19937_64 rng(52);
    const SnapshotMatrix a(oracle::random_matrix(rng, 7, 5), {0.0, 0.1, 0.2, 0.3, 1.0 / 3.0});
    std::stringstream buf;
    write_snapshots(buf, a);
    const SnapshotMatrix b = read_snapshots(buf);
    CHECK(b == a);
    CHECK(b.times() == a.times());

    std::istringstream junk("not a snapshot file\n");
    CHECK_THROWS_AS(read_snapshots(junk), IoError);
    CHECK_THROWS_AS(load_snapshots("/nonexistent/dir/a.txt"), IoError);
}

TEST_CASE("run-length rows") {
    const std::vector<std::vector<bool>> cases{
        {}, {true}, {false}, {true, true, false, true}, {false, false, false}, {true, false, true, false, true}};
    for (const auto& bits : cases) CHECK(decode_runs(encode_runs(bits), bits.size()) == bits);
    std::mt19937_64 rng(53);
    std::bernoulli_distribution coin(0.3);
    for (int t = 0; t < 50; ++t) {
        std::vector<bool> bits(97);
        for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = coin(rng);
        CHECK(decode_runs(encode_runs(bits), bits.size()) == bits);
    }
    CHECK_THROWS_AS(decode_runs(encode_runs({true, false}), 3), IoError);
}

TEST_CASE("integer model round-trip") {
    const ExperimentConfig c = small("p3-acoustic-homogeneous");
    const SolveResult r = generate(c);
    const AnyModel m = reverse(c, r.fields[0]);
    const AnyModel back = round_trip(m);
    CHECK(model_kind(back) == "integer");
    CHECK(std::get<ReversalModel>(back) == std::get<ReversalModel>(m));
    CHECK(model_text(back) == model_text(m));
}

TEST_CASE("real and variable-speed models round-trip") {
    ExperimentConfig c = small("p1-advection-source");
    c.method = ReversalMethod::Real;
    const SolveResult r = generate(c);
    const AnyModel m = reverse(c, r.fields[0]);
    CHECK(model_kind(m) == "real");
    const AnyModel back = round_trip(m);
    CHECK(model_text(back) == model_text(m));
    CHECK(model_reconstruction(c, back, 0) == model_reconstruction(c, m, 0));

    ExperimentConfig v = small("acoustic-heterogeneous");
    const SolveResult rv = generate(v);
    const AnyModel mv = reverse(v, rv.field("r2"));
    CHECK(model_kind(mv) == "varspeed");
    const AnyModel bv = round_trip(mv);
    CHECK(model_text(bv) == model_text(mv));
    CHECK(model_reconstruction(v, bv, 2) == model_reconstruction(v, mv, 2));
}

TEST_CASE("truncated model files are rejected") {
    const ExperimentConfig c = small("identity");
    const AnyModel m = reverse(c, generate(c).fields[0]);
    const std::string text = model_text(m);
    std::istringstream in(text.substr(0, text.size() / 2));
    CHECK_THROWS_AS(read_model(in), IoError);
}

TEST_CASE("configuration json") {
    for (const auto& name : preset_names()) {
        const ExperimentConfig c = preset(name);
        CHECK_NOTHROW(c.validate());
        CHECK(to_json_text(config_from_json_text(to_json_text(c))) == to_json_text(c));
    }
    CHECK_THROWS_AS(preset("p9"), InvalidArgument);
    CHECK_THROWS_AS(config_from_json_text(R"({"problem": {"n_cels": 3}})"), InvalidArgument);
    CHECK_THROWS_AS(config_from_json_text(R"({"colour": 1})"), InvalidArgument);
    CHECK_THROWS(config_from_json_text("{"));

    const ExperimentConfig p = config_from_json_text(R"({"preset": "p4-burgers", "problem": {"n_cells": 64}})");
    CHECK(p.spec.problem == ProblemKind::Burgers);
    CHECK(p.spec.n_cells == 64);
    CHECK(p.spec.n_snapshots == preset("p4-burgers").spec.n_snapshots);
}

TEST_CASE("dotted overrides") {
    ExperimentConfig c = preset("identity");
    apply_override(c, "problem.n_cells=64");
    apply_override(c, "reversal.method=real");
    apply_override(c, "pod.epsilon=0.05");
    CHECK(c.spec.n_cells == 64);
    CHECK(c.method == ReversalMethod::Real);
    CHECK(c.pod.epsilon == 0.05);
    CHECK_THROWS_AS(apply_override(c, "problem.nope=1"), InvalidArgument);
    CHECK_THROWS_AS(apply_override(c, "no-equals-sign"), InvalidArgument);
    CHECK_THROWS_AS(apply_override(c, "problem.n_cells=abc"), InvalidArgument);
}

TEST_CASE("compare table of the identity problem") {
    ExperimentConfig c = preset("identity");
    c.spec.n_cells = c.spec.n_snapshots = 20;
    c.spec.final_time = 19.0 / 20.0;
    const SnapshotMatrix a = generate(c).fields[0];
    const AnyModel m = reverse(c, a);
    const Comparison cmp = compare(c, a, m);
    CHECK(cmp.rank == 1);
    CHECK(cmp.errors.rows.size() == 20);
    CHECK(cmp.errors.columns == std::vector<std::string>{"snapshot_index", "time", "err_reversal", "err_pod"});
    // one POD mode of a scaled identity captures a single snapshot at most
    std::size_t missed = 0;
    for (const auto& row : cmp.errors.rows) {
        CHECK(row[2] < 1e-12);
        if (row[3] > 0.5) ++missed;
    }
    CHECK(missed >= 19);
    CHECK(cmp.modes.rows.front()[1] == doctest::Approx(20.0 * std::sqrt(20.0)));

    const Table res = residual_table(m);
    CHECK(res.rows.size() == 1);
    CHECK(res.rows.back()[1] < 1e-12);
    std::ostringstream csv;
    write_csv(csv, res);
    CHECK(csv.str().rfind("iteration,residual_frobenius,residual_time_space,pivot\n", 0) == 0);
}
