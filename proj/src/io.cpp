#include "transrev/io.hpp"

#include "transrev/errors.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <type_traits>

namespace transrev {

namespace {

constexpr const char* kSnapshotHeader = "# transport-reversal snapshot v1";
constexpr const char* kModelHeader = "# transport-reversal model v1";
constexpr int kFormatVersion = 1;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) parts.push_back(trim(cur));
    if (!s.empty() && s.back() == sep) parts.emplace_back();
    return parts;
}

template <class T>
std::string join(const std::vector<T>& v, char sep = ',') {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += sep;
        if constexpr (std::is_floating_point_v<T>) {
            out += format_double(v[i]);
        } else {
            out += std::to_string(v[i]);
        }
    }
    return out;
}

std::string join_strings(const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += v[i];
    }
    return out;
}

std::string join_vector(const Vector& v) {
    std::string out;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += format_double(v[i]);
    }
    return out;
}

std::vector<long> parse_long_list(const std::string& line) {
    std::vector<long> out;
    if (trim(line).empty()) return out;
    for (const auto& t : split(line, ',')) out.push_back(parse_long(t));
    return out;
}

Vector to_vector(const std::vector<double>& v, std::size_t expected, const char* what) {
    if (v.size() != expected) {
        throw IoError(std::string(what) + ": expected " + std::to_string(expected) + " values, got " +
                      std::to_string(v.size()));
    }
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

/// Column-per-line matrix block.
void write_columns(std::ostream& out, const Matrix& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << join_vector(m.col(j)) << '\n';
}

Matrix read_columns(const std::vector<std::string>& lines, std::size_t n, std::size_t m, const char* what) {
    if (lines.size() != m) {
        throw IoError(std::string(what) + ": expected " + std::to_string(m) + " rows, got " +
                      std::to_string(lines.size()));
    }
    Matrix out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    for (std::size_t j = 0; j < m; ++j) {
        out.col(static_cast<Eigen::Index>(j)) = to_vector(parse_double_list(lines[j]), n, what);
    }
    return out;
}

struct Sections {
    std::map<std::string, std::string> meta;
    std::map<std::string, std::vector<std::string>> blocks;

    const std::string& get(const std::string& key) const {
        auto it = meta.find(key);
        if (it == meta.end()) throw IoError("model file: missing meta key '" + key + "'");
        return it->second;
    }
    const std::vector<std::string>& block(const std::string& name) const {
        auto it = blocks.find(name);
        if (it == blocks.end()) throw IoError("model file: missing section [" + name + "]");
        return it->second;
    }
    std::size_t count(const std::string& key) const {
        const long v = parse_long(get(key));
        if (v < 0) throw IoError("model file: negative " + key);
        return static_cast<std::size_t>(v);
    }
};

Sections read_sections(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != kModelHeader) throw IoError("not a transport-reversal model file");
    Sections s;
    std::string current;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[' && t.back() == ']') {
            current = t.substr(1, t.size() - 2);
            s.blocks[current];
            continue;
        }
        if (current.empty()) throw IoError("model file: content before the first section");
        if (current == "meta") {
            const auto eq = t.find('=');
            if (eq == std::string::npos) throw IoError("model file: malformed meta line '" + t + "'");
            s.meta[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
        } else {
            s.blocks[current].push_back(t);
        }
    }
    if (parse_long(s.get("format_version")) != kFormatVersion) throw IoError("model file: unsupported version");
    return s;
}

void write_integer(std::ostream& out, const ReversalModel& m) {
    m.validate();
    out << "[meta]\nkind=integer\nformat_version=" << kFormatVersion << "\nn_cells=" << m.n_cells
        << "\nn_snaps=" << m.n_snaps << "\niterations=" << m.iterations() << "\nn_pivots=" << m.pivots.size()
        << "\npivot_schedule=" << join(m.pivot_schedule) << "\nresidual_history=" << join(m.residual_history)
        << "\ntimes=" << join(m.times) << "\n";
    out << "[pivots]\n";
    for (const auto& b : m.pivots) out << join_vector(b.values()) << '\n';
    out << "[shifts]\n";
    for (const auto& row : m.shifts) out << join(row) << '\n';
    out << "[scalings]\n";
    for (const auto& row : m.scalings) out << join(row) << '\n';
    out << "[cutoffs]\n";
    for (const auto& q : m.cutoffs) {
        for (std::size_t j = 0; j < q.cols(); ++j) out << encode_runs(q.column(j)) << '\n';
    }
}

ReversalModel read_integer(const Sections& s) {
    ReversalModel m;
    m.n_cells = s.count("n_cells");
    m.n_snaps = s.count("n_snaps");
    const std::size_t k = s.count("iterations");
    const std::size_t n_pivots = s.count("n_pivots");
    m.times = parse_double_list(s.get("times"));
    m.residual_history = parse_double_list(s.get("residual_history"));
    for (long v : parse_long_list(s.get("pivot_schedule"))) {
        if (v < 0) throw IoError("model file: negative pivot index");
        m.pivot_schedule.push_back(static_cast<std::size_t>(v));
    }
    const auto& pivots = s.block("pivots");
    if (pivots.size() != n_pivots) throw IoError("model file: pivot count mismatch");
    for (const auto& row : pivots) m.pivots.emplace_back(to_vector(parse_double_list(row), m.n_cells, "pivots"));
    const auto& shifts = s.block("shifts");
    const auto& scalings = s.block("scalings");
    const auto& cutoffs = s.block("cutoffs");
    if (shifts.size() != k || scalings.size() != k || cutoffs.size() != k * m.n_snaps) {
        throw IoError("model file: iteration blocks do not match the iteration count");
    }
    for (std::size_t it = 0; it < k; ++it) {
        m.shifts.push_back(parse_long_list(shifts[it]));
        m.scalings.push_back(parse_double_list(scalings[it]));
        CutoffMatrix q(m.n_cells, m.n_snaps, false);
        for (std::size_t j = 0; j < m.n_snaps; ++j) {
            q.set_column(j, decode_runs(cutoffs[it * m.n_snaps + j], m.n_cells));
        }
        m.cutoffs.push_back(std::move(q));
    }
    try {
        m.validate();
    } catch (const Error& e) {
        throw IoError(std::string("model file: ") + e.what());
    }
    return m;
}

void write_real(std::ostream& out, const RealModel& m) {
    const auto& r = m.reversal;
    out << "[meta]\nkind=real\nformat_version=" << kFormatVersion << "\nn_cells=" << r.reversed.n_cells()
        << "\nn_snaps=" << r.reversed.n_snaps() << "\ntimes=" << join(r.reversed.times()) << "\n";
    out << "[pivot]\n" << join_vector(m.pivot.values()) << '\n';
    out << "[shifts]\n" << join(r.shifts) << '\n';
    out << "[boundaries]\n";
    for (const auto& [l, rr] : r.boundaries) out << format_double(l) << ',' << format_double(rr) << '\n';
    out << "[reversed]\n";
    write_columns(out, r.reversed.data());
}

RealModel read_real(const Sections& s) {
    const std::size_t n = s.count("n_cells"), m = s.count("n_snaps");
    const auto& pivot = s.block("pivot");
    const auto& shifts = s.block("shifts");
    if (pivot.size() != 1 || shifts.size() != 1) throw IoError("model file: [pivot] and [shifts] need one row");
    RealModel model{GridField(to_vector(parse_double_list(pivot[0]), n, "pivot")), {}};
    model.reversal.shifts = parse_double_list(shifts[0]);
    if (model.reversal.shifts.size() != m) throw IoError("model file: shift count mismatch");
    const auto& bounds = s.block("boundaries");
    if (bounds.size() != m) throw IoError("model file: boundary count mismatch");
    for (const auto& row : bounds) {
        const auto v = parse_double_list(row);
        if (v.size() != 2) throw IoError("model file: boundary rows need two values");
        model.reversal.boundaries.emplace_back(v[0], v[1]);
    }
    model.reversal.reversed =
        SnapshotMatrix(read_columns(s.block("reversed"), n, m, "reversed"), parse_double_list(s.get("times")));
    return model;
}

void write_varspeed(std::ostream& out, const VarspeedModel& m) {
    const auto& r = m.reversal;
    out << "[meta]\nkind=varspeed\nformat_version=" << kFormatVersion << "\nn_cells=" << r.reversed.n_cells()
        << "\nn_snaps=" << r.reversed.n_snaps() << "\ngamma=" << format_double(m.pivot_map.trigger_gamma)
        << "\ntimes=" << join(r.reversed.times()) << "\n";
    out << "[velocity]\n" << join(m.velocity.speeds()) << '\n' << join(m.velocity.edges()) << '\n';
    out << "[pivot_map]\n" << join(m.pivot_map.map) << '\n';
    out << "[shifts]\n" << join(r.shifts) << '\n';
    out << "[reversed]\n";
    write_columns(out, r.reversed.data());
}

VarspeedModel read_varspeed(const Sections& s) {
    const std::size_t n = s.count("n_cells"), m = s.count("n_snaps");
    const auto& vel = s.block("velocity");
    if (vel.size() != 2) throw IoError("model file: [velocity] needs speeds and edges rows");
    auto speeds = parse_double_list(vel[0]);
    auto edges = parse_double_list(vel[1]);
    if (speeds.size() != n) throw IoError("model file: speed count mismatch");
    VelocityField velocity = [&] {
        try {
            return VelocityField(std::move(speeds), std::move(edges));
        } catch (const Error& e) {
            throw IoError(std::string("model file: ") + e.what());
        }
    }();
    PivotMap pm;
    pm.trigger_gamma = parse_double(s.get("gamma"));
    const auto& map = s.block("pivot_map");
    const auto& shifts = s.block("shifts");
    if (map.size() != 1 || shifts.size() != 1) throw IoError("model file: [pivot_map] and [shifts] need one row");
    for (long v : parse_long_list(map[0])) {
        if (v < 0) throw IoError("model file: negative pivot index");
        pm.map.push_back(static_cast<std::size_t>(v));
    }
    if (pm.map.size() != m) throw IoError("model file: pivot map size mismatch");
    VarspeedReversal rev{parse_double_list(shifts[0]),
                         SnapshotMatrix(read_columns(s.block("reversed"), n, m, "reversed"),
                                        parse_double_list(s.get("times")))};
    if (rev.shifts.size() != m) throw IoError("model file: shift count mismatch");
    return VarspeedModel{std::move(velocity), std::move(pm), std::move(rev)};
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return in;
}

}  // namespace

std::string model_kind(const AnyModel& model) {
    switch (model.index()) {
    case 0: return "integer";
    case 1: return "real";
    default: return "varspeed";
    }
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& token) {
    const std::string t = trim(token);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
        throw IoError("cannot parse number '" + t + "'");
    }
    return v;
}

long parse_long(const std::string& token) {
    const std::string t = trim(token);
    long v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
        throw IoError("cannot parse integer '" + t + "'");
    }
    return v;
}

std::vector<double> parse_double_list(const std::string& line) {
    std::vector<double> out;
    if (trim(line).empty()) return out;
    for (const auto& t : split(line, ',')) out.push_back(parse_double(t));
    return out;
}

void write_snapshots(std::ostream& out, const SnapshotMatrix& a) {
    out << kSnapshotHeader << '\n';
    out << "# N=" << a.n_cells() << " M=" << a.n_snaps() << '\n';
    out << "# times=" << join(a.times()) << '\n';
    write_columns(out, a.data());
    if (!out) throw IoError("failed writing snapshot data");
}

SnapshotMatrix read_snapshots(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != kSnapshotHeader) throw IoError("not a transport-reversal snapshot file");
    if (!std::getline(in, line)) throw IoError("snapshot file: missing size line");
    long n = -1, m = -1;
    {
        const std::string t = trim(line);
        if (t.rfind("# ", 0) != 0) throw IoError("snapshot file: malformed size line");
        for (const auto& kv : split(t.substr(2), ' ')) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) continue;
            if (kv.substr(0, eq) == "N") n = parse_long(kv.substr(eq + 1));
            if (kv.substr(0, eq) == "M") m = parse_long(kv.substr(eq + 1));
        }
    }
    if (n < 0 || m < 0) throw IoError("snapshot file: size line needs N and M");
    if (!std::getline(in, line) || trim(line).rfind("# times=", 0) != 0) throw IoError("snapshot file: missing times");
    const auto times = parse_double_list(trim(line).substr(8));
    std::vector<std::string> rows;
    while (std::getline(in, line)) {
        if (!trim(line).empty()) rows.push_back(line);
    }
    Matrix data = read_columns(rows, static_cast<std::size_t>(n), static_cast<std::size_t>(m), "snapshot file");
    try {
        return SnapshotMatrix(std::move(data), times);
    } catch (const Error& e) {
        throw IoError(std::string("snapshot file: ") + e.what());
    }
}

void save_snapshots(const std::string& path, const SnapshotMatrix& a) {
    auto out = open_out(path);
    write_snapshots(out, a);
}

SnapshotMatrix load_snapshots(const std::string& path) {
    auto in = open_in(path);
    return read_snapshots(in);
}

std::string encode_runs(const std::vector<bool>& bits) {
    if (bits.empty()) return "0:";
    std::string out = bits[0] ? "1:" : "0:";
    std::size_t run = 1;
    bool first = true;
    for (std::size_t i = 1; i <= bits.size(); ++i) {
        if (i < bits.size() && bits[i] == bits[i - 1]) {
            ++run;
            continue;
        }
        if (!first) out += ',';
        out += std::to_string(run);
        first = false;
        run = 1;
    }
    return out;
}

std::vector<bool> decode_runs(const std::string& row, std::size_t length) {
    const auto colon = row.find(':');
    if (colon == std::string::npos) throw IoError("cut-off row missing ':'");
    const std::string start = trim(row.substr(0, colon));
    if (start != "0" && start != "1") throw IoError("cut-off row has bad start bit");
    bool bit = start == "1";
    std::vector<bool> out;
    out.reserve(length);
    const std::string rest = trim(row.substr(colon + 1));
    if (!rest.empty()) {
        for (const auto& t : split(rest, ',')) {
            const long len = parse_long(t);
            if (len <= 0) throw IoError("cut-off run lengths must be positive");
            out.insert(out.end(), static_cast<std::size_t>(len), bit);
            bit = !bit;
        }
    }
    if (out.size() != length) throw IoError("cut-off row decodes to the wrong length");
    return out;
}

void write_model(std::ostream& out, const AnyModel& model) {
    out << kModelHeader << '\n';
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ReversalModel>) write_integer(out, m);
            else if constexpr (std::is_same_v<T, RealModel>) write_real(out, m);
            else write_varspeed(out, m);
        },
        model);
    if (!out) throw IoError("failed writing model");
}

AnyModel read_model(std::istream& in) {
    const Sections s = read_sections(in);
    const std::string& kind = s.get("kind");
    if (kind == "integer") return read_integer(s);
    if (kind == "real") return read_real(s);
    if (kind == "varspeed") return read_varspeed(s);
    throw IoError("model file: unknown kind '" + kind + "'");
}

void save_model(const std::string& path, const AnyModel& model) {
    auto out = open_out(path);
    write_model(out, model);
}

AnyModel load_model(const std::string& path) {
    auto in = open_in(path);
    return read_model(in);
}

void write_csv(std::ostream& out, const Table& table) {
    out << join_strings(table.columns) << '\n';
    for (const auto& row : table.rows) out << join(row) << '\n';
}

void save_csv(const std::string& path, const Table& table) {
    auto out = open_out(path);
    write_csv(out, table);
    if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace transrev
