#pragma once

#include "transrev/grid.hpp"
#include "transrev/reversal_integer.hpp"
#include "transrev/reversal_real.hpp"
#include "transrev/reversal_varspeed.hpp"

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace transrev {

/// Real-shift reversal together with what reconstruction needs.
struct RealModel {
    GridField pivot;
    RealReversal reversal;
};

struct VarspeedModel {
    VelocityField velocity;
    PivotMap pivot_map;
    VarspeedReversal reversal;
};

using AnyModel = std::variant<ReversalModel, RealModel, VarspeedModel>;

std::string model_kind(const AnyModel& model);

/// Shortest "%.17g" text of a double.
std::string format_double(double v);
/// Strict parse of a full token; throws IoError.
double parse_double(const std::string& token);
long parse_long(const std::string& token);
std::vector<double> parse_double_list(const std::string& line);

void write_snapshots(std::ostream& out, const SnapshotMatrix& a);
SnapshotMatrix read_snapshots(std::istream& in);
void save_snapshots(const std::string& path, const SnapshotMatrix& a);
SnapshotMatrix load_snapshots(const std::string& path);

/// Run-length row "startbit:len,len,..." for one cut-off column.
std::string encode_runs(const std::vector<bool>& bits);
std::vector<bool> decode_runs(const std::string& row, std::size_t length);

void write_model(std::ostream& out, const AnyModel& model);
AnyModel read_model(std::istream& in);
void save_model(const std::string& path, const AnyModel& model);
AnyModel load_model(const std::string& path);

/// Named-column numeric table written as CSV.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};
void write_csv(std::ostream& out, const Table& table);
void save_csv(const std::string& path, const Table& table);

}  // namespace transrev
