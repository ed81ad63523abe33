#include "transrev/transrev.h"

#include "transrev/errors.hpp"
#include "transrev/experiment.hpp"

#include <cstring>
#include <exception>
#include <new>
#include <string>

struct tr_experiment {
    transrev::ExperimentConfig cfg;
};
struct tr_snapshot_set {
    transrev::SolveResult result;
};
struct tr_snapshots {
    transrev::SnapshotMatrix data;
};
struct tr_model {
    transrev::AnyModel model;
    std::string kind;
};
struct tr_table {
    transrev::Table table;
};

namespace {

thread_local std::string g_last_error;

template <class F>
tr_status guarded(F&& body) {
    try {
        body();
        g_last_error.clear();
        return TR_OK;
    } catch (const transrev::ConstantVectorError& e) {
        g_last_error = e.what();
        return TR_ERR_CONSTANT_VECTOR;
    } catch (const transrev::CflError& e) {
        g_last_error = e.what();
        return TR_ERR_CFL;
    } catch (const transrev::DimensionError& e) {
        g_last_error = e.what();
        return TR_ERR_DIMENSION;
    } catch (const transrev::InvalidArgument& e) {
        g_last_error = e.what();
        return TR_ERR_INVALID_ARGUMENT;
    } catch (const transrev::NumericalError& e) {
        g_last_error = e.what();
        return TR_ERR_NUMERICAL;
    } catch (const transrev::IoError& e) {
        g_last_error = e.what();
        return TR_ERR_IO;
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return TR_ERR_UNKNOWN;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return TR_ERR_UNKNOWN;
    } catch (...) {
        g_last_error = "unknown error";
        return TR_ERR_UNKNOWN;
    }
}

void require(const void* p, const char* what) {
    if (!p) throw transrev::InvalidArgument(std::string(what) + " must not be null");
}

char* duplicate(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

}  // namespace

extern "C" {

const char* tr_last_error(void) { return g_last_error.c_str(); }

const char* tr_status_name(tr_status status) {
    switch (status) {
    case TR_OK: return "ok";
    case TR_ERR_INVALID_ARGUMENT: return "invalid argument";
    case TR_ERR_DIMENSION: return "dimension mismatch";
    case TR_ERR_NUMERICAL: return "numerical failure";
    case TR_ERR_CONSTANT_VECTOR: return "constant vector";
    case TR_ERR_CFL: return "CFL violation";
    case TR_ERR_IO: return "I/O error";
    case TR_ERR_UNKNOWN: break;
    }
    return "unknown error";
}

void tr_string_free(char* s) { delete[] s; }

size_t tr_preset_count(void) { return transrev::preset_names().size(); }

const char* tr_preset_name(size_t index) {
    static const std::vector<std::string> names = transrev::preset_names();
    return index < names.size() ? names[index].c_str() : nullptr;
}

tr_status tr_experiment_create(const char* preset, tr_experiment** out) {
    return guarded([&] {
        require(out, "out");
        *out = new tr_experiment{transrev::preset(preset ? preset : "custom")};
    });
}

tr_status tr_experiment_from_json(const char* json_text, tr_experiment** out) {
    return guarded([&] {
        require(json_text, "json_text");
        require(out, "out");
        *out = new tr_experiment{transrev::config_from_json_text(json_text)};
    });
}

tr_status tr_experiment_set(tr_experiment* exp, const char* assignment) {
    return guarded([&] {
        require(exp, "experiment");
        require(assignment, "assignment");
        transrev::apply_override(exp->cfg, assignment);
    });
}

tr_status tr_experiment_to_json(const tr_experiment* exp, char** out_json) {
    return guarded([&] {
        require(exp, "experiment");
        require(out_json, "out_json");
        *out_json = duplicate(transrev::to_json_text(exp->cfg));
    });
}

tr_status tr_experiment_output_dir(const tr_experiment* exp, char** out_dir) {
    return guarded([&] {
        require(exp, "experiment");
        require(out_dir, "out_dir");
        *out_dir = duplicate(exp->cfg.output_dir);
    });
}

void tr_experiment_destroy(tr_experiment* exp) { delete exp; }

tr_status tr_generate(const tr_experiment* exp, tr_snapshot_set** out) {
    return guarded([&] {
        require(exp, "experiment");
        require(out, "out");
        *out = new tr_snapshot_set{transrev::generate(exp->cfg)};
    });
}

size_t tr_snapshot_set_count(const tr_snapshot_set* set) { return set ? set->result.names.size() : 0; }

const char* tr_snapshot_set_name(const tr_snapshot_set* set, size_t index) {
    if (!set || index >= set->result.names.size()) return nullptr;
    return set->result.names[index].c_str();
}

tr_status tr_snapshot_set_get(const tr_snapshot_set* set, size_t index, tr_snapshots** out) {
    return guarded([&] {
        require(set, "set");
        require(out, "out");
        if (index >= set->result.fields.size()) throw transrev::InvalidArgument("snapshot set index out of range");
        *out = new tr_snapshots{set->result.fields[index]};
    });
}

void tr_snapshot_set_destroy(tr_snapshot_set* set) { delete set; }

tr_status tr_snapshots_create(size_t n_cells, size_t n_snaps, const double* data, const double* times,
                              tr_snapshots** out) {
    return guarded([&] {
        require(out, "out");
        if (n_cells * n_snaps > 0) require(data, "data");
        transrev::Matrix m(static_cast<Eigen::Index>(n_cells), static_cast<Eigen::Index>(n_snaps));
        if (n_cells * n_snaps > 0) std::memcpy(m.data(), data, sizeof(double) * n_cells * n_snaps);
        if (times) {
            *out = new tr_snapshots{transrev::SnapshotMatrix(std::move(m), std::vector<double>(times, times + n_snaps))};
        } else {
            *out = new tr_snapshots{transrev::SnapshotMatrix(std::move(m))};
        }
    });
}

tr_status tr_snapshots_load(const char* path, tr_snapshots** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new tr_snapshots{transrev::load_snapshots(path)};
    });
}

tr_status tr_snapshots_save(const tr_snapshots* s, const char* path) {
    return guarded([&] {
        require(s, "snapshots");
        require(path, "path");
        transrev::save_snapshots(path, s->data);
    });
}

tr_status tr_snapshots_dims(const tr_snapshots* s, size_t* n_cells, size_t* n_snaps) {
    return guarded([&] {
        require(s, "snapshots");
        if (n_cells) *n_cells = s->data.n_cells();
        if (n_snaps) *n_snaps = s->data.n_snaps();
    });
}

tr_status tr_snapshots_copy_data(const tr_snapshots* s, double* out, size_t length) {
    return guarded([&] {
        require(s, "snapshots");
        const auto size = static_cast<size_t>(s->data.data().size());
        if (length < size) throw transrev::DimensionError("output buffer too small");
        if (size > 0) {
            require(out, "out");
            std::memcpy(out, s->data.data().data(), sizeof(double) * size);
        }
    });
}

tr_status tr_snapshots_copy_times(const tr_snapshots* s, double* out, size_t length) {
    return guarded([&] {
        require(s, "snapshots");
        const auto& t = s->data.times();
        if (length < t.size()) throw transrev::DimensionError("output buffer too small");
        if (!t.empty()) {
            require(out, "out");
            std::memcpy(out, t.data(), sizeof(double) * t.size());
        }
    });
}

void tr_snapshots_destroy(tr_snapshots* s) { delete s; }

tr_status tr_reverse(const tr_experiment* exp, const tr_snapshots* s, tr_model** out) {
    return guarded([&] {
        require(exp, "experiment");
        require(s, "snapshots");
        require(out, "out");
        auto model = transrev::reverse(exp->cfg, s->data);
        std::string kind = transrev::model_kind(model);
        *out = new tr_model{std::move(model), std::move(kind)};
    });
}

tr_status tr_model_load(const char* path, tr_model** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        auto model = transrev::load_model(path);
        std::string kind = transrev::model_kind(model);
        *out = new tr_model{std::move(model), std::move(kind)};
    });
}

tr_status tr_model_save(const tr_model* model, const char* path) {
    return guarded([&] {
        require(model, "model");
        require(path, "path");
        transrev::save_model(path, model->model);
    });
}

const char* tr_model_kind(const tr_model* model) { return model ? model->kind.c_str() : nullptr; }

tr_status tr_model_reconstruct(const tr_experiment* exp, const tr_model* model, size_t rank, tr_snapshots** out) {
    return guarded([&] {
        require(exp, "experiment");
        require(model, "model");
        require(out, "out");
        transrev::Matrix m = transrev::model_reconstruction(exp->cfg, model->model, rank);
        std::vector<double> times;
        if (const auto* im = std::get_if<transrev::ReversalModel>(&model->model)) {
            times = im->times;
        } else if (const auto* rm = std::get_if<transrev::RealModel>(&model->model)) {
            times = rm->reversal.reversed.times();
        } else {
            times = std::get<transrev::VarspeedModel>(model->model).reversal.reversed.times();
        }
        *out = new tr_snapshots{transrev::SnapshotMatrix(std::move(m), std::move(times))};
    });
}

tr_status tr_model_residuals(const tr_model* model, tr_table** out) {
    return guarded([&] {
        require(model, "model");
        require(out, "out");
        *out = new tr_table{transrev::residual_table(model->model)};
    });
}

tr_status tr_model_shifts(const tr_model* model, tr_table** out) {
    return guarded([&] {
        require(model, "model");
        require(out, "out");
        *out = new tr_table{transrev::shift_table(model->model)};
    });
}

void tr_model_destroy(tr_model* model) { delete model; }

tr_status tr_compare(const tr_experiment* exp, const tr_snapshots* s, const tr_model* model, tr_table** errors,
                     tr_table** modes, size_t* rank) {
    return guarded([&] {
        require(exp, "experiment");
        require(s, "snapshots");
        require(model, "model");
        require(errors, "errors");
        require(modes, "modes");
        auto cmp = transrev::compare(exp->cfg, s->data, model->model);
        if (rank) *rank = cmp.rank;
        *errors = new tr_table{std::move(cmp.errors)};
        *modes = new tr_table{std::move(cmp.modes)};
    });
}

tr_status tr_pod(const tr_experiment* exp, const tr_snapshots* s, tr_table** out, size_t* rank) {
    return guarded([&] {
        require(exp, "experiment");
        require(s, "snapshots");
        require(out, "out");
        std::size_t r = 0;
        *out = new tr_table{transrev::pod_table(exp->cfg, s->data, &r)};
        if (rank) *rank = r;
    });
}

tr_status tr_pod_reconstruct(const tr_experiment* exp, const tr_snapshots* s, size_t rank, tr_snapshots** out) {
    return guarded([&] {
        require(exp, "experiment");
        require(s, "snapshots");
        require(out, "out");
        const auto red = transrev::reduce(s->data, transrev::RankCriterion::fixed(rank), exp->cfg.subtract_mean);
        *out = new tr_snapshots{transrev::SnapshotMatrix(red.reconstruct(), s->data.times())};
    });
}

tr_status tr_sharpen(const tr_snapshots* s, const tr_model* model, tr_snapshots** sharpened, tr_table** errors) {
    return guarded([&] {
        require(s, "snapshots");
        require(model, "model");
        require(sharpened, "sharpened");
        require(errors, "errors");
        auto report = transrev::sharpen_report(s->data, model->model);
        *sharpened = new tr_snapshots{std::move(report.sharpened)};
        *errors = new tr_table{std::move(report.errors)};
    });
}

size_t tr_table_rows(const tr_table* t) { return t ? t->table.rows.size() : 0; }

size_t tr_table_cols(const tr_table* t) { return t ? t->table.columns.size() : 0; }

const char* tr_table_column_name(const tr_table* t, size_t col) {
    if (!t || col >= t->table.columns.size()) return nullptr;
    return t->table.columns[col].c_str();
}

tr_status tr_table_value(const tr_table* t, size_t row, size_t col, double* out) {
    return guarded([&] {
        require(t, "table");
        require(out, "out");
        if (row >= t->table.rows.size() || col >= t->table.rows[row].size()) {
            throw transrev::DimensionError("table index out of range");
        }
        *out = t->table.rows[row][col];
    });
}

tr_status tr_table_save_csv(const tr_table* t, const char* path) {
    return guarded([&] {
        require(t, "table");
        require(path, "path");
        transrev::save_csv(path, t->table);
    });
}

void tr_table_destroy(tr_table* t) { delete t; }

}  // extern "C"
