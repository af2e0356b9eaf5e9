#include "cdcg/expr_data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "cdcg/csv.hpp"
#include "cdcg/error.hpp"

namespace cdcg {

namespace {

void check_unique(const std::vector<std::string>& ids, const char* what) {
    std::unordered_set<std::string> seen;
    for (const auto& id : ids) {
        if (!seen.insert(id).second)
            throw_error(ErrorKind::Validation, std::string("duplicate ") + what + " id '" + id + "'");
    }
}

std::vector<std::string> generated_ids(const char* prefix, std::size_t n) {
    std::vector<std::string> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = prefix + std::to_string(i);
    return ids;
}

std::vector<std::string> read_id_file(const std::filesystem::path& path) {
    auto in = csv::open_input(path);
    std::vector<std::string> ids;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) ids.push_back(line);
    }
    return ids;
}

std::string list_ids(const std::vector<std::string>& ids, std::size_t limit = 10) {
    std::string s;
    for (std::size_t i = 0; i < ids.size() && i < limit; ++i) {
        if (i) s += ", ";
        s += ids[i];
    }
    if (ids.size() > limit) s += ", ... (" + std::to_string(ids.size()) + " total)";
    return s;
}

ExpressionMatrix select_columns(const ExpressionMatrix& x, const std::vector<std::size_t>& keep) {
    ExpressionMatrix out;
    out.cell_ids = x.cell_ids;
    out.is_preprocessed = x.is_preprocessed;
    out.values = Matrix(x.n_cells(), keep.size());
    out.gene_ids.reserve(keep.size());
    for (std::size_t c : keep) out.gene_ids.push_back(x.gene_ids[c]);
    for (std::size_t i = 0; i < x.n_cells(); ++i)
        for (std::size_t k = 0; k < keep.size(); ++k) out.values(i, k) = x.values(i, keep[k]);
    return out;
}

} // namespace

void validate(const ExpressionMatrix& x) {
    if (x.n_cells() < 2 || x.n_genes() < 2)
        throw_error(ErrorKind::Validation, "expression matrix must be at least 2x2, got " +
                                               std::to_string(x.n_cells()) + "x" + std::to_string(x.n_genes()));
    if (x.cell_ids.size() != x.n_cells() || x.gene_ids.size() != x.n_genes())
        throw_error(ErrorKind::Validation, "id lists do not match the matrix shape");
    check_unique(x.cell_ids, "cell");
    check_unique(x.gene_ids, "gene");
    for (std::size_t i = 0; i < x.n_cells(); ++i) {
        for (std::size_t j = 0; j < x.n_genes(); ++j) {
            const double v = x.values(i, j);
            if (!std::isfinite(v))
                throw_error(ErrorKind::Validation, "non-finite value at cell '" + x.cell_ids[i] + "', gene '" +
                                                       x.gene_ids[j] + "'");
            if (!x.is_preprocessed && v < 0.0)
                throw_error(ErrorKind::Validation, "negative value " + csv::format_double(v) + " at cell '" +
                                                       x.cell_ids[i] + "', gene '" + x.gene_ids[j] + "'");
        }
    }
}

ExpressionMatrix make_expression(Matrix values, bool is_preprocessed) {
    ExpressionMatrix x;
    x.cell_ids = generated_ids("cell_", values.rows());
    x.gene_ids = generated_ids("gene_", values.cols());
    x.values = std::move(values);
    x.is_preprocessed = is_preprocessed;
    return x;
}

std::vector<std::size_t> top_variance_columns(const Matrix& m, std::size_t count) {
    const std::size_t n = m.rows();
    std::vector<double> var(m.cols(), 0.0);
    for (std::size_t j = 0; j < m.cols(); ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += m(i, j);
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = m(i, j) - mean;
            ss += d * d;
        }
        var[j] = ss / static_cast<double>(n);
    }
    std::vector<std::size_t> order(m.cols());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return var[a] > var[b]; });
    order.resize(std::min(count, order.size()));
    std::sort(order.begin(), order.end());
    return order;
}

ExpressionMatrix preprocess(const ExpressionMatrix& x, const PreprocessConfig& cfg) {
    if (x.is_preprocessed) throw_error(ErrorKind::Config, "matrix is already preprocessed");
    if (cfg.do_library_normalize && !(cfg.target_sum > 0.0))
        throw_error(ErrorKind::Config, "target_sum must be positive");
    if (cfg.hvg_count && *cfg.hvg_count == 0) throw_error(ErrorKind::Config, "hvg_count must be positive");

    // Gene filter on detection counts.
    std::vector<std::size_t> keep;
    for (std::size_t j = 0; j < x.n_genes(); ++j) {
        std::size_t detected = 0;
        for (std::size_t i = 0; i < x.n_cells(); ++i) detected += x.values(i, j) > 0.0 ? 1 : 0;
        if (detected >= cfg.min_cells_per_gene) keep.push_back(j);
    }
    if (keep.size() < 2)
        throw_error(ErrorKind::DegenerateInput, "fewer than two genes are detected in at least " +
                                                    std::to_string(cfg.min_cells_per_gene) + " cells");
    ExpressionMatrix out = keep.size() == x.n_genes() ? x : select_columns(x, keep);

    if (cfg.do_library_normalize) {
        std::vector<std::string> empty_cells;
        for (std::size_t i = 0; i < out.n_cells(); ++i) {
            double total = 0.0;
            for (double v : out.values.row(i)) total += v;
            if (!(total > 0.0)) {
                empty_cells.push_back(out.cell_ids[i]);
                continue;
            }
            const double scale = cfg.target_sum / total;
            for (double& v : out.values.row(i)) v *= scale;
        }
        if (!empty_cells.empty())
            throw_error(ErrorKind::DegenerateInput, "cells with zero total counts: " + list_ids(empty_cells));
    }

    if (cfg.do_log1p) {
        for (double& v : out.values.values()) v = std::log1p(v);
    }

    if (cfg.hvg_count && *cfg.hvg_count < out.n_genes())
        out = select_columns(out, top_variance_columns(out.values, *cfg.hvg_count));

    if (!all_finite(out.values.values()))
        throw_error(ErrorKind::DegenerateInput, "preprocessing produced non-finite values");
    out.is_preprocessed = true;
    return out;
}

MatrixFormat format_from_path(const std::filesystem::path& path) {
    return path.extension() == ".mtx" ? MatrixFormat::MatrixMarket : MatrixFormat::Csv;
}

ExpressionMatrix read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw_error(ErrorKind::Parse, "empty CSV input");
    auto header = csv::split_line(line);
    if (header.size() < 2) throw_error(ErrorKind::Parse, "CSV header needs a cell id column and gene columns");

    ExpressionMatrix x;
    x.gene_ids.assign(header.begin() + 1, header.end());
    const std::size_t m = x.gene_ids.size();
    std::vector<double> values;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto fields = csv::split_line(line);
        if (fields.size() != m + 1)
            throw_error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": expected " + std::to_string(m + 1) +
                                              " fields, got " + std::to_string(fields.size()));
        x.cell_ids.push_back(fields[0]);
        for (std::size_t j = 1; j <= m; ++j) {
            const auto v = csv::parse_double(fields[j]);
            if (!v)
                throw_error(ErrorKind::Parse,
                            "line " + std::to_string(line_no) + ": cannot parse '" + fields[j] + "' as a number");
            values.push_back(*v);
        }
    }
    x.values = Matrix(x.cell_ids.size(), m);
    std::copy(values.begin(), values.end(), x.values.data());
    validate(x);
    return x;
}

ExpressionMatrix read_matrix_market(std::istream& in, std::vector<std::string> cell_ids,
                                    std::vector<std::string> gene_ids) {
    std::string line;
    if (!std::getline(in, line)) throw_error(ErrorKind::Parse, "empty Matrix-Market input");
    std::istringstream banner(line);
    std::string tag, object, layout, field, symmetry;
    banner >> tag >> object >> layout >> field >> symmetry;
    auto lower = [](std::string s) {
        for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        return s;
    };
    object = lower(object);
    layout = lower(layout);
    field = lower(field);
    symmetry = lower(symmetry);
    if (tag != "%%MatrixMarket" || object != "matrix")
        throw_error(ErrorKind::Parse, "missing %%MatrixMarket matrix banner");
    if (layout != "coordinate" && layout != "array")
        throw_error(ErrorKind::Parse, "unsupported Matrix-Market layout '" + layout + "'");
    if (field != "real" && field != "integer" && field != "double")
        throw_error(ErrorKind::Parse, "unsupported Matrix-Market field '" + field + "'");
    if (symmetry != "general") throw_error(ErrorKind::Parse, "only 'general' Matrix-Market symmetry is supported");

    do {
        if (!std::getline(in, line)) throw_error(ErrorKind::Parse, "missing Matrix-Market size line");
    } while (line.empty() || line[0] == '%');

    std::istringstream size_line(line);
    long long rows = 0, cols = 0, nnz = 0;
    size_line >> rows >> cols;
    if (layout == "coordinate") size_line >> nnz;
    if (!size_line || rows <= 0 || cols <= 0 || nnz < 0) throw_error(ErrorKind::Parse, "bad size line '" + line + "'");

    Matrix values(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
    const long long expected = layout == "coordinate" ? nnz : rows * cols;
    long long seen = 0;
    while (seen < expected && std::getline(in, line)) {
        if (line.empty() || line[0] == '%') continue;
        std::istringstream entry(line);
        if (layout == "coordinate") {
            long long r = 0, c = 0;
            std::string token;
            if (!(entry >> r >> c >> token)) throw_error(ErrorKind::Parse, "bad entry '" + line + "'");
            const auto v = csv::parse_double(token);
            if (!v || r < 1 || r > rows || c < 1 || c > cols)
                throw_error(ErrorKind::Parse, "bad coordinate entry '" + line + "'");
            values(static_cast<std::size_t>(r - 1), static_cast<std::size_t>(c - 1)) += *v;
        } else {
            std::string token;
            entry >> token;
            const auto v = csv::parse_double(token);
            if (!v) throw_error(ErrorKind::Parse, "bad array entry '" + line + "'");
            // Column-major per the Matrix-Market convention.
            const auto r = static_cast<std::size_t>(seen % rows);
            const auto c = static_cast<std::size_t>(seen / rows);
            values(r, c) = *v;
        }
        ++seen;
    }
    if (seen != expected)
        throw_error(ErrorKind::Parse, "expected " + std::to_string(expected) + " entries, found " + std::to_string(seen));

    ExpressionMatrix x = make_expression(std::move(values));
    if (!cell_ids.empty()) {
        if (cell_ids.size() != x.n_cells()) throw_error(ErrorKind::Parse, "cell id sidecar length mismatch");
        x.cell_ids = std::move(cell_ids);
    }
    if (!gene_ids.empty()) {
        if (gene_ids.size() != x.n_genes()) throw_error(ErrorKind::Parse, "gene id sidecar length mismatch");
        x.gene_ids = std::move(gene_ids);
    }
    validate(x);
    return x;
}

ExpressionMatrix load_matrix(const std::filesystem::path& path, MatrixFormat format) {
    auto in = csv::open_input(path);
    if (format == MatrixFormat::Csv) return read_csv(in);

    auto stem = path;
    stem.replace_extension();
    std::filesystem::path cells = stem.string() + ".cells.txt";
    std::filesystem::path genes = stem.string() + ".genes.txt";
    return read_matrix_market(in, std::filesystem::exists(cells) ? read_id_file(cells) : std::vector<std::string>{},
                              std::filesystem::exists(genes) ? read_id_file(genes) : std::vector<std::string>{});
}

ExpressionMatrix load_matrix(const std::filesystem::path& path) { return load_matrix(path, format_from_path(path)); }

void write_csv(const ExpressionMatrix& x, std::ostream& out) {
    out << "cell_id";
    for (const auto& g : x.gene_ids) out << ',' << g;
    out << '\n';
    for (std::size_t i = 0; i < x.n_cells(); ++i) {
        out << x.cell_ids[i];
        for (double v : x.values.row(i)) out << ',' << csv::format_double(v);
        out << '\n';
    }
}

void write_csv(const ExpressionMatrix& x, const std::filesystem::path& path) {
    auto out = csv::open_output(path);
    write_csv(x, out);
}

void write_matrix_csv(const Matrix& m, std::ostream& out) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto r = m.row(i);
        for (std::size_t j = 0; j < r.size(); ++j) {
            if (j) out << ',';
            out << csv::format_double(r[j]);
        }
        out << '\n';
    }
}

void write_matrix_csv(const Matrix& m, const std::filesystem::path& path) {
    auto out = csv::open_output(path);
    write_matrix_csv(m, out);
}

} // namespace cdcg
