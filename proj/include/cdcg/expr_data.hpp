#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cdcg/matrix.hpp"

namespace cdcg {

/// Cells x genes expression values with identifiers.
struct ExpressionMatrix {
    Matrix values;
    std::vector<std::string> cell_ids;
    std::vector<std::string> gene_ids;
    bool is_preprocessed = false;

    std::size_t n_cells() const noexcept { return values.rows(); }
    std::size_t n_genes() const noexcept { return values.cols(); }
};

/// Throws ValidationError unless: n, m >= 2, ids match the shape and are
/// unique, all values finite, and (for raw data) nonnegative.
void validate(const ExpressionMatrix& x);

/// Wraps a bare matrix with generated ids ("cell_0", "gene_0", ...).
ExpressionMatrix make_expression(Matrix values, bool is_preprocessed = false);

struct PreprocessConfig {
    bool do_library_normalize = true;
    /// Each cell is scaled to this total before log1p.
    double target_sum = 1e4;
    bool do_log1p = true;
    /// Keep the top genes by variance. Clamped to the available gene count.
    std::optional<std::size_t> hvg_count = 2000;
    /// Genes detected (> 0) in fewer cells than this are dropped.
    std::size_t min_cells_per_gene = 3;
};

/// Filter, library-normalize, log1p, select highly variable genes.
/// Each step is skipped when disabled. Throws DegenerateInput when a cell has
/// zero total under normalization (the message lists the offending ids) or
/// fewer than two genes survive filtering.
ExpressionMatrix preprocess(const ExpressionMatrix& x, const PreprocessConfig& cfg);

/// Indices of the `count` highest-variance columns, in ascending column order.
/// Ties keep the lower index.
std::vector<std::size_t> top_variance_columns(const Matrix& m, std::size_t count);

enum class MatrixFormat { Csv, MatrixMarket };

/// ".mtx" selects Matrix-Market, anything else CSV.
MatrixFormat format_from_path(const std::filesystem::path& path);

/// CSV: header "cell_id,<gene_1>,...,<gene_m>", then one row per cell.
/// Matrix-Market: coordinate or array, real or integer, general. Optional
/// sidecars `<name>.cells.txt` and `<name>.genes.txt` carry one id per line.
ExpressionMatrix load_matrix(const std::filesystem::path& path, MatrixFormat format);
ExpressionMatrix load_matrix(const std::filesystem::path& path);

ExpressionMatrix read_csv(std::istream& in);
ExpressionMatrix read_matrix_market(std::istream& in, std::vector<std::string> cell_ids,
                                    std::vector<std::string> gene_ids);

/// Same layout as the reader; values with 17 significant digits.
void write_csv(const ExpressionMatrix& x, std::ostream& out);
void write_csv(const ExpressionMatrix& x, const std::filesystem::path& path);

/// Bare numeric matrix, row-major, 17 significant digits, no header.
void write_matrix_csv(const Matrix& m, std::ostream& out);
void write_matrix_csv(const Matrix& m, const std::filesystem::path& path);

} // namespace cdcg
