#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "cdcg/error.hpp"
#include "cdcg/expr_data.hpp"
#include "cdcg/labels.hpp"
#include "support.hpp"

using namespace cdcg;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::Config;
}

PreprocessConfig bare() {
    PreprocessConfig c;
    c.do_library_normalize = false;
    c.do_log1p = false;
    c.hvg_count.reset();
    c.min_cells_per_gene = 0;
    return c;
}

} // namespace

TEST_CASE("CSV load preserves values exactly") {
    std::istringstream in("cell_id,g1,g2\nc1,1,0\nc2,0,2\nc3,3,1\n");
    const ExpressionMatrix x = read_csv(in);
    CHECK(x.n_cells() == 3);
    CHECK(x.n_genes() == 2);
    CHECK(x.values == Matrix{{1, 0}, {0, 2}, {3, 1}});
    CHECK(x.cell_ids == std::vector<std::string>{"c1", "c2", "c3"});
    CHECK(x.gene_ids == std::vector<std::string>{"g1", "g2"});
    CHECK_FALSE(x.is_preprocessed);
}

TEST_CASE("CSV numeric forms and CRLF") {
    std::istringstream in("cell_id,a,b\r\n\"x\",1.5e2,0.25\r\ny,7,1E-3\r\n");
    const ExpressionMatrix x = read_csv(in);
    CHECK(x.values == Matrix{{150, 0.25}, {7, 0.001}});
    CHECK(x.cell_ids[0] == "x");
}

TEST_CASE("CSV validation and parse errors") {
    CHECK(kind_of([] {
              std::istringstream in("cell_id,a,b\nc1,-1,0\nc2,1,1\n");
              read_csv(in);
          }) == ErrorKind::Validation);
    CHECK(kind_of([] {
              std::istringstream in("cell_id,a,b\nc1,1,0\nc1,1,1\n");
              read_csv(in);
          }) == ErrorKind::Validation);
    CHECK(kind_of([] {
              std::istringstream in("cell_id,a,b\nc1,1\nc2,1,1\n");
              read_csv(in);
          }) == ErrorKind::Parse);
    CHECK(kind_of([] {
              std::istringstream in("cell_id,a,b\nc1,1,abc\nc2,1,1\n");
              read_csv(in);
          }) == ErrorKind::Parse);
    CHECK(kind_of([] {
              std::istringstream in("cell_id,a,b\nc1,1,nan\nc2,1,1\n");
              read_csv(in);
          }) == ErrorKind::Validation);
    CHECK(kind_of([] {
              std::istringstream in("cell_id,a\nc1,1\nc2,1\n");
              read_csv(in);
          }) == ErrorKind::Validation);
}

TEST_CASE("Matrix-Market coordinate densifies") {
    std::istringstream in(
        "%%MatrixMarket matrix coordinate real general\n"
        "% comment\n"
        "4 3 5\n"
        "1 1 1.5\n2 2 2\n3 3 3\n4 1 4\n4 3 5\n");
    const ExpressionMatrix x = read_matrix_market(in, {}, {});
    CHECK(x.n_cells() == 4);
    CHECK(x.n_genes() == 3);
    int zeros = 0;
    for (double v : x.values.values()) zeros += v == 0.0;
    CHECK(zeros == 7);
    CHECK(x.values(0, 0) == 1.5);
    CHECK(x.values(3, 2) == 5.0);
    CHECK(x.cell_ids[3] == "cell_3");
}

TEST_CASE("Matrix-Market array is column-major and sidecars name ids") {
    const auto dir = testsupport::scratch_dir("mtx");
    {
        std::ofstream f(dir / "m.mtx");
        f << "%%MatrixMarket matrix array integer general\n2 2\n1\n2\n3\n4\n";
        std::ofstream c(dir / "m.cells.txt");
        c << "a\nb\n";
        std::ofstream g(dir / "m.genes.txt");
        g << "G1\nG2\n";
    }
    const ExpressionMatrix x = load_matrix(dir / "m.mtx");
    CHECK(x.values == Matrix{{1, 3}, {2, 4}});
    CHECK(x.cell_ids == std::vector<std::string>{"a", "b"});
    CHECK(x.gene_ids == std::vector<std::string>{"G1", "G2"});
    CHECK(format_from_path(dir / "m.mtx") == MatrixFormat::MatrixMarket);
    CHECK(format_from_path(dir / "m.csv") == MatrixFormat::Csv);
}

TEST_CASE("Matrix-Market rejects unsupported variants") {
    CHECK(kind_of([] {
              std::istringstream in("%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 1 1\n");
              read_matrix_market(in, {}, {});
          }) == ErrorKind::Parse);
    CHECK(kind_of([] {
              std::istringstream in("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n");
              read_matrix_market(in, {}, {});
          }) == ErrorKind::Parse);
}

TEST_CASE("CSV write then read round-trips bit-exactly") {
    Rng rng(7);
    ExpressionMatrix x = make_expression(testsupport::random_matrix(6, 4, rng, 0.0, 1e3));
    x.values(0, 0) = 1.0 / 3.0;
    std::stringstream buf;
    write_csv(x, buf);
    const ExpressionMatrix y = read_csv(buf);
    CHECK(y.values == x.values);
    CHECK(y.cell_ids == x.cell_ids);
}

TEST_CASE("preprocess: row already at the target sum is unchanged") {
    PreprocessConfig c = bare();
    c.do_library_normalize = true;
    c.target_sum = 4.0;
    const ExpressionMatrix out = preprocess(make_expression(Matrix{{1, 1, 2}, {2, 1, 1}}), c);
    CHECK(out.values == Matrix{{1, 1, 2}, {2, 1, 1}});
    CHECK(out.is_preprocessed);
}

TEST_CASE("preprocess: zero-sum cell is a degenerate input naming the cell") {
    PreprocessConfig c = bare();
    c.do_library_normalize = true;
    ExpressionMatrix x = make_expression(Matrix{{0, 0, 0}, {1, 2, 3}});
    try {
        preprocess(x, c);
        FAIL("expected DegenerateInput");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DegenerateInput);
        CHECK(std::string(e.what()).find("cell_0") != std::string::npos);
    }
}

TEST_CASE("preprocess: hvg keeps the maximal-variance gene") {
    PreprocessConfig c = bare();
    c.hvg_count = 1;
    const Matrix v{{1, 5, 2}, {2, 1, 2.5}};
    const ExpressionMatrix out = preprocess(make_expression(v), c);
    // Brute-force population variance per gene.
    std::size_t best = 0;
    double best_var = -1.0;
    for (std::size_t j = 0; j < 3; ++j) {
        const double mean = (v(0, j) + v(1, j)) / 2.0;
        const double var = ((v(0, j) - mean) * (v(0, j) - mean) + (v(1, j) - mean) * (v(1, j) - mean)) / 2.0;
        if (var > best_var) {
            best_var = var;
            best = j;
        }
    }
    REQUIRE(out.n_genes() == 1);
    CHECK(out.gene_ids[0] == "gene_" + std::to_string(best));
    CHECK(out.values(0, 0) == v(0, best));
}

TEST_CASE("preprocess: defaults give exact library sizes before log and clamp hvg") {
    Rng rng(8);
    Matrix counts = testsupport::random_matrix(30, 12, rng, 0.0, 50.0);
    for (std::size_t i = 0; i < 30; ++i) counts(i, 3) = 0.0;  // undetected gene
    counts(0, 5) = 1.0;
    for (std::size_t i = 1; i < 30; ++i) counts(i, 5) = 0.0;  // detected in one cell only

    PreprocessConfig no_log;
    no_log.do_log1p = false;
    const ExpressionMatrix norm = preprocess(make_expression(counts), no_log);
    CHECK(norm.n_genes() == 10);
    for (std::size_t i = 0; i < norm.n_cells(); ++i) {
        double s = 0.0;
        for (double v : norm.values.row(i)) s += v;
        CHECK(std::abs(s - 1e4) / 1e4 < 1e-9);
    }

    const ExpressionMatrix full = preprocess(make_expression(counts), PreprocessConfig{});
    CHECK(full.n_genes() == 10);  // 2000 clamped
    for (double v : full.values.values()) CHECK(std::isfinite(v));

    PreprocessConfig hvg;
    hvg.hvg_count = 4;
    CHECK(preprocess(make_expression(counts), hvg).n_genes() == 4);
}

TEST_CASE("preprocess is idempotent in effect without log") {
    Rng rng(9);
    PreprocessConfig c;
    c.do_log1p = false;
    c.hvg_count.reset();
    ExpressionMatrix once = preprocess(make_expression(testsupport::random_matrix(10, 6, rng, 0.5, 9.0)), c);
    ExpressionMatrix again_in = once;
    again_in.is_preprocessed = false;
    const ExpressionMatrix twice = preprocess(again_in, c);
    CHECK(testsupport::max_abs_diff(once.values, twice.values) <= 1e-12 * 1e4);
}

TEST_CASE("preprocess refuses already processed input") {
    ExpressionMatrix x = make_expression(Matrix{{1, 2}, {3, 4}}, true);
    CHECK(kind_of([&] { preprocess(x, PreprocessConfig{}); }) == ErrorKind::Config);
}

TEST_CASE("top variance columns: ties keep the lower index, output ascending") {
    const Matrix m{{0, 1, 0, 5}, {1, 0, 1, 5}};
    CHECK(top_variance_columns(m, 2) == std::vector<std::size_t>{0, 1});
    CHECK(top_variance_columns(m, 3) == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("label files: header detection, string labels, assignments") {
    std::istringstream ints("label\n3\n1\n3\n");
    CHECK(read_labels(ints) == Labels{3, 1, 3});
    std::istringstream names("cell_id,type\nc1,beta\nc2,alpha\nc3,beta\n");
    CHECK(read_labels(names) == Labels{0, 1, 0});  // ids in first-seen order
    CHECK(compact_labels({7, 2, 7, 9}) == Labels{0, 1, 0, 2});
    CHECK(num_distinct({7, 2, 7, 9}) == 3);

    const auto dir = testsupport::scratch_dir("labels");
    write_assignments({"a", "b"}, {1, 0}, dir / "assign.csv");
    std::ifstream f(dir / "assign.csv");
    std::string all((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    CHECK(all == "cell_id,cluster\na,1\nb,0\n");
    CHECK(read_labels(dir / "assign.csv") == Labels{1, 0});
}
