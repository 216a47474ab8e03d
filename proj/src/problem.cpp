#include "grabp/problem.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "grabp/error.hpp"
#include "grabp/rng.hpp"

namespace grabp {

const char* to_string(ProblemKind kind) {
    switch (kind) {
        case ProblemKind::RandomDense: return "random-dense";
        case ProblemKind::RandomSparse: return "random-sparse";
        case ProblemKind::MatrixMarket: return "matrix-market";
        case ProblemKind::LpTransform: return "lp-transform";
        case ProblemKind::Custom: return "custom";
    }
    return "unknown";
}

FeasibilityProblem::FeasibilityProblem(RowMatrix a, Vector b, Provenance provenance,
                                       std::optional<Vector> certificate)
    : a_(std::make_shared<const RowMatrix>(std::move(a))),
      b_(std::move(b)),
      provenance_(std::move(provenance)),
      certificate_(std::move(certificate)) {
    if (b_.size() != a_->rows()) {
        throw DimensionError("problem: A has " + std::to_string(a_->rows()) + " rows but b has " +
                             std::to_string(b_.size()) + " entries");
    }
    if (certificate_ && certificate_->size() != a_->cols()) {
        throw DimensionError("problem: certificate has wrong length");
    }
    if (auto zero = a_->zero_rows(); !zero.empty()) {
        std::string list;
        for (std::size_t k = 0; k < zero.size() && k < 20; ++k) list += (k ? ", " : "") + std::to_string(zero[k] + 1);
        if (zero.size() > 20) list += ", ...";
        throw ZeroRowError(std::move(zero), "problem: A has zero rows (1-based): " + list);
    }
}

FeasibilityProblem FeasibilityProblem::with_rhs(Vector b, std::optional<Vector> certificate) const {
    if (b.size() != rows()) throw DimensionError("with_rhs: b has wrong length");
    FeasibilityProblem p;
    p.a_ = a_;
    p.b_ = std::move(b);
    p.provenance_ = provenance_;
    p.certificate_ = std::move(certificate);
    return p;
}

// ---------------------------------------------------------------------------
// Random instances

RowMatrix generate_dense(std::size_t m, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> values(m * n);
    for (double& v : values) v = rng.normal();
    return RowMatrix::dense(m, n, std::move(values));
}

double sparse_density(std::size_t m, std::size_t n) {
    return 1.0 / (2.0 * std::log(static_cast<double>(m) * static_cast<double>(n)));
}

RowMatrix generate_sparse(std::size_t m, std::size_t n, std::uint64_t seed) {
    if (m * n < 2) throw std::invalid_argument("generate_sparse: m*n must be at least 2");
    const double density = std::min(1.0, sparse_density(m, n));
    Rng rng(seed);
    std::vector<std::size_t> offsets(m + 1, 0);
    std::vector<Index> cols;
    std::vector<double> vals;
    cols.reserve(static_cast<std::size_t>(density * static_cast<double>(m * n) * 1.1) + 16);
    vals.reserve(cols.capacity());

    // Bernoulli(density) per position, walked by geometric gaps.
    const double log_q = std::log1p(-density);
    const std::size_t total = m * n;
    auto gap = [&]() -> std::size_t {
        if (density >= 1.0) return 0;
        const double u = 1.0 - rng.uniform();  // (0, 1]
        const double g = std::floor(std::log(u) / log_q);
        return g >= static_cast<double>(total) ? total : static_cast<std::size_t>(g);
    };
    std::size_t pos = gap();
    std::size_t row = 0;
    while (row < m) {
        const std::size_t row_end = (row + 1) * n;
        while (pos < row_end) {
            cols.push_back(static_cast<Index>(pos - row * n));
            vals.push_back(rng.normal());
            const std::size_t g = gap();
            pos = (g >= total - pos) ? total : pos + 1 + g;
        }
        if (vals.size() == offsets[row]) {
            // Empty row: inject one entry.
            cols.push_back(static_cast<Index>(rng.uniform_index(n)));
            vals.push_back(rng.normal());
        }
        offsets[++row] = vals.size();
    }
    return RowMatrix::sparse(m, n, std::move(offsets), std::move(cols), std::move(vals));
}

SyntheticRhs synth_rhs(const RowMatrix& a, std::uint64_t seed) {
    Rng rng(seed);
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    Vector x1(n);
    Vector x2(n);
    Vector x3(m);
    for (double& v : x1) v = rng.normal();
    for (double& v : x2) v = rng.normal();
    for (double& v : x3) v = rng.uniform(0.1, 1.0);

    SyntheticRhs out;
    out.certificate.resize(n);
    for (std::size_t j = 0; j < n; ++j) out.certificate[j] = 0.5 * (x1[j] + x2[j]);
    Vector ax1(m);
    Vector ax2(m);
    a.multiply(x1, ax1);
    a.multiply(x2, ax2);
    out.b.resize(m);
    for (std::size_t i = 0; i < m; ++i) out.b[i] = 0.5 * ax1[i] + 0.5 * ax2[i] + x3[i];
    return out;
}

FeasibilityProblem random_problem(ProblemKind kind, std::size_t m, std::size_t n, std::uint64_t seed) {
    RowMatrix a;
    if (kind == ProblemKind::RandomDense) {
        a = generate_dense(m, n, seed);
    } else if (kind == ProblemKind::RandomSparse) {
        a = generate_sparse(m, n, seed);
    } else {
        throw std::invalid_argument("random_problem: kind must be random-dense or random-sparse");
    }
    auto rhs = synth_rhs(a, derive_seed(seed, 1));
    Provenance prov;
    prov.kind = kind;
    prov.seed = seed;
    return FeasibilityProblem(std::move(a), std::move(rhs.b), std::move(prov), std::move(rhs.certificate));
}

// ---------------------------------------------------------------------------
// Matrix Market

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool blank_or_comment(const std::string& line) {
    const auto first = line.find_first_not_of(" \t\r");
    return first == std::string::npos || line[first] == '%';
}

}  // namespace

RowMatrix read_matrix_market(std::istream& in, RowMatrix::Storage storage) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw ParseError(1, "empty Matrix Market stream");
    ++line_no;

    std::istringstream header(line);
    std::string banner;
    std::string object;
    std::string format;
    std::string field;
    std::string symmetry;
    header >> banner >> object >> format >> field >> symmetry;
    if (lower(banner) != "%%matrixmarket") throw ParseError(line_no, "missing %%MatrixMarket banner");
    object = lower(object);
    format = lower(format);
    field = lower(field);
    symmetry = lower(symmetry);
    if (object != "matrix") throw ParseError(line_no, "unsupported object '" + object + "'");
    if (format != "coordinate" && format != "array") throw ParseError(line_no, "unsupported format '" + format + "'");
    if (field != "real" && field != "integer" && field != "double") {
        throw ParseError(line_no, "non-real field '" + field + "'");
    }
    if (symmetry != "general" && symmetry != "symmetric" && symmetry != "skew-symmetric") {
        throw ParseError(line_no, "unsupported symmetry '" + symmetry + "'");
    }
    const bool coordinate = format == "coordinate";
    const double mirror_sign = symmetry == "skew-symmetric" ? -1.0 : 1.0;
    const bool mirrored = symmetry != "general";

    do {
        if (!std::getline(in, line)) throw ParseError(line_no + 1, "missing size line");
        ++line_no;
    } while (blank_or_comment(line));

    long long m_in = -1;
    long long n_in = -1;
    long long nnz_in = -1;
    {
        std::istringstream size(line);
        size >> m_in >> n_in;
        if (coordinate) size >> nnz_in;
        if (!size || m_in <= 0 || n_in <= 0 || (coordinate && nnz_in < 0)) {
            throw ParseError(line_no, "malformed size line");
        }
    }
    const auto m = static_cast<std::size_t>(m_in);
    const auto n = static_cast<std::size_t>(n_in);
    if (mirrored && m != n) throw ParseError(line_no, "symmetric matrix must be square");

    std::vector<Triplet> triplets;
    auto add = [&](std::size_t i, std::size_t j, double v) {
        triplets.push_back({i, j, v});
        if (mirrored && i != j) triplets.push_back({j, i, mirror_sign * v});
    };

    if (coordinate) {
        triplets.reserve(static_cast<std::size_t>(nnz_in) * (mirrored ? 2 : 1));
        long long read = 0;
        while (read < nnz_in) {
            if (!std::getline(in, line)) throw ParseError(line_no + 1, "unexpected end of file after " + std::to_string(read) + " entries");
            ++line_no;
            if (blank_or_comment(line)) continue;
            std::istringstream entry(line);
            long long i = 0;
            long long j = 0;
            double v = 0.0;
            entry >> i >> j >> v;
            if (!entry) throw ParseError(line_no, "malformed entry");
            if (i < 1 || j < 1 || i > m_in || j > n_in) throw ParseError(line_no, "index out of range");
            add(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1), v);
            ++read;
        }
    } else {
        // Column-major; symmetric layouts store the lower triangle only.
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t first = mirrored ? (symmetry == "skew-symmetric" ? j + 1 : j) : 0;
            for (std::size_t i = first; i < m; ++i) {
                do {
                    if (!std::getline(in, line)) throw ParseError(line_no + 1, "unexpected end of file in array data");
                    ++line_no;
                } while (blank_or_comment(line));
                std::istringstream entry(line);
                double v = 0.0;
                entry >> v;
                if (!entry) throw ParseError(line_no, "malformed value");
                if (v != 0.0) add(i, j, v);
            }
        }
    }
    return RowMatrix::from_triplets(m, n, std::move(triplets), storage);
}

RowMatrix read_matrix_market(const std::filesystem::path& path, RowMatrix::Storage storage) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return read_matrix_market(in, storage);
}

// ---------------------------------------------------------------------------
// LP instances

void LpInstance::validate() const {
    const std::size_t n = a_eq.cols();
    if (b_eq.size() != a_eq.rows()) throw DimensionError("lp: b_eq length does not match A_eq rows");
    if (lower.size() != n || upper.size() != n || cost.size() != n) {
        throw DimensionError("lp: l, u and c must have one entry per column");
    }
    if (x_star && x_star->size() != n) throw DimensionError("lp: x_star has wrong length");
    for (std::size_t j = 0; j < n; ++j) {
        if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] > upper[j]) {
            throw std::invalid_argument("lp: bound l <= u violated at column " + std::to_string(j + 1));
        }
    }
}

namespace {

class TokenReader {
public:
    explicit TokenReader(std::istream& in) : in_(in) {}

    // Next token, or empty at end of input.
    std::string next() {
        if (!pending_.empty()) {
            std::string t = std::move(pending_);
            pending_.clear();
            return t;
        }
        std::string tok;
        while (!(line_stream_ >> tok)) {
            std::string line;
            if (!std::getline(in_, line)) return {};
            ++line_;
            if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            line_stream_ = std::istringstream(line);
        }
        return tok;
    }

    void push_back(std::string tok) { pending_ = std::move(tok); }
    std::size_t line() const { return line_; }

    double number(const char* what) {
        const std::string tok = next();
        if (tok.empty()) throw ParseError(line_, std::string("unexpected end of input reading ") + what);
        const std::string t = lower(tok);
        if (t == "inf" || t == "+inf" || t == "infinity") return std::numeric_limits<double>::infinity();
        if (t == "-inf" || t == "-infinity") return -std::numeric_limits<double>::infinity();
        try {
            std::size_t used = 0;
            const double v = std::stod(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            return v;
        } catch (const std::exception&) {
            throw ParseError(line_, std::string("expected a number for ") + what + ", got '" + tok + "'");
        }
    }

private:
    std::istream& in_;
    std::istringstream line_stream_;
    std::string pending_;
    std::size_t line_ = 0;
};

bool is_section(const std::string& tok) {
    return tok == "Aeq" || tok == "beq" || tok == "l" || tok == "u" || tok == "c" || tok == "xstar";
}

}  // namespace

LpInstance read_lp_instance(std::istream& in) {
    TokenReader tr(in);
    if (tr.next() != "lp") throw ParseError(tr.line(), "expected 'lp' header");
    const double rows_d = tr.number("n_rows");
    const double cols_d = tr.number("n_cols");
    if (rows_d < 0 || cols_d < 1 || rows_d != std::floor(rows_d) || cols_d != std::floor(cols_d)) {
        throw ParseError(tr.line(), "bad dimensions in header");
    }
    const auto rows = static_cast<std::size_t>(rows_d);
    const auto cols = static_cast<std::size_t>(cols_d);

    LpInstance lp;
    {
        const std::string tok = tr.next();
        if (tok.empty()) throw ParseError(tr.line(), "missing p_star in header");
        if (lower(tok) != "none") {
            tr.push_back(tok);
            lp.p_star = tr.number("p_star");
        }
    }

    std::vector<Triplet> triplets;
    bool seen_a = false;
    auto read_vector = [&](std::size_t len, const char* what) {
        Vector v(len);
        for (double& e : v) e = tr.number(what);
        return v;
    };
    std::optional<Vector> b_eq;
    std::optional<Vector> l;
    std::optional<Vector> u;
    std::optional<Vector> c;
    for (std::string tok = tr.next(); !tok.empty(); tok = tr.next()) {
        if (tok == "Aeq") {
            seen_a = true;
            for (std::string t = tr.next(); !t.empty(); t = tr.next()) {
                if (is_section(t)) {
                    tr.push_back(t);
                    break;
                }
                tr.push_back(t);
                const double i = tr.number("Aeq row");
                const double j = tr.number("Aeq column");
                const double v = tr.number("Aeq value");
                if (i < 1 || j < 1 || i > rows_d || j > cols_d || i != std::floor(i) || j != std::floor(j)) {
                    throw ParseError(tr.line(), "Aeq index out of range");
                }
                triplets.push_back({static_cast<std::size_t>(i) - 1, static_cast<std::size_t>(j) - 1, v});
            }
        } else if (tok == "beq") {
            b_eq = read_vector(rows, "beq");
        } else if (tok == "l") {
            l = read_vector(cols, "l");
        } else if (tok == "u") {
            u = read_vector(cols, "u");
        } else if (tok == "c") {
            c = read_vector(cols, "c");
        } else if (tok == "xstar") {
            lp.x_star = read_vector(cols, "xstar");
        } else {
            throw ParseError(tr.line(), "unknown section '" + tok + "'");
        }
    }
    if (!seen_a && rows > 0) throw ParseError(tr.line(), "missing Aeq section");
    if (!b_eq && rows > 0) throw ParseError(tr.line(), "missing beq section");
    if (!l || !u || !c) throw ParseError(tr.line(), "missing l, u or c section");

    lp.a_eq = RowMatrix::from_triplets(rows, cols, std::move(triplets));
    lp.b_eq = b_eq.value_or(Vector{});
    lp.lower = std::move(*l);
    lp.upper = std::move(*u);
    lp.cost = std::move(*c);
    lp.validate();
    return lp;
}

LpInstance read_lp_instance(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return read_lp_instance(in);
}

FeasibilityProblem lp_to_feasibility(const LpInstance& lp) {
    lp.validate();
    if (!lp.p_star) throw std::invalid_argument("lp_to_feasibility: p_star is required to form the cost row");
    const RowMatrix& aeq = lp.a_eq;
    const std::size_t n = aeq.cols();

    std::vector<Triplet> triplets;
    Vector b;
    Provenance prov;
    prov.kind = ProblemKind::LpTransform;
    std::size_t row = 0;

    auto copy_row = [&](std::size_t i, double sign) {
        for (std::size_t j = 0; j < n; ++j) {
            const double v = aeq.at(i, j);
            if (v != 0.0) triplets.push_back({row, j, sign * v});
        }
    };
    for (const double sign : {1.0, -1.0}) {
        for (std::size_t i = 0; i < aeq.rows(); ++i) {
            if (aeq.row_norm_sq(i) == 0.0) {
                prov.notes.push_back(std::string(sign > 0 ? "A_eq" : "-A_eq") + " row " + std::to_string(i + 1) +
                                     " is zero; dropped");
                continue;
            }
            copy_row(i, sign);
            b.push_back(sign * lp.b_eq[i]);
            ++row;
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (std::isinf(lp.upper[j])) {
            prov.notes.push_back("u[" + std::to_string(j + 1) + "] infinite; row dropped");
            continue;
        }
        triplets.push_back({row++, j, 1.0});
        b.push_back(lp.upper[j]);
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (std::isinf(lp.lower[j])) {
            prov.notes.push_back("l[" + std::to_string(j + 1) + "] infinite; row dropped");
            continue;
        }
        triplets.push_back({row++, j, -1.0});
        b.push_back(-lp.lower[j]);
    }
    if (std::any_of(lp.cost.begin(), lp.cost.end(), [](double v) { return v != 0.0; })) {
        for (std::size_t j = 0; j < n; ++j) {
            if (lp.cost[j] != 0.0) triplets.push_back({row, j, lp.cost[j]});
        }
        ++row;
        b.push_back(*lp.p_star);
    } else {
        prov.notes.push_back("cost vector is zero; cost row dropped");
    }

    RowMatrix a = RowMatrix::from_triplets(row, n, std::move(triplets));
    return FeasibilityProblem(std::move(a), std::move(b), std::move(prov), lp.x_star);
}

}  // namespace grabp
