#include "cpals/trace_io.hpp"

#include "cpals/errors.hpp"
#include "cpals/format.hpp"
#include "text_parse.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace cpals {

using namespace detail;

Metadata instance_metadata(const InstanceMeta& meta) {
    return {{"kind", std::string(to_string(meta.kind))},
            {"seed", std::to_string(meta.seed)},
            {"mu", format_double(meta.mu)},
            {"kappa", format_double(meta.kappa)}};
}

namespace {

constexpr std::string_view trace_header =
    "iteration,epsilon,rel_error,weight_error,phase,wall_seconds";

std::string optional_cell(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        cells.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) return cells;
        start = comma + 1;
    }
}

std::size_t cell_column(const std::vector<std::string_view>& cells, std::size_t index) {
    std::size_t column = 1;
    for (std::size_t i = 0; i < index; ++i) column += cells[i].size() + 1;
    return column;
}

}  // namespace

void write_trace_csv(std::ostream& out, const ConvergenceTrace& trace, const Metadata& metadata,
                     const TraceCsvOptions& options) {
    for (const auto& [key, value] : metadata) out << "# " << key << '=' << value << '\n';
    if (trace.phase_boundary) out << "# phase_boundary=" << *trace.phase_boundary << '\n';
    out << trace_header << '\n';
    for (const auto& r : trace.records) {
        out << r.iteration << ',' << optional_cell(r.epsilon) << ','
            << format_double(r.relative_error) << ',' << optional_cell(r.weight_error) << ','
            << to_string(r.phase) << ',';
        if (options.timing) out << format_double(r.wall_seconds);
        out << '\n';
    }
    if (!out) throw std::runtime_error("failed to write trace CSV");
}

TraceCsv read_trace_csv(std::istream& in) {
    TraceCsv result;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (read_line(in, line, line_no)) {
        if (line.empty()) continue;
        if (!header_seen && line.starts_with('#')) {
            std::string_view body = std::string_view(line).substr(1);
            if (body.starts_with(' ')) body.remove_prefix(1);
            const std::size_t eq = body.find('=');
            if (eq == std::string_view::npos)
                throw ParseError("metadata line lacks '='", line_no, 0);
            std::string key(body.substr(0, eq));
            std::string value(body.substr(eq + 1));
            if (key == "phase_boundary") {
                result.trace.phase_boundary =
                    parse_number<std::size_t>({body.substr(eq + 1), line_no, eq + 3}, "an integer");
            } else {
                result.metadata.emplace_back(std::move(key), std::move(value));
            }
            continue;
        }
        if (!header_seen) {
            if (line != trace_header) throw ParseError("unexpected trace header", line_no, 1);
            header_seen = true;
            continue;
        }
        const auto cells = split_commas(line);
        if (cells.size() != 6)
            throw ParseError("expected 6 cells, got " + std::to_string(cells.size()), line_no, 0);
        auto token = [&](std::size_t i) { return Token{cells[i], line_no, cell_column(cells, i)}; };
        auto optional_number = [&](std::size_t i) -> std::optional<double> {
            if (cells[i].empty()) return std::nullopt;
            return parse_number<double>(token(i), "a number");
        };

        IterationRecord r;
        r.iteration = parse_number<std::size_t>(token(0), "an iteration index");
        r.epsilon = optional_number(1);
        r.relative_error = parse_number<double>(token(2), "a number");
        r.weight_error = optional_number(3);
        if (cells[4] == "regular")
            r.phase = Phase::regular;
        else if (cells[4] == "reduced")
            r.phase = Phase::reduced;
        else
            throw ParseError("unknown phase '" + std::string(cells[4]) + "'", line_no,
                             cell_column(cells, 4));
        r.wall_seconds = optional_number(5).value_or(0.0);
        result.trace.records.push_back(r);
    }
    if (!header_seen) throw ParseError("missing trace header", line_no + 1, 0);
    return result;
}

void write_model(std::ostream& out, const KruskalModel& model) {
    check_model(model);
    auto write_values = [&](const double* data, Eigen::Index count) {
        for (Eigen::Index i = 0; i < count; ++i) out << (i ? " " : "") << format_double(data[i]);
        out << '\n';
    };
    out << model.order() << '\n';
    const Shape shape = model.shape();
    for (std::size_t n = 0; n < shape.size(); ++n) out << (n ? " " : "") << shape[n];
    out << '\n' << model.rank() << '\n';
    write_values(model.weights.data(), model.weights.size());
    for (const Matrix& a : model.factors) write_values(a.data(), a.size());
    if (!out) throw std::runtime_error("failed to write model");
}

KruskalModel read_model(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    auto next_tokens = [&](const char* what) {
        while (read_line(in, line, line_no)) {
            auto tokens = tokenize(line, line_no);
            if (!tokens.empty()) return tokens;
        }
        throw ParseError(std::string("unexpected end of model file; expected ") + what, line_no + 1, 0);
    };
    auto expect_count = [&](const std::vector<Token>& tokens, std::size_t count, const char* what) {
        if (tokens.size() != count)
            throw ParseError("expected " + std::to_string(count) + " " + what + ", got " +
                                 std::to_string(tokens.size()),
                             line_no, 0);
    };

    auto tokens = next_tokens("the order");
    expect_count(tokens, 1, "value for the order");
    const auto order = parse_number<std::size_t>(tokens[0], "the order");
    if (order < 1 || order > DenseTensor::max_order)
        throw ParseError("order must be in [1, 8]", line_no, tokens[0].column);

    tokens = next_tokens("the extents");
    expect_count(tokens, order, "extents");
    Shape shape;
    for (const auto& t : tokens) {
        shape.push_back(parse_number<std::size_t>(t, "an extent"));
        if (shape.back() == 0) throw ParseError("extents must be positive", line_no, t.column);
    }

    tokens = next_tokens("the rank");
    expect_count(tokens, 1, "value for the rank");
    const auto rank = parse_number<std::size_t>(tokens[0], "the rank");
    if (rank < 1) throw ParseError("rank must be positive", line_no, tokens[0].column);
    const auto R = static_cast<Eigen::Index>(rank);

    auto read_values = [&](double* dest, std::size_t count, const char* what) {
        const auto values = next_tokens(what);
        expect_count(values, count, what);
        for (std::size_t i = 0; i < count; ++i) dest[i] = parse_number<double>(values[i], "a number");
    };

    Vector weights(R);
    read_values(weights.data(), rank, "weights");
    std::vector<Matrix> factors;
    for (std::size_t extent : shape) {
        Matrix a(static_cast<Eigen::Index>(extent), R);
        read_values(a.data(), extent * rank, "factor entries");
        factors.push_back(std::move(a));
    }
    while (read_line(in, line, line_no))
        if (!tokenize(line, line_no).empty()) throw ParseError("trailing data in model file", line_no, 0);
    return KruskalModel(std::move(weights), std::move(factors));
}

void write_model_file(const std::filesystem::path& path, const KruskalModel& model) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_model(out, model);
}

KruskalModel read_model_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return read_model(in);
}

}  // namespace cpals
