#include "experiment.hpp"

#include "cpals/altls.hpp"
#include "cpals/errors.hpp"
#include "cpals/format.hpp"
#include "cpals/kruskal.hpp"
#include "cpals/lemmas.hpp"
#include "cpals/random.hpp"
#include "cpals/synthesis.hpp"
#include "cpals/tensor_io.hpp"
#include "cpals/trace_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace cpals;

namespace {

enum ExitCode : int { ok = 0, usage = 1, parse = 2, degenerate = 3, lemma_violation = 4 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::uint64_t parse_u64(std::string_view text) {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw UsageError("invalid seed '" + std::string(text) + "'");
    return value;
}

// "1,4,7-9" -> 1 4 7 8 9
std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
    std::vector<std::uint64_t> seeds;
    std::string_view rest = spec;
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string_view item = rest.substr(0, comma);
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        if (const auto dash = item.find('-'); dash != std::string_view::npos && dash > 0) {
            const auto lo = parse_u64(item.substr(0, dash));
            const auto hi = parse_u64(item.substr(dash + 1));
            if (hi < lo) throw UsageError("empty seed range '" + std::string(item) + "'");
            for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
        } else {
            seeds.push_back(parse_u64(item));
        }
    }
    if (seeds.empty()) throw UsageError("at least one seed is required");
    return seeds;
}

Variant parse_variant(const std::string& name) {
    if (name == "serial") return Variant::serial;
    if (name == "parallel") return Variant::parallel;
    throw UsageError("unknown variant '" + name + "'");
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

void ensure_directory(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw std::runtime_error("cannot create output directory " + dir.string());
}

struct ExperimentArgs {
    std::string preset;
    std::string seeds = "1";
    std::string output = ".";
    std::string variant = "parallel";
    std::optional<std::size_t> max_iters;
    std::optional<double> tol;
    std::vector<double> omegas;
    std::optional<std::size_t> reduced_iters;
    std::optional<std::size_t> regular_iters;
    std::optional<std::size_t> rank;
    bool no_timestamp = false;
};

int cmd_experiment(const ExperimentArgs& args) {
    const auto preset = tools::parse_preset(args.preset);
    if (!preset) throw UsageError("unknown preset '" + args.preset + "'");
    tools::ExperimentOptions options;
    options.variant = parse_variant(args.variant);
    options.max_iterations = args.max_iters;
    options.tolerance = args.tol;
    if (!args.omegas.empty()) options.omegas = args.omegas;
    options.reduced_iterations = args.reduced_iters;
    options.regular_iterations = args.regular_iters;
    options.rank = args.rank;

    const auto seeds = parse_seeds(args.seeds);
    ensure_directory(args.output);
    for (std::uint64_t seed : seeds) {
        for (const auto& run : tools::run_preset(*preset, seed, options)) {
            const fs::path path = fs::path(args.output) / run.file_name;
            write_text(path, tools::render_run(run, !args.no_timestamp));
            std::cout << path.string() << '\n';
        }
    }
    return ok;
}

struct DecomposeArgs {
    std::string input;
    std::size_t rank = 1;
    std::string variant = "parallel";
    std::size_t max_iters = StoppingRule{}.max_iterations;
    double tol = StoppingRule{}.error_change_tol;
    std::string output = ".";
    std::uint64_t seed = 0;
    bool fast_error = false;
    bool no_timestamp = false;
};

int cmd_decompose(const DecomposeArgs& args) {
    const DenseTensor x = read_tensor_file(args.input);
    const Shape& shape = x.shape();
    if (args.rank < 1) throw UsageError("rank must be at least 1");
    if (args.rank > *std::min_element(shape.begin(), shape.end()))
        std::cerr << "warning: rank " << args.rank
                  << " exceeds the smallest extent; no orthogonal decomposition exists\n";

    Rng rng = substream(args.seed, Stream::init);
    const KruskalModel init = random_init(shape, args.rank, rng);
    StoppingRule rule;
    rule.max_iterations = args.max_iters;
    rule.error_change_tol = args.tol;
    RunHooks hooks;
    hooks.direct_error = !args.fast_error;
    const RunResult result = run(x, init, parse_variant(args.variant), rule, hooks);

    ensure_directory(args.output);
    write_model_file(fs::path(args.output) / "model.txt", result.model);
    tools::ExperimentRun trace_run{"trace.csv",
                                   {{"input", args.input},
                                    {"seed", std::to_string(args.seed)},
                                    {"variant", args.variant},
                                    {"rank", std::to_string(args.rank)},
                                    {"stop", std::string(to_string(result.reason))}},
                                   result.trace};
    write_text(fs::path(args.output) / "trace.csv", tools::render_run(trace_run, !args.no_timestamp));

    const double x_norm = frobenius_norm(x);
    const double err = direct_error(x, result.model);
    std::cout << "iterations " << result.trace.back().iteration << '\n'
              << "stop " << to_string(result.reason) << '\n'
              << "relative_error " << format_double(x_norm > 0.0 ? err / x_norm : err) << '\n';
    return ok;
}

struct LemmaArgs {
    std::size_t instances = 1000;
    std::uint64_t seed = 0;
    std::string output = "lemmas.csv";
};

int cmd_lemmas(const LemmaArgs& args) {
    if (args.instances < 1) throw UsageError("instances must be at least 1");
    const auto rows = run_lemma_suite(args.instances, args.seed);
    std::ofstream out(args.output, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + args.output + " for writing");
    write_lemma_csv(out, rows);

    std::size_t violations = 0;
    for (const auto& row : rows)
        if (row.report.violated()) {
            ++violations;
            std::cerr << "violation: " << to_string(row.id) << " seed " << row.seed << " part "
                      << row.report.part << " margin " << format_double(row.report.margin) << '\n';
        }
    std::cout << rows.size() << " instances, " << violations << " violations\n";
    return violations == 0 ? ok : lemma_violation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CP decomposition by alternating least squares: experiments and tools"};
    app.require_subcommand(1);

    ExperimentArgs exp;
    auto* experiment = app.add_subcommand("experiment", "Run a synthetic experiment preset");
    experiment->add_option("--preset", exp.preset, "Preset name")
        ->required()
        ->check(CLI::IsMember(tools::preset_names()));
    experiment->add_option("--seeds", exp.seeds, "Seeds, e.g. 1,2,5-9")->capture_default_str();
    experiment->add_option("--output", exp.output, "Output directory")->capture_default_str();
    experiment->add_option("--variant", exp.variant, "serial or parallel")
        ->check(CLI::IsMember({"serial", "parallel"}))
        ->capture_default_str();
    experiment->add_option("--max-iters", exp.max_iters, "Iteration cap");
    experiment->add_option("--tol", exp.tol, "Relative fast-error change tolerance");
    experiment->add_option("--omega", exp.omegas, "Omega values for hybrid-cyclic")
        ->delimiter(',')
        ->check(CLI::Range(0.0, 1.0));
    experiment->add_option("--reduced-iters", exp.reduced_iters, "Coherence-reduced iterations");
    experiment->add_option("--regular-iters", exp.regular_iters, "Regular iterations after them");
    experiment->add_option("--rank", exp.rank, "Override the preset rank")->check(CLI::PositiveNumber);
    experiment->add_flag("--no-timestamp", exp.no_timestamp,
                         "Omit the timestamp line and wall-clock column");

    DecomposeArgs dec;
    auto* decompose = app.add_subcommand("decompose", "Fit a CP model to a tensor file");
    decompose->add_option("--input", dec.input, "Tensor file (text or binary)")->required();
    decompose->add_option("--rank", dec.rank, "Number of components")->required();
    decompose->add_option("--variant", dec.variant, "serial or parallel")
        ->check(CLI::IsMember({"serial", "parallel"}))
        ->capture_default_str();
    decompose->add_option("--max-iters", dec.max_iters, "Iteration cap")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    decompose->add_option("--tol", dec.tol, "Relative fast-error change tolerance")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    decompose->add_option("--output", dec.output, "Output directory")->capture_default_str();
    decompose->add_option("--seed", dec.seed, "Initialization seed")->capture_default_str();
    decompose->add_flag("--fast-error", dec.fast_error,
                        "Record the fast error instead of the dense reconstruction error");
    decompose->add_flag("--no-timestamp", dec.no_timestamp,
                        "Omit the timestamp line and wall-clock column");

    LemmaArgs lem;
    auto* lemmas = app.add_subcommand("lemmas", "Check the perturbation lemmas on random instances");
    lemmas->add_option("--instances", lem.instances, "Instances per lemma")->capture_default_str();
    lemmas->add_option("--seed", lem.seed, "Suite seed")->capture_default_str();
    lemmas->add_option("--output", lem.output, "CSV path")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : usage;
    }

    try {
        if (*experiment) return cmd_experiment(exp);
        if (*decompose) return cmd_decompose(dec);
        return cmd_lemmas(lem);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return parse;
    } catch (const DegenerateComponentError& e) {
        std::cerr << "numerical degeneracy: " << e.what() << '\n';
        return degenerate;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return usage;
    }
}
