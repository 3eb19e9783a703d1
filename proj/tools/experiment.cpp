#include "experiment.hpp"

#include "cpals/coherence_reduction.hpp"
#include "cpals/errors.hpp"
#include "cpals/format.hpp"
#include "cpals/synthesis.hpp"

#include <array>
#include <chrono>
#include <ctime>
#include <sstream>

namespace cpals::tools {

namespace {

constexpr std::array<std::pair<Preset, std::string_view>, 7> preset_table{{
    {Preset::odeco3, "odeco3"},
    {Preset::odeco4, "odeco4"},
    {Preset::ideco3, "ideco3"},
    {Preset::ideco4, "ideco4"},
    {Preset::weights, "weights"},
    {Preset::hybrid_cyclic, "hybrid-cyclic"},
    {Preset::counterexample_n2, "counterexample-n2"},
}};

constexpr std::size_t synthetic_extent = 20;
constexpr std::size_t synthetic_rank = 10;
constexpr double init_perturbation = 1e-2;
constexpr double incoherence = 1e-2;

StoppingRule rule_for(const ExperimentOptions& options, std::size_t default_iterations) {
    StoppingRule rule;
    rule.max_iterations = options.max_iterations.value_or(default_iterations);
    rule.error_change_tol = options.tolerance.value_or(0.0);
    rule.validate();
    return rule;
}

std::string seed_suffix(std::uint64_t seed) { return "_seed" + std::to_string(seed); }

ExperimentRun run_synthetic(std::string_view preset_name, std::string file_stem, GeneratorKind kind,
                            std::size_t order, std::uint64_t seed, const ExperimentOptions& options) {
    GeneratorSpec spec = GeneratorSpec::cubic(kind, order, synthetic_extent,
                                              options.rank.value_or(synthetic_rank), seed);
    spec.init_perturbation_scale = init_perturbation;
    if (kind == GeneratorKind::ideco) spec.incoherence_scale = incoherence;
    const Instance inst = kind == GeneratorKind::odeco ? gen_odeco(spec) : gen_ideco(spec);

    RunHooks hooks;
    hooks.truth = &inst.truth;
    hooks.direct_error = true;
    const auto rule = rule_for(options, kind == GeneratorKind::odeco ? 10 : 30);
    RunResult result = run(inst.tensor(), inst.init, options.variant, rule, hooks);

    ExperimentRun out;
    out.file_name = std::move(file_stem) + seed_suffix(seed) + ".csv";
    out.metadata = {{"preset", std::string(preset_name)}};
    for (auto& kv : instance_metadata(inst.meta)) out.metadata.push_back(std::move(kv));
    out.metadata.insert(out.metadata.end(),
                        {{"variant", std::string(to_string(options.variant))},
                         {"order", std::to_string(order)},
                         {"extent", std::to_string(synthetic_extent)},
                         {"rank", std::to_string(spec.rank)},
                         {"init_perturbation", format_double(spec.init_perturbation_scale)},
                         {"incoherence", format_double(spec.incoherence_scale)},
                         {"stop", std::string(to_string(result.reason))}});
    out.trace = std::move(result.trace);
    return out;
}

std::vector<ExperimentRun> run_hybrid_cyclic(std::uint64_t seed, const ExperimentOptions& options) {
    const CyclicInstance inst = gen_cyclic(seed);
    const std::size_t rank = options.rank.value_or(3);
    Rng rng = substream(seed, Stream::init);
    const KruskalModel init = random_init(inst.tensor.shape(), rank, rng);

    HybridSchedule schedule;
    schedule.reduced_iterations = options.reduced_iterations.value_or(25);
    schedule.regular_iterations = options.regular_iterations.value_or(25);
    const auto rule =
        rule_for(options, schedule.reduced_iterations + schedule.regular_iterations);
    RunHooks hooks;
    hooks.direct_error = true;

    std::vector<ExperimentRun> runs;
    for (double omega : options.omegas.value_or(default_omega_grid())) {
        schedule.omega = omega;
        RunResult result = run_hybrid(inst.tensor, init, schedule, rule, hooks);
        ExperimentRun out;
        out.file_name = "hybrid-cyclic" + seed_suffix(seed) + "_omega" + format_double(omega) + ".csv";
        out.metadata = {{"preset", "hybrid-cyclic"},
                        {"kind", std::string(to_string(GeneratorKind::cyclic))},
                        {"seed", std::to_string(seed)},
                        {"variant", "serial"},
                        {"rank", std::to_string(rank)},
                        {"omega", format_double(omega)},
                        {"reduced_iterations", std::to_string(schedule.reduced_iterations)},
                        {"regular_iterations", std::to_string(schedule.regular_iterations)},
                        {"stop", std::string(to_string(result.reason))}};
        out.trace = std::move(result.trace);
        runs.push_back(std::move(out));
    }
    return runs;
}

ExperimentRun run_counterexample(std::uint64_t seed, const ExperimentOptions& options) {
    const std::size_t rank = options.rank.value_or(3);
    const CounterexampleInstance inst = gen_identity_counterexample(rank, seed);
    RunHooks hooks;
    hooks.direct_error = true;
    RunResult result = run(inst.tensor, inst.init, options.variant, rule_for(options, 20), hooks);

    ExperimentRun out;
    out.file_name = "counterexample-n2" + seed_suffix(seed) + ".csv";
    out.metadata = {{"preset", "counterexample-n2"},
                    {"kind", std::string(to_string(GeneratorKind::identity_matrix))},
                    {"seed", std::to_string(seed)},
                    {"variant", std::string(to_string(options.variant))},
                    {"rank", std::to_string(rank)},
                    {"stop", std::string(to_string(result.reason))}};
    out.trace = std::move(result.trace);
    return out;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

std::string_view to_string(Preset preset) {
    for (const auto& [p, name] : preset_table)
        if (p == preset) return name;
    return "unknown";
}

std::optional<Preset> parse_preset(std::string_view name) {
    for (const auto& [p, n] : preset_table)
        if (n == name) return p;
    return std::nullopt;
}

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& entry : preset_table) names.emplace_back(entry.second);
    return names;
}

std::vector<double> default_omega_grid() { return {0.0, 0.25, 0.5, 0.75, 1.0}; }

std::vector<ExperimentRun> run_preset(Preset preset, std::uint64_t seed,
                                      const ExperimentOptions& options) {
    switch (preset) {
        case Preset::odeco3:
            return {run_synthetic("odeco3", "odeco3", GeneratorKind::odeco, 3, seed, options)};
        case Preset::odeco4:
            return {run_synthetic("odeco4", "odeco4", GeneratorKind::odeco, 4, seed, options)};
        case Preset::ideco3:
            return {run_synthetic("ideco3", "ideco3", GeneratorKind::ideco, 3, seed, options)};
        case Preset::ideco4:
            return {run_synthetic("ideco4", "ideco4", GeneratorKind::ideco, 4, seed, options)};
        case Preset::weights:
            return {run_synthetic("weights", "weights_odeco3", GeneratorKind::odeco, 3, seed, options),
                    run_synthetic("weights", "weights_ideco3", GeneratorKind::ideco, 3, seed, options)};
        case Preset::hybrid_cyclic:
            return run_hybrid_cyclic(seed, options);
        case Preset::counterexample_n2:
            return {run_counterexample(seed, options)};
    }
    throw PreconditionError("unknown preset");
}

std::string render_run(const ExperimentRun& run, bool timestamp) {
    Metadata metadata = run.metadata;
    if (timestamp) metadata.emplace_back("timestamp", utc_timestamp());
    std::ostringstream out;
    write_trace_csv(out, run.trace, metadata, TraceCsvOptions{timestamp});
    return out.str();
}

}  // namespace cpals::tools
