#pragma once

#include "cpals/altls.hpp"
#include "cpals/trace.hpp"
#include "cpals/trace_io.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cpals::tools {

enum class Preset { odeco3, odeco4, ideco3, ideco4, weights, hybrid_cyclic, counterexample_n2 };

std::string_view to_string(Preset preset);
std::optional<Preset> parse_preset(std::string_view name);
std::vector<std::string> preset_names();

/// Overrides for a preset's defaults. Unset fields keep the preset values.
struct ExperimentOptions {
    Variant variant = Variant::parallel;
    std::optional<std::size_t> max_iterations;
    std::optional<double> tolerance;
    std::optional<std::vector<double>> omegas;
    std::optional<std::size_t> reduced_iterations;
    std::optional<std::size_t> regular_iterations;
    std::optional<std::size_t> rank;
};

/// One trace CSV worth of results.
struct ExperimentRun {
    std::string file_name;
    Metadata metadata;
    ConvergenceTrace trace;
};

/// Runs one seed of a preset. Returns one run per CSV the preset produces
/// (several for weights and hybrid-cyclic). DegenerateComponentError
/// propagates.
std::vector<ExperimentRun> run_preset(Preset preset, std::uint64_t seed,
                                      const ExperimentOptions& options = {});

/// CSV text for a run; `timestamp` adds a creation-time comment and the
/// wall-clock column, both of which vary between reruns.
std::string render_run(const ExperimentRun& run, bool timestamp);

/// Default omega grid of the hybrid preset.
std::vector<double> default_omega_grid();

}  // namespace cpals::tools
