#pragma once

#include "cpals/kruskal.hpp"
#include "cpals/synthesis.hpp"
#include "cpals/trace.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace cpals {

using Metadata = std::vector<std::pair<std::string, std::string>>;

/// kind, seed, mu and kappa of a synthetic instance.
Metadata instance_metadata(const InstanceMeta& meta);

struct TraceCsvOptions {
    bool timing = true;  // false leaves wall_seconds empty for byte-stable output
};

/// "# key=value" lines, then the header
/// iteration,epsilon,rel_error,weight_error,phase,wall_seconds
/// and one row per record. A phase boundary is appended to the metadata.
void write_trace_csv(std::ostream& out, const ConvergenceTrace& trace, const Metadata& metadata,
                     const TraceCsvOptions& options = {});

struct TraceCsv {
    Metadata metadata;
    ConvergenceTrace trace;
};

/// Inverse of write_trace_csv; throws ParseError with the offending line.
TraceCsv read_trace_csv(std::istream& in);

/// N, extents, R, weights, then each factor column-major, one per line.
void write_model(std::ostream& out, const KruskalModel& model);
KruskalModel read_model(std::istream& in);

void write_model_file(const std::filesystem::path& path, const KruskalModel& model);
KruskalModel read_model_file(const std::filesystem::path& path);

}  // namespace cpals
