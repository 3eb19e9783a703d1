#pragma once

#include "cpals/tensor.hpp"

#include <filesystem>
#include <iosfwd>

namespace cpals {

// Text format: line 1 holds N, line 2 the N extents, then the values in
// colex order separated by any whitespace.
DenseTensor read_tensor_text(std::istream& in);
void write_tensor_text(std::ostream& out, const DenseTensor& x);

// Binary format: "DTEN", u32 N, N x u32 extents, f64 payload, all little-endian.
DenseTensor read_tensor_binary(std::istream& in);
void write_tensor_binary(std::ostream& out, const DenseTensor& x);

/// Reads either format, choosing by the leading magic bytes.
DenseTensor read_tensor_file(const std::filesystem::path& path);

}  // namespace cpals
