#include "cpals/tensor_io.hpp"

#include "cpals/errors.hpp"
#include "cpals/format.hpp"
#include "text_parse.hpp"

#include <array>
#include <cctype>
#include <stdexcept>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

namespace cpals {

namespace {

using namespace detail;

constexpr std::array<char, 4> binary_magic{'D', 'T', 'E', 'N'};

template <class T>
void write_le(std::ostream& out, T value) {
    static_assert(std::endian::native == std::endian::little, "big-endian hosts unsupported");
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T read_le(std::istream& in, const char* what) {
    T value{};
    if (!in.read(reinterpret_cast<char*>(&value), sizeof(T)))
        throw ParseError(std::string("truncated binary tensor while reading ") + what, 1, 0);
    return value;
}

}  // namespace

DenseTensor read_tensor_text(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;

    if (!read_line(in, line, line_no)) throw ParseError("empty input, expected tensor order", 1, 0);
    auto header = tokenize(line, line_no);
    if (header.size() != 1) throw ParseError("expected a single tensor order", line_no, 0);
    const auto order = parse_number<std::size_t>(header[0], "tensor order");
    if (order == 0 || order > DenseTensor::max_order)
        throw ParseError("tensor order must be in [1, 8]", line_no, header[0].column);

    if (!read_line(in, line, line_no)) throw ParseError("missing extents line", line_no + 1, 0);
    auto extent_tokens = tokenize(line, line_no);
    if (extent_tokens.size() != order)
        throw ParseError("expected " + std::to_string(order) + " extents, found " +
                             std::to_string(extent_tokens.size()),
                         line_no, 0);
    Shape shape;
    for (const auto& tok : extent_tokens) {
        const auto extent = parse_number<std::size_t>(tok, "positive extent");
        if (extent == 0) throw ParseError("extents must be positive", tok.line, tok.column);
        shape.push_back(extent);
    }

    const std::size_t expected = shape_size(shape);
    std::vector<double> values;
    values.reserve(expected);
    while (read_line(in, line, line_no)) {
        for (const auto& tok : tokenize(line, line_no)) {
            if (values.size() == expected)
                throw ParseError("more values than the shape allows", tok.line, tok.column);
            values.push_back(parse_number<double>(tok, "a real value"));
        }
    }
    if (values.size() != expected)
        throw ParseError("expected " + std::to_string(expected) + " values, found " +
                             std::to_string(values.size()),
                         line_no, 0);
    return DenseTensor(std::move(shape), std::move(values));
}

void write_tensor_text(std::ostream& out, const DenseTensor& x) {
    out << x.order() << '\n';
    for (std::size_t m = 0; m < x.order(); ++m) out << (m ? " " : "") << x.extent(m);
    out << '\n';
    // One mode-1 fibre per line keeps large files readable.
    const std::size_t fibre = x.extent(0);
    const auto values = x.values();
    for (std::size_t i = 0; i < values.size(); ++i)
        out << format_double(values[i]) << ((i + 1) % fibre == 0 ? '\n' : ' ');
}

DenseTensor read_tensor_binary(std::istream& in) {
    std::array<char, 4> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != binary_magic)
        throw ParseError("missing DTEN magic", 1, 0);
    const auto order = read_le<std::uint32_t>(in, "order");
    if (order == 0 || order > DenseTensor::max_order)
        throw ParseError("tensor order must be in [1, 8]", 1, 0);
    Shape shape;
    for (std::uint32_t m = 0; m < order; ++m) {
        const auto extent = read_le<std::uint32_t>(in, "extent");
        if (extent == 0) throw ParseError("extents must be positive", 1, 0);
        shape.push_back(extent);
    }
    std::vector<double> values(shape_size(shape));
    for (double& v : values) v = read_le<double>(in, "payload");
    return DenseTensor(std::move(shape), std::move(values));
}

void write_tensor_binary(std::ostream& out, const DenseTensor& x) {
    out.write(binary_magic.data(), binary_magic.size());
    write_le(out, static_cast<std::uint32_t>(x.order()));
    for (std::size_t extent : x.shape()) write_le(out, static_cast<std::uint32_t>(extent));
    for (double v : x.values()) write_le(out, v);
}

DenseTensor read_tensor_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open tensor file " + path.string());
    std::array<char, 4> magic{};
    in.read(magic.data(), magic.size());
    const bool binary = in.gcount() == 4 && magic == binary_magic;
    in.clear();
    in.seekg(0);
    return binary ? read_tensor_binary(in) : read_tensor_text(in);
}

}  // namespace cpals
