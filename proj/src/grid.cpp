#include "osc/grid.hpp"

#include "osc/binary_io.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <stdexcept>

namespace osc {

void GridSpec::validate() const
{
    if (width < 8 || height < 8)
        throw std::invalid_argument("grid must be at least 8x8 cells, got " + std::to_string(width) +
                                    "x" + std::to_string(height));
    if (!(cell_size > 0.0))
        throw std::invalid_argument("cell_size must be positive");
}

Vec2 GridSpec::clamp(Vec2 p) const
{
    return {std::clamp(p.x, 0.0, extent_x()), std::clamp(p.y, 0.0, extent_y())};
}

const char* to_string(CellState s)
{
    switch (s) {
    case CellState::Background: return "background";
    case CellState::Actionable: return "actionable";
    case CellState::Transformed: return "transformed";
    }
    return "?";
}

std::size_t CellGrid::count(CellState s) const
{
    return static_cast<std::size_t>(std::count(cells.begin(), cells.end(), s));
}

std::vector<std::uint8_t> serialize_grid(const CellGrid& grid)
{
    std::vector<std::uint8_t> out;
    out.reserve(16 + grid.cells.size());
    io::put_magic(out, "OSCG");
    io::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(grid.spec.width));
    io::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(grid.spec.height));
    io::put_le<std::uint32_t>(out, 0);
    for (CellState c : grid.cells)
        out.push_back(static_cast<std::uint8_t>(c));
    return out;
}

CellGrid deserialize_grid(const std::vector<std::uint8_t>& bytes, double cell_size)
{
    io::Reader in(bytes);
    in.expect_magic("OSCG");
    GridSpec spec;
    spec.width = static_cast<int>(in.get<std::uint32_t>());
    spec.height = static_cast<int>(in.get<std::uint32_t>());
    spec.cell_size = cell_size;
    (void)in.get<std::uint32_t>();
    spec.validate();
    if (in.remaining() != spec.cell_count())
        throw std::runtime_error("grid payload size mismatch");
    CellGrid grid(spec);
    for (auto& c : grid.cells) {
        const auto v = in.get<std::uint8_t>();
        if (v > 2)
            throw std::runtime_error("invalid cell byte " + std::to_string(v));
        c = static_cast<CellState>(v);
    }
    return grid;
}

void write_grid_file(const CellGrid& grid, const std::string& path)
{
    io::write_file(path, serialize_grid(grid));
}

CellGrid read_grid_file(const std::string& path, double cell_size)
{
    return deserialize_grid(io::read_file(path), cell_size);
}

namespace io {

std::vector<std::uint8_t> read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw std::runtime_error("write failed: " + path);
}

} // namespace io
} // namespace osc
