#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace osc {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Vec2&, const Vec2&) = default;
};

/// Discretization of the planar workspace. Cell (cx, cy) covers
/// [cx*cell_size, (cx+1)*cell_size) x [cy*cell_size, (cy+1)*cell_size).
struct GridSpec {
    int width = 64;
    int height = 64;
    double cell_size = 1.0;

    void validate() const;

    double extent_x() const { return width * cell_size; }
    double extent_y() const { return height * cell_size; }
    std::size_t cell_count() const { return static_cast<std::size_t>(width) * height; }

    int index(int cx, int cy) const { return cy * width + cx; }
    int col(int idx) const { return idx % width; }
    int row(int idx) const { return idx / width; }
    bool contains(int cx, int cy) const { return cx >= 0 && cy >= 0 && cx < width && cy < height; }

    Vec2 cell_center(int idx) const
    {
        return {(col(idx) + 0.5) * cell_size, (row(idx) + 0.5) * cell_size};
    }

    /// Clamps a workspace point onto [0, extent_x] x [0, extent_y].
    Vec2 clamp(Vec2 p) const;

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

enum class CellState : std::uint8_t { Background = 0, Actionable = 1, Transformed = 2 };

const char* to_string(CellState s);

/// Row-major array of cell labels. Shared by ground truth and observations.
struct CellGrid {
    GridSpec spec;
    std::vector<CellState> cells;

    CellGrid() = default;
    explicit CellGrid(const GridSpec& s, CellState fill = CellState::Background)
        : spec(s), cells(s.cell_count(), fill)
    {
    }

    CellState& at(int cx, int cy) { return cells[spec.index(cx, cy)]; }
    CellState at(int cx, int cy) const { return cells[spec.index(cx, cy)]; }

    std::size_t count(CellState s) const;
    std::size_t object_cells() const { return cells.size() - count(CellState::Background); }

    friend bool operator==(const CellGrid&, const CellGrid&) = default;
};

/// Binary grid format: "OSCG", u32 width, u32 height, u32 reserved (all
/// little-endian), then one byte per cell in row-major order.
std::vector<std::uint8_t> serialize_grid(const CellGrid& grid);
CellGrid deserialize_grid(const std::vector<std::uint8_t>& bytes, double cell_size = 1.0);

void write_grid_file(const CellGrid& grid, const std::string& path);
CellGrid read_grid_file(const std::string& path, double cell_size = 1.0);

} // namespace osc
