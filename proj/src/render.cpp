#include "osc/harness/render.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

namespace osc {

namespace {

Rgb color_of(CellState s)
{
    switch (s) {
    case CellState::Background: return kBackgroundColor;
    case CellState::Actionable: return kActionableColor;
    case CellState::Transformed: return kTransformedColor;
    }
    return kBackgroundColor;
}

} // namespace

Image render_map(const SpocMap& map, const std::optional<Vec2>& ee_pos, int scale)
{
    if (scale < 1)
        throw std::invalid_argument("render scale must be >= 1");
    const GridSpec& g = map.grid.spec;
    Image img;
    img.width = g.width * scale;
    img.height = g.height * scale;
    img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);

    std::vector<Rgb> cell_color(g.cell_count());
    for (std::size_t i = 0; i < cell_color.size(); ++i)
        cell_color[i] = color_of(map.grid.cells[i]);

    if (ee_pos) {
        const int ex = std::clamp(static_cast<int>(std::floor(ee_pos->x / g.cell_size)), 0, g.width - 1);
        const int ey = std::clamp(static_cast<int>(std::floor(ee_pos->y / g.cell_size)), 0, g.height - 1);
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx)
                if (g.contains(ex + dx, ey + dy))
                    cell_color[g.index(ex + dx, ey + dy)] = kEndEffectorColor;
    }

    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            img.pixels[static_cast<std::size_t>(y) * img.width + x] = cell_color[g.index(x / scale, y / scale)];
    return img;
}

std::vector<std::uint8_t> encode_ppm(const Image& image)
{
    const std::string header = "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.reserve(out.size() + image.pixels.size() * 3);
    for (const Rgb& p : image.pixels) {
        out.push_back(p.r);
        out.push_back(p.g);
        out.push_back(p.b);
    }
    return out;
}

void render_frame(const SpocMap& map, const std::optional<Vec2>& ee_pos, const std::string& path, int scale)
{
    const auto bytes = encode_ppm(render_map(map, ee_pos, scale));
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw std::runtime_error("write failed: " + path);
}

} // namespace osc
