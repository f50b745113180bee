#pragma once

#include "osc/grid.hpp"
#include "osc/perception.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace osc {

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

inline constexpr Rgb kBackgroundColor{128, 128, 128};
inline constexpr Rgb kActionableColor{220, 60, 60};
inline constexpr Rgb kTransformedColor{60, 180, 75};
inline constexpr Rgb kEndEffectorColor{0, 0, 0};

struct Image {
    int width = 0;
    int height = 0;
    std::vector<Rgb> pixels; ///< row-major, top row first

    Rgb at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

/// One `scale`×`scale` pixel block per cell. Cell row 0 is the top image row.
/// The end-effector is a 3×3 block of black cells centered on its cell,
/// clipped at the border; nullopt draws no marker.
Image render_map(const SpocMap& map, const std::optional<Vec2>& ee_pos, int scale = 1);

/// Binary PPM (P6, maxval 255).
std::vector<std::uint8_t> encode_ppm(const Image& image);

void render_frame(const SpocMap& map, const std::optional<Vec2>& ee_pos, const std::string& path, int scale = 1);

} // namespace osc
