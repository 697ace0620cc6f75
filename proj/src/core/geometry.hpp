#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace quansim {

// Integer cell coordinate. x indexes columns [0, width), y indexes rows [0, height).
struct Cell {
    int x = 0;
    int y = 0;

    friend bool operator==(const Cell& a, const Cell& b) { return a.x == b.x && a.y == b.y; }
    friend bool operator!=(const Cell& a, const Cell& b) { return !(a == b); }
    friend bool operator<(const Cell& a, const Cell& b) {
        return a.y != b.y ? a.y < b.y : a.x < b.x;
    }
};

// Grid dimensions without field values; enough for kernel geometry and bounds checks.
struct GridGeometry {
    int width = 0;
    int height = 0;

    int cell_count() const { return width * height; }
    bool contains(Cell c) const { return c.x >= 0 && c.x < width && c.y >= 0 && c.y < height; }
    int index_of(Cell c) const { return c.y * width + c.x; }
    Cell cell_at(int index) const { return Cell{index % width, index / width}; }
};

// Euclidean distance in cell units.
inline double distance_cells(Cell a, Cell b) {
    const double dx = static_cast<double>(a.x - b.x);
    const double dy = static_cast<double>(a.y - b.y);
    return std::sqrt(dx * dx + dy * dy);
}

// Distance in meters under a uniform cell size.
inline double distance_m(Cell a, Cell b, double cell_size_m) {
    return distance_cells(a, b) * cell_size_m;
}

// The four unit moves, in the fixed tie-break order used everywhere.
enum class Action : int { PosX = 0, NegX = 1, PosY = 2, NegY = 3 };

inline constexpr std::array<Action, 4> kAllActions = {Action::PosX, Action::NegX, Action::PosY,
                                                      Action::NegY};

inline Cell apply_action(Cell c, Action a) {
    switch (a) {
        case Action::PosX: return Cell{c.x + 1, c.y};
        case Action::NegX: return Cell{c.x - 1, c.y};
        case Action::PosY: return Cell{c.x, c.y + 1};
        case Action::NegY: return Cell{c.x, c.y - 1};
    }
    return c;
}

inline const char* action_name(Action a) {
    switch (a) {
        case Action::PosX: return "+x";
        case Action::NegX: return "-x";
        case Action::PosY: return "+y";
        case Action::NegY: return "-y";
    }
    return "?";
}

// Legal actions from a cell, preserving the canonical order.
inline std::vector<Action> legal_actions(Cell c, const GridGeometry& g) {
    std::vector<Action> out;
    out.reserve(4);
    for (Action a : kAllActions) {
        if (g.contains(apply_action(c, a))) out.push_back(a);
    }
    return out;
}

}  // namespace quansim
