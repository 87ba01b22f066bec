#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "bubblemesh/geometry.hpp"

namespace bubblemesh {

/// Uniform bucket grid over a bounding box. Points outside the box land in
/// the nearest border cell, so queries stay correct (just slower) for them.
class SpatialGrid {
public:
    SpatialGrid() = default;

    SpatialGrid(const Box2& box, double cell_size) { reset(box, cell_size); }

    void reset(const Box2& box, double cell_size) {
        origin_ = box.lo;
        cell_ = cell_size > 0.0 ? cell_size : 1.0;
        const double w = std::max(box.width(), 0.0);
        const double h = std::max(box.height(), 0.0);
        // Cap the cell count; coarser cells only cost query time.
        while ((w / cell_ + 1.0) * (h / cell_ + 1.0) > 4.0e6) cell_ *= 2.0;
        nx_ = static_cast<int>(w / cell_) + 1;
        ny_ = static_cast<int>(h / cell_) + 1;
        cells_.assign(static_cast<std::size_t>(nx_) * ny_, {});
    }

    void insert(int id, const Vec2& p) { cells_[cell_of(p)].push_back(id); }

    void remove(int id, const Vec2& p) {
        auto& c = cells_[cell_of(p)];
        c.erase(std::remove(c.begin(), c.end(), id), c.end());
    }

    void clear() {
        for (auto& c : cells_) c.clear();
    }

    /// Calls fn(id) for every id stored in cells overlapping the disk (p, r).
    template <class Fn>
    void visit(const Vec2& p, double r, Fn&& fn) const {
        const int i0 = clamp_x(static_cast<int>(std::floor((p.x - r - origin_.x) / cell_)));
        const int i1 = clamp_x(static_cast<int>(std::floor((p.x + r - origin_.x) / cell_)));
        const int j0 = clamp_y(static_cast<int>(std::floor((p.y - r - origin_.y) / cell_)));
        const int j1 = clamp_y(static_cast<int>(std::floor((p.y + r - origin_.y) / cell_)));
        for (int j = j0; j <= j1; ++j) {
            for (int i = i0; i <= i1; ++i) {
                for (int id : cells_[static_cast<std::size_t>(j) * nx_ + i]) fn(id);
            }
        }
    }

    double cell_size() const { return cell_; }

private:
    int clamp_x(int i) const { return std::clamp(i, 0, nx_ - 1); }
    int clamp_y(int j) const { return std::clamp(j, 0, ny_ - 1); }

    std::size_t cell_of(const Vec2& p) const {
        const double fx = (p.x - origin_.x) / cell_;
        const double fy = (p.y - origin_.y) / cell_;
        const int i = std::isfinite(fx) ? clamp_x(static_cast<int>(std::floor(std::clamp(fx, -1.0, 1e9)))) : 0;
        const int j = std::isfinite(fy) ? clamp_y(static_cast<int>(std::floor(std::clamp(fy, -1.0, 1e9)))) : 0;
        return static_cast<std::size_t>(j) * nx_ + i;
    }

    Vec2 origin_;
    double cell_ = 1.0;
    int nx_ = 1;
    int ny_ = 1;
    std::vector<std::vector<int>> cells_{1};
};

}  // namespace bubblemesh
