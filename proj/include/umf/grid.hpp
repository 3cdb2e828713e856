#pragma once

#include <cstddef>
#include <vector>

namespace umf {

/// Uniform grid on a finite box [x_min, x_max] standing in for the real line.
/// The box must contain 0, which anchors the vector potential.
class Grid1D {
public:
    Grid1D() = default;

    /// Throws ValidationError unless x_min < x_max, n_points >= 3 and 0 lies in the box.
    Grid1D(double x_min, double x_max, std::size_t n_points);

    /// Grid with the given spacing; x_max is moved onto the last grid point.
    static Grid1D with_spacing(double x_min, double x_max, double h);

    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }
    std::size_t size() const { return n_points_; }
    double spacing() const { return h_; }
    double length() const { return x_max_ - x_min_; }

    double x(std::size_t i) const { return x_min_ + static_cast<double>(i) * h_; }
    std::vector<double> points() const;

    std::size_t nearest_index(double x) const;
    /// Index of a point that lies on the grid to within 1e-9 h; throws otherwise.
    std::size_t aligned_index(double x) const;
    bool is_aligned(double x) const;

    friend bool operator==(const Grid1D& a, const Grid1D& b) {
        return a.x_min_ == b.x_min_ && a.x_max_ == b.x_max_ && a.n_points_ == b.n_points_;
    }

private:
    double x_min_ = -1.0;
    double x_max_ = 1.0;
    std::size_t n_points_ = 3;
    double h_ = 1.0;
};

}  // namespace umf
