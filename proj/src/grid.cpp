#include "umf/grid.hpp"

#include <cmath>
#include <sstream>

#include "umf/error.hpp"

namespace umf {

Grid1D::Grid1D(double x_min, double x_max, std::size_t n_points)
    : x_min_(x_min), x_max_(x_max), n_points_(n_points) {
    if (!(std::isfinite(x_min) && std::isfinite(x_max)) || !(x_min < x_max)) {
        std::ostringstream msg;
        msg << "grid: need finite x_min < x_max, got [" << x_min << ", " << x_max << "]";
        throw ValidationError(msg.str());
    }
    if (n_points < 3) throw ValidationError("grid: need at least 3 points");
    if (x_min > 0.0 || x_max < 0.0) {
        std::ostringstream msg;
        msg << "grid: box [" << x_min << ", " << x_max << "] must contain the anchor x = 0";
        throw ValidationError(msg.str());
    }
    h_ = (x_max - x_min) / static_cast<double>(n_points - 1);
}

Grid1D Grid1D::with_spacing(double x_min, double x_max, double h) {
    if (!(h > 0.0)) throw ValidationError("grid: spacing must be positive");
    const double cells = std::round((x_max - x_min) / h);
    if (cells < 2.0) throw ValidationError("grid: spacing too coarse for the box");
    return Grid1D(x_min, x_min + cells * h, static_cast<std::size_t>(cells) + 1);
}

std::vector<double> Grid1D::points() const {
    std::vector<double> xs(n_points_);
    for (std::size_t i = 0; i < n_points_; ++i) xs[i] = x(i);
    return xs;
}

std::size_t Grid1D::nearest_index(double xq) const {
    const double s = std::round((xq - x_min_) / h_);
    if (s <= 0.0) return 0;
    if (s >= static_cast<double>(n_points_ - 1)) return n_points_ - 1;
    return static_cast<std::size_t>(s);
}

bool Grid1D::is_aligned(double xq) const {
    const double s = (xq - x_min_) / h_;
    return std::abs(s - std::round(s)) <= 1e-9 && s > -0.5 && s < static_cast<double>(n_points_) - 0.5;
}

std::size_t Grid1D::aligned_index(double xq) const {
    if (!is_aligned(xq)) {
        std::ostringstream msg;
        msg << "grid: x = " << xq << " is not a grid point (h = " << h_ << ")";
        throw ValidationError(msg.str());
    }
    return nearest_index(xq);
}

}  // namespace umf
