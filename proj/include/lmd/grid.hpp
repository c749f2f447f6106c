#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "lmd/errors.hpp"

namespace lmd {

using RealField = std::vector<double>;
using ComplexVec = std::vector<std::complex<double>>;

struct AxisSpec {
    double x_min;
    double x_max;
    int n_points;
};

/// Uniform periodic grid over D <= 3 degrees of freedom, row-major layout
/// (last axis fastest). x_max is identified with x_min.
class GridSpec {
public:
    static constexpr int kMaxDims = 3;
    static constexpr int kMinPoints = 8;

    explicit GridSpec(std::vector<AxisSpec> axes) : axes_(std::move(axes)) {
        if (axes_.empty() || axes_.size() > kMaxDims)
            throw ConfigError("grid must have between 1 and 3 dimensions, got " +
                              std::to_string(axes_.size()));
        size_ = 1;
        for (const auto& a : axes_) {
            if (a.n_points < kMinPoints)
                throw ConfigError("grid axis needs n_points >= 8, got " +
                                  std::to_string(a.n_points));
            if (!(a.x_max > a.x_min))
                throw ConfigError("grid axis needs x_max > x_min");
            size_ *= static_cast<std::size_t>(a.n_points);
            dx_.push_back((a.x_max - a.x_min) / a.n_points);
        }
        strides_.assign(axes_.size(), 1);
        for (int d = static_cast<int>(axes_.size()) - 2; d >= 0; --d)
            strides_[d] = strides_[d + 1] * static_cast<std::size_t>(axes_[d + 1].n_points);
        cell_volume_ = 1.0;
        for (double h : dx_) cell_volume_ *= h;
    }

    int ndim() const { return static_cast<int>(axes_.size()); }
    std::size_t size() const { return size_; }
    int n(int d) const { return axes_[d].n_points; }
    double x_min(int d) const { return axes_[d].x_min; }
    double x_max(int d) const { return axes_[d].x_max; }
    double length(int d) const { return axes_[d].x_max - axes_[d].x_min; }
    double dx(int d) const { return dx_[d]; }
    double cell_volume() const { return cell_volume_; }
    std::size_t stride(int d) const { return strides_[d]; }
    const std::vector<AxisSpec>& axes() const { return axes_; }

    double coord(int d, int i) const { return axes_[d].x_min + i * dx_[d]; }

    /// Index along axis d of the flat index idx.
    int axis_index(std::size_t idx, int d) const {
        return static_cast<int>((idx / strides_[d]) % static_cast<std::size_t>(axes_[d].n_points));
    }

    /// Flat index shifted by `shift` cells along axis d, with periodic wrap.
    std::size_t shifted(std::size_t idx, int d, int shift) const {
        const int nd = axes_[d].n_points;
        const int i = axis_index(idx, d);
        int j = (i + shift) % nd;
        if (j < 0) j += nd;
        return idx + (static_cast<std::size_t>(j) - static_cast<std::size_t>(i)) * strides_[d];
    }

    bool same_shape(const GridSpec& o) const {
        if (ndim() != o.ndim()) return false;
        for (int d = 0; d < ndim(); ++d)
            if (n(d) != o.n(d) || x_min(d) != o.x_min(d) || x_max(d) != o.x_max(d)) return false;
        return true;
    }

private:
    std::vector<AxisSpec> axes_;
    std::vector<double> dx_;
    std::vector<std::size_t> strides_;
    std::size_t size_ = 0;
    double cell_volume_ = 1.0;
};

inline GridSpec make_grid(std::vector<AxisSpec> axes) { return GridSpec(std::move(axes)); }

/// 4th-order periodic central finite difference along one axis.
/// order 1: (-f[i+2] + 8 f[i+1] - 8 f[i-1] + f[i-2]) / (12 dx)
/// order 2: (-f[i+2] + 16 f[i+1] - 30 f[i] + 16 f[i-1] - f[i-2]) / (12 dx^2)
template <class T>
std::vector<T> spatial_derivative(const std::vector<T>& f, const GridSpec& g, int axis,
                                  int order) {
    if (axis < 0 || axis >= g.ndim()) throw ConfigError("derivative axis out of range");
    if (order != 1 && order != 2) throw ConfigError("derivative order must be 1 or 2");
    const std::size_t n = g.size();
    if (f.size() != n) throw ConfigError("field size does not match grid");
    std::vector<T> out(n);
    const double h = g.dx(axis);
    if (order == 1) {
        const double c = 1.0 / (12.0 * h);
        for (std::size_t i = 0; i < n; ++i) {
            const T fp1 = f[g.shifted(i, axis, 1)];
            const T fp2 = f[g.shifted(i, axis, 2)];
            const T fm1 = f[g.shifted(i, axis, -1)];
            const T fm2 = f[g.shifted(i, axis, -2)];
            out[i] = c * (fm2 - fp2 + 8.0 * (fp1 - fm1));
        }
    } else {
        const double c = 1.0 / (12.0 * h * h);
        for (std::size_t i = 0; i < n; ++i) {
            const T fp1 = f[g.shifted(i, axis, 1)];
            const T fp2 = f[g.shifted(i, axis, 2)];
            const T fm1 = f[g.shifted(i, axis, -1)];
            const T fm2 = f[g.shifted(i, axis, -2)];
            out[i] = c * (-fp2 - fm2 + 16.0 * (fp1 + fm1) - 30.0 * f[i]);
        }
    }
    return out;
}

inline double integrate(const RealField& f, const GridSpec& g) {
    double s = 0.0;
    for (double v : f) s += v;
    return s * g.cell_volume();
}

}  // namespace lmd
