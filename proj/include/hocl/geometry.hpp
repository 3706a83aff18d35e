#pragma once

// Poincare-ball model of hyperbolic space (curvature -1).

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>

#include "hocl/error.hpp"
#include "hocl/linalg.hpp"

namespace hocl {

// Points are kept at Euclidean norm <= 1 - kBallMargin.
inline constexpr double kBallMargin = 1e-5;

namespace detail {

inline Vector clip_to_ball(Vector x, double margin) {
    const double n = norm(x);
    const double limit = 1.0 - margin;
    if (n > limit) {
        const double scale = limit / n;
        for (double& v : x) v *= scale;
    }
    return x;
}

}  // namespace detail

class PoincarePoint {
public:
    // Accepts any finite vector of Euclidean norm < 1; norms inside the
    // boundary margin are pulled back to 1 - kBallMargin.
    explicit PoincarePoint(Vector coords) {
        if (!all_finite(coords)) throw ArgumentError("PoincarePoint: non-finite coordinate");
        if (hocl::squared_norm(coords) >= 1.0) {
            throw ArgumentError("PoincarePoint: norm must be < 1 (got " +
                                std::to_string(hocl::norm(coords)) + ")");
        }
        coords_ = detail::clip_to_ball(std::move(coords), kBallMargin);
    }

    static PoincarePoint origin(std::size_t dim) { return PoincarePoint(Vector(dim, 0.0)); }

    std::size_t dim() const noexcept { return coords_.size(); }
    std::span<const double> coords() const noexcept { return coords_; }
    double operator[](std::size_t i) const noexcept { return coords_[i]; }

    double squared_norm() const noexcept { return hocl::squared_norm(coords_); }
    double norm() const noexcept { return hocl::norm(coords_); }

    // lambda_x = 2 / (1 - |x|^2)
    double conformal_factor() const noexcept { return 2.0 / (1.0 - squared_norm()); }

    bool operator==(const PoincarePoint&) const = default;

private:
    Vector coords_;
};

class TangentVector {
public:
    TangentVector(PoincarePoint base, Vector components) : base_(std::move(base)) {
        require_same_size(base_.dim(), components.size(), "TangentVector");
        components_ = std::move(components);
    }

    const PoincarePoint& base() const noexcept { return base_; }
    std::span<const double> components() const noexcept { return components_; }
    double norm() const noexcept { return hocl::norm(components_); }

private:
    PoincarePoint base_;
    Vector components_;
};

// arcosh(1 + z) for z >= 0, accurate as z -> 0.
inline double arcosh1p(double z) noexcept {
    if (z <= 0.0) return 0.0;
    return std::log1p(z + std::sqrt(z * (z + 2.0)));
}

inline double hyperbolic_distance(const PoincarePoint& x, const PoincarePoint& y) {
    require_same_size(x.dim(), y.dim(), "hyperbolic_distance");
    const double diff = squared_distance(x.coords(), y.coords());
    const double denom = (1.0 - x.squared_norm()) * (1.0 - y.squared_norm());
    return arcosh1p(2.0 * diff / denom);
}

inline PoincarePoint project_to_ball(Vector x, double margin = kBallMargin) {
    if (!all_finite(x)) throw ArgumentError("project_to_ball: non-finite input");
    return PoincarePoint(detail::clip_to_ball(std::move(x), margin));
}

// Mobius addition x (+) y; y may sit on the closed ball, the result is clipped.
inline PoincarePoint mobius_add(const PoincarePoint& x, std::span<const double> y) {
    require_same_size(x.dim(), y.size(), "mobius_add");
    const double xy = dot(x.coords(), y);
    const double xx = x.squared_norm();
    const double yy = squared_norm(y);
    const double a = 1.0 + 2.0 * xy + yy;
    const double b = 1.0 - xx;
    const double denom = 1.0 + 2.0 * xy + xx * yy;
    Vector out(x.dim());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (a * x[i] + b * y[i]) / denom;
    return project_to_ball(std::move(out));
}

/// Exponential map at `base`:
///   exp_x(v) = x (+) ( tanh(lambda_x |v| / 2) v / |v| )
/// At the origin this is tanh(|v|) v / |v|.
inline PoincarePoint exp_map(const PoincarePoint& base, const TangentVector& v) {
    if (!(v.base() == base)) throw ArgumentError("exp_map: tangent vector attached to another point");
    const double vn = v.norm();
    if (vn == 0.0) return base;
    if (!std::isfinite(vn)) throw ArgumentError("exp_map: non-finite tangent");
    const double t = std::tanh(0.5 * base.conformal_factor() * vn);
    Vector step(v.components().begin(), v.components().end());
    for (double& s : step) s *= t / vn;
    return mobius_add(base, step);
}

// Euclidean gradient divided by lambda_x^2, i.e. scaled by (1 - |x|^2)^2 / 4.
inline TangentVector riemannian_grad(const PoincarePoint& base, std::span<const double> euclidean_grad) {
    require_same_size(base.dim(), euclidean_grad.size(), "riemannian_grad");
    const double one_minus = 1.0 - base.squared_norm();
    const double scale = one_minus * one_minus / 4.0;
    Vector g(euclidean_grad.begin(), euclidean_grad.end());
    for (double& v : g) v *= scale;
    return TangentVector(base, std::move(g));
}

// One Riemannian SGD step: exp_x(-rate * grad).
inline PoincarePoint riemannian_step(const PoincarePoint& base, std::span<const double> euclidean_grad,
                                     double rate) {
    const TangentVector g = riemannian_grad(base, euclidean_grad);
    Vector step(g.components().begin(), g.components().end());
    for (double& v : step) v *= -rate;
    return exp_map(base, TangentVector(base, std::move(step)));
}

// exp_anchor(P x). With anchor = origin this is the learned input projection.
inline PoincarePoint embed_at(const PoincarePoint& anchor, std::span<const double> features,
                              const Matrix& projection) {
    require_same_size(projection.rows(), anchor.dim(), "embed_at (projection rows)");
    require_same_size(projection.cols(), features.size(), "embed_at (projection cols)");
    return exp_map(anchor, TangentVector(anchor, multiply(projection, features)));
}

inline PoincarePoint embed_input(std::span<const double> features, const Matrix& projection) {
    return embed_at(PoincarePoint::origin(projection.rows()), features, projection);
}

}  // namespace hocl
