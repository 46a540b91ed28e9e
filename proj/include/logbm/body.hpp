#pragma once

#include "logbm/grid.hpp"
#include "logbm/vector.hpp"

#include <limits>
#include <memory>
#include <string>
#include <variant>

namespace logbm {

/// conv{rows of vertices}; the vertex set is closed under negation.
struct VPolytope {
    Matrix vertices;
};

/// {x : <x, normals.row(i)> <= offsets(i)}; the family is closed under negation.
struct HPolytope {
    Matrix normals;
    Vector offsets;
};

/// A body known only through support values on a grid. Off-grid evaluation
/// is approximate (nearest grid direction).
struct SupportSampled {
    DirectionGrid grid;
    Vector values;
};

/// Unit ball of (sum_j (w_j m_j)^p)^{1/p}, where m_j is |z_j| for the complex
/// flag (one weight per complex coordinate) and |x_j| otherwise.
struct LpBall {
    double p = 2.0;
    Vector weights;
    bool complex = true;
};

/// {x : <x, A x> <= 1}. Support is sqrt(<t, A^{-1} t>).
struct HermitianEllipsoid {
    Matrix A;
    Matrix A_inv;
    bool complex = false;
};

/// Builtin shapes whose volume is known in closed form: scale * [-1,1]^d or
/// scale * conv{+-e_i}.
enum class Shape { generic, cube, cross_polytope };

struct RadiusBounds {
    double inner = 0.0;  // lower bound on the inradius
    double outer = std::numeric_limits<double>::infinity();  // upper bound on circumradius
    bool certified = false;
};

class ConvexBody {
public:
    using Representation =
        std::variant<VPolytope, HPolytope, SupportSampled, LpBall, HermitianEllipsoid>;

    static ConvexBody v_polytope(Matrix vertices);
    static ConvexBody h_polytope(Matrix normals, Vector offsets);
    static ConvexBody support_sampled(DirectionGrid grid, Vector values);
    static ConvexBody lp_ball(double p, Vector weights, bool complex);
    static ConvexBody hermitian_ellipsoid(Matrix A, bool complex);

    int dim() const { return dim_; }
    const Representation& rep() const { return rep_; }
    std::string kind_name() const;

    /// True for representations whose support, gauge and support points are
    /// computed without approximation.
    bool exact() const { return !std::holds_alternative<SupportSampled>(rep_); }

    Shape shape() const { return shape_; }
    double shape_scale() const { return shape_scale_; }
    ConvexBody with_shape(Shape s, double scale) const;

    /// Cached, thread-safe.
    const RadiusBounds& radii() const;

private:
    ConvexBody(Representation rep, int dim);

    struct Cache;
    Representation rep_;
    int dim_ = 0;
    Shape shape_ = Shape::generic;
    double shape_scale_ = 1.0;
    std::shared_ptr<Cache> cache_;
};

struct SupportValue {
    double value = 0.0;
    bool approximate = false;
    double approximation_radius = 0.0;  // grid mesh when approximate
};

double support(const ConvexBody& body, const Vector& direction);
SupportValue support_detail(const ConvexBody& body, const Vector& direction);

/// A point of the body attaining the support value in the given direction.
/// Unavailable for support-sampled bodies.
Vector support_point(const ConvexBody& body, const Vector& direction);

struct SupportWithPoint {
    double value = 0.0;  // never below the true support (up to rounding)
    Vector point;        // a point of the body (up to rounding) with <point, dir> close to value
};

/// Both at once; one linear program for h-polytopes.
SupportWithPoint support_with_point(const ConvexBody& body, const Vector& direction);

double gauge(const ConvexBody& body, const Vector& point);

/// Membership with the relative slack 1e-12 on every constraint.
bool contains(const ConvexBody& body, const Vector& point);

ConvexBody polar(const ConvexBody& body);
ConvexBody scale(const ConvexBody& body, double factor);

/// max(h(e_i), h(-e_i)) per coordinate: half-widths of the axis bounding box.
Vector axis_extents(const ConvexBody& body);

/// Closed under x -> -x (checked structurally or on the grid).
bool is_origin_symmetric(const ConvexBody& body, double tol = 1e-12);

/// True for complex-flagged lp-balls and ellipsoids whose matrix commutes with i.
bool declared_complex(const ConvexBody& body);

}  // namespace logbm
