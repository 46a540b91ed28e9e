#include "logbm/builtin.hpp"

#include "logbm/rng.hpp"
#include "logbm/symmetry.hpp"

#include <cmath>
#include <limits>

namespace logbm {

using nlohmann::json;

namespace {

const json& field(const json& d, const char* name) {
    require(d.contains(name), std::string("descriptor is missing field '") + name + "'");
    return d.at(name);
}

double number(const json& v, const std::string& what) {
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "inf" || s == "infinity" || s == "Infinity") return std::numeric_limits<double>::infinity();
        throw GeometryError(what + " must be a number");
    }
    require(v.is_number(), what + " must be a number");
    return v.get<double>();
}

int integer(const json& v, const std::string& what) {
    require(v.is_number_integer(), what + " must be an integer");
    return v.get<int>();
}

// Real dimension from "dim" or complex dimension "n".
int real_dim(const json& d) {
    if (d.contains("dim")) return integer(d.at("dim"), "dim");
    if (d.contains("n")) return 2 * integer(d.at("n"), "n");
    throw GeometryError("descriptor needs 'n' (complex) or 'dim' (real) dimension");
}

Vector vec(const json& v, const std::string& what) {
    require(v.is_array() && !v.empty(), what + " must be a nonempty array");
    Vector out(static_cast<int>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<int>(i)) = number(v[i], what);
    return out;
}

Matrix rows_of(const json& v, const std::string& what) {
    require(v.is_array() && !v.empty(), what + " must be a nonempty array of rows");
    const Vector first = vec(v[0], what);
    Matrix out(static_cast<int>(v.size()), first.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Vector r = vec(v[i], what);
        require(r.size() == first.size(), what + " rows must have equal length");
        out.row(static_cast<int>(i)) = r.transpose();
    }
    return out;
}

Matrix with_negations(const Matrix& m) {
    Matrix out(2 * m.rows(), m.cols());
    out.topRows(m.rows()) = m;
    out.bottomRows(m.rows()) = -m;
    return out;
}

ConvexBody cube(int d, double s) {
    Matrix normals(2 * d, d);
    normals.setZero();
    for (int i = 0; i < d; ++i) {
        normals(i, i) = 1.0;
        normals(d + i, i) = -1.0;
    }
    return ConvexBody::h_polytope(normals, Vector::Constant(2 * d, s)).with_shape(Shape::cube, s);
}

ConvexBody cross_polytope(int d, double s) {
    Matrix vertices = Matrix::Zero(2 * d, d);
    for (int i = 0; i < d; ++i) {
        vertices(i, i) = s;
        vertices(d + i, i) = -s;
    }
    return ConvexBody::v_polytope(vertices).with_shape(Shape::cross_polytope, s);
}

}  // namespace

ConvexBody random_sym_polytope(int dim, int pairs, std::uint64_t seed) {
    require(dim >= 2 && dim % 2 == 0 && dim <= 8, "random polytope dimension must be even in [2, 8]");
    require(pairs >= dim, "random polytope needs at least dim vertex pairs");
    for (int attempt = 0; attempt < 100; ++attempt) {
        rng::CounterStream stream(seed, static_cast<std::uint64_t>(attempt));
        Matrix half(pairs, dim);
        for (int i = 0; i < pairs; ++i) {
            Vector v(dim);
            do {
                for (int j = 0; j < dim; ++j) v(j) = stream.normal();
            } while (v.norm() < 1e-12);
            half.row(i) = v.normalized().transpose();
        }
        try {
            ConvexBody body = ConvexBody::v_polytope(with_negations(half));
            if (body.radii().inner >= 0.05) return body;
        } catch (const GeometryError&) {
        }
    }
    throw GeometryError("random polytope: no draw with inradius >= 0.05 in 100 attempts");
}

ConvexBody make_builtin(const json& d) {
    require(d.is_object(), "body descriptor must be a JSON object");
    const std::string kind = field(d, "kind").get<std::string>();

    if (kind == "euclidean-ball") {
        const double r = d.contains("radius") ? number(d.at("radius"), "radius") : 1.0;
        require(r > 0.0, "radius must be positive");
        const int n = real_dim(d);
        require(n % 2 == 0, "dimension must be even");
        return ConvexBody::lp_ball(2.0, Vector::Constant(n / 2, 1.0 / r), true);
    }
    if (kind == "cube" || kind == "cross-polytope") {
        const double s = d.contains("scale") ? number(d.at("scale"), "scale") : 1.0;
        require(s > 0.0, "scale must be positive");
        return kind == "cube" ? cube(real_dim(d), s) : cross_polytope(real_dim(d), s);
    }
    if (kind == "lp-ball") {
        const double p = number(field(d, "p"), "p");
        require(p >= 1.0, "lp-ball needs p >= 1");
        const bool complex = d.value("complex", true);
        Vector w;
        if (d.contains("weights")) {
            w = vec(d.at("weights"), "weights");
        } else {
            const int n = real_dim(d);
            require(!complex || n % 2 == 0, "complex lp-ball needs an even dimension");
            w = Vector::Ones(complex ? n / 2 : n);
        }
        return ConvexBody::lp_ball(p, w, complex);
    }
    if (kind == "hermitian-ellipsoid") {
        Matrix A;
        if (d.contains("matrix")) {
            A = rows_of(d.at("matrix"), "matrix");
        } else {
            A = vec(field(d, "diag"), "diag").asDiagonal();
        }
        const bool complex = d.value("complex", commutes_with_complex_structure(A, 1e-12));
        return ConvexBody::hermitian_ellipsoid(A, complex);
    }
    if (kind == "random-sym-polytope") {
        const json& s = field(d, "seed");
        require(s.is_number_unsigned() || s.is_number_integer(), "seed must be an integer");
        return random_sym_polytope(real_dim(d), integer(field(d, "pairs"), "pairs"),
                                   s.get<std::uint64_t>());
    }
    if (kind == "v-polytope") {
        Matrix v = rows_of(field(d, "vertices"), "vertices");
        if (d.value("symmetrize", false)) v = with_negations(v);
        return ConvexBody::v_polytope(std::move(v));
    }
    if (kind == "h-polytope") {
        const json& hs = field(d, "halfspaces");
        require(hs.is_array() && !hs.empty(), "halfspaces must be a nonempty array");
        Matrix normals;
        Vector offsets(static_cast<int>(hs.size()));
        for (std::size_t i = 0; i < hs.size(); ++i) {
            const Vector a = vec(field(hs[i], "normal"), "normal");
            if (i == 0) normals.resize(static_cast<int>(hs.size()), a.size());
            require(a.size() == normals.cols(), "halfspace normals must have equal length");
            normals.row(static_cast<int>(i)) = a.transpose();
            offsets(static_cast<int>(i)) = number(field(hs[i], "offset"), "offset");
        }
        if (d.value("symmetrize", false)) {
            normals = with_negations(normals);
            Vector o(2 * offsets.size());
            o << offsets, offsets;
            offsets = o;
        }
        return ConvexBody::h_polytope(std::move(normals), std::move(offsets));
    }
    if (kind == "complex-hull") {
        return complex_hull(make_builtin(field(d, "body")), integer(field(d, "angles"), "angles"));
    }
    if (kind == "complex-symmetrized") {
        return complex_symmetrize(make_builtin(field(d, "body")),
                                  integer(field(d, "angles"), "angles"));
    }
    if (kind == "scaled") {
        return scale(make_builtin(field(d, "body")), number(field(d, "factor"), "factor"));
    }
    if (kind == "polar") {
        return polar(make_builtin(field(d, "body")));
    }
    throw GeometryError("unknown body kind '" + kind + "'");
}

std::vector<ZooEntry> builtin_zoo() {
    std::vector<ZooEntry> zoo = {
        {"ball", {{"kind", "euclidean-ball"}, {"n", 2}}},
        {"cube", {{"kind", "cube"}, {"n", 2}}},
        {"cross", {{"kind", "cross-polytope"}, {"n", 2}}},
        {"l1", {{"kind", "lp-ball"}, {"p", 1}, {"n", 2}}},
        {"l1.5", {{"kind", "lp-ball"}, {"p", 1.5}, {"n", 2}}},
        {"l3", {{"kind", "lp-ball"}, {"p", 3}, {"n", 2}}},
        {"linf", {{"kind", "lp-ball"}, {"p", "inf"}, {"n", 2}}},
        {"ellipsoid-a", {{"kind", "hermitian-ellipsoid"}, {"diag", {1, 1, 4, 4}}}},
        {"ellipsoid-b", {{"kind", "hermitian-ellipsoid"}, {"diag", {0.5, 0.5, 2, 2}}}},
        {"ellipsoid-c",
         {{"kind", "hermitian-ellipsoid"},
          {"matrix", {{2, 0, 0.5, 0.3}, {0, 2, -0.3, 0.5}, {0.5, -0.3, 1, 0}, {0.3, 0.5, 0, 1}}}}},
    };
    for (int s = 1; s <= 5; ++s) {
        zoo.push_back({"random-" + std::to_string(s),
                       {{"kind", "random-sym-polytope"}, {"dim", 4}, {"pairs", 12}, {"seed", s}}});
    }
    zoo.push_back({"chull-1", {{"kind", "complex-hull"},
                               {"angles", 24},
                               {"body", {{"kind", "random-sym-polytope"}, {"dim", 4}, {"pairs", 6}, {"seed", 11}}}}});
    zoo.push_back({"chull-2", {{"kind", "complex-hull"},
                               {"angles", 24},
                               {"body", {{"kind", "random-sym-polytope"}, {"dim", 4}, {"pairs", 6}, {"seed", 12}}}}});
    return zoo;
}

}  // namespace logbm
