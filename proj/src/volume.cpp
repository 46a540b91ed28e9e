#include "logbm/volume.hpp"

#include "logbm/parallel.hpp"
#include "logbm/polygon.hpp"
#include "logbm/rng.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace logbm {

namespace {

constexpr std::uint64_t radial_tag = 0x72616469616c0000ULL;
constexpr std::uint64_t pilot_tag = 0x70696c6f74000000ULL;
constexpr int pilot_samples = 256;

void check_confidence(double c) {
    require(c > 0.0 && c < 1.0, "confidence must lie in (0, 1)");
}

Vector stream_direction(int dim, std::uint64_t seed, std::uint64_t id) {
    rng::CounterStream s(seed, id);
    Vector v(dim);
    do {
        for (int i = 0; i < dim; ++i) v(i) = s.normal();
    } while (v.norm() < 1e-300);
    return v / v.norm();
}

double control_radius(const ControlVariate& c, const Vector& u) {
    return std::clamp(c.radial(u), c.inner, c.outer);
}

}  // namespace

std::string to_string(VolumeMethod m) {
    switch (m) {
        case VolumeMethod::exact_2d: return "exact-2d";
        case VolumeMethod::analytic: return "analytic";
        case VolumeMethod::monte_carlo: return "monte-carlo";
        case VolumeMethod::radial_monte_carlo: return "radial-monte-carlo";
    }
    return "analytic";
}

VolumeMethod volume_method_from_string(const std::string& s) {
    if (s == "exact-2d") return VolumeMethod::exact_2d;
    if (s == "analytic") return VolumeMethod::analytic;
    if (s == "monte-carlo") return VolumeMethod::monte_carlo;
    if (s == "radial-monte-carlo") return VolumeMethod::radial_monte_carlo;
    throw GeometryError("unknown volume method '" + s + "'");
}

bool operator==(const VolumeEstimate& a, const VolumeEstimate& b) {
    return a.value == b.value && a.half_width == b.half_width && a.confidence == b.confidence &&
           a.samples == b.samples && a.seed == b.seed && a.method == b.method;
}

void to_json(nlohmann::json& j, const VolumeEstimate& v) {
    j = {{"value", v.value},   {"half_width", v.half_width}, {"confidence", v.confidence},
         {"samples", v.samples}, {"seed", v.seed},           {"method", to_string(v.method)}};
}

void from_json(const nlohmann::json& j, VolumeEstimate& v) {
    v.value = j.at("value").get<double>();
    v.half_width = j.at("half_width").get<double>();
    v.confidence = j.at("confidence").get<double>();
    v.samples = j.at("samples").get<long long>();
    v.seed = j.at("seed").get<std::uint64_t>();
    v.method = volume_method_from_string(j.at("method").get<std::string>());
}

double unit_ball_volume(int d) {
    return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(1.0 + 0.5 * d);
}

VolumeEstimate volume_exact_2d(const ConvexBody& body) {
    require(body.dim() == 2, "exact area needs a planar body");
    double area = 0.0;
    if (const auto* h = std::get_if<HPolytope>(&body.rep())) {
        area = shoelace_area(halfspace_polygon(h->normals, h->offsets));
    } else if (const auto* v = std::get_if<VPolytope>(&body.rep())) {
        area = shoelace_area(convex_hull_2d(v->vertices));
    } else {
        throw GeometryError("exact area needs a polygon (h- or v-polytope)");
    }
    require(area > 0.0, "polygon is empty or degenerate");
    VolumeEstimate out;
    out.value = area;
    out.method = VolumeMethod::exact_2d;
    return out;
}

bool has_analytic_volume(const ConvexBody& body) {
    return body.shape() != Shape::generic || std::holds_alternative<LpBall>(body.rep()) ||
           std::holds_alternative<HermitianEllipsoid>(body.rep());
}

VolumeEstimate volume_analytic(const ConvexBody& body) {
    const int d = body.dim();
    double value = 0.0;
    if (body.shape() == Shape::cube) {
        value = std::pow(2.0 * body.shape_scale(), d);
    } else if (body.shape() == Shape::cross_polytope) {
        value = std::pow(2.0 * body.shape_scale(), d) / std::tgamma(d + 1.0);
    } else if (const auto* b = std::get_if<LpBall>(&body.rep())) {
        const double ip = std::isinf(b->p) ? 0.0 : 1.0 / b->p;
        const int k = static_cast<int>(b->weights.size());
        if (b->complex) {
            // product of discs in polar coordinates: (pi Gamma(1 + 2/p))^n / Gamma(1 + 2n/p)
            value = std::exp(k * std::log(std::numbers::pi * std::tgamma(1.0 + 2.0 * ip)) -
                             std::lgamma(1.0 + 2.0 * k * ip));
            value /= b->weights.array().square().prod();
        } else {
            value = std::exp(k * std::log(2.0 * std::tgamma(1.0 + ip)) - std::lgamma(1.0 + k * ip));
            value /= b->weights.prod();
        }
    } else if (const auto* e = std::get_if<HermitianEllipsoid>(&body.rep())) {
        value = unit_ball_volume(d) / std::sqrt(e->A.determinant());
    } else {
        throw GeometryError("no closed-form volume for this " + body.kind_name());
    }
    VolumeEstimate out;
    out.value = value;
    out.method = VolumeMethod::analytic;
    return out;
}

std::pair<double, double> clopper_pearson(long long k, long long n, double confidence) {
    check_confidence(confidence);
    require(n > 0 && k >= 0 && k <= n, "invalid binomial count");
    const double alpha = 1.0 - confidence;
    const double kd = static_cast<double>(k), nd = static_cast<double>(n);
    const double lo = k == 0 ? 0.0 : boost::math::ibeta_inv(kd, nd - kd + 1.0, alpha / 2);
    const double hi = k == n ? 1.0 : boost::math::ibeta_inv(kd + 1.0, nd - kd, 1.0 - alpha / 2);
    return {lo, hi};
}

VolumeEstimate volume_mc(const std::vector<ConvexBody>& bodies, long long samples,
                         std::uint64_t seed, double confidence, int jobs) {
    require(!bodies.empty(), "no bodies to intersect");
    require(samples >= min_mc_samples, "monte carlo needs at least 10^4 samples");
    check_confidence(confidence);
    const int d = bodies.front().dim();
    Vector half = axis_extents(bodies.front());
    for (const auto& b : bodies) {
        require(b.dim() == d, "bodies must have the same dimension");
        half = half.cwiseMin(axis_extents(b));
    }
    const double box = (2.0 * half).prod();
    const long long chunks = (samples + mc_chunk - 1) / mc_chunk;
    std::vector<long long> hits(chunks, 0);
    parallel_for(static_cast<int>(chunks), jobs, [&](int c) {
        rng::CounterStream s(seed, static_cast<std::uint64_t>(c));
        const long long begin = static_cast<long long>(c) * mc_chunk;
        const long long len = std::min<long long>(mc_chunk, samples - begin);
        Vector x(d);
        long long h = 0;
        for (long long i = 0; i < len; ++i) {
            for (int j = 0; j < d; ++j) x(j) = s.uniform(-half(j), half(j));
            bool in = true;
            for (const auto& b : bodies) {
                if (!contains(b, x)) {
                    in = false;
                    break;
                }
            }
            h += in;
        }
        hits[c] = h;
    });
    long long k = 0;
    for (long long h : hits) k += h;
    VolumeEstimate out;
    out.method = VolumeMethod::monte_carlo;
    out.samples = samples;
    out.seed = seed;
    out.confidence = confidence;
    if (k == 0) {
        // inconclusive: not accepted
        out.value = 0.0;
        out.half_width = box * clopper_pearson(0, samples, confidence).second;
        return out;
    }
    const double p = static_cast<double>(k) / static_cast<double>(samples);
    const auto [lo, hi] = clopper_pearson(k, samples, confidence);
    out.value = box * p;
    out.half_width = box * std::max(p - lo, hi - p);
    return out;
}

VolumeEstimate volume_mc(const ConvexBody& body, long long samples, std::uint64_t seed,
                         double confidence, int jobs) {
    return volume_mc(std::vector<ConvexBody>{body}, samples, seed, confidence, jobs);
}

BettingInterval betting_interval(const std::vector<double>& x, double alpha) {
    require(!x.empty(), "betting interval needs samples");
    require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
    const std::size_t n = x.size();
    const double threshold = std::log(2.0 / alpha);
    // predictable bet sizes from the running mean and variance
    std::vector<double> bet(n);
    double sum = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double var = (0.25 + ss) / static_cast<double>(i + 1);
        bet[i] = std::sqrt(2.0 * threshold / (static_cast<double>(n) * var));
        sum += x[i];
        const double mu = (0.5 + sum) / static_cast<double>(i + 2);
        ss += (x[i] - mu) * (x[i] - mu);
    }
    constexpr double cap = 0.5;
    // log capital betting on mean > m (sign +1) or mean < m (sign -1); the
    // running maximum is what a sequential test would stop on
    auto rejects = [&](double m, double sign) {
        const double limit = sign > 0 ? cap / m : cap / (1.0 - m);
        double logk = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            logk += std::log1p(sign * std::min(bet[i], limit) * (x[i] - m));
            if (logk >= threshold) return true;
        }
        return false;
    };
    BettingInterval out;
    out.mean = sum / static_cast<double>(n);
    // rejects(m, +1) holds on an interval [0, a), rejects(m, -1) on (b, 1]
    double a = 0.0, b = 1.0;
    if (rejects(0.0, 1.0)) {
        double l = 0.0, h = 1.0;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (l + h);
            (rejects(mid, 1.0) ? l : h) = mid;
        }
        a = l;
    }
    if (rejects(1.0, -1.0)) {
        double l = 0.0, h = 1.0;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (l + h);
            (rejects(mid, -1.0) ? h : l) = mid;
        }
        b = h;
    }
    if (a > b) a = b = 0.5 * (a + b);
    out.lower = std::min(a, out.mean);
    out.upper = std::max(b, out.mean);
    return out;
}

Vector radial_direction(int dim, std::uint64_t seed, long long index) {
    return stream_direction(dim, seed, radial_tag ^ static_cast<std::uint64_t>(index));
}

RadialVolume volume_radial_mc(int dim, const RadialFunction& radial, double inner, double outer,
                              long long samples, std::uint64_t seed, double confidence, int jobs,
                              const std::vector<ControlVariate>& controls) {
    require(samples >= 2, "radial monte carlo needs at least 2 samples");
    require(inner > 0.0 && outer >= inner && std::isfinite(outer), "radial range must be finite and positive");
    check_confidence(confidence);
    const double vb = unit_ball_volume(dim);
    const int nc = static_cast<int>(controls.size());
    std::vector<double> means(nc);
    for (int k = 0; k < nc; ++k) means[k] = controls[k].volume / vb;

    // Control coefficients from an independent pilot: least squares of
    // rho_lower^d on the centred controls.
    Vector beta = Vector::Zero(nc);
    if (nc > 0) {
        Matrix X(pilot_samples, nc);
        Vector y(pilot_samples);
        parallel_for(pilot_samples, jobs, [&](int i) {
            const Vector u = stream_direction(dim, seed, pilot_tag ^ static_cast<std::uint64_t>(i));
            y(i) = std::pow(std::clamp(radial(u).lower, inner, outer), dim);
            for (int k = 0; k < nc; ++k) X(i, k) = std::pow(control_radius(controls[k], u), dim) - means[k];
        });
        const Vector yc = y.array() - y.mean();
        Matrix Xc = X.rowwise() - X.colwise().mean();
        Vector fit = Xc.colPivHouseholderQr().solve(yc);
        if (!fit.allFinite()) fit.setZero();
        // Keep the controls only if the predicted interval shrinks.
        auto predicted = [&](const Vector& b) {
            const Vector z = yc - Xc * b;
            double lo = std::pow(inner, dim), hi = std::pow(outer, dim);
            for (int k = 0; k < nc; ++k) {
                const double a1 = -b(k) * (std::pow(controls[k].outer, dim) - means[k]);
                const double a2 = -b(k) * (std::pow(controls[k].inner, dim) - means[k]);
                lo += std::min(a1, a2);
                hi += std::max(a1, a2);
            }
            const double range = hi - lo;
            const double v = z.squaredNorm() / (pilot_samples - 1) / (range * range);
            const double L = std::log(2.0 / (1.0 - confidence));
            const double n = static_cast<double>(samples);
            return range * (std::sqrt(2.0 * v * L / n) + L / n);
        };
        if (predicted(fit) < predicted(Vector::Zero(nc))) beta = fit;
    }

    std::vector<double> zlo(samples), zhi(samples);
    const long long block = 256;
    const long long blocks = (samples + block - 1) / block;
    parallel_for(static_cast<int>(blocks), jobs, [&](int b) {
        const long long begin = b * block;
        const long long end = std::min(samples, begin + block);
        for (long long i = begin; i < end; ++i) {
            const Vector u = radial_direction(dim, seed, i);
            const RadialSample r = radial(u);
            double shift = 0.0;
            for (int k = 0; k < nc; ++k)
                if (beta(k) != 0.0)
                    shift += beta(k) * (std::pow(control_radius(controls[k], u), dim) - means[k]);
            // the true radius lies in [inner, outer], so clamping keeps both bounds valid
            zlo[i] = std::pow(std::clamp(r.lower, inner, outer), dim) - shift;
            zhi[i] = std::pow(std::clamp(r.upper, inner, outer), dim) - shift;
        }
    });

    // Range of Z.
    double lo = std::pow(inner, dim), hi = std::pow(outer, dim);
    for (int k = 0; k < nc; ++k) {
        const double a1 = -beta(k) * (std::pow(controls[k].outer, dim) - means[k]);
        const double a2 = -beta(k) * (std::pow(controls[k].inner, dim) - means[k]);
        lo += std::min(a1, a2);
        hi += std::max(a1, a2);
    }
    const double range = hi - lo;

    auto summarise = [&](const std::vector<double>& z) {
        VolumeEstimate e;
        e.confidence = confidence;
        e.samples = samples;
        e.seed = seed;
        e.method = VolumeMethod::radial_monte_carlo;
        if (!(range > 0.0)) {
            // inner == outer: the radius is known everywhere
            e.value = vb * lo;
            return e;
        }
        std::vector<double> x(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) x[i] = std::clamp((z[i] - lo) / range, 0.0, 1.0);
        const BettingInterval ci = betting_interval(x, 1.0 - confidence);
        e.value = vb * (lo + range * ci.mean);
        e.half_width = vb * range * std::max(ci.mean - ci.lower, ci.upper - ci.mean);
        return e;
    };
    RadialVolume out;
    out.lower = summarise(zlo);
    out.upper = summarise(zhi);
    out.control_coefficients.assign(beta.data(), beta.data() + nc);
    return out;
}

VolumeEstimate volume_radial_mc(const ConvexBody& body, long long samples, std::uint64_t seed,
                                double confidence, int jobs) {
    require(body.exact(), "radial volume needs an exact gauge");
    const RadiusBounds& r = body.radii();
    const RadialFunction f = [&](const Vector& u) {
        const double rho = 1.0 / gauge(body, u);
        return RadialSample{rho, rho};
    };
    return volume_radial_mc(body.dim(), f, r.inner, r.outer, samples, seed, confidence, jobs).lower;
}

ControlVariate control_variate(const ConvexBody& body) {
    const RadiusBounds& r = body.radii();
    return {[body](const Vector& u) { return 1.0 / gauge(body, u); }, volume_analytic(body).value,
            r.inner, r.outer};
}

}  // namespace logbm
