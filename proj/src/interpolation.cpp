#include "logbm/interpolation.hpp"

#include "logbm/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace logbm {

namespace {

using cplx = std::complex<double>;

constexpr double inf = std::numeric_limits<double>::infinity();

void check_lambda(double lambda) {
    require(lambda >= 0.0 && lambda <= 1.0 && !std::isnan(lambda), "lambda must lie in [0, 1]");
}

// y += c * v in the interleaved layout
void axpy(Vector& y, cplx c, const Vector& v) {
    for (int j = 0; 2 * j < v.size(); ++j) {
        const cplx z = c * cplx(v(2 * j), v(2 * j + 1));
        y(2 * j) += z.real();
        y(2 * j + 1) += z.imag();
    }
}

cplx term(const AnalyticCandidate& f, int k, cplx zeta) {
    return std::exp(f.epsilon * zeta * zeta + f.sigma * k * zeta);
}

Matrix sym_power(const Matrix& A, double power) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (A + A.transpose()));
    require(es.info() == Eigen::Success && es.eigenvalues().minCoeff() > 0.0,
            "matrix must be symmetric positive definite");
    const Vector ev = es.eigenvalues().array().pow(power);
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

double inv_p(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }

// Smoothed coordinate minimax descent on the boundary gauges.
class Optimiser {
public:
    Optimiser(const ConvexBody& K, const ConvexBody& T, double lambda, const Vector& x,
              const InterpOptions& o)
        : K_(K), T_(T), x_(x), o_(o), d_(static_cast<int>(x.size())), nk_(2 * o.m),
          n_(o.t_points) {
        // d_k(t) = c_k(t) - c_0(t) on both lines
        D_.resize(static_cast<std::size_t>(2 * n_) * nk_);
        F_.assign(2 * n_, Vector::Zero(d_));
        for (int b = 0; b < 2; ++b) {
            for (int i = 0; i < n_; ++i) {
                const double t = n_ == 1 ? 0.0 : -o.t_max + 2.0 * o.t_max * i / (n_ - 1);
                const cplx zeta(b - lambda, t);
                AnalyticCandidate f;
                f.epsilon = o.epsilon;
                f.sigma = o.sigma;
                const cplx c0 = term(f, 0, zeta);
                for (int kk = 0; kk < nk_; ++kk)
                    D_[index(b, i) * nk_ + kk] = term(f, k_of(kk), zeta) - c0;
                axpy(F_[index(b, i)], c0, x);
            }
        }
        G_.resize(2 * n_);
        for (int p = 0; p < 2 * n_; ++p) G_(p) = gauge(body(p), F_[p]);
        w_ = Vector::Zero(nk_ * d_);
    }

    int k_of(int kk) const { return kk < o_.m ? kk - o_.m : kk - o_.m + 1; }
    std::size_t index(int b, int i) const { return static_cast<std::size_t>(b * n_ + i); }
    const ConvexBody& body(int p) const { return p < n_ ? K_ : T_; }

    // Loads coefficients (k != 0 entries of a candidate with the same m).
    void load(const Vector& w) {
        const Vector dw = w - w_;
        for (int j = 0; j < w.size(); ++j)
            if (dw(j) != 0.0) shift(j, dw(j), F_);
        w_ = w;
        for (int p = 0; p < 2 * n_; ++p) G_(p) = gauge(body(p), F_[p]);
    }

    double surrogate(const Vector& G, double mu) const {
        const double M = G.maxCoeff();
        if (mu <= 0.0) return M;
        return M + mu * std::log((((G.array() - M) / mu).exp()).sum());
    }

    // Coordinate j of w moves by delta: one complex slot of f changes.
    void shift(int j, double delta, std::vector<Vector>& F) const {
        const int kk = j / d_, s = j % d_, i = s / 2;
        const cplx unit = (s % 2 == 0) ? cplx(1.0, 0.0) : cplx(0.0, 1.0);
        for (int p = 0; p < 2 * n_; ++p) {
            const cplx z = delta * D_[static_cast<std::size_t>(p) * nk_ + kk] * unit;
            F[p](2 * i) += z.real();
            F[p](2 * i + 1) += z.imag();
        }
    }

    void trial(int j, double delta, Vector& G) {
        ++evaluations;
        const int kk = j / d_, s = j % d_, i = s / 2;
        const cplx unit = (s % 2 == 0) ? cplx(1.0, 0.0) : cplx(0.0, 1.0);
        for (int p = 0; p < 2 * n_; ++p) {
            Vector& v = F_[p];
            const double a = v(2 * i), b = v(2 * i + 1);
            const cplx z = delta * D_[static_cast<std::size_t>(p) * nk_ + kk] * unit;
            v(2 * i) += z.real();
            v(2 * i + 1) += z.imag();
            G(p) = gauge(body(p), v);
            v(2 * i) = a;
            v(2 * i + 1) = b;
        }
    }

    // Gauges at arbitrary coefficients (used for pattern moves).
    void full(const Vector& w, std::vector<Vector>& F, Vector& G) {
        ++evaluations;
        const Vector dw = w - w_;
        F = F_;
        for (int j = 0; j < dw.size(); ++j)
            if (dw(j) != 0.0) shift(j, dw(j), F);
        for (int p = 0; p < 2 * n_; ++p) G(p) = gauge(body(p), F[p]);
    }

    void run(int budget) {
        best_w = w_;
        best = G_.maxCoeff();
        const int P = static_cast<int>(w_.size());
        if (P == 0) return;
        const double mus[] = {3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 0.0};
        const int stages = 6;
        Vector steps = Vector::Constant(P, 0.1);
        Vector G(2 * n_);
        std::vector<Vector> F;
        auto accept = [&](double val, double& cur) {
            cur = val;
            const double M = G_.maxCoeff();
            if (M < best) {
                best = M;
                best_w = w_;
            }
        };
        for (int st = 0; st < stages; ++st) {
            const int stage_end = st == stages - 1 ? budget : budget * (st + 1) / stages;
            const double mu = mus[st] * G_.maxCoeff();
            double cur = surrogate(G_, mu);
            steps = steps.cwiseMax(1e-3);
            while (evaluations < stage_end && steps.maxCoeff() > 1e-9) {
                ++sweeps;
                const Vector w_start = w_;
                for (int j = 0; j < P && evaluations < stage_end; ++j) {
                    if (steps(j) <= 1e-9) continue;
                    bool moved = false;
                    for (double sgn : {1.0, -1.0}) {
                        const double delta = sgn * steps(j);
                        trial(j, delta, G);
                        const double val = surrogate(G, mu);
                        if (val < cur) {
                            shift(j, delta, F_);
                            w_(j) += delta;
                            G_ = G;
                            accept(val, cur);
                            steps(j) = std::min(2.0 * steps(j), 1.0);
                            moved = true;
                            break;
                        }
                        if (evaluations >= stage_end) break;
                    }
                    if (!moved) steps(j) *= 0.5;
                }
                // pattern move along the sweep's net displacement
                Vector dir = w_ - w_start;
                while (dir.squaredNorm() > 0.0 && evaluations < stage_end) {
                    const Vector w = w_ + dir;
                    full(w, F, G);
                    const double val = surrogate(G, mu);
                    if (!(val < cur)) break;
                    F_.swap(F);
                    w_ = w;
                    G_ = G;
                    accept(val, cur);
                    dir *= 2.0;
                }
            }
        }
    }

    AnalyticCandidate candidate(const Vector& w, double lambda) const {
        AnalyticCandidate f;
        f.lambda = lambda;
        f.epsilon = o_.epsilon;
        f.sigma = o_.sigma;
        f.m = o_.m;
        f.coeffs.assign(2 * o_.m + 1, Vector::Zero(d_));
        Vector v0 = x_;
        for (int kk = 0; kk < nk_; ++kk) {
            const Vector v = w.segment(kk * d_, d_);
            f.coeffs[k_of(kk) + o_.m] = v;
            v0 -= v;
        }
        f.coeffs[o_.m] = v0;
        return f;
    }

    Vector params_of(const AnalyticCandidate& f) const {
        Vector w(nk_ * d_);
        for (int kk = 0; kk < nk_; ++kk) w.segment(kk * d_, d_) = f.coeffs[k_of(kk) + o_.m];
        return w;
    }

    int evaluations = 0;
    int sweeps = 0;
    double best = inf;
    Vector best_w;

private:
    const ConvexBody& K_;
    const ConvexBody& T_;
    Vector x_;
    InterpOptions o_;
    int d_, nk_, n_;
    std::vector<cplx> D_;
    std::vector<Vector> F_;
    Vector G_;
    Vector w_;
};

}  // namespace

Vector AnalyticCandidate::value(std::complex<double> z) const {
    require(!coeffs.empty(), "empty candidate");
    Vector out = Vector::Zero(coeffs.front().size());
    const cplx zeta = z - lambda;
    for (int k = -m; k <= m; ++k) axpy(out, term(*this, k, zeta), coeffs[k + m]);
    return out;
}

Vector AnalyticCandidate::at_lambda() const {
    Vector out = Vector::Zero(coeffs.front().size());
    for (const Vector& v : coeffs) out += v;
    return out;
}

AnalyticCandidate AnalyticCandidate::widened(int new_m) const {
    require(new_m >= m, "cannot narrow a candidate");
    AnalyticCandidate f = *this;
    f.m = new_m;
    f.coeffs.assign(2 * new_m + 1, Vector::Zero(coeffs.front().size()));
    for (int k = -m; k <= m; ++k) f.coeffs[k + new_m] = coeffs[k + m];
    return f;
}

void to_json(nlohmann::json& j, const InterpOptions& o) {
    j = {{"m", o.m},           {"sigma", o.sigma},         {"epsilon", o.epsilon},
         {"t_max", o.t_max},   {"t_points", o.t_points},   {"budget", o.budget},
         {"certify_intervals", o.certify_intervals}};
}

double certified_norm(const ConvexBody& K, const ConvexBody& T, const AnalyticCandidate& f,
                      double t_max, int intervals) {
    require(K.exact() && T.exact(), "interpolation bounds need exact gauges");
    require(intervals >= 1 && t_max > 0.0, "invalid certification grid");
    const double h = 2.0 * t_max / intervals;
    double sup = 0.0;
    for (int b = 0; b < 2; ++b) {
        const ConvexBody& body = b == 0 ? K : T;
        const double r = body.radii().inner;
        require(r > 0.0, "body needs a positive certified inradius");
        const double a = b - f.lambda;
        std::vector<double> g(intervals + 1);
        for (int j = 0; j <= intervals; ++j)
            g[j] = gauge(body, f.value(cplx(b, -t_max + j * h)));
        // |f'| <= sum |v_k| |2 eps zeta + sigma k| e^{eps (a^2 - t^2) + sigma k a}
        auto lipschitz = [&](double tmin, double tmax) {
            double L = 0.0;
            for (int k = -f.m; k <= f.m; ++k) {
                const double c = f.coeffs[k + f.m].norm();
                if (c == 0.0) continue;
                L += c * (2.0 * f.epsilon * std::hypot(a, tmax) + f.sigma * std::abs(k)) *
                     std::exp(f.epsilon * (a * a - tmin * tmin) + f.sigma * k * a);
            }
            return L / r;
        };
        for (int j = 0; j < intervals; ++j) {
            const double t0 = -t_max + j * h, t1 = t0 + h;
            const double tmin = (t0 <= 0.0 && t1 >= 0.0) ? 0.0 : std::min(std::abs(t0), std::abs(t1));
            const double tmx = std::max(std::abs(t0), std::abs(t1));
            sup = std::max(sup, 0.5 * (g[j] + g[j + 1]) + 0.5 * h * lipschitz(tmin, tmx));
        }
        // tail |t| >= t_max: the Gaussian factor is largest at t_max, and
        // g(e^{i phi} v) <= |cos phi| g(v) + |sin phi| g(iv) <= sqrt(g(v)^2 + g(iv)^2)
        double tail = 0.0;
        for (int k = -f.m; k <= f.m; ++k) {
            const Vector& v = f.coeffs[k + f.m];
            if (v.norm() == 0.0) continue;
            const double gv = gauge(body, v), giv = gauge(body, rotate_complex(v, 0.5 * std::numbers::pi));
            tail += std::min(std::hypot(gv, giv), v.norm() / r) *
                    std::exp(f.epsilon * (a * a - t_max * t_max) + f.sigma * k * a);
        }
        sup = std::max(sup, tail);
    }
    return sup * (1.0 + 1e-12);
}

namespace {

// One optimisation level at fixed m, optionally warm-started from `warm`
// (already normalised to |x| = 1). Returns the better of the two.
UpperBound optimise_level(const ConvexBody& K, const ConvexBody& T, double lambda,
                          const Vector& xh, const InterpOptions& opts,
                          const std::optional<std::pair<AnalyticCandidate, double>>& warm) {
    Optimiser opt(K, T, lambda, xh, opts);
    if (warm) {
        AnalyticCandidate w = warm->first.widened(opts.m);
        w.coeffs[opts.m] += xh - w.at_lambda();  // f(lambda) = x exactly
        opt.load(opt.params_of(w));
    }
    opt.run(opts.budget);
    UpperBound out;
    out.candidate = opt.candidate(opt.best_w, lambda);
    out.value = certified_norm(K, T, out.candidate, opts.t_max, opts.certify_intervals);
    out.grid_value = opt.best;
    out.evaluations = opt.evaluations;
    out.sweeps = opt.sweeps;
    if (warm && warm->second <= out.value) {
        out.candidate = warm->first.widened(opts.m);
        out.value = warm->second;
    }
    return out;
}

}  // namespace

UpperBound interp_norm_upper(const ConvexBody& K, const ConvexBody& T, double lambda,
                             const Vector& x, const InterpOptions& opts,
                             const AnalyticCandidate* warm) {
    check_lambda(lambda);
    require(K.dim() == T.dim() && x.size() == K.dim(), "dimension mismatch");
    require(opts.m >= 0 && opts.epsilon >= 0.0 && opts.sigma > 0.0 && opts.t_points >= 2 &&
                opts.budget >= 0,
            "invalid interpolation options");
    const double s = x.norm();
    require(s > 0.0, "interpolated norm of the zero vector is zero; nonzero point required");
    const Vector xh = x / s;

    // starting candidate: the constant x
    AnalyticCandidate start;
    start.lambda = lambda;
    start.epsilon = opts.epsilon;
    start.sigma = opts.sigma;
    start.m = 0;
    start.coeffs = {xh};
    std::pair<AnalyticCandidate, double> cur{start, certified_norm(K, T, start, opts.t_max,
                                                                   opts.certify_intervals)};
    const double start_value = cur.second;
    bool warm_used = false;
    if (warm && warm->m <= opts.m && warm->sigma == opts.sigma && warm->epsilon == opts.epsilon &&
        warm->lambda == lambda && !warm->coeffs.empty() && warm->coeffs.front().size() == x.size()) {
        AnalyticCandidate w = *warm;
        for (Vector& v : w.coeffs) v /= s;
        w.coeffs[w.m] += xh - w.at_lambda();
        const double wv = certified_norm(K, T, w, opts.t_max, opts.certify_intervals);
        if (wv <= cur.second) {
            cur = {w, wv};
            warm_used = true;
        }
    }

    // continuation in m: level j starts from the best of level j - 1
    UpperBound out;
    out.grid_value = inf;
    const int first = warm_used ? std::max(1, cur.first.m) : 1;
    for (int level = first; level <= opts.m; ++level) {
        InterpOptions o = opts;
        o.m = level;
        const UpperBound u = optimise_level(K, T, lambda, xh, o, cur);
        cur = {u.candidate, u.value};
        out.grid_value = std::min(out.grid_value, u.grid_value);
        out.evaluations += u.evaluations;
        out.sweeps += u.sweeps;
    }
    out.low_quality = !(cur.second < start_value);
    out.value = s * cur.second;
    if (!std::isfinite(out.grid_value)) out.grid_value = out.value;
    else out.grid_value *= s;
    AnalyticCandidate best = cur.first.widened(std::max(cur.first.m, opts.m));
    for (Vector& v : best.coeffs) v *= s;
    out.candidate = std::move(best);
    return out;
}

// ---- dual bound ---------------------------------------------------------

DualBound::DualBound(const ConvexBody& K, const ConvexBody& T, double lambda,
                     const DirectionGrid& grid)
    : K_(K), T_(T), lambda_(lambda), dirs_(grid.directions) {
    check_lambda(lambda);
    require(K.dim() == T.dim() && grid.dim() == K.dim(), "dimension mismatch");
    inv_bound_.resize(grid.size());
    for (int i = 0; i < grid.size(); ++i) inv_bound_(i) = 1.0 / bound(grid.direction(i));
}

double DualBound::bound(const Vector& theta) const {
    if (lambda_ == 0.0) return support(K_, theta);
    if (lambda_ == 1.0) return support(T_, theta);
    return std::pow(support(K_, theta), 1.0 - lambda_) * std::pow(support(T_, theta), lambda_);
}

double DualBound::grid_value(const Vector& x) const {
    return std::max(0.0, ((dirs_ * x).array() * inv_bound_.array()).maxCoeff());
}

double DualBound::operator()(const Vector& x) const {
    const int d = static_cast<int>(x.size());
    if (x.norm() == 0.0) return 0.0;
    auto ratio = [&](const Vector& th) {
        const double n = th.norm();
        if (!(n > 0.0)) return 0.0;
        return x.dot(th) / bound(th);
    };
    Eigen::Index arg = 0;
    double best = ((dirs_ * x).array() * inv_bound_.array()).maxCoeff(&arg);
    Vector th = dirs_.row(arg).transpose();
    std::vector<Vector> starts{th, x / x.norm()};
    for (const ConvexBody* b : {&K_, &T_}) {
        if (!b->exact()) continue;
        const ConvexBody pb = polar(*b);
        starts.push_back(support_point(pb, x));
    }
    for (const Vector& s : starts) {
        const double v = ratio(s);
        if (v > best) {
            best = v;
            th = s / s.norm();
        }
    }
    // pattern search over the sphere around the best direction
    double step = 0.05;
    int evals = 0;
    while (step > 1e-10 && evals < 60 * d) {
        bool moved = false;
        for (int j = 0; j < d && !moved; ++j) {
            for (double sgn : {1.0, -1.0}) {
                Vector c = th;
                c(j) += sgn * step;
                c /= c.norm();
                ++evals;
                const double v = ratio(c);
                if (v > best) {
                    best = v;
                    th = c;
                    moved = true;
                    break;
                }
            }
        }
        if (!moved) step *= 0.5;
    }
    return std::max(0.0, best);
}

double interp_norm_lower(const ConvexBody& K, const ConvexBody& T, double lambda, const Vector& x,
                         const DirectionGrid& grid) {
    return DualBound(K, T, lambda, grid)(x);
}

// ---- closed forms ---------------------------------------------------------

LpPair make_lp_pair(double p0, double p1, int n) {
    require(p0 >= 1.0 && p1 >= 1.0, "p must be at least 1");
    require(n >= 1, "complex dimension must be positive");
    return {p0, p1, Vector::Ones(n), Vector::Ones(n)};
}

HermitianPair make_hermitian_pair(Matrix A0, Matrix A1) {
    require(A0.rows() == A1.rows() && A0.cols() == A1.cols() && A0.rows() == A0.cols(),
            "matrices must be square and of equal size");
    // construction validates SPD and the complex structure
    ConvexBody::hermitian_ellipsoid(A0, true);
    ConvexBody::hermitian_ellipsoid(A1, true);
    return {std::move(A0), std::move(A1)};
}

namespace {

Matrix matrix_from_json(const nlohmann::json& j, const char* full, const char* diag) {
    if (j.contains(full)) {
        const auto& rows = j.at(full);
        const int d = static_cast<int>(rows.size());
        Matrix A(d, d);
        for (int i = 0; i < d; ++i) {
            require(static_cast<int>(rows[i].size()) == d, "matrix must be square");
            for (int k = 0; k < d; ++k) A(i, k) = rows[i][k].get<double>();
        }
        return A;
    }
    const auto v = j.at(diag).get<std::vector<double>>();
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())).asDiagonal();
}

double p_from_json(const nlohmann::json& j) {
    if (j.is_string()) {
        require(j.get<std::string>() == "inf", "p must be a number or \"inf\"");
        return inf;
    }
    return j.get<double>();
}

}  // namespace

ClosedFamily closed_family_from_json(const nlohmann::json& j) {
    const std::string fam = j.at("family").get<std::string>();
    if (fam == "lp") {
        LpPair p = make_lp_pair(p_from_json(j.at("p0")), p_from_json(j.at("p1")), j.at("n").get<int>());
        for (const char* key : {"w0", "w1"}) {
            if (!j.contains(key)) continue;
            const auto w = j.at(key).get<std::vector<double>>();
            require(static_cast<int>(w.size()) == p.w0.size(), "one weight per complex coordinate");
            for (double v : w) require(v > 0.0, "weights must be positive");
            (key[1] == '0' ? p.w0 : p.w1) = Eigen::Map<const Vector>(w.data(), p.w0.size());
        }
        return p;
    }
    if (fam == "hermitian")
        return make_hermitian_pair(matrix_from_json(j, "A0", "diag0"), matrix_from_json(j, "A1", "diag1"));
    throw GeometryError("unknown closed-form family '" + fam + "'");
}

Matrix geodesic(const Matrix& A0, const Matrix& A1, double lambda) {
    check_lambda(lambda);
    if (lambda == 0.0) return A0;
    if (lambda == 1.0) return A1;
    const Matrix h = sym_power(A0, 0.5);
    const Matrix hi = sym_power(A0, -0.5);
    const Matrix G = h * sym_power(hi * A1 * hi, lambda) * h;
    return 0.5 * (G + G.transpose());
}

ConvexBody closed_body(const ClosedFamily& family, double lambda) {
    check_lambda(lambda);
    if (const auto* p = std::get_if<LpPair>(&family)) {
        const double ip = (1.0 - lambda) * inv_p(p->p0) + lambda * inv_p(p->p1);
        const double pl = ip == 0.0 ? inf : 1.0 / ip;
        const Vector w =
            (p->w0.array().pow(1.0 - lambda) * p->w1.array().pow(lambda)).matrix();
        return ConvexBody::lp_ball(pl, w, true);
    }
    const auto& h = std::get<HermitianPair>(family);
    return ConvexBody::hermitian_ellipsoid(geodesic(h.A0, h.A1, lambda), true);
}

double interp_norm_closed(const ClosedFamily& family, double lambda, const Vector& x) {
    return gauge(closed_body(family, lambda), x);
}

// ---- sandwiches -------------------------------------------------------------

void to_json(nlohmann::json& j, const NormSandwich& s) {
    j = {{"lambda", s.lambda},
         {"point", std::vector<double>(s.point.data(), s.point.data() + s.point.size())},
         {"lower", s.lower},
         {"upper", s.upper},
         {"evaluations", s.evaluations},
         {"sweeps", s.sweeps},
         {"low_quality", s.low_quality}};
}

NormSandwich norm_sandwich(const ConvexBody& K, const ConvexBody& T, double lambda,
                           const Vector& x, const DualBound& dual, const InterpOptions& opts) {
    check_lambda(lambda);
    require(dual.lambda() == lambda, "dual bound was built for another lambda");
    NormSandwich s;
    s.lambda = lambda;
    s.point = x;
    if (lambda == 0.0 || lambda == 1.0) {
        // the interpolated norm is the endpoint norm
        s.upper = gauge(lambda == 0.0 ? K : T, x);
        s.lower = std::min(dual(x), s.upper);
        return s;
    }
    const UpperBound up = interp_norm_upper(K, T, lambda, x, opts);
    s.upper = up.value;
    s.lower = dual(x);
    s.evaluations = up.evaluations;
    s.sweeps = up.sweeps;
    s.low_quality = up.low_quality;
    require(s.lower <= s.upper * (1.0 + 1e-9), "sandwich inverted: lower bound above upper bound");
    return s;
}

CLambdaSandwich c_lambda_sandwich(const ConvexBody& K, const ConvexBody& T, double lambda,
                                  const std::vector<Vector>& probes, const DirectionGrid& grid,
                                  const InterpOptions& opts, int jobs) {
    check_lambda(lambda);
    const DualBound dual(K, T, lambda, grid);
    std::vector<NormSandwich> rows(probes.size());
    parallel_for(static_cast<int>(probes.size()), jobs, [&](int i) {
        require(probes[i].norm() > 0.0, "probe points must be nonzero");
        rows[i] = norm_sandwich(K, T, lambda, probes[i], dual, opts);
    });
    Vector offsets(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
        const Vector th = grid.direction(i);
        offsets(i) = std::pow(support(K, th), 1.0 - lambda) * std::pow(support(T, th), lambda);
    }
    CLambdaSandwich out{std::move(rows), std::nullopt, ConvexBody::h_polytope(grid.directions, offsets)};
    Matrix V(2 * out.rows.size(), K.dim());
    for (std::size_t i = 0; i < out.rows.size(); ++i) {
        V.row(2 * i) = (out.rows[i].point / out.rows[i].upper).transpose();
        V.row(2 * i + 1) = -V.row(2 * i);
    }
    try {
        out.inner = ConvexBody::v_polytope(V);
    } catch (const GeometryError&) {
        // fewer probes than needed for a full-dimensional hull
    }
    return out;
}

}  // namespace logbm
