#include "dirac/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <string>

#include "dirac/errors.hpp"

namespace dirac::thermo {

double ext_add(double a, double b) {
    if (a == neg_inf || b == neg_inf) return neg_inf;
    return a + b;
}

ConvexDomain::ConvexDomain(std::vector<Factor> factors) : factors_(std::move(factors)) {
    for (const auto& f : factors_) {
        if (f.kind == Factor::Kind::interval) {
            if (f.dim != 1) throw DomainError("interval factors are one-dimensional");
            if (!std::isfinite(f.lo) || !std::isfinite(f.hi) || f.lo > f.hi)
                throw DomainError("interval [" + std::to_string(f.lo) + ", " + std::to_string(f.hi) + "] is not a closed interval");
        }
        if (f.kind == Factor::Kind::simplex && f.dim == 0) throw DomainError("a simplex needs at least one outcome");
        dim_ += f.dim;
    }
}

ConvexDomain ConvexDomain::reals(std::size_t n) {
    if (n == 0) return {};
    return ConvexDomain({Factor{Factor::Kind::reals, n, 0, 0}});
}

ConvexDomain ConvexDomain::positive(std::size_t n) {
    if (n == 0) return {};
    return ConvexDomain({Factor{Factor::Kind::positive, n, 0, 0}});
}

ConvexDomain ConvexDomain::interval(double lo, double hi) {
    return ConvexDomain({Factor{Factor::Kind::interval, 1, lo, hi}});
}

ConvexDomain ConvexDomain::simplex(std::size_t k) {
    return ConvexDomain({Factor{Factor::Kind::simplex, k, 0, 0}});
}

bool ConvexDomain::contains(const VectorXd& x, double tol) const {
    if (static_cast<std::size_t>(x.size()) != dim_) return false;
    Eigen::Index at = 0;
    for (const auto& f : factors_) {
        const auto d = static_cast<Eigen::Index>(f.dim);
        const auto seg = x.segment(at, d);
        at += d;
        if (!seg.allFinite()) return false;
        switch (f.kind) {
        case Factor::Kind::reals: break;
        case Factor::Kind::positive:
            if (seg.minCoeff() < -tol) return false;
            break;
        case Factor::Kind::interval:
            if (seg(0) < f.lo - tol || seg(0) > f.hi + tol) return false;
            break;
        case Factor::Kind::simplex:
            if (seg.minCoeff() < -tol || std::abs(seg.sum() - 1.0) > tol * static_cast<double>(d) + 1e-15) return false;
            break;
        }
    }
    return true;
}

VectorXd ConvexDomain::mix(double lambda, const VectorXd& x, const VectorXd& y) const {
    if (lambda < 0 || lambda > 1) throw DomainError("mixing weight must lie in [0, 1]");
    return lambda * x + (1.0 - lambda) * y;
}

VectorXd ConvexDomain::sample(std::mt19937_64& rng) const {
    VectorXd x(static_cast<Eigen::Index>(dim_));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Eigen::Index at = 0;
    for (const auto& f : factors_) {
        const auto d = static_cast<Eigen::Index>(f.dim);
        for (Eigen::Index i = 0; i < d; ++i) {
            const double u = unit(rng);
            switch (f.kind) {
            case Factor::Kind::reals: x(at + i) = 4 * u - 2; break;
            case Factor::Kind::positive: x(at + i) = std::exp(4 * u - 2); break;
            case Factor::Kind::interval: x(at + i) = f.lo + u * (f.hi - f.lo); break;
            case Factor::Kind::simplex: x(at + i) = -std::log(1.0 - u); break;
            }
        }
        if (f.kind == Factor::Kind::simplex) x.segment(at, d) /= x.segment(at, d).sum();
        at += d;
    }
    return x;
}

VectorXd ConvexDomain::lower() const {
    const double inf = std::numeric_limits<double>::infinity();
    VectorXd lo(static_cast<Eigen::Index>(dim_));
    Eigen::Index at = 0;
    for (const auto& f : factors_) {
        const auto d = static_cast<Eigen::Index>(f.dim);
        lo.segment(at, d).setConstant(f.kind == Factor::Kind::reals ? -inf : f.kind == Factor::Kind::interval ? f.lo : 0.0);
        at += d;
    }
    return lo;
}

VectorXd ConvexDomain::upper() const {
    const double inf = std::numeric_limits<double>::infinity();
    VectorXd hi(static_cast<Eigen::Index>(dim_));
    Eigen::Index at = 0;
    for (const auto& f : factors_) {
        const auto d = static_cast<Eigen::Index>(f.dim);
        hi.segment(at, d).setConstant(f.kind == Factor::Kind::interval ? f.hi : inf);
        at += d;
    }
    return hi;
}

MatrixXd ConvexDomain::equality_rows() const {
    const auto n = static_cast<Eigen::Index>(dim_);
    MatrixXd rows(0, n);
    Eigen::Index at = 0;
    for (const auto& f : factors_) {
        const auto d = static_cast<Eigen::Index>(f.dim);
        if (f.kind == Factor::Kind::simplex) {
            rows.conservativeResize(rows.rows() + 1, Eigen::NoChange);
            rows.row(rows.rows() - 1).setZero();
            rows.row(rows.rows() - 1).segment(at, d).setOnes();
        }
        at += d;
    }
    return rows;
}

VectorXd ConvexDomain::equality_rhs() const {
    const auto count = std::count_if(factors_.begin(), factors_.end(),
                                     [](const Factor& f) { return f.kind == Factor::Kind::simplex; });
    return VectorXd::Ones(static_cast<Eigen::Index>(count));
}

ConvexDomain ConvexDomain::drop_first() const {
    if (factors_.empty()) throw DomainError("cannot drop a coordinate from the point domain");
    std::vector<Factor> rest(factors_.begin() + 1, factors_.end());
    Factor head = factors_.front();
    if (head.kind == Factor::Kind::simplex) throw DomainError("the first coordinate belongs to a simplex");
    if (head.dim > 1) {
        --head.dim;
        rest.insert(rest.begin(), head);
    }
    return ConvexDomain(std::move(rest));
}

ConvexDomain operator*(const ConvexDomain& a, const ConvexDomain& b) {
    std::vector<Factor> all = a.factors_;
    all.insert(all.end(), b.factors_.begin(), b.factors_.end());
    return ConvexDomain(std::move(all));
}

namespace {

// Step for differencing coordinate i, kept inside the domain.
double safe_step(const ConvexDomain& dom, const VectorXd& x, Eigen::Index i, double rel) {
    double h = rel * (1.0 + std::abs(x(i)));
    const double lo = dom.lower()(i), hi = dom.upper()(i);
    if (std::isfinite(lo) && x(i) - lo > 0) h = std::min(h, 0.5 * (x(i) - lo));
    if (std::isfinite(hi) && hi - x(i) > 0) h = std::min(h, 0.5 * (hi - x(i)));
    return h;
}

} // namespace

VectorXd entropy_gradient(const ThermoSystem& sys, const VectorXd& x) {
    if (sys.grad) return sys.grad(x);
    VectorXd g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = safe_step(sys.domain, x, i, 1e-6);
        VectorXd xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        g(i) = (sys.S(xp) - sys.S(xm)) / (2 * h);
    }
    return g;
}

MatrixXd entropy_hessian(const ThermoSystem& sys, const VectorXd& x) {
    if (sys.hess) return sys.hess(x);
    const Eigen::Index n = x.size();
    MatrixXd H(n, n);
    if (sys.grad) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double h = safe_step(sys.domain, x, j, 1e-5);
            VectorXd xp = x, xm = x;
            xp(j) += h;
            xm(j) -= h;
            H.col(j) = (sys.grad(xp) - sys.grad(xm)) / (2 * h);
        }
    } else {
        std::vector<double> steps(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) steps[static_cast<std::size_t>(i)] = safe_step(sys.domain, x, i, 1e-4);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i; j < n; ++j) {
                const double hi = steps[static_cast<std::size_t>(i)], hj = steps[static_cast<std::size_t>(j)];
                auto at = [&](double a, double b) {
                    VectorXd y = x;
                    y(i) += a;
                    y(j) += b;
                    return sys.S(y);
                };
                H(i, j) = H(j, i) = (at(hi, hj) - at(hi, -hj) - at(-hi, hj) + at(-hi, -hj)) / (4 * hi * hj);
            }
    }
    return 0.5 * (H + H.transpose());
}

double concavity_violation(const ThermoSystem& sys, std::size_t pairs, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    double worst = 0;
    for (std::size_t k = 0; k < pairs; ++k) {
        const VectorXd x = sys.domain.sample(rng), y = sys.domain.sample(rng);
        const double sx = sys.S(x), sy = sys.S(y), sm = sys.S(sys.domain.mix(0.5, x, y));
        if (sx == neg_inf || sy == neg_inf) continue;
        worst = std::max(worst, 0.5 * sx + 0.5 * sy - sm);
    }
    return worst;
}

void AffineRelation::validate() const {
    const auto rows = A.rows();
    if (static_cast<std::size_t>(A.cols()) != x_dim || static_cast<std::size_t>(B.cols()) != y_dim ||
        B.rows() != rows || c.size() != rows)
        throw DimensionError("affine relation: A is " + std::to_string(A.rows()) + "x" + std::to_string(A.cols()) +
                             ", B is " + std::to_string(B.rows()) + "x" + std::to_string(B.cols()) + ", c has " +
                             std::to_string(c.size()) + " entries for x_dim " + std::to_string(x_dim) +
                             " and y_dim " + std::to_string(y_dim));
}

AffineRelation AffineRelation::linear_map(const MatrixXd& m) {
    AffineRelation r;
    r.x_dim = static_cast<std::size_t>(m.cols());
    r.y_dim = static_cast<std::size_t>(m.rows());
    r.A = m;
    r.B = -MatrixXd::Identity(m.rows(), m.rows());
    r.c = VectorXd::Zero(m.rows());
    return r;
}

ThermoSystem thermo_unit() {
    ThermoSystem u;
    u.name = "unit";
    u.S = [](const VectorXd&) { return 0.0; };
    u.grad = [](const VectorXd&) { return VectorXd(0); };
    u.hess = [](const VectorXd&) { return MatrixXd(0, 0); };
    return u;
}

ThermoSystem thermo_tensor(const ThermoSystem& a, const ThermoSystem& b) {
    ThermoSystem t;
    t.name = a.name + "*" + b.name;
    t.domain = a.domain * b.domain;
    const auto na = static_cast<Eigen::Index>(a.domain.dim()), nb = static_cast<Eigen::Index>(b.domain.dim());
    t.S = [sa = a.S, sb = b.S, na, nb](const VectorXd& x) { return ext_add(sa(x.head(na)), sb(x.tail(nb))); };
    t.grad = [a, b, na, nb](const VectorXd& x) {
        VectorXd g(na + nb);
        g << entropy_gradient(a, x.head(na)), entropy_gradient(b, x.tail(nb));
        return g;
    };
    t.hess = [a, b, na, nb](const VectorXd& x) {
        MatrixXd H = MatrixXd::Zero(na + nb, na + nb);
        H.topLeftCorner(na, na) = entropy_hessian(a, x.head(na));
        H.bottomRightCorner(nb, nb) = entropy_hessian(b, x.tail(nb));
        return H;
    };
    return t;
}

ThermoSystem thermo_tensor_all(const std::vector<ThermoSystem>& systems) {
    if (systems.empty()) return thermo_unit();
    ThermoSystem acc = systems.front();
    for (std::size_t i = 1; i < systems.size(); ++i) acc = thermo_tensor(acc, systems[i]);
    return acc;
}

Pushforward::Pushforward(AffineRelation rel, std::vector<ThermoSystem> systems, ConvexDomain y_domain,
                         SolverOptions options)
    : rel_(std::move(rel)), product_(thermo_tensor_all(systems)), y_domain_(std::move(y_domain)),
      options_(options) {
    rel_.validate();
    if (product_.domain.dim() != rel_.x_dim)
        throw DimensionError("pushforward: relation expects " + std::to_string(rel_.x_dim) +
                             " source coordinates but the systems provide " + std::to_string(product_.domain.dim()));
    if (y_domain_.dim() != rel_.y_dim)
        throw DimensionError("pushforward: target domain has dimension " + std::to_string(y_domain_.dim()) +
                             ", relation has " + std::to_string(rel_.y_dim));
}

Equilibrium Pushforward::solve(const VectorXd& y) const {
    if (static_cast<std::size_t>(y.size()) != rel_.y_dim)
        throw DimensionError("pushforward: query has " + std::to_string(y.size()) + " coordinates, expected " +
                             std::to_string(rel_.y_dim));
    if (!y_domain_.contains(y)) return {};
    return maximize_concave(product_, rel_.A, rel_.c - rel_.B * y, options_);
}

ThermoSystem Pushforward::system(std::string name) const {
    ThermoSystem s;
    s.name = std::move(name);
    s.domain = y_domain_;
    auto self = std::make_shared<Pushforward>(*this);
    s.S = [self](const VectorXd& y) { return self->solve(y).value; };
    s.grad = [self](const VectorXd& y) -> VectorXd {
        const Equilibrium e = self->solve(y);
        if (!e.feasible || !std::isfinite(e.value))
            return VectorXd::Constant(y.size(), std::numeric_limits<double>::quiet_NaN());
        const auto m = self->relation().A.rows();
        return -self->relation().B.transpose() * e.multipliers.head(m);
    };
    return s;
}

ThermoSystem ent_pushforward(const AffineRelation& rel, const std::vector<ThermoSystem>& systems) {
    return ent_pushforward(rel, systems, ConvexDomain::reals(rel.y_dim));
}

ThermoSystem ent_pushforward(const AffineRelation& rel, const std::vector<ThermoSystem>& systems,
                             const ConvexDomain& y_domain) {
    return Pushforward(rel, systems, y_domain).system("pushforward");
}

ThermoSystem heat_capacity(double C) {
    if (!(C > 0) || !std::isfinite(C)) throw DomainError("heat capacity must be positive, got " + std::to_string(C));
    ThermoSystem s;
    s.name = "heat_capacity";
    s.domain = ConvexDomain::positive(1);
    s.S = [C](const VectorXd& x) { return x(0) > 0 ? C * std::log(x(0)) : neg_inf; };
    s.grad = [C](const VectorXd& x) { return VectorXd::Constant(1, C / x(0)); };
    s.hess = [C](const VectorXd& x) { return MatrixXd::Constant(1, 1, -C / (x(0) * x(0))); };
    return s;
}

namespace {

ThermoSystem linear_reservoir(std::string name, double slope) {
    ThermoSystem s;
    s.name = std::move(name);
    s.domain = ConvexDomain::reals(1);
    s.S = [slope](const VectorXd& x) { return slope * x(0); };
    s.grad = [slope](const VectorXd&) { return VectorXd::Constant(1, slope); };
    s.hess = [](const VectorXd&) { return MatrixXd::Zero(1, 1); };
    return s;
}

} // namespace

ThermoSystem heat_bath(double T) {
    if (!(T > 0) || !std::isfinite(T)) throw DomainError("bath temperature must be positive, got " + std::to_string(T));
    return linear_reservoir("heat_bath", 1.0 / T);
}

ThermoSystem pressure_bath(double p, double T) {
    if (!(T > 0) || !std::isfinite(T)) throw DomainError("bath temperature must be positive, got " + std::to_string(T));
    if (!(p > 0) || !std::isfinite(p)) throw DomainError("bath pressure must be positive, got " + std::to_string(p));
    return linear_reservoir("pressure_bath", p / T);
}

ThermoSystem shannon(std::size_t outcomes) {
    if (outcomes == 0) throw DomainError("shannon entropy needs at least one outcome");
    ThermoSystem s;
    s.name = "shannon";
    s.domain = ConvexDomain::simplex(outcomes);
    s.S = [](const VectorXd& p) {
        double h = 0;
        for (Eigen::Index i = 0; i < p.size(); ++i)
            if (p(i) > 0) h -= p(i) * std::log(p(i));
        return h;
    };
    s.grad = [](const VectorXd& p) {
        VectorXd g(p.size());
        for (Eigen::Index i = 0; i < p.size(); ++i)
            g(i) = p(i) > 0 ? -std::log(p(i)) - 1.0 : std::numeric_limits<double>::infinity();
        return g;
    };
    s.hess = [](const VectorXd& p) {
        VectorXd d(p.size());
        for (Eigen::Index i = 0; i < p.size(); ++i)
            d(i) = p(i) > 0 ? -1.0 / p(i) : -std::numeric_limits<double>::infinity();
        return MatrixXd(d.asDiagonal());
    };
    return s;
}

ThermoSystem ideal_mixture(std::vector<double> s0, double c) {
    if (s0.empty()) throw DomainError("a mixture needs at least one species");
    if (!(c > 0)) throw DomainError("mixture heat-capacity coefficient must be positive");
    const auto k = static_cast<Eigen::Index>(s0.size());
    ThermoSystem s;
    s.name = "ideal_mixture";
    s.domain = ConvexDomain::positive(2 + s0.size());
    // x = (U, V, N₁..N_k); species with Nₛ = 0 contribute nothing.
    s.S = [s0, c, k](const VectorXd& x) {
        const double U = x(0), V = x(1);
        const double N = x.tail(k).sum();
        if (N <= 0) return 0.0;
        if (U <= 0 || V <= 0 || x.tail(k).minCoeff() < 0) return neg_inf;
        double h = c * N * std::log(U / N);
        for (Eigen::Index i = 0; i < k; ++i) {
            const double n = x(2 + i);
            if (n > 0) h += n * (s0[static_cast<std::size_t>(i)] + 1.0 + std::log(V / n));
        }
        return h;
    };
    s.grad = [s0, c, k](const VectorXd& x) {
        const double U = x(0), V = x(1), N = x.tail(k).sum();
        VectorXd g(2 + k);
        g(0) = c * N / U;
        g(1) = N / V;
        for (Eigen::Index i = 0; i < k; ++i)
            g(2 + i) = s0[static_cast<std::size_t>(i)] + std::log(V / x(2 + i)) + c * std::log(U / N) - c;
        return g;
    };
    s.hess = [c, k](const VectorXd& x) {
        const double U = x(0), V = x(1), N = x.tail(k).sum();
        MatrixXd H = MatrixXd::Zero(2 + k, 2 + k);
        H(0, 0) = -c * N / (U * U);
        H(1, 1) = -N / (V * V);
        for (Eigen::Index i = 0; i < k; ++i) {
            H(0, 2 + i) = H(2 + i, 0) = c / U;
            H(1, 2 + i) = H(2 + i, 1) = 1.0 / V;
            for (Eigen::Index j = 0; j < k; ++j) H(2 + i, 2 + j) = -c / N - (i == j ? 1.0 / x(2 + i) : 0.0);
        }
        return H;
    };
    return s;
}

Pushforward legendre_pushforward(const ThermoSystem& sys, double T) {
    const std::size_t n = sys.domain.dim();
    if (n == 0) throw DimensionError("free entropy needs an energy coordinate");
    const auto nn = static_cast<Eigen::Index>(n);
    // x = (U, rest…, U′) with U + U′ = 0 and rest = y.
    AffineRelation rel;
    rel.x_dim = n + 1;
    rel.y_dim = n - 1;
    rel.A = MatrixXd::Zero(nn, nn + 1);
    rel.B = MatrixXd::Zero(nn, nn - 1);
    rel.c = VectorXd::Zero(nn);
    rel.A(0, 0) = 1;
    rel.A(0, nn) = 1;
    for (Eigen::Index i = 1; i < nn; ++i) {
        rel.A(i, i) = 1;
        rel.B(i, i - 1) = -1;
    }
    return Pushforward(rel, {sys, heat_bath(T)}, sys.domain.drop_first());
}

ThermoSystem legendre_free_entropy(const ThermoSystem& sys, double T) {
    return legendre_pushforward(sys, T).system("free_entropy(" + sys.name + ")");
}

CanonicalResult canonical_distribution(const std::vector<double>& H, double U) {
    if (H.empty()) throw DomainError("canonical distribution needs at least one outcome");
    const auto k = static_cast<Eigen::Index>(H.size());
    const VectorXd h = Eigen::Map<const VectorXd>(H.data(), k);
    const double lo = h.minCoeff(), hi = h.maxCoeff();
    const double scale = 1.0 + std::max(std::abs(lo), std::abs(hi));
    CanonicalResult out;
    auto distribution = [&](double beta) {
        const double shift = beta >= 0 ? lo : hi;
        VectorXd w = (-beta * (h.array() - shift)).exp();
        return VectorXd(w / w.sum());
    };
    auto finish = [&](double beta) {
        out.beta = beta;
        out.p = distribution(beta);
        out.S = 0;
        for (Eigen::Index i = 0; i < k; ++i)
            if (out.p(i) > 0) out.S -= out.p(i) * std::log(out.p(i));
        return out;
    };

    if (hi - lo <= 1e-15 * scale) {
        if (std::abs(U - lo) > 1e-12 * scale)
            throw DomainError("mean energy " + std::to_string(U) + " is not attainable: every outcome has energy " +
                              std::to_string(lo));
        return finish(0.0);
    }
    if (!(U > lo && U < hi))
        throw DomainError("mean energy " + std::to_string(U) + " must lie strictly between " + std::to_string(lo) +
                          " and " + std::to_string(hi));
    auto mean = [&](double beta) { return distribution(beta).dot(h); };
    const double m0 = mean(0.0);
    if (U == m0) return finish(0.0);
    // ⟨H⟩ decreases in β; bracket the root on the side selected by U.
    const double dir = U < m0 ? 1.0 : -1.0;
    double a = 0, b = dir / (hi - lo);
    while ((mean(b) - U) * dir > 0) {
        a = b;
        b *= 2;
        if (std::abs(b) > 1e300) throw SolverError("canonical distribution: could not bracket the temperature");
    }
    for (int it = 0; it < 2000; ++it) {
        const double mid = 0.5 * (a + b);
        if (mid == a || mid == b) break;
        if ((mean(mid) - U) * dir > 0) a = mid;
        else b = mid;
    }
    const double beta = std::abs(mean(a) - U) <= std::abs(mean(b) - U) ? a : b;
    return finish(beta);
}

Equilibrium canonical_by_maximization(const std::vector<double>& H, double U) {
    const auto k = static_cast<Eigen::Index>(H.size());
    MatrixXd A(1, k);
    for (Eigen::Index i = 0; i < k; ++i) A(0, i) = H[static_cast<std::size_t>(i)];
    return maximize_concave(shannon(H.size()), A, VectorXd::Constant(1, U));
}

} // namespace dirac::thermo
