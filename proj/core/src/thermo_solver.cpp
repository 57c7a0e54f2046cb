// Concave maximization over {lo ≤ x ≤ hi, A x = b}.
//
// The equalities are eliminated once (x = x0 + Z z with Z an orthonormal null
// basis), then a log-barrier path is followed in z with damped Newton steps.
// Feasibility is settled first by a barrier phase that maximizes the smallest
// slack; a fiber that only touches the bounds is detected there and the touching
// bounds are turned into equalities before trying again.

#include <algorithm>
#include <cmath>
#include <string>

#include "dirac/errors.hpp"
#include "dirac/thermo.hpp"

namespace dirac::thermo {

namespace {

struct Reduced {
    VectorXd x0;
    MatrixXd Z;
    bool consistent = true;
};

Reduced reduce(const MatrixXd& A, const VectorXd& b, std::size_t n) {
    Reduced out;
    const auto nn = static_cast<Eigen::Index>(n);
    if (A.rows() == 0) {
        out.x0 = VectorXd::Zero(nn);
        out.Z = MatrixXd::Identity(nn, nn);
        return out;
    }
    Eigen::JacobiSVD<MatrixXd> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const VectorXd& sv = svd.singularValues();
    const double cut = 1e-10 * std::max(1.0, sv.size() ? sv(0) : 0.0);
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > cut) ++rank;
    VectorXd x0 = VectorXd::Zero(nn);
    const VectorXd ub = svd.matrixU().transpose() * b;
    for (Eigen::Index i = 0; i < rank; ++i) x0 += svd.matrixV().col(i) * (ub(i) / sv(i));
    out.x0 = x0;
    out.Z = svd.matrixV().rightCols(nn - rank);
    out.consistent = (A * x0 - b).norm() <= 1e-9 * (1.0 + b.norm() + A.norm() * x0.norm());
    return out;
}

// One inequality g·z + h ≥ 0, remembering which coordinate bound produced it.
struct Slacks {
    MatrixXd G;  // rows g
    VectorXd h;
    std::vector<Eigen::Index> coord;
    std::vector<double> sign;  // +1 for a lower bound, −1 for an upper bound
    std::vector<double> bound;

    VectorXd eval(const VectorXd& z) const { return G * z + h; }
    Eigen::Index size() const { return h.size(); }
};

Slacks make_slacks(const Reduced& r, const VectorXd& lo, const VectorXd& hi, const std::vector<bool>& pinned) {
    Slacks s;
    std::vector<VectorXd> rows;
    std::vector<double> hs;
    for (Eigen::Index i = 0; i < lo.size(); ++i) {
        if (pinned[static_cast<std::size_t>(i)]) continue;
        if (std::isfinite(lo(i))) {
            rows.push_back(r.Z.row(i).transpose());
            hs.push_back(r.x0(i) - lo(i));
            s.coord.push_back(i);
            s.sign.push_back(1);
            s.bound.push_back(lo(i));
        }
        if (std::isfinite(hi(i))) {
            rows.push_back(-r.Z.row(i).transpose());
            hs.push_back(hi(i) - r.x0(i));
            s.coord.push_back(i);
            s.sign.push_back(-1);
            s.bound.push_back(hi(i));
        }
    }
    const auto m = static_cast<Eigen::Index>(rows.size());
    s.G.resize(m, r.Z.cols());
    s.h.resize(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        s.G.row(j) = rows[static_cast<std::size_t>(j)].transpose();
        s.h(j) = hs[static_cast<std::size_t>(j)];
    }
    return s;
}

// Newton direction for a concave model: solve (−H + δI) d = g.
VectorXd ascent_direction(const MatrixXd& H, const VectorXd& g) {
    const double delta = 1e-12 * (1.0 + H.cwiseAbs().maxCoeff());
    MatrixXd M = -H;
    M.diagonal().array() += delta;
    Eigen::LDLT<MatrixXd> ldlt(M);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
        VectorXd d = ldlt.solve(g);
        if (d.allFinite() && g.dot(d) > 0) return d;
    }
    return g;  // indefinite model: fall back to steepest ascent
}

double max_step(const Slacks& s, const VectorXd& z, const VectorXd& d) {
    double alpha = 1.0;
    if (s.size() == 0) return alpha;
    const VectorXd cur = s.eval(z);
    const VectorXd rate = s.G * d;
    for (Eigen::Index j = 0; j < s.size(); ++j)
        if (rate(j) < 0) alpha = std::min(alpha, 0.99 * cur(j) / -rate(j));
    return alpha;
}

enum class Phase1 { feasible, infeasible, degenerate };

// Maximizes t subject to s_j(z) ≥ t. Stops as soon as a centred point with t > 0 appears.
Phase1 find_interior(const Slacks& s, VectorXd& z, double scale) {
    const Eigen::Index k = s.G.cols(), m = s.size();
    if (m == 0) return Phase1::feasible;
    VectorXd sz = s.eval(z);
    if (sz.minCoeff() > 1e-3 * scale) return Phase1::feasible;
    double t = sz.minCoeff() - scale;

    auto phi = [&](const VectorXd& zz, double tt, double mu) {
        const VectorXd r = s.eval(zz).array() - tt;
        if ((r.array() <= 0).any()) return -std::numeric_limits<double>::infinity();
        return tt + mu * r.array().log().sum();
    };

    for (double mu = scale; mu >= 1e-14 * scale; mu *= 0.1) {
        for (int it = 0; it < 100; ++it) {
            const VectorXd r = s.eval(z).array() - t;
            const VectorXd inv = r.cwiseInverse();
            VectorXd g(k + 1);
            g.head(k) = mu * s.G.transpose() * inv;
            g(k) = 1.0 - mu * inv.sum();
            MatrixXd H = MatrixXd::Zero(k + 1, k + 1);
            const VectorXd w = inv.cwiseAbs2();
            MatrixXd Gt(m, k + 1);
            Gt.leftCols(k) = s.G;
            Gt.col(k).setConstant(-1.0);
            H = -mu * Gt.transpose() * w.asDiagonal() * Gt;
            VectorXd d = ascent_direction(H, g);
            // Directions that no slack constrains would otherwise send the point far away.
            if (d.norm() > 10 * scale) d *= 10 * scale / d.norm();
            const double dec = g.dot(d);
            if (dec <= 1e-14 * (1.0 + std::abs(t))) break;
            double alpha = 1.0;
            const VectorXd rate = Gt * d;
            for (Eigen::Index j = 0; j < m; ++j)
                if (rate(j) < 0) alpha = std::min(alpha, 0.99 * r(j) / -rate(j));
            const double f0 = phi(z, t, mu);
            bool moved = false;
            for (int ls = 0; ls < 60; ++ls) {
                const VectorXd zn = z + alpha * d.head(k);
                const double tn = t + alpha * d(k);
                if (phi(zn, tn, mu) >= f0 + 0.25 * alpha * dec) {
                    z = zn;
                    t = tn;
                    moved = true;
                    break;
                }
                alpha *= 0.5;
            }
            if (!moved) break;
            if (t > scale) return Phase1::feasible;
        }
        if (t > 1e-9 * scale && s.eval(z).minCoeff() > 0) return Phase1::feasible;
    }
    if (t < -1e-7 * scale) return Phase1::infeasible;
    return Phase1::degenerate;
}

} // namespace

Equilibrium maximize_concave(const ThermoSystem& objective, const MatrixXd& A_in, const VectorXd& b_in,
                             const SolverOptions& options) {
    const ConvexDomain& dom = objective.domain;
    const auto n = static_cast<Eigen::Index>(dom.dim());
    if (A_in.cols() != n || A_in.rows() != b_in.size())
        throw DimensionError("maximize: constraint matrix is " + std::to_string(A_in.rows()) + "x" +
                             std::to_string(A_in.cols()) + " for " + std::to_string(n) + " variables and " +
                             std::to_string(b_in.size()) + " right-hand sides");

    const MatrixXd simplex_rows = dom.equality_rows();
    MatrixXd A(A_in.rows() + simplex_rows.rows(), n);
    A << A_in, simplex_rows;
    VectorXd b(A.rows());
    b << b_in, dom.equality_rhs();
    const VectorXd lo = dom.lower(), hi = dom.upper();

    Equilibrium out;
    // Bounds pinned by a degenerate fiber become extra equality rows.
    MatrixXd pinned_rows(0, n);
    VectorXd pinned_rhs(0);
    std::vector<bool> pinned(static_cast<std::size_t>(n), false);

    Reduced red;
    Slacks slacks;
    VectorXd z;
    for (int attempt = 0;; ++attempt) {
        MatrixXd Aall(A.rows() + pinned_rows.rows(), n);
        Aall << A, pinned_rows;
        VectorXd ball(Aall.rows());
        ball << b, pinned_rhs;
        red = reduce(Aall, ball, static_cast<std::size_t>(n));
        if (!red.consistent) return out;
        slacks = make_slacks(red, lo, hi, pinned);
        z = VectorXd::Zero(red.Z.cols());
        const double scale = 1.0 + (slacks.size() ? slacks.h.cwiseAbs().maxCoeff() : 0.0) + red.x0.cwiseAbs().sum();
        if (red.Z.cols() == 0) {
            if (slacks.size() && slacks.h.minCoeff() < -1e-9 * scale) return out;
            break;
        }
        const Phase1 p1 = find_interior(slacks, z, scale);
        if (p1 == Phase1::infeasible) return out;
        if (p1 == Phase1::feasible) break;
        if (attempt > n) throw SolverError("maximize: could not isolate the face containing the fiber");
        const VectorXd sz = slacks.eval(z);
        const double tight = std::max(1e-6 * scale, 10 * std::max(0.0, -sz.minCoeff()));
        for (Eigen::Index j = 0; j < slacks.size(); ++j) {
            if (sz(j) > tight) continue;
            const auto i = slacks.coord[static_cast<std::size_t>(j)];
            if (pinned[static_cast<std::size_t>(i)]) continue;
            pinned[static_cast<std::size_t>(i)] = true;
            MatrixXd row = MatrixXd::Zero(1, n);
            row(0, i) = 1.0;
            pinned_rows.conservativeResize(pinned_rows.rows() + 1, Eigen::NoChange);
            pinned_rows.row(pinned_rows.rows() - 1) = row;
            pinned_rhs.conservativeResize(pinned_rhs.size() + 1);
            pinned_rhs(pinned_rhs.size() - 1) = slacks.bound[static_cast<std::size_t>(j)];
        }
    }
    out.feasible = true;

    auto point = [&](const VectorXd& zz) -> VectorXd {
        VectorXd x = red.x0 + red.Z * zz;
        // Keep pinned and near-bound coordinates inside the closed domain.
        return x.cwiseMax(lo).cwiseMin(hi);
    };
    auto value_at = [&](const VectorXd& x) {
        const double v = objective.S(x);
        return std::isnan(v) ? neg_inf : v;
    };

    const Eigen::Index k = red.Z.cols();
    double mu = 0;
    if (k > 0 && std::isfinite(value_at(point(z)))) {
        auto F = [&](const VectorXd& zz, double m) {
            const VectorXd s = slacks.eval(zz);
            if (s.size() && (s.array() <= 0).any()) return neg_inf;
            const double f = value_at(point(zz));
            if (!std::isfinite(f)) return f;
            return s.size() ? f + m * s.array().log().sum() : f;
        };
        const double fscale = 1.0 + std::abs(value_at(point(z)));
        mu = slacks.size() ? 0.1 * fscale : 0.0;
        for (;;) {
            for (int it = 0; it < options.max_newton; ++it) {
                const VectorXd x = point(z);
                VectorXd gx = entropy_gradient(objective, x);
                MatrixXd Hx = entropy_hessian(objective, x);
                // Pinned coordinates do not move; their derivatives may blow up at the bound.
                for (Eigen::Index i = 0; i < n; ++i) {
                    if (!pinned[static_cast<std::size_t>(i)]) continue;
                    gx(i) = 0;
                    Hx.row(i).setZero();
                    Hx.col(i).setZero();
                }
                VectorXd g = red.Z.transpose() * gx;
                MatrixXd H = red.Z.transpose() * Hx * red.Z;
                if (slacks.size()) {
                    const VectorXd inv = slacks.eval(z).cwiseInverse();
                    g += mu * slacks.G.transpose() * inv;
                    H -= mu * slacks.G.transpose() * inv.cwiseAbs2().asDiagonal() * slacks.G;
                }
                if (!g.allFinite() || !H.allFinite()) throw SolverError("maximize: non-finite entropy derivatives");
                const VectorXd d = ascent_direction(H, g);
                const double dec = g.dot(d);
                if (dec <= options.tolerance * options.tolerance * (1.0 + std::abs(value_at(x)))) break;
                double alpha = max_step(slacks, z, d);
                const double f0 = F(z, mu);
                bool moved = false;
                for (int ls = 0; ls < 80; ++ls) {
                    const VectorXd zn = z + alpha * d;
                    const double fn = F(zn, mu);
                    if (std::isfinite(fn) && fn >= f0 + 0.25 * alpha * dec) {
                        z = zn;
                        moved = true;
                        break;
                    }
                    alpha *= 0.5;
                }
                if (!moved) break;
                const VectorXd xn = point(z);
                if (xn.cwiseAbs().maxCoeff() > 1e13 || value_at(xn) > 1e15)
                    throw SolverError("maximize: entropy is unbounded above on the fiber");
            }
            const double here = std::abs(value_at(point(z)));
            if (mu * static_cast<double>(slacks.size()) <= options.final_barrier * (1.0 + here) || mu == 0) break;
            mu *= 0.1;
        }
    }

    const VectorXd x = point(z);
    out.argmax = x;
    out.value = value_at(x);
    if (!std::isfinite(out.value)) return out;

    // Multipliers from ∇S + barrier forces = Aᵀλ over the original rows.
    VectorXd force = entropy_gradient(objective, x);
    for (Eigen::Index i = 0; i < n; ++i)
        if (pinned[static_cast<std::size_t>(i)] && !std::isfinite(force(i))) force(i) = 0;
    if (slacks.size() && mu > 0) {
        const VectorXd s = slacks.eval(z);
        for (Eigen::Index j = 0; j < slacks.size(); ++j)
            force(slacks.coord[static_cast<std::size_t>(j)]) += mu * slacks.sign[static_cast<std::size_t>(j)] / s(j);
    }
    if (A.rows() > 0) out.multipliers = A.transpose().completeOrthogonalDecomposition().solve(force);
    else out.multipliers = VectorXd(0);
    out.kkt_residual = k > 0 ? (red.Z.transpose() * force).norm() : 0.0;
    for (bool p : pinned)
        if (p) out.boundary = true;
    for (Eigen::Index j = 0; j < slacks.size(); ++j) {
        const auto i = slacks.coord[static_cast<std::size_t>(j)];
        const double bound = slacks.bound[static_cast<std::size_t>(j)];
        if (std::abs(x(i) - bound) <= 1e-6 * (1.0 + std::abs(bound))) out.boundary = true;
    }
    return out;
}

} // namespace dirac::thermo
