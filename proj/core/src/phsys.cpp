#include "dirac/phsys.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dirac/errors.hpp"
#include "dirac/io.hpp"

namespace dirac::ph {

namespace {

constexpr double kRankTol = 1e-10;

struct Svd {
    Eigen::JacobiSVD<MatrixXd> svd;
    Eigen::Index rank = 0;
};

Svd full_svd(const MatrixXd& a) {
    Svd s{Eigen::JacobiSVD<MatrixXd>(a, Eigen::ComputeFullU | Eigen::ComputeFullV), 0};
    const auto& sv = s.svd.singularValues();
    if (sv.size() > 0 && sv(0) > 0) {
        const double cut = kRankTol * sv(0);
        while (s.rank < sv.size() && sv(s.rank) > cut) ++s.rank;
    }
    return s;
}

std::size_t rank_of(const MatrixXd& a) {
    if (a.rows() == 0 || a.cols() == 0) return 0;
    return static_cast<std::size_t>(full_svd(a).rank);
}

/// Rows z with z·a = 0, orthonormal.
MatrixXd left_null(const MatrixXd& a) {
    if (a.cols() == 0) return MatrixXd::Identity(a.rows(), a.rows());
    if (a.rows() == 0) return MatrixXd(0, 0);
    const Svd s = full_svd(a);
    const Eigen::Index m = a.rows();
    return s.svd.matrixU().rightCols(m - s.rank).transpose();
}

/// Orthonormal basis (as columns) of { v : a v = 0 }.
MatrixXd null_columns(const MatrixXd& a) {
    if (a.rows() == 0) return MatrixXd::Identity(a.cols(), a.cols());
    if (a.cols() == 0) return MatrixXd(0, 0);
    const Svd s = full_svd(a);
    return s.svd.matrixV().rightCols(a.cols() - s.rank);
}

/// Orthonormal rows spanning the row space of a.
MatrixXd row_basis(const MatrixXd& a) {
    if (a.rows() == 0 || a.cols() == 0) return MatrixXd(0, a.cols());
    const Svd s = full_svd(a);
    return s.svd.matrixV().leftCols(s.rank).transpose();
}

MatrixXd block_diag(const MatrixXd& a, const MatrixXd& b) {
    MatrixXd out = MatrixXd::Zero(a.rows() + b.rows(), a.cols() + b.cols());
    out.topLeftCorner(a.rows(), a.cols()) = a;
    out.bottomRightCorner(b.rows(), b.cols()) = b;
    return out;
}

} // namespace

double Boundary::power(const VectorXd& b) const {
    double p = 0;
    for (std::size_t i = 0; i < ports(); ++i) {
        const double term = b(2 * i) * b(2 * i + 1);
        p += dual[i] ? -term : term;
    }
    return p;
}

BondSpace Boundary::bond_space() const {
    BondSpace out;
    for (bool d : dual) out = bond::direct_sum(out, BondSpace::standard(1, d));
    return out;
}

Boundary boundary_of(const BondSpace& b) {
    Boundary out;
    const lin::Mat& p = b.pform();
    for (std::size_t i = 0; i < b.half_dim(); ++i) {
        const std::size_t e = 2 * i, f = 2 * i + 1;
        const lin::Rat& c = p(e, f);
        if (c != lin::Rat(1, 2) && c != lin::Rat(-1, 2))
            throw DimensionError("boundary: bond space is not a sum of scalar ports");
        for (std::size_t k = 0; k < b.dim(); ++k)
            if ((k != f && p(e, k) != 0) || (k != e && p(f, k) != 0))
                throw DimensionError("boundary: bond space is not a sum of scalar ports");
        out.dual.push_back(c < 0);
    }
    return out;
}

Boundary concat(const Boundary& a, const Boundary& b) {
    Boundary out = a;
    out.dual.insert(out.dual.end(), b.dual.begin(), b.dual.end());
    return out;
}

MatrixXd KernelRep::stacked() const {
    MatrixXd m(F.rows(), F.cols() + E.cols() + G.cols());
    m << F, E, G;
    return m;
}

double isotropy_residual(const KernelRep& k, const Boundary& boundary) {
    MatrixXd q = -2.0 * (k.F * k.E.transpose() + k.E * k.F.transpose());
    for (std::size_t i = 0; i < boundary.ports(); ++i) {
        const auto ge = k.G.col(2 * i);
        const auto gf = k.G.col(2 * i + 1);
        const double s = boundary.dual[i] ? -2.0 : 2.0;
        q += s * (ge * gf.transpose() + gf * ge.transpose());
    }
    const double norm = k.stacked().squaredNorm();
    return norm == 0 ? 0 : q.norm() / norm;
}

void check_kernel(const KernelRep& k, std::size_t state_dim, const Boundary& boundary, double tol) {
    const auto n = static_cast<Eigen::Index>(state_dim);
    if (k.F.cols() != n || k.E.cols() != n || k.G.cols() != static_cast<Eigen::Index>(boundary.dim()) ||
        k.E.rows() != k.F.rows() || k.G.rows() != k.F.rows())
        throw DimensionError("kernel representation has inconsistent block shapes");
    const std::size_t expected = state_dim + boundary.ports();
    if (static_cast<std::size_t>(k.F.rows()) != expected)
        throw DiracCheckError("kernel representation has " + std::to_string(k.F.rows()) + " rows, expected " +
                              std::to_string(expected));
    if (rank_of(k.stacked()) != expected) throw DiracCheckError("kernel representation is rank deficient");
    const double res = isotropy_residual(k, boundary);
    if (res > tol) throw DiracCheckError("kernel representation is not isotropic (residual " + io::format_double(res) + ")");
}

bool PHSystem::in_domain(const VectorXd& x) const {
    if (domain.empty()) return true;
    for (std::size_t i = 0; i < domain.size(); ++i)
        if (!(x(static_cast<Eigen::Index>(i)) > domain[i].first && x(static_cast<Eigen::Index>(i)) < domain[i].second))
            return false;
    return true;
}

PortRelation port_relation(const DiracRelation& r) {
    PortRelation out{boundary_of(r.dom()), boundary_of(r.cod()), {}, {}};
    const lin::Mat c = r.sub().rank() == 0 ? lin::Mat::identity(r.total_space().dim()) : r.sub().constraints();
    const auto dd = static_cast<Eigen::Index>(r.dom().dim());
    const auto dc = static_cast<Eigen::Index>(r.cod().dim());
    MatrixXd k(static_cast<Eigen::Index>(c.rows()), dd + dc);
    for (std::size_t i = 0; i < c.rows(); ++i)
        for (std::size_t j = 0; j < c.cols(); ++j)
            k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = c(i, j).get_d();
    out.K_dom = k.leftCols(dd);
    out.K_cod = k.rightCols(dc);
    return out;
}

PHSystem ph_apply_relation(const PHSystem& sys, const PortRelation& r) {
    if (!(r.dom == sys.boundary))
        throw DimensionError("apply relation: relation domain has " + std::to_string(r.dom.ports()) +
                             " ports but system '" + sys.name + "' exposes " + std::to_string(sys.boundary.ports()));
    PHSystem out = sys;
    out.boundary = r.cod;
    const std::size_t n = sys.state_dim;
    const std::size_t expected = n + r.cod.ports();
    const std::string name = sys.name;
    out.D = [inner = sys.D, r, n, expected, name](const VectorXd& x) {
        const KernelRep k = inner(x);
        const auto kr = k.F.rows(), rr = r.K_dom.rows();
        const auto nn = static_cast<Eigen::Index>(n);
        const auto bp = r.K_cod.cols();
        // Eliminate the shared boundary b from [F E G 0; 0 0 K_dom K_cod].
        MatrixXd shared(kr + rr, k.G.cols());
        shared << k.G, r.K_dom;
        const MatrixXd z = left_null(shared);
        MatrixXd rest = MatrixXd::Zero(kr + rr, 2 * nn + bp);
        rest.topLeftCorner(kr, nn) = k.F;
        rest.block(0, nn, kr, nn) = k.E;
        rest.bottomRightCorner(rr, bp) = r.K_cod;
        const MatrixXd rows = row_basis(z * rest);
        if (static_cast<std::size_t>(rows.rows()) != expected)
            throw DiracCheckError("degenerate interconnection of '" + name + "': composite kernel has rank " +
                                  std::to_string(rows.rows()) + ", expected " + std::to_string(expected));
        return KernelRep{rows.leftCols(nn), rows.middleCols(nn, nn), rows.rightCols(bp)};
    };
    return out;
}

PHSystem ph_apply_relation(const PHSystem& sys, const DiracRelation& r) {
    return ph_apply_relation(sys, port_relation(r));
}

PHSystem ph_tensor(const PHSystem& a, const PHSystem& b) {
    PHSystem out;
    out.name = a.name + "*" + b.name;
    out.state_dim = a.state_dim + b.state_dim;
    out.boundary = concat(a.boundary, b.boundary);
    const auto na = static_cast<Eigen::Index>(a.state_dim), nb = static_cast<Eigen::Index>(b.state_dim);
    out.H = [ha = a.H, hb = b.H, na, nb](const VectorXd& x) { return ha(x.head(na)) + hb(x.tail(nb)); };
    out.grad_H = [ga = a.grad_H, gb = b.grad_H, na, nb](const VectorXd& x) {
        VectorXd g(na + nb);
        g << ga(x.head(na)), gb(x.tail(nb));
        return g;
    };
    out.D = [da = a.D, db = b.D, na, nb](const VectorXd& x) {
        const KernelRep ka = da(x.head(na)), kb = db(x.tail(nb));
        return KernelRep{block_diag(ka.F, kb.F), block_diag(ka.E, kb.E), block_diag(ka.G, kb.G)};
    };
    if (!a.domain.empty() || !b.domain.empty()) {
        const double inf = std::numeric_limits<double>::infinity();
        auto da = a.domain, db = b.domain;
        if (da.empty()) da.assign(a.state_dim, {-inf, inf});
        if (db.empty()) db.assign(b.state_dim, {-inf, inf});
        out.domain = da;
        out.domain.insert(out.domain.end(), db.begin(), db.end());
    }
    return out;
}

PHSystem ph_unit() {
    PHSystem u;
    u.name = "unit";
    u.H = [](const VectorXd&) { return 0.0; };
    u.grad_H = [](const VectorXd&) { return VectorXd(0); };
    u.D = [](const VectorXd&) { return KernelRep{MatrixXd(0, 0), MatrixXd(0, 0), MatrixXd(0, 0)}; };
    return u;
}

// ---------------------------------------------------------------------------
// Simulation

StepSolution solve_step(const PHSystem& sys, const std::vector<PortInput>& inputs, const VectorXd& x, double t) {
    const std::size_t p = sys.boundary.ports();
    if (inputs.size() != p)
        throw DimensionError("simulate: " + std::to_string(inputs.size()) + " port inputs for " + std::to_string(p) +
                             " ports");
    const KernelRep k = sys.D(x);
    const auto n = static_cast<Eigen::Index>(sys.state_dim);
    const auto rows = k.F.rows();
    const auto pp = static_cast<Eigen::Index>(p);

    VectorXd commanded(pp);
    MatrixXd a(rows, n + pp);
    a.leftCols(n) = k.F;
    VectorXd rhs = -(k.E * sys.grad_H(x));
    for (Eigen::Index i = 0; i < pp; ++i) {
        const bool effort_in = inputs[static_cast<std::size_t>(i)].kind == PortInput::Kind::effort;
        const Eigen::Index cmd = 2 * i + (effort_in ? 0 : 1), free = 2 * i + (effort_in ? 1 : 0);
        commanded(i) = inputs[static_cast<std::size_t>(i)].value(t);
        rhs -= k.G.col(cmd) * commanded(i);
        a.col(n + i) = k.G.col(free);
    }

    VectorXd z = VectorXd::Zero(n + pp);
    Eigen::Index rank = 0;
    MatrixXd null;
    if (rows > 0 && n + pp > 0) {
        const Svd s = full_svd(a);
        rank = s.rank;
        if (rank > 0) {
            const auto& sv = s.svd.singularValues();
            VectorXd c = s.svd.matrixU().leftCols(rank).transpose() * rhs;
            for (Eigen::Index i = 0; i < rank; ++i) c(i) /= sv(i);
            z = s.svd.matrixV().leftCols(rank) * c;
        }
        null = s.svd.matrixV().rightCols(n + pp - rank);
    } else {
        null = MatrixXd::Identity(n + pp, n + pp);
    }
    const double residual = (a * z - rhs).norm();
    const double scale = std::max(1.0, rhs.norm() + a.norm() * z.norm());
    if (residual > 1e-9 * scale)
        throw SolverError("overdetermined Dirac interconnection in '" + sys.name + "' at t=" + io::format_double(t) +
                          ": commanded inputs are inconsistent (residual " + io::format_double(residual) + ")");
    if (null.cols() > 0 && n > 0 && null.topRows(n).norm() > 1e-8)
        throw SolverError("underdetermined Dirac interconnection in '" + sys.name + "' at t=" + io::format_double(t) +
                          ": state rates are not determined by the commanded inputs");

    StepSolution out;
    out.xi = z.head(n);
    out.b = VectorXd(2 * pp);
    for (Eigen::Index i = 0; i < pp; ++i) {
        const bool effort_in = inputs[static_cast<std::size_t>(i)].kind == PortInput::Kind::effort;
        out.b(2 * i + (effort_in ? 0 : 1)) = commanded(i);
        out.b(2 * i + (effort_in ? 1 : 0)) = z(n + i);
    }
    out.residual = (k.F * out.xi + k.E * sys.grad_H(x) + k.G * out.b).norm();
    return out;
}

Trajectory simulate(const PHSystem& sys, const std::vector<PortInput>& inputs, const VectorXd& x0, double t0,
                    double t1, double dt, Scheme scheme) {
    if (!(dt > 0) || !(t1 >= t0)) throw DomainError("simulate: need dt > 0 and t1 >= t0");
    if (x0.size() != static_cast<Eigen::Index>(sys.state_dim))
        throw DimensionError("simulate: initial state has length " + std::to_string(x0.size()) + ", expected " +
                             std::to_string(sys.state_dim));
    if (!sys.in_domain(x0)) throw DomainError("simulate: initial state lies outside the domain of '" + sys.name + "'");

    const double span = t1 - t0;
    auto steps = static_cast<std::size_t>(std::ceil(span / dt - 1e-9));
    auto rate = [&](const VectorXd& x, double t) { return solve_step(sys, inputs, x, t).xi; };

    Trajectory traj;
    auto record = [&](double t, const VectorXd& x) {
        const StepSolution s = solve_step(sys, inputs, x, t);
        traj.times.push_back(t);
        traj.states.push_back(x);
        traj.boundary.push_back(s.b);
        traj.energies.push_back(sys.H(x));
        traj.max_compatibility_residual = std::max(traj.max_compatibility_residual, s.residual);
    };

    VectorXd x = x0;
    record(t0, x);
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = t0 + static_cast<double>(k) * dt;
        const double tn = k + 1 == steps ? t1 : t0 + static_cast<double>(k + 1) * dt;
        const double h = tn - t;
        if (scheme == Scheme::rk4) {
            const VectorXd k1 = rate(x, t);
            const VectorXd k2 = rate(x + 0.5 * h * k1, t + 0.5 * h);
            const VectorXd k3 = rate(x + 0.5 * h * k2, t + 0.5 * h);
            const VectorXd k4 = rate(x + h * k3, tn);
            x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        } else {
            VectorXd next = x + h * rate(x, t);
            bool converged = false;
            for (int it = 0; it < 200 && !converged; ++it) {
                const VectorXd updated = x + h * rate(0.5 * (x + next), t + 0.5 * h);
                converged = (updated - next).norm() <= 1e-14 * (1.0 + updated.norm());
                next = updated;
            }
            if (!converged)
                throw SolverError("implicit midpoint iteration did not converge at t=" + io::format_double(t) +
                                  "; reduce dt");
            x = next;
        }
        if (!x.allFinite()) throw SolverError("simulation of '" + sys.name + "' produced non-finite state");
        if (!sys.in_domain(x))
            throw DomainError("simulate: state left the domain of '" + sys.name + "' at t=" + io::format_double(tn));
        record(tn, x);
    }
    return traj;
}

double energy_audit(const PHSystem& sys, const Trajectory& traj) {
    double worst = 0, integral = 0;
    for (std::size_t k = 1; k < traj.times.size(); ++k) {
        const double h = traj.times[k] - traj.times[k - 1];
        integral += 0.5 * h * (sys.boundary.power(traj.boundary[k - 1]) + sys.boundary.power(traj.boundary[k]));
        worst = std::max(worst, std::abs(traj.energies[k] - traj.energies[0] - integral));
    }
    return worst;
}

std::string trajectory_csv(const PHSystem& sys, const Trajectory& traj) {
    std::ostringstream out;
    out << "t";
    for (std::size_t i = 0; i < sys.state_dim; ++i) out << ",x" << i + 1;
    for (std::size_t i = 0; i < sys.boundary.ports(); ++i) out << ",e" << i + 1 << ",f" << i + 1;
    out << ",H\n";
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        out << io::format_double(traj.times[k]);
        for (Eigen::Index i = 0; i < traj.states[k].size(); ++i) out << ',' << io::format_double(traj.states[k](i));
        for (Eigen::Index i = 0; i < traj.boundary[k].size(); ++i) out << ',' << io::format_double(traj.boundary[k](i));
        out << ',' << io::format_double(traj.energies[k]) << '\n';
    }
    return out.str();
}

MorphismReport check_forwards_morphism(const std::function<VectorXd(const VectorXd&)>& f,
                                       const std::function<MatrixXd(const VectorXd&)>& jacobian, const PHSystem& src,
                                       const PHSystem& dst, const std::vector<VectorXd>& samples, double tol) {
    MorphismReport report;
    auto fail = [&](std::string msg) {
        report.passed = false;
        report.failures.push_back(std::move(msg));
    };
    if (!(src.boundary == dst.boundary)) {
        fail("boundaries differ");
        return report;
    }
    for (std::size_t s = 0; s < samples.size(); ++s) {
        const VectorXd& x = samples[s];
        const VectorXd fx = f(x);
        const MatrixXd j = jacobian(x);
        const double gap = std::abs(src.H(x) - dst.H(fx));
        report.max_energy_gap = std::max(report.max_energy_gap, gap);
        if (gap > tol * (1.0 + std::abs(src.H(x)))) fail("sample " + std::to_string(s) + ": H differs from H'∘f");

        const KernelRep k = src.D(x), kd = dst.D(fx);
        const auto n = k.F.cols(), nd = kd.F.cols(), bd = k.G.cols();
        // Solutions (ξ, φ, b) of F ξ + E Jᵀ φ + G b = 0, i.e. (ξ, f*φ, b) ∈ D_x.
        MatrixXd a(k.F.rows(), n + nd + bd);
        a << k.F, k.E * j.transpose(), k.G;
        const MatrixXd basis = null_columns(a);
        MatrixXd pushed(nd + nd + bd, basis.cols());
        pushed << j * basis.topRows(n), basis.middleRows(n, nd), basis.bottomRows(bd);
        const MatrixXd m = kd.stacked();
        double worst = 0;
        for (Eigen::Index c = 0; c < pushed.cols(); ++c) {
            const double denom = std::max(1e-300, m.norm() * pushed.col(c).norm());
            worst = std::max(worst, (m * pushed.col(c)).norm() / denom);
        }
        report.max_relation_residual = std::max(report.max_relation_residual, worst);
        if (worst > tol) fail("sample " + std::to_string(s) + ": pushed-forward relation not contained in D'");
    }
    return report;
}

double gradient_check(const PHSystem& sys, const std::vector<VectorXd>& samples, double h) {
    double worst = 0;
    for (const auto& x : samples) {
        if (x.size() == 0) continue;
        const VectorXd g = sys.grad_H(x);
        double err = 0;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            const double step = h * (1.0 + std::abs(x(i)));
            VectorXd xp = x, xm = x;
            xp(i) += step;
            xm(i) -= step;
            err = std::max(err, std::abs((sys.H(xp) - sys.H(xm)) / (2 * step) - g(i)));
        }
        worst = std::max(worst, err / std::max(1.0, g.cwiseAbs().maxCoeff()));
    }
    return worst;
}

KernelRep reduced_kernel(const KernelRep& k, double tol) {
    MatrixXd m = k.stacked();
    const double scale = m.size() == 0 ? 1.0 : std::max(1.0, m.cwiseAbs().maxCoeff());
    Eigen::Index row = 0;
    for (Eigen::Index c = 0; c < m.cols() && row < m.rows(); ++c) {
        Eigen::Index piv;
        const double best = m.col(c).tail(m.rows() - row).cwiseAbs().maxCoeff(&piv);
        if (best <= tol * scale) continue;
        piv += row;
        m.row(row).swap(m.row(piv));
        m.row(row) /= m(row, c);
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            if (r != row) m.row(r) -= m(r, c) * m.row(row);
        ++row;
    }
    m = m.unaryExpr([&](double v) { return std::abs(v) <= tol * scale ? 0.0 : v; });
    const auto n = k.F.cols();
    return KernelRep{m.leftCols(n), m.middleCols(n, n), m.rightCols(k.G.cols())};
}

} // namespace dirac::ph
