#pragma once

// Thermostatic systems: concave entropy functions on convex domains, composed
// by maximizing total entropy over affine relations.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "dirac/exactlin.hpp"

namespace dirac::thermo {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

/// Extended-real addition biased towards −∞ (−∞ + ∞ = −∞).
double ext_add(double a, double b);

/// One factor of a product domain.
struct Factor {
    enum class Kind { reals, positive, interval, simplex };
    Kind kind = Kind::reals;
    std::size_t dim = 1;  ///< number of coordinates (k for the k-simplex's k vertices)
    double lo = 0;        ///< interval only
    double hi = 0;        ///< interval only
};

/// Product of reals, positive reals, closed intervals and probability simplices.
class ConvexDomain {
public:
    ConvexDomain() = default;
    explicit ConvexDomain(std::vector<Factor> factors);

    static ConvexDomain point() { return {}; }
    static ConvexDomain reals(std::size_t n);
    static ConvexDomain positive(std::size_t n);
    static ConvexDomain interval(double lo, double hi);
    /// Probability vectors on k outcomes.
    static ConvexDomain simplex(std::size_t k);

    const std::vector<Factor>& factors() const noexcept { return factors_; }
    std::size_t dim() const noexcept { return dim_; }

    /// Closure membership (positive coordinates may be 0) up to tol.
    bool contains(const VectorXd& x, double tol = 1e-12) const;
    /// c_λ(x, y) = λx + (1 − λ)y.
    VectorXd mix(double lambda, const VectorXd& x, const VectorXd& y) const;
    /// Interior point drawn from a fixed, scale-one distribution per factor.
    VectorXd sample(std::mt19937_64& rng) const;

    /// Coordinate bounds (±∞ where absent) and the simplex equality rows.
    VectorXd lower() const;
    VectorXd upper() const;
    MatrixXd equality_rows() const;
    VectorXd equality_rhs() const;

    /// Drops the first coordinate, which must be a one-dimensional factor.
    ConvexDomain drop_first() const;

    friend ConvexDomain operator*(const ConvexDomain& a, const ConvexDomain& b);

private:
    std::vector<Factor> factors_;
    std::size_t dim_ = 0;
};

struct ThermoSystem {
    std::string name;
    ConvexDomain domain;
    std::function<double(const VectorXd&)> S;
    /// Optional analytic derivatives; finite differences are used when absent.
    std::function<VectorXd(const VectorXd&)> grad;
    std::function<MatrixXd(const VectorXd&)> hess;
};

VectorXd entropy_gradient(const ThermoSystem& sys, const VectorXd& x);
MatrixXd entropy_hessian(const ThermoSystem& sys, const VectorXd& x);

/// Largest midpoint-concavity violation ½S(x) + ½S(y) − S(mid) over random pairs.
double concavity_violation(const ThermoSystem& sys, std::size_t pairs, std::uint64_t seed);

/// {(x, y) : A x + B y = c}, x constrained further by the systems' domains.
struct AffineRelation {
    std::size_t x_dim = 0;
    std::size_t y_dim = 0;
    MatrixXd A;
    MatrixXd B;
    VectorXd c;

    void validate() const;
    /// x ↦ y = M x.
    static AffineRelation linear_map(const MatrixXd& m);
};

/// Result of one constrained maximization.
struct Equilibrium {
    bool feasible = false;
    double value = neg_inf;
    VectorXd argmax;
    /// λ with ∇S = Aᵀλ at the argmax (one per constraint row, simplex rows last).
    VectorXd multipliers;
    /// The argmax touches a domain bound, so conjugate variables need not equalize.
    bool boundary = false;
    /// Norm of the reduced (projected) gradient of the Lagrangian.
    double kkt_residual = 0;
};

struct SolverOptions {
    double tolerance = 1e-10;
    int max_newton = 200;
    double final_barrier = 1e-13;
};

/// sup { S(x) : lo ≤ x ≤ hi, A x = b } for concave S.
Equilibrium maximize_concave(const ThermoSystem& objective, const MatrixXd& A, const VectorXd& b,
                             const SolverOptions& options = {});

/// The composite system on Y: S(y) = sup over the fiber of R above y of Σ Sᵢ(xᵢ).
ThermoSystem thermo_tensor(const ThermoSystem& a, const ThermoSystem& b);
ThermoSystem thermo_unit();
ThermoSystem thermo_tensor_all(const std::vector<ThermoSystem>& systems);

class Pushforward {
public:
    Pushforward(AffineRelation rel, std::vector<ThermoSystem> systems, ConvexDomain y_domain,
                SolverOptions options = {});

    Equilibrium solve(const VectorXd& y) const;
    const AffineRelation& relation() const noexcept { return rel_; }
    const ThermoSystem& product() const noexcept { return product_; }
    /// The composite as a plain system; its gradient comes from the multipliers.
    ThermoSystem system(std::string name = "pushforward") const;

private:
    AffineRelation rel_;
    ThermoSystem product_;
    ConvexDomain y_domain_;
    SolverOptions options_;
};

ThermoSystem ent_pushforward(const AffineRelation& rel, const std::vector<ThermoSystem>& systems);
ThermoSystem ent_pushforward(const AffineRelation& rel, const std::vector<ThermoSystem>& systems,
                             const ConvexDomain& y_domain);

// Library.
ThermoSystem heat_capacity(double C);
/// Linear entropy ΔU/T on the reals.
ThermoSystem heat_bath(double T);
/// Linear entropy (p/T)V' of a pressure reservoir that gains volume V'.
ThermoSystem pressure_bath(double p, double T);
ThermoSystem shannon(std::size_t outcomes);
/// Ideal mixture on (U, V, N₁..N_k) with per-species offsets s0:
/// Σ Nₛ(s0ₛ + 1 + ln(V/Nₛ)) + c·N ln(U/N), N = Σ Nₛ.
ThermoSystem ideal_mixture(std::vector<double> s0, double c = 1.5);

/// sup_U S(U, rest) − U/T, obtained by composing with a heat bath.
ThermoSystem legendre_free_entropy(const ThermoSystem& sys, double T);
Pushforward legendre_pushforward(const ThermoSystem& sys, double T);

struct CanonicalResult {
    double beta = 0;
    VectorXd p;
    double S = 0;
};

/// Maximum-entropy distribution with mean energy U, found by bisection on β.
CanonicalResult canonical_distribution(const std::vector<double>& H, double U);
/// The same distribution as an entropy pushforward of the Shannon system along ⟨H⟩_p = U.
Equilibrium canonical_by_maximization(const std::vector<double>& H, double U);

// Reactions.
struct ReactionNetwork {
    std::vector<std::string> species;
    /// input[r][s] and output[r][s] are the coefficients of species s in reaction r.
    std::vector<std::vector<long>> input;
    std::vector<std::vector<long>> output;

    std::size_t reactions() const noexcept { return input.size(); }
    void validate() const;
};

/// One reaction per line, e.g. "2 H2 + O2 -> 2 H2O"; '#' starts a comment.
ReactionNetwork parse_reactions(std::string_view text);
std::string format_reactions(const ReactionNetwork& net);

struct Stoichiometry {
    lin::Mat nu;              ///< species × reactions, νₛᵣ = oᵣ(s) − iᵣ(s)
    lin::Subspace subspace;   ///< image of ν in ℚ^species
    lin::Mat conserved;       ///< rows spanning the annihilator of Stoch, in RREF

    /// Coordinates of the class N + Stoch.
    lin::Vec project(std::span<const lin::Rat> n) const;
    VectorXd project(const VectorXd& n) const;
};

Stoichiometry stoichiometry(const ReactionNetwork& net);

struct GibbsResult {
    VectorXd N;
    double U = 0;
    double V = 0;
    double Xi = 0;
    double kkt_residual = 0;
    bool boundary = false;
};

/// Maximizes S(U, V, N) − U/T − pV/T over U, V and N ∈ N0 + Stoch.
GibbsResult gibbs_equilibrium(const ThermoSystem& sys, double T, double p, const ReactionNetwork& net,
                              const VectorXd& N0);

} // namespace dirac::thermo
