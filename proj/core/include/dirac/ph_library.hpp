#pragma once

// Example port-Hamiltonian components. Ports are scalar (effort, flow) pairs with
// power counted into the component.

#include <map>
#include <string>
#include <vector>

#include "dirac/diracrel.hpp"
#include "dirac/phsys.hpp"

namespace dirac::ph {

/// q̇ = I, V = q/C.
PHSystem capacitor(double c);
/// No state; the flow is pinned to zero whatever the effort.
PHSystem wall();
/// Closed pendulum, H(θ, L) = m g l sin θ + L²/(2 m l²), with θ̇ = ∂H/∂L, L̇ = −∂H/∂θ.
PHSystem pendulum(double m, double g, double l);
/// Pendulum driven by a linear force F at the tip; port (F, l cos θ · θ̇).
PHSystem forced_pendulum(double m, double g, double l);
/// L̇ = τ, ω = L/I_rot; port (τ, ω).
PHSystem flywheel(double inertia);
/// Storage tank with two ports sharing the pressure p = V/C; V̇ = f_a + f_b.
PHSystem tank(double c);
/// Planar body with heading θ; ports (F_x, v_x) and (F_y, v_y).
PHSystem hovercar(double mass, double inertia, double arm);

/// Electric port (V, I) to shaft port (τ, ω) with ω = κV, κτ = I.
DiracRelation motor(const lin::Rat& kappa);
/// Shaft port (τ, ω) to the two tank-side ports (p₀, f₀), (p₁, f₁) with
/// p₁ − p₀ = ρτ and f₁ = −f₀ = ω/ρ (flows counted into the tanks).
DiracRelation pump(const lin::Rat& rho);

using Params = std::map<std::string, double>;

/// Library lookup by name; unknown names or parameters throw DomainError.
PHSystem library_system(const std::string& name, const Params& params);
DiracRelation library_relation(const std::string& name, const Params& params);
bool is_library_system(const std::string& name);
bool is_library_relation(const std::string& name);

} // namespace dirac::ph
