// dynamics.hpp — Hamiltonian flows on quantum, classical and hybrid phase
// spaces: linear and nonlinear quantum evolution, mean-field hybrid dynamics,
// ensemble (particle) transport with density-matrix and purity diagnostics.
//
// Integration uses a fixed-step two-stage Gauss collocation scheme (implicit,
// order 4). Gauss methods are symplectic for arbitrary smooth Hamilton
// functions and conserve quadratic invariants (such as the state norm) to the
// fixed-point tolerance, which is what the omega-preservation checks in this
// package rely on; the fourth order keeps phase errors of oscillatory flows
// below the oracle-comparison tolerances at dt = 1e-3.
#pragma once

#include "symclone/phase_space.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace symclone::dyn {

using phase::ComplexMatrix;
using phase::ComplexVector;
using phase::HermitianOperator;
using phase::PhasePoint;
using phase::RealVector;
using phase::SpaceDescriptor;
using phase::TangentVector;

// ------------------------------ Hamilton functions ---------------------------

// H(X) = <psi_X| op |psi_X>
struct QuadraticHamiltonian {
    HermitianOperator op;
};

// H(X) = sum_k c_k prod_m <A_{k,m}>^{e_{k,m}}; phase-invariant by construction,
// so the flow conserves the state norm even though it is nonlinear
struct ExpectationMonomial {
    double coefficient = 0.0;
    std::vector<HermitianOperator> factors;
    std::vector<int> exponents;
};

struct ExpectationPolynomial {
    std::vector<ExpectationMonomial> terms;
};

struct ClassicalField {
    std::function<double(const RealVector& q, const RealVector& p)> value;
    // optional analytic gradient (dH/dq, dH/dp); finite differences otherwise
    std::function<std::pair<RealVector, RealVector>(const RealVector& q, const RealVector& p)>
        gradient;
};

// Hermitian operator family V(q, p) with optional analytic partials
struct OperatorField {
    std::function<ComplexMatrix(const RealVector& q, const RealVector& p)> value;
    std::function<ComplexMatrix(const RealVector& q, const RealVector& p, int i)> dq;
    std::function<ComplexMatrix(const RealVector& q, const RealVector& p, int i)> dp;
};

// H = H_c(q,p) + <H_q> + <V(q,p)>; quadratic in the quantum sector
struct MeanFieldHamiltonian {
    SpaceDescriptor space;  // hybrid
    ClassicalField h_c;
    HermitianOperator h_q;
    OperatorField v_int;
};

using HamiltonianSpec = std::variant<QuadraticHamiltonian, ExpectationPolynomial, MeanFieldHamiltonian>;

double hamiltonian_value(const HamiltonianSpec& spec, const PhasePoint& x);
RealVector hamiltonian_gradient(const HamiltonianSpec& spec, const PhasePoint& x);
RealVector hamiltonian_gradient_fd(const HamiltonianSpec& spec, const PhasePoint& x,
                                   double step = 1e-6);

// Omega grad H with the sector weights of the hybrid bracket:
// qdot = dH/dp, pdot = -dH/dq, xdot = (1/hbar) dH/dy, ydot = -(1/hbar) dH/dx
TangentVector hamiltonian_vector_field(const HamiltonianSpec& spec, const PhasePoint& x);

// ------------------------------ integration ----------------------------------

struct Trajectory {
    std::vector<double> times;
    std::vector<PhasePoint> points;
    std::vector<double> energies;
};

struct IntegrateOptions {
    double fixed_point_tol = 1e-14;  // on the max-norm of the iterate increment
    int max_iterations = 50;
};

// t_final is rounded to the nearest step multiple; the recorded times report
// the actual grid
Trajectory integrate(const HamiltonianSpec& spec, const PhasePoint& x0, double t_final, double dt,
                     const IntegrateOptions& opts = {});

PhasePoint flow_endpoint(const HamiltonianSpec& spec, const PhasePoint& x0, double t_final,
                         double dt, const IntegrateOptions& opts = {});

// omega(u_t, v_t) / omega(u_0, v_0) with the tangents transported by a
// Richardson-refined finite difference of the flow map; 1 for any Hamiltonian
double flow_symplectic_check(const HamiltonianSpec& spec, const PhasePoint& x0,
                             const TangentVector& u, const TangentVector& v, double t_final,
                             double dt, double fd_step = 1e-6);

// ------------------------------ ensembles ------------------------------------

// weighted particle set transported along Liouville characteristics
struct HybridEnsemble {
    struct Member {
        double weight;
        PhasePoint point;
    };
    std::vector<Member> members;
};

void validate_ensemble(const HybridEnsemble& e);

HybridEnsemble evolve_ensemble(const MeanFieldHamiltonian& spec, const HybridEnsemble& e0,
                               double t_final, double dt, const IntegrateOptions& opts = {});

// sum_k w_k P(psi_k) over normalized projectors of the quantum sectors
HermitianOperator density_matrix(const HybridEnsemble& e);

// tr(rho^2); requires unit trace and positive semidefiniteness
double purity(const HermitianOperator& rho);

// ------------------------------ paired evolutions ----------------------------

enum class Driver { A, B };

// Both states are propagated by the same classically-driven generator
// H_q + V(q(t), p(t)); only the driver state back-reacts on (q, p). The
// returned |<psi_a|psi_b>| series is constant for any such shared evolution.
std::vector<double> coevolve_overlap(const MeanFieldHamiltonian& spec, const ComplexVector& psi_a,
                                     const ComplexVector& psi_b, const RealVector& classical0,
                                     Driver driver, double t_final, double dt,
                                     const IntegrateOptions& opts = {});

// Two fully self-consistent runs from the same classical start; the classical
// trajectories differ, so no constancy is asserted. Reporting only.
std::vector<double> separate_run_overlap(const MeanFieldHamiltonian& spec,
                                         const ComplexVector& psi_a, const ComplexVector& psi_b,
                                         const RealVector& classical0, double t_final, double dt,
                                         const IntegrateOptions& opts = {});

// ------------------------------ bundled models -------------------------------

struct Preset {
    std::string name;
    HamiltonianSpec hamiltonian;
    PhasePoint initial_point;
};

Preset preset_linear_sigma_z();      // H = <sigma_z>, psi0 = (1,1)/sqrt(2)
Preset preset_weinberg_quadratic();  // H = <sigma_z> + 0.3 <sigma_x>^2, psi0 = (0.8, 0.6)
Preset preset_meanfield_oscillator();  // H_c = (p^2+q^2)/2, H_q = sigma_z, V = q sigma_x

const std::vector<std::string>& preset_names();
Preset preset_by_name(const std::string& name);

// ensemble starts for the mean-field oscillator: a single classical point, or
// an equal two-point classical mixture at q = +/-1 with the same quantum state
HybridEnsemble meanfield_delta_ensemble();
HybridEnsemble meanfield_two_point_ensemble();

}  // namespace symclone::dyn
