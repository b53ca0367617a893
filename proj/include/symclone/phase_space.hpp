// phase_space.hpp — Canonical coordinates, symplectic form, Riemann metric and
// Poisson brackets for quantum, classical and hybrid state manifolds.
//
// A quantum state with amplitudes c_j is stored as the real coordinate vector
// (x_1..x_N, y_1..y_N) with x_j = sqrt(2/hbar) Re c_j, y_j = sqrt(2/hbar) Im c_j.
// Classical degrees of freedom are stored as (q_1..q_Nc, p_1..p_Nc). A hybrid
// space concatenates (classical, quantum) blocks; the two sectors compose as a
// Cartesian product, so no entanglement between them is representable.
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>

namespace symclone::phase {

using Complex = std::complex<double>;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

enum class SpaceKind { Quantum, Classical, Hybrid };

// ------------------------------ descriptors ---------------------------------

// Shape of a state manifold: nc classical degrees of freedom and an
// nq-dimensional quantum factor. Pure quantum: nc = 0; pure classical: nq = 0.
class SpaceDescriptor {
public:
    static SpaceDescriptor quantum(int complex_dim, double hbar = 1.0);
    static SpaceDescriptor classical(int dof_count, double hbar = 1.0);

    SpaceKind kind() const { return kind_; }
    double hbar() const { return hbar_; }
    int classical_dofs() const { return nc_; }
    int quantum_dim() const { return nq_; }
    int total_real_dim() const { return 2 * (nc_ + nq_); }

    // block offsets into a coords vector: (q.., p.., x.., y..)
    int q_offset() const { return 0; }
    int p_offset() const { return nc_; }
    int x_offset() const { return 2 * nc_; }
    int y_offset() const { return 2 * nc_ + nq_; }

    friend bool operator==(const SpaceDescriptor& a, const SpaceDescriptor& b) {
        return a.kind_ == b.kind_ && a.nc_ == b.nc_ && a.nq_ == b.nq_ && a.hbar_ == b.hbar_;
    }
    friend bool operator!=(const SpaceDescriptor& a, const SpaceDescriptor& b) { return !(a == b); }

    friend SpaceDescriptor compose_hybrid(const SpaceDescriptor&, const SpaceDescriptor&);

private:
    SpaceDescriptor(SpaceKind kind, int nc, int nq, double hbar);

    SpaceKind kind_;
    int nc_;
    int nq_;
    double hbar_;
};

// Tensor composition of two quantum factors: complex dimensions multiply.
SpaceDescriptor compose_quantum(const SpaceDescriptor& a, const SpaceDescriptor& b);

// Cartesian composition of a classical and a quantum part.
SpaceDescriptor compose_hybrid(const SpaceDescriptor& c, const SpaceDescriptor& q);

// ------------------------------ points, vectors -----------------------------

struct PhasePoint {
    SpaceDescriptor space;
    RealVector coords;

    PhasePoint(SpaceDescriptor s, RealVector c);
};

struct TangentVector {
    PhasePoint base;
    RealVector components;

    TangentVector(PhasePoint b, RealVector c);
};

TangentVector operator+(const TangentVector& u, const TangentVector& v);
TangentVector operator*(double s, const TangentVector& v);
TangentVector operator*(const TangentVector& v, double s);

// ------------------------------ operators -----------------------------------

class HermitianOperator {
public:
    explicit HermitianOperator(ComplexMatrix entries, double tol = 1e-12);

    int dim() const { return static_cast<int>(entries_.rows()); }
    const ComplexMatrix& entries() const { return entries_; }

private:
    ComplexMatrix entries_;
};

HermitianOperator identity_operator(int dim);
HermitianOperator pauli_x();
HermitianOperator pauli_y();
HermitianOperator pauli_z();

// ------------------------------ coordinate maps -----------------------------

PhasePoint to_canonical(const ComplexVector& amplitudes, const SpaceDescriptor& space);
ComplexVector from_canonical(const PhasePoint& point);

// Quantum-sector amplitudes of a quantum or hybrid point.
ComplexVector quantum_amplitudes(const PhasePoint& point);

// Complex notation of a point: quantum amplitudes followed by (q_i + i p_i).
ComplexVector complex_view(const PhasePoint& point);

// Sum of x^2 + y^2 over the quantum sector; 2/hbar for a normalized state.
double quantum_norm_squared(const PhasePoint& point);
bool is_normalized(const PhasePoint& point, double tol = 1e-9);

// ------------------------------ structures ----------------------------------

// omega(u,v) = sum_c (u_q v_p - v_q u_p) + (1/hbar) sum_q (u_x v_y - v_x u_y)
double symplectic_form(const TangentVector& u, const TangentVector& v);

// g(u,v) = sum_q (u_x v_x + u_y v_y); quantum spaces only
double riemann_metric(const TangentVector& u, const TangentVector& v);

// J: (x, y) -> (-y, x); satisfies J^2 = -I and g(u,v) = omega(u, J v)
TangentVector almost_complex(const TangentVector& v);

// <psi_X| op |psi_X> as a real quadratic function of the coordinates
double expectation(const HermitianOperator& op, const PhasePoint& point);

// gradient of the quadratic function above; zero on classical slots
RealVector expectation_gradient(const HermitianOperator& op, const PhasePoint& point);

// ------------------------------ scalar fields -------------------------------

struct ScalarField {
    std::function<double(const PhasePoint&)> value;
    // optional analytic gradient; central finite differences when absent
    std::function<RealVector(const PhasePoint&)> gradient;
};

ScalarField coordinate_field(int index);
ScalarField observable_field(const HermitianOperator& op);

RealVector field_gradient(const ScalarField& f, const PhasePoint& point, double step = 1e-6);

// {f,g} with the (1/hbar)-weighted quantum sector
double poisson_bracket(const ScalarField& f, const ScalarField& g, const PhasePoint& point);

// ------------------------------ composition ---------------------------------

// quantum (x) quantum: tensor-product state, row-major over (j,k) factor pairs;
// classical x quantum: coordinate concatenation into the hybrid layout
PhasePoint product_embed(const PhasePoint& a, const PhasePoint& b);

// ------------------------------ global phase --------------------------------

// theta minimizing |b e^{i theta} - a|
double fitted_global_phase(const ComplexVector& a, const ComplexVector& b);
double phase_aligned_max_diff(const ComplexVector& a, const ComplexVector& b);

}  // namespace symclone::phase
