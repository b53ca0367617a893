#include "symclone/phase_space.hpp"

#include <cmath>

namespace symclone::phase {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

// ------------------------------ descriptors ---------------------------------

SpaceDescriptor::SpaceDescriptor(SpaceKind kind, int nc, int nq, double hbar)
    : kind_(kind), nc_(nc), nq_(nq), hbar_(hbar) {
    require(hbar > 0.0, "SpaceDescriptor: hbar must be positive");
    require(nc >= 0 && nq >= 0 && nc + nq >= 1, "SpaceDescriptor: empty space");
}

SpaceDescriptor SpaceDescriptor::quantum(int complex_dim, double hbar) {
    require(complex_dim >= 1, "SpaceDescriptor::quantum: complex dimension must be >= 1");
    return SpaceDescriptor(SpaceKind::Quantum, 0, complex_dim, hbar);
}

SpaceDescriptor SpaceDescriptor::classical(int dof_count, double hbar) {
    require(dof_count >= 1, "SpaceDescriptor::classical: DOF count must be >= 1");
    return SpaceDescriptor(SpaceKind::Classical, dof_count, 0, hbar);
}

SpaceDescriptor compose_quantum(const SpaceDescriptor& a, const SpaceDescriptor& b) {
    require(a.kind() == SpaceKind::Quantum && b.kind() == SpaceKind::Quantum,
            "compose_quantum: both factors must be quantum");
    require(a.hbar() == b.hbar(), "compose_quantum: hbar mismatch");
    return SpaceDescriptor::quantum(a.quantum_dim() * b.quantum_dim(), a.hbar());
}

SpaceDescriptor compose_hybrid(const SpaceDescriptor& c, const SpaceDescriptor& q) {
    require(c.kind() == SpaceKind::Classical, "compose_hybrid: first argument must be classical");
    require(q.kind() == SpaceKind::Quantum, "compose_hybrid: second argument must be quantum");
    require(c.hbar() == q.hbar(), "compose_hybrid: hbar mismatch");
    return SpaceDescriptor(SpaceKind::Hybrid, c.classical_dofs(), q.quantum_dim(), c.hbar());
}

// ------------------------------ points, vectors -----------------------------

PhasePoint::PhasePoint(SpaceDescriptor s, RealVector c) : space(s), coords(std::move(c)) {
    require(coords.size() == space.total_real_dim(),
            "PhasePoint: coordinate length does not match the space dimension");
}

TangentVector::TangentVector(PhasePoint b, RealVector c) : base(std::move(b)), components(std::move(c)) {
    require(components.size() == base.space.total_real_dim(),
            "TangentVector: component length does not match the base space");
}

namespace {

void require_same_base(const TangentVector& u, const TangentVector& v, const char* who) {
    require(u.base.space == v.base.space, std::string(who) + ": base-space mismatch");
}

}  // namespace

TangentVector operator+(const TangentVector& u, const TangentVector& v) {
    require_same_base(u, v, "TangentVector::operator+");
    require(u.base.coords == v.base.coords, "TangentVector::operator+: different base points");
    return TangentVector(u.base, u.components + v.components);
}

TangentVector operator*(double s, const TangentVector& v) {
    return TangentVector(v.base, s * v.components);
}

TangentVector operator*(const TangentVector& v, double s) { return s * v; }

// ------------------------------ operators -----------------------------------

HermitianOperator::HermitianOperator(ComplexMatrix entries, double tol) : entries_(std::move(entries)) {
    require(entries_.rows() == entries_.cols() && entries_.rows() >= 1,
            "HermitianOperator: entries must form a nonempty square matrix");
    const double dev = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
    require(dev <= tol, "HermitianOperator: entries deviate from self-adjointness");
}

HermitianOperator identity_operator(int dim) {
    return HermitianOperator(ComplexMatrix::Identity(dim, dim));
}

HermitianOperator pauli_x() {
    ComplexMatrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return HermitianOperator(m);
}

HermitianOperator pauli_y() {
    ComplexMatrix m(2, 2);
    m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
    return HermitianOperator(m);
}

HermitianOperator pauli_z() {
    ComplexMatrix m(2, 2);
    m << 1.0, 0.0, 0.0, -1.0;
    return HermitianOperator(m);
}

// ------------------------------ coordinate maps -----------------------------

PhasePoint to_canonical(const ComplexVector& amplitudes, const SpaceDescriptor& space) {
    require(space.kind() == SpaceKind::Quantum, "to_canonical: space must be quantum");
    require(amplitudes.size() == space.quantum_dim(), "to_canonical: dimension mismatch");
    const double scale = std::sqrt(2.0 / space.hbar());
    RealVector coords(space.total_real_dim());
    for (int j = 0; j < space.quantum_dim(); ++j) {
        coords[space.x_offset() + j] = scale * amplitudes[j].real();
        coords[space.y_offset() + j] = scale * amplitudes[j].imag();
    }
    return PhasePoint(space, std::move(coords));
}

ComplexVector from_canonical(const PhasePoint& point) {
    require(point.space.kind() == SpaceKind::Quantum, "from_canonical: space must be quantum");
    return quantum_amplitudes(point);
}

ComplexVector quantum_amplitudes(const PhasePoint& point) {
    const auto& s = point.space;
    require(s.quantum_dim() >= 1, "quantum_amplitudes: no quantum sector");
    const double scale = std::sqrt(s.hbar() / 2.0);
    ComplexVector c(s.quantum_dim());
    for (int j = 0; j < s.quantum_dim(); ++j) {
        c[j] = scale * Complex(point.coords[s.x_offset() + j], point.coords[s.y_offset() + j]);
    }
    return c;
}

ComplexVector complex_view(const PhasePoint& point) {
    const auto& s = point.space;
    ComplexVector view(s.quantum_dim() + s.classical_dofs());
    if (s.quantum_dim() > 0) view.head(s.quantum_dim()) = quantum_amplitudes(point);
    for (int i = 0; i < s.classical_dofs(); ++i) {
        view[s.quantum_dim() + i] =
            Complex(point.coords[s.q_offset() + i], point.coords[s.p_offset() + i]);
    }
    return view;
}

double quantum_norm_squared(const PhasePoint& point) {
    const auto& s = point.space;
    require(s.quantum_dim() >= 1, "quantum_norm_squared: no quantum sector");
    return point.coords.segment(s.x_offset(), 2 * s.quantum_dim()).squaredNorm();
}

bool is_normalized(const PhasePoint& point, double tol) {
    return std::abs(quantum_norm_squared(point) - 2.0 / point.space.hbar()) <= tol;
}

// ------------------------------ structures ----------------------------------

double symplectic_form(const TangentVector& u, const TangentVector& v) {
    require_same_base(u, v, "symplectic_form");
    const auto& s = u.base.space;
    double cl = 0.0;
    for (int i = 0; i < s.classical_dofs(); ++i) {
        cl += u.components[s.q_offset() + i] * v.components[s.p_offset() + i] -
              v.components[s.q_offset() + i] * u.components[s.p_offset() + i];
    }
    double qu = 0.0;
    for (int j = 0; j < s.quantum_dim(); ++j) {
        qu += u.components[s.x_offset() + j] * v.components[s.y_offset() + j] -
              v.components[s.x_offset() + j] * u.components[s.y_offset() + j];
    }
    return cl + qu / s.hbar();
}

double riemann_metric(const TangentVector& u, const TangentVector& v) {
    require_same_base(u, v, "riemann_metric");
    require(u.base.space.kind() == SpaceKind::Quantum, "riemann_metric: quantum spaces only");
    return u.components.dot(v.components);
}

TangentVector almost_complex(const TangentVector& v) {
    const auto& s = v.base.space;
    require(s.kind() == SpaceKind::Quantum, "almost_complex: quantum spaces only");
    RealVector out(v.components.size());
    for (int j = 0; j < s.quantum_dim(); ++j) {
        out[s.x_offset() + j] = -v.components[s.y_offset() + j];
        out[s.y_offset() + j] = v.components[s.x_offset() + j];
    }
    return TangentVector(v.base, std::move(out));
}

double expectation(const HermitianOperator& op, const PhasePoint& point) {
    require(point.space.kind() == SpaceKind::Quantum, "expectation: quantum points only");
    require(op.dim() == point.space.quantum_dim(), "expectation: operator dimension mismatch");
    const ComplexVector c = quantum_amplitudes(point);
    const Complex value = c.dot(op.entries() * c);
    if (std::abs(value.imag()) > 1e-12) {
        throw std::runtime_error("expectation: imaginary residual exceeds tolerance");
    }
    return value.real();
}

RealVector expectation_gradient(const HermitianOperator& op, const PhasePoint& point) {
    const auto& s = point.space;
    require(s.quantum_dim() >= 1, "expectation_gradient: no quantum sector");
    require(op.dim() == s.quantum_dim(), "expectation_gradient: operator dimension mismatch");
    ComplexVector z(s.quantum_dim());
    for (int j = 0; j < s.quantum_dim(); ++j) {
        z[j] = Complex(point.coords[s.x_offset() + j], point.coords[s.y_offset() + j]);
    }
    const ComplexVector w = op.entries() * z;
    RealVector grad = RealVector::Zero(s.total_real_dim());
    for (int j = 0; j < s.quantum_dim(); ++j) {
        grad[s.x_offset() + j] = s.hbar() * w[j].real();
        grad[s.y_offset() + j] = s.hbar() * w[j].imag();
    }
    return grad;
}

// ------------------------------ scalar fields -------------------------------

ScalarField coordinate_field(int index) {
    ScalarField f;
    f.value = [index](const PhasePoint& p) {
        if (index < 0 || index >= p.coords.size())
            throw std::invalid_argument("coordinate_field: index out of range");
        return p.coords[index];
    };
    f.gradient = [index](const PhasePoint& p) {
        if (index < 0 || index >= p.coords.size())
            throw std::invalid_argument("coordinate_field: index out of range");
        RealVector g = RealVector::Zero(p.coords.size());
        g[index] = 1.0;
        return g;
    };
    return f;
}

ScalarField observable_field(const HermitianOperator& op) {
    ScalarField f;
    f.value = [op](const PhasePoint& p) { return expectation(op, p); };
    f.gradient = [op](const PhasePoint& p) { return expectation_gradient(op, p); };
    return f;
}

RealVector field_gradient(const ScalarField& f, const PhasePoint& point, double step) {
    if (f.gradient) return f.gradient(point);
    require(static_cast<bool>(f.value), "field_gradient: field has no value function");
    RealVector grad(point.coords.size());
    for (int i = 0; i < point.coords.size(); ++i) {
        PhasePoint plus = point;
        PhasePoint minus = point;
        plus.coords[i] += step;
        minus.coords[i] -= step;
        grad[i] = (f.value(plus) - f.value(minus)) / (2.0 * step);
    }
    return grad;
}

double poisson_bracket(const ScalarField& f, const ScalarField& g, const PhasePoint& point) {
    const RealVector gf = field_gradient(f, point);
    const RealVector gg = field_gradient(g, point);
    if (!gf.allFinite() || !gg.allFinite()) {
        throw std::runtime_error("poisson_bracket: non-finite gradient");
    }
    const auto& s = point.space;
    double cl = 0.0;
    for (int i = 0; i < s.classical_dofs(); ++i) {
        cl += gf[s.q_offset() + i] * gg[s.p_offset() + i] -
              gg[s.q_offset() + i] * gf[s.p_offset() + i];
    }
    double qu = 0.0;
    for (int j = 0; j < s.quantum_dim(); ++j) {
        qu += gf[s.x_offset() + j] * gg[s.y_offset() + j] -
              gg[s.x_offset() + j] * gf[s.y_offset() + j];
    }
    return cl + qu / s.hbar();
}

// ------------------------------ composition ---------------------------------

PhasePoint product_embed(const PhasePoint& a, const PhasePoint& b) {
    const auto ka = a.space.kind();
    const auto kb = b.space.kind();
    if (ka == SpaceKind::Quantum && kb == SpaceKind::Quantum) {
        require(is_normalized(a) && is_normalized(b), "product_embed: factors must be normalized");
        const ComplexVector ca = quantum_amplitudes(a);
        const ComplexVector cb = quantum_amplitudes(b);
        ComplexVector c(ca.size() * cb.size());
        for (int j = 0; j < ca.size(); ++j) {
            for (int k = 0; k < cb.size(); ++k) {
                c[j * cb.size() + k] = ca[j] * cb[k];
            }
        }
        return to_canonical(c, compose_quantum(a.space, b.space));
    }
    if (ka == SpaceKind::Classical && kb == SpaceKind::Quantum) {
        require(is_normalized(b), "product_embed: quantum factor must be normalized");
        const SpaceDescriptor hybrid = compose_hybrid(a.space, b.space);
        RealVector coords(hybrid.total_real_dim());
        coords.head(a.space.total_real_dim()) = a.coords;
        coords.tail(b.space.total_real_dim()) = b.coords;
        return PhasePoint(hybrid, std::move(coords));
    }
    throw std::invalid_argument("product_embed: unsupported kind combination");
}

// ------------------------------ global phase --------------------------------

double fitted_global_phase(const ComplexVector& a, const ComplexVector& b) {
    require(a.size() == b.size(), "fitted_global_phase: length mismatch");
    const Complex w = a.dot(b);  // conjugates a
    if (std::abs(w) == 0.0) return 0.0;
    return -std::arg(w);
}

double phase_aligned_max_diff(const ComplexVector& a, const ComplexVector& b) {
    const double theta = fitted_global_phase(a, b);
    const Complex rot = std::polar(1.0, theta);
    return (b * rot - a).cwiseAbs().maxCoeff();
}

}  // namespace symclone::phase
