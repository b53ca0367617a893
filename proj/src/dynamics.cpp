#include "symclone/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace symclone::dyn {

namespace {

using phase::Complex;
using phase::SpaceKind;

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

ComplexVector quantum_z(const PhasePoint& x) {
    const auto& s = x.space;
    ComplexVector z(s.quantum_dim());
    for (int j = 0; j < s.quantum_dim(); ++j) {
        z[j] = Complex(x.coords[s.x_offset() + j], x.coords[s.y_offset() + j]);
    }
    return z;
}

// (hbar/2) z^dag M z as a real quadratic function of the quantum sector
double quad_value(const ComplexMatrix& m, const ComplexVector& z, double hbar) {
    return 0.5 * hbar * z.dot(m * z).real();
}

double quad_value(const HermitianOperator& op, const PhasePoint& x) {
    require(op.dim() == x.space.quantum_dim(), "hamiltonian: operator dimension mismatch");
    return quad_value(op.entries(), quantum_z(x), x.space.hbar());
}

void check_polynomial(const ExpectationPolynomial& poly, const PhasePoint& x) {
    require(x.space.kind() == SpaceKind::Quantum,
            "hamiltonian: expectation polynomials act on quantum spaces");
    for (const auto& term : poly.terms) {
        require(term.factors.size() == term.exponents.size(),
                "hamiltonian: factor/exponent length mismatch");
        for (std::size_t m = 0; m < term.factors.size(); ++m) {
            require(term.exponents[m] >= 1, "hamiltonian: exponents must be positive");
            require(term.factors[m].dim() == x.space.quantum_dim(),
                    "hamiltonian: operator dimension mismatch");
        }
    }
}

std::pair<RealVector, RealVector> classical_gradient(const ClassicalField& f, const RealVector& q,
                                                     const RealVector& p, double step = 1e-6) {
    if (f.gradient) return f.gradient(q, p);
    require(static_cast<bool>(f.value), "hamiltonian: classical field has no value function");
    RealVector dq(q.size());
    RealVector dp(p.size());
    for (int i = 0; i < q.size(); ++i) {
        RealVector qp = q, qm = q;
        qp[i] += step;
        qm[i] -= step;
        dq[i] = (f.value(qp, p) - f.value(qm, p)) / (2.0 * step);
    }
    for (int i = 0; i < p.size(); ++i) {
        RealVector pp = p, pm = p;
        pp[i] += step;
        pm[i] -= step;
        dp[i] = (f.value(q, pp) - f.value(q, pm)) / (2.0 * step);
    }
    return {dq, dp};
}

ComplexMatrix operator_dq(const OperatorField& v, const RealVector& q, const RealVector& p, int i,
                          double step = 1e-6) {
    if (v.dq) return v.dq(q, p, i);
    RealVector qp = q, qm = q;
    qp[i] += step;
    qm[i] -= step;
    return (v.value(qp, p) - v.value(qm, p)) / (2.0 * step);
}

ComplexMatrix operator_dp(const OperatorField& v, const RealVector& q, const RealVector& p, int i,
                          double step = 1e-6) {
    if (v.dp) return v.dp(q, p, i);
    RealVector pp = p, pm = p;
    pp[i] += step;
    pm[i] -= step;
    return (v.value(q, pp) - v.value(q, pm)) / (2.0 * step);
}

// generic two-stage Gauss collocation step on raw coordinates
using FieldFn = std::function<RealVector(const RealVector&)>;

RealVector gauss_step(const FieldFn& field, const RealVector& x, double dt,
                      const IntegrateOptions& opts) {
    static const double r3 = std::sqrt(3.0);
    const double a11 = 0.25, a12 = 0.25 - r3 / 6.0;
    const double a21 = 0.25 + r3 / 6.0, a22 = 0.25;
    RealVector k1 = field(x);
    RealVector k2 = k1;
    double prev = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        RealVector k1n = field(x + dt * (a11 * k1 + a12 * k2));
        RealVector k2n = field(x + dt * (a21 * k1 + a22 * k2));
        if (!k1n.allFinite() || !k2n.allFinite()) {
            throw std::runtime_error("integrate: non-finite state during stage iteration");
        }
        const double delta = dt * std::max((k1n - k1).cwiseAbs().maxCoeff(),
                                           (k2n - k2).cwiseAbs().maxCoeff());
        k1 = std::move(k1n);
        k2 = std::move(k2n);
        const double scale = 1.0 + x.cwiseAbs().maxCoeff();
        if (delta <= opts.fixed_point_tol * scale) return x + 0.5 * dt * (k1 + k2);
        if (delta >= prev && delta <= 1e-11 * scale) {
            return x + 0.5 * dt * (k1 + k2);  // stalled at roundoff
        }
        prev = delta;
    }
    throw std::runtime_error("integrate: stage fixed point failed to converge");
}

}  // namespace

// ------------------------------ Hamilton functions ---------------------------

double hamiltonian_value(const HamiltonianSpec& spec, const PhasePoint& x) {
    return std::visit(
        [&x](const auto& h) -> double {
            using T = std::decay_t<decltype(h)>;
            if constexpr (std::is_same_v<T, QuadraticHamiltonian>) {
                require(x.space.kind() == SpaceKind::Quantum,
                        "hamiltonian: quadratic Hamilton functions act on quantum spaces");
                return quad_value(h.op, x);
            } else if constexpr (std::is_same_v<T, ExpectationPolynomial>) {
                check_polynomial(h, x);
                double total = 0.0;
                for (const auto& term : h.terms) {
                    double prod = term.coefficient;
                    for (std::size_t m = 0; m < term.factors.size(); ++m) {
                        prod *= std::pow(quad_value(term.factors[m], x), term.exponents[m]);
                    }
                    total += prod;
                }
                return total;
            } else {
                require(x.space == h.space, "hamiltonian: point is not in the hybrid space");
                const auto& s = x.space;
                const RealVector q = x.coords.segment(s.q_offset(), s.classical_dofs());
                const RealVector p = x.coords.segment(s.p_offset(), s.classical_dofs());
                const ComplexVector z = quantum_z(x);
                return h.h_c.value(q, p) + quad_value(h.h_q.entries(), z, s.hbar()) +
                       quad_value(h.v_int.value(q, p), z, s.hbar());
            }
        },
        spec);
}

RealVector hamiltonian_gradient(const HamiltonianSpec& spec, const PhasePoint& x) {
    return std::visit(
        [&x](const auto& h) -> RealVector {
            using T = std::decay_t<decltype(h)>;
            if constexpr (std::is_same_v<T, QuadraticHamiltonian>) {
                require(x.space.kind() == SpaceKind::Quantum,
                        "hamiltonian: quadratic Hamilton functions act on quantum spaces");
                return phase::expectation_gradient(h.op, x);
            } else if constexpr (std::is_same_v<T, ExpectationPolynomial>) {
                check_polynomial(h, x);
                RealVector grad = RealVector::Zero(x.coords.size());
                for (const auto& term : h.terms) {
                    std::vector<double> values(term.factors.size());
                    for (std::size_t m = 0; m < term.factors.size(); ++m) {
                        values[m] = quad_value(term.factors[m], x);
                    }
                    for (std::size_t m = 0; m < term.factors.size(); ++m) {
                        double outer = term.coefficient * term.exponents[m] *
                                       std::pow(values[m], term.exponents[m] - 1);
                        for (std::size_t n = 0; n < term.factors.size(); ++n) {
                            if (n != m) outer *= std::pow(values[n], term.exponents[n]);
                        }
                        grad += outer * phase::expectation_gradient(term.factors[m], x);
                    }
                }
                return grad;
            } else {
                require(x.space == h.space, "hamiltonian: point is not in the hybrid space");
                const auto& s = x.space;
                const RealVector q = x.coords.segment(s.q_offset(), s.classical_dofs());
                const RealVector p = x.coords.segment(s.p_offset(), s.classical_dofs());
                const ComplexVector z = quantum_z(x);
                RealVector grad = RealVector::Zero(x.coords.size());
                const auto [dq, dp] = classical_gradient(h.h_c, q, p);
                for (int i = 0; i < s.classical_dofs(); ++i) {
                    grad[s.q_offset() + i] =
                        dq[i] + quad_value(operator_dq(h.v_int, q, p, i), z, s.hbar());
                    grad[s.p_offset() + i] =
                        dp[i] + quad_value(operator_dp(h.v_int, q, p, i), z, s.hbar());
                }
                const HermitianOperator effective(h.h_q.entries() + h.v_int.value(q, p));
                grad += phase::expectation_gradient(effective, x);
                return grad;
            }
        },
        spec);
}

RealVector hamiltonian_gradient_fd(const HamiltonianSpec& spec, const PhasePoint& x, double step) {
    RealVector grad(x.coords.size());
    for (int i = 0; i < x.coords.size(); ++i) {
        PhasePoint plus = x;
        PhasePoint minus = x;
        plus.coords[i] += step;
        minus.coords[i] -= step;
        grad[i] = (hamiltonian_value(spec, plus) - hamiltonian_value(spec, minus)) / (2.0 * step);
    }
    return grad;
}

TangentVector hamiltonian_vector_field(const HamiltonianSpec& spec, const PhasePoint& x) {
    const RealVector grad = hamiltonian_gradient(spec, x);
    const auto& s = x.space;
    RealVector f(x.coords.size());
    for (int i = 0; i < s.classical_dofs(); ++i) {
        f[s.q_offset() + i] = grad[s.p_offset() + i];
        f[s.p_offset() + i] = -grad[s.q_offset() + i];
    }
    for (int j = 0; j < s.quantum_dim(); ++j) {
        f[s.x_offset() + j] = grad[s.y_offset() + j] / s.hbar();
        f[s.y_offset() + j] = -grad[s.x_offset() + j] / s.hbar();
    }
    return TangentVector(x, std::move(f));
}

// ------------------------------ integration ----------------------------------

namespace {

long step_count(double t_final, double dt) {
    require(dt > 0.0, "integrate: dt must be positive");
    require(t_final >= 0.0, "integrate: t_final must be nonnegative");
    return std::llround(t_final / dt);
}

FieldFn make_field(const HamiltonianSpec& spec, const SpaceDescriptor& space) {
    return [&spec, space](const RealVector& coords) {
        return hamiltonian_vector_field(spec, PhasePoint(space, coords)).components;
    };
}

}  // namespace

Trajectory integrate(const HamiltonianSpec& spec, const PhasePoint& x0, double t_final, double dt,
                     const IntegrateOptions& opts) {
    const long n = step_count(t_final, dt);
    const auto field = make_field(spec, x0.space);
    Trajectory traj;
    traj.times.reserve(n + 1);
    traj.points.reserve(n + 1);
    traj.energies.reserve(n + 1);
    PhasePoint x = x0;
    traj.times.push_back(0.0);
    traj.points.push_back(x);
    traj.energies.push_back(hamiltonian_value(spec, x));
    for (long k = 1; k <= n; ++k) {
        x.coords = gauss_step(field, x.coords, dt, opts);
        traj.times.push_back(static_cast<double>(k) * dt);
        traj.points.push_back(x);
        traj.energies.push_back(hamiltonian_value(spec, x));
    }
    return traj;
}

PhasePoint flow_endpoint(const HamiltonianSpec& spec, const PhasePoint& x0, double t_final,
                         double dt, const IntegrateOptions& opts) {
    const long n = step_count(t_final, dt);
    const auto field = make_field(spec, x0.space);
    PhasePoint x = x0;
    for (long k = 0; k < n; ++k) {
        x.coords = gauss_step(field, x.coords, dt, opts);
    }
    return x;
}

double flow_symplectic_check(const HamiltonianSpec& spec, const PhasePoint& x0,
                             const TangentVector& u, const TangentVector& v, double t_final,
                             double dt, double fd_step) {
    require(u.base.space == x0.space && v.base.space == x0.space,
            "flow_symplectic_check: tangent base-space mismatch");
    const double a0 = phase::symplectic_form(u, v);
    if (std::abs(a0) < 1e-12) {
        throw std::invalid_argument("flow_symplectic_check: degenerate initial area");
    }
    auto transported = [&](const TangentVector& w) {
        auto directional = [&](double eps) {
            PhasePoint plus = x0;
            PhasePoint minus = x0;
            plus.coords += eps * w.components;
            minus.coords -= eps * w.components;
            return ((flow_endpoint(spec, plus, t_final, dt).coords -
                     flow_endpoint(spec, minus, t_final, dt).coords) /
                    (2.0 * eps))
                .eval();
        };
        const RealVector coarse = directional(fd_step);
        const RealVector fine = directional(0.5 * fd_step);
        return ((4.0 * fine - coarse) / 3.0).eval();  // Richardson refinement
    };
    const PhasePoint xt = flow_endpoint(spec, x0, t_final, dt);
    const TangentVector ut(xt, transported(u));
    const TangentVector vt(xt, transported(v));
    return phase::symplectic_form(ut, vt) / a0;
}

// ------------------------------ ensembles ------------------------------------

void validate_ensemble(const HybridEnsemble& e) {
    require(!e.members.empty(), "ensemble: no members");
    double total = 0.0;
    for (const auto& m : e.members) {
        require(m.weight >= 0.0, "ensemble: negative weight");
        require(m.point.space == e.members.front().point.space,
                "ensemble: members live on different spaces");
        total += m.weight;
    }
    require(std::abs(total - 1.0) <= 1e-12, "ensemble: weights must sum to 1");
}

HybridEnsemble evolve_ensemble(const MeanFieldHamiltonian& spec, const HybridEnsemble& e0,
                               double t_final, double dt, const IntegrateOptions& opts) {
    validate_ensemble(e0);
    HybridEnsemble out;
    out.members.reserve(e0.members.size());
    const HamiltonianSpec h = spec;
    for (std::size_t k = 0; k < e0.members.size(); ++k) {
        require(e0.members[k].point.space == spec.space,
                "evolve_ensemble: member is not in the Hamiltonian's space");
        try {
            out.members.push_back(
                {e0.members[k].weight, flow_endpoint(h, e0.members[k].point, t_final, dt, opts)});
        } catch (const std::exception& err) {
            throw std::runtime_error("evolve_ensemble: member " + std::to_string(k) + ": " +
                                     err.what());
        }
    }
    return out;
}

HermitianOperator density_matrix(const HybridEnsemble& e) {
    validate_ensemble(e);
    const int dim = e.members.front().point.space.quantum_dim();
    require(dim >= 1, "density_matrix: members have no quantum sector");
    ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
    for (const auto& m : e.members) {
        const ComplexVector c = phase::quantum_amplitudes(m.point);
        const double norm2 = c.squaredNorm();
        require(norm2 > 0.0, "density_matrix: member with null quantum state");
        rho += (m.weight / norm2) * (c * c.adjoint());
    }
    rho = 0.5 * (rho + rho.adjoint().eval());
    return HermitianOperator(rho);
}

double purity(const HermitianOperator& rho) {
    const double trace = rho.entries().trace().real();
    if (std::abs(trace - 1.0) > 1e-8) {
        throw std::invalid_argument("purity: density matrix trace deviates from 1");
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho.entries());
    if (es.eigenvalues().minCoeff() < -1e-10) {
        throw std::invalid_argument("purity: density matrix is not positive semidefinite");
    }
    return (rho.entries() * rho.entries()).trace().real();
}

// ------------------------------ paired evolutions ----------------------------

namespace {

void check_overlap_inputs(const MeanFieldHamiltonian& spec, const ComplexVector& psi_a,
                          const ComplexVector& psi_b, const RealVector& classical0) {
    require(spec.space.kind() == SpaceKind::Hybrid, "overlap: Hamiltonian space must be hybrid");
    const int nq = spec.space.quantum_dim();
    require(psi_a.size() == nq && psi_b.size() == nq, "overlap: state dimension mismatch");
    require(std::abs(psi_a.squaredNorm() - 1.0) <= 1e-9 &&
                std::abs(psi_b.squaredNorm() - 1.0) <= 1e-9,
            "overlap: states must be normalized");
    require(classical0.size() == 2 * spec.space.classical_dofs(),
            "overlap: classical start has the wrong dimension");
}

}  // namespace

std::vector<double> coevolve_overlap(const MeanFieldHamiltonian& spec, const ComplexVector& psi_a,
                                     const ComplexVector& psi_b, const RealVector& classical0,
                                     Driver driver, double t_final, double dt,
                                     const IntegrateOptions& opts) {
    check_overlap_inputs(spec, psi_a, psi_b, classical0);
    const long n = step_count(t_final, dt);
    const auto& s = spec.space;
    const int nc = s.classical_dofs();
    const int nq = s.quantum_dim();
    const double amp_scale = std::sqrt(2.0 / s.hbar());

    // augmented state: (q, p, x_a, y_a, x_b, y_b)
    RealVector state(2 * nc + 4 * nq);
    state.segment(0, 2 * nc) = classical0;
    for (int j = 0; j < nq; ++j) {
        state[2 * nc + j] = amp_scale * psi_a[j].real();
        state[2 * nc + nq + j] = amp_scale * psi_a[j].imag();
        state[2 * nc + 2 * nq + j] = amp_scale * psi_b[j].real();
        state[2 * nc + 3 * nq + j] = amp_scale * psi_b[j].imag();
    }

    auto read_z = [nc, nq](const RealVector& v, int which) {
        ComplexVector z(nq);
        const int off = 2 * nc + 2 * nq * which;
        for (int j = 0; j < nq; ++j) z[j] = Complex(v[off + j], v[off + nq + j]);
        return z;
    };

    const FieldFn field = [&spec, nc, nq, driver, read_z](const RealVector& v) {
        const RealVector q = v.segment(0, nc);
        const RealVector p = v.segment(nc, nc);
        const ComplexVector za = read_z(v, 0);
        const ComplexVector zb = read_z(v, 1);
        const ComplexVector& zd = (driver == Driver::A) ? za : zb;
        const double hbar = spec.space.hbar();

        RealVector out(v.size());
        const auto [dhq, dhp] = classical_gradient(spec.h_c, q, p);
        for (int i = 0; i < nc; ++i) {
            out[i] = dhp[i] + quad_value(operator_dp(spec.v_int, q, p, i), zd, hbar);
            out[nc + i] = -dhq[i] - quad_value(operator_dq(spec.v_int, q, p, i), zd, hbar);
        }
        const ComplexMatrix effective = spec.h_q.entries() + spec.v_int.value(q, p);
        const ComplexVector wa = effective * za;
        const ComplexVector wb = effective * zb;
        for (int j = 0; j < nq; ++j) {
            out[2 * nc + j] = wa[j].imag();
            out[2 * nc + nq + j] = -wa[j].real();
            out[2 * nc + 2 * nq + j] = wb[j].imag();
            out[2 * nc + 3 * nq + j] = -wb[j].real();
        }
        return out;
    };

    std::vector<double> overlap;
    overlap.reserve(n + 1);
    auto record = [&] {
        overlap.push_back(0.5 * s.hbar() * std::abs(read_z(state, 0).dot(read_z(state, 1))));
    };
    record();
    for (long k = 0; k < n; ++k) {
        state = gauss_step(field, state, dt, opts);
        record();
    }
    return overlap;
}

std::vector<double> separate_run_overlap(const MeanFieldHamiltonian& spec,
                                         const ComplexVector& psi_a, const ComplexVector& psi_b,
                                         const RealVector& classical0, double t_final, double dt,
                                         const IntegrateOptions& opts) {
    check_overlap_inputs(spec, psi_a, psi_b, classical0);
    const auto& s = spec.space;
    const double amp_scale = std::sqrt(2.0 / s.hbar());

    auto hybrid_start = [&](const ComplexVector& psi) {
        RealVector coords = RealVector::Zero(s.total_real_dim());
        coords.head(2 * s.classical_dofs()) = classical0;
        for (int j = 0; j < s.quantum_dim(); ++j) {
            coords[s.x_offset() + j] = amp_scale * psi[j].real();
            coords[s.y_offset() + j] = amp_scale * psi[j].imag();
        }
        return PhasePoint(s, coords);
    };

    const HamiltonianSpec h = spec;
    const Trajectory ta = integrate(h, hybrid_start(psi_a), t_final, dt, opts);
    const Trajectory tb = integrate(h, hybrid_start(psi_b), t_final, dt, opts);
    std::vector<double> overlap(ta.points.size());
    for (std::size_t k = 0; k < ta.points.size(); ++k) {
        overlap[k] =
            0.5 * s.hbar() * std::abs(quantum_z(ta.points[k]).dot(quantum_z(tb.points[k])));
    }
    return overlap;
}

// ------------------------------ bundled models -------------------------------

Preset preset_linear_sigma_z() {
    const auto space = SpaceDescriptor::quantum(2);
    ComplexVector psi(2);
    psi << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    return Preset{"linear-sigma-z", QuadraticHamiltonian{phase::pauli_z()},
                  phase::to_canonical(psi, space)};
}

Preset preset_weinberg_quadratic() {
    const auto space = SpaceDescriptor::quantum(2);
    ComplexVector psi(2);
    psi << 0.8, 0.6;
    ExpectationPolynomial h;
    h.terms.push_back({1.0, {phase::pauli_z()}, {1}});
    h.terms.push_back({0.3, {phase::pauli_x()}, {2}});
    return Preset{"weinberg-quadratic", std::move(h), phase::to_canonical(psi, space)};
}

namespace {

MeanFieldHamiltonian meanfield_oscillator_hamiltonian() {
    const auto space =
        phase::compose_hybrid(SpaceDescriptor::classical(1), SpaceDescriptor::quantum(2));
    ClassicalField h_c;
    h_c.value = [](const RealVector& q, const RealVector& p) {
        return 0.5 * (q.squaredNorm() + p.squaredNorm());
    };
    h_c.gradient = [](const RealVector& q, const RealVector& p) { return std::make_pair(q, p); };
    OperatorField v;
    v.value = [](const RealVector& q, const RealVector&) {
        return (q[0] * phase::pauli_x().entries()).eval();
    };
    v.dq = [](const RealVector&, const RealVector&, int) { return phase::pauli_x().entries(); };
    v.dp = [](const RealVector&, const RealVector&, int) {
        return ComplexMatrix::Zero(2, 2).eval();
    };
    return MeanFieldHamiltonian{space, std::move(h_c), phase::pauli_z(), std::move(v)};
}

PhasePoint meanfield_start(double q0) {
    const auto space =
        phase::compose_hybrid(SpaceDescriptor::classical(1), SpaceDescriptor::quantum(2));
    RealVector coords = RealVector::Zero(space.total_real_dim());
    coords[space.q_offset()] = q0;
    coords[space.x_offset()] = std::sqrt(2.0);  // psi = (1, 0)
    return PhasePoint(space, coords);
}

}  // namespace

Preset preset_meanfield_oscillator() {
    return Preset{"meanfield-oscillator", meanfield_oscillator_hamiltonian(), meanfield_start(1.0)};
}

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {"linear-sigma-z", "weinberg-quadratic",
                                                   "meanfield-oscillator"};
    return names;
}

Preset preset_by_name(const std::string& name) {
    if (name == "linear-sigma-z") return preset_linear_sigma_z();
    if (name == "weinberg-quadratic") return preset_weinberg_quadratic();
    if (name == "meanfield-oscillator") return preset_meanfield_oscillator();
    throw std::invalid_argument("unknown preset: " + name);
}

HybridEnsemble meanfield_delta_ensemble() {
    HybridEnsemble e;
    e.members.push_back({1.0, meanfield_start(1.0)});
    return e;
}

HybridEnsemble meanfield_two_point_ensemble() {
    HybridEnsemble e;
    e.members.push_back({0.5, meanfield_start(1.0)});
    e.members.push_back({0.5, meanfield_start(-1.0)});
    return e;
}

}  // namespace symclone::dyn
