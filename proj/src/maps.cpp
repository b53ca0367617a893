#include "symclone/maps.hpp"

#include "symclone/random.hpp"

#include <cmath>
#include <thread>
#include <utility>

namespace symclone::maps {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

const Complex kI(0.0, 1.0);

// derivatives of (alpha, beta) with respect to (a_re, a_im, b_re, b_im)
Complex dalpha_dr(int k) { return k == 0 ? Complex(1.0) : (k == 1 ? kI : Complex(0.0)); }
Complex dbeta_dr(int k) { return k == 2 ? Complex(1.0) : (k == 3 ? kI : Complex(0.0)); }

Eigen::Vector4cd pair_square(const Complex& a, const Complex& b) {
    Eigen::Vector4cd g;
    g << a * a, a * b, b * a, b * b;
    return g;
}

Eigen::Vector4cd pair_square_da(const Complex& a, const Complex& b) {
    Eigen::Vector4cd g;
    g << 2.0 * a, b, b, 0.0;
    return g;
}

Eigen::Vector4cd pair_square_db(const Complex& a, const Complex& b) {
    Eigen::Vector4cd g;
    g << 0.0, a, a, 2.0 * b;
    return g;
}

ObjectState read_object(const SpaceDescriptor& dom, const std::array<int, 2>& slots,
                        const RealVector& coords) {
    const double scale = std::sqrt(dom.hbar() / 2.0);
    auto read = [&](int slot) {
        return scale * Complex(coords[dom.x_offset() + slot], coords[dom.y_offset() + slot]);
    };
    return ObjectState(read(slots[0]), read(slots[1]));
}

RealVector write_point(const SpaceDescriptor& cod, const ComplexVector& amps,
                       const RealVector& classical) {
    RealVector out = RealVector::Zero(cod.total_real_dim());
    const double scale = std::sqrt(2.0 / cod.hbar());
    for (int j = 0; j < cod.quantum_dim(); ++j) {
        out[cod.x_offset() + j] = scale * amps[j].real();
        out[cod.y_offset() + j] = scale * amps[j].imag();
    }
    if (cod.classical_dofs() > 0) out.head(2 * cod.classical_dofs()) = classical;
    return out;
}

// complex amplitude partials (N_f x 4) plus classical coordinate partials
struct AmplitudeDerivatives {
    Eigen::MatrixXcd quantum;
    Eigen::Matrix<double, Eigen::Dynamic, 4> classical;
};

RealMatrix assemble_jacobian(const SpaceDescriptor& dom, const SpaceDescriptor& cod,
                             const std::array<int, 2>& slots, const AmplitudeDerivatives& d) {
    RealMatrix jac = RealMatrix::Zero(cod.total_real_dim(), dom.total_real_dim());
    const double in_scale = std::sqrt(2.0 / dom.hbar());
    const double out_scale = std::sqrt(2.0 / cod.hbar());
    const std::array<int, 4> cols = {dom.x_offset() + slots[0], dom.y_offset() + slots[0],
                                     dom.x_offset() + slots[1], dom.y_offset() + slots[1]};
    for (int k = 0; k < 4; ++k) {
        for (int j = 0; j < cod.quantum_dim(); ++j) {
            jac(cod.x_offset() + j, cols[k]) = out_scale * d.quantum(j, k).real() / in_scale;
            jac(cod.y_offset() + j, cols[k]) = out_scale * d.quantum(j, k).imag() / in_scale;
        }
        for (int r = 0; r < 2 * cod.classical_dofs(); ++r) {
            jac(r, cols[k]) = d.classical(r, k) / in_scale;
        }
    }
    return jac;
}

// quantum image block shared by self-replication and hybrid cloning
Eigen::Vector4cd replicated_amplitudes(const ObjectState& obj, const GaugeSpec& gauge) {
    const Complex phase = std::polar(1.0, gauge.value(object_params(obj)));
    return phase * pair_square(obj[0], obj[1]);
}

Eigen::Matrix<Complex, 4, 4> replicated_partials(const ObjectState& obj, const GaugeSpec& gauge) {
    const ObjectParams r = object_params(obj);
    const Complex phase = std::polar(1.0, gauge.value(r));
    const ObjectParams dtheta = gauge.gradient(r);
    const Eigen::Vector4cd g = pair_square(obj[0], obj[1]);
    const Eigen::Vector4cd ga = pair_square_da(obj[0], obj[1]);
    const Eigen::Vector4cd gb = pair_square_db(obj[0], obj[1]);
    Eigen::Matrix<Complex, 4, 4> out;
    for (int k = 0; k < 4; ++k) {
        out.col(k) = phase * (ga * dalpha_dr(k) + gb * dbeta_dr(k) + kI * dtheta[k] * g);
    }
    return out;
}

// classical machine partials for the hybrid rule, rows (q1, q2, p1, p2)
Eigen::Matrix<double, Eigen::Dynamic, 4> hybrid_machine_partials() {
    Eigen::Matrix<double, Eigen::Dynamic, 4> m = Eigen::Matrix<double, 4, 4>::Zero();
    m(0, 1) = 1.0;  // q1 = a_im
    m(1, 3) = 1.0;  // q2 = b_im
    m(2, 0) = 1.0;  // p1 = a_re
    m(3, 2) = 1.0;  // p2 = b_re
    return m;
}

RealVector hybrid_machine_coords(const ObjectState& obj) {
    RealVector m(4);
    m << obj[0].imag(), obj[1].imag(), obj[0].real(), obj[1].real();
    return m;
}

double params_factor(const TangentParams& pg, const TangentParams& ph) {
    return pg.g3 * (ph.g1 - ph.g2) + (pg.g2 - pg.g1) * ph.g3;
}

ObjectState sample_object(rng::Stream& stream, double min_area_factor) {
    for (int draw = 0; draw < 1000000; ++draw) {
        Complex a(stream.gaussian(), stream.gaussian());
        Complex b(stream.gaussian(), stream.gaussian());
        const double n = std::sqrt(std::norm(a) + std::norm(b));
        if (n == 0.0) continue;
        a /= n;
        b /= n;
        if (std::abs(a.real() * b.real() + a.imag() * b.imag()) >= min_area_factor) {
            return ObjectState(a, b);
        }
    }
    throw std::runtime_error(
        "sample_object_state: rejection sampling failed (min_area_factor too large)");
}

TangentParams draw_params(rng::Stream& stream) {
    for (;;) {
        Eigen::Vector4d v;
        for (int i = 0; i < 4; ++i) v[i] = stream.gaussian();
        const double n = v.norm();
        if (n < 1e-12) continue;
        v /= n;
        if (v.head<3>().norm() < 1e-6) continue;
        return TangentParams{v[0], v[1], v[2]};
    }
}

}  // namespace

ObjectParams object_params(const ObjectState& object) {
    ObjectParams r;
    r << object[0].real(), object[0].imag(), object[1].real(), object[1].imag();
    return r;
}

// ------------------------------ gauge ----------------------------------------

GaugeSpec GaugeSpec::zero() { return GaugeSpec{}; }

GaugeSpec GaugeSpec::constant(double theta) {
    GaugeSpec g;
    g.kind_ = Kind::Constant;
    g.theta_ = theta;
    return g;
}

GaugeSpec GaugeSpec::smooth(std::function<double(const ObjectParams&)> field,
                            std::function<ObjectParams(const ObjectParams&)> gradient) {
    require(static_cast<bool>(field) && static_cast<bool>(gradient),
            "GaugeSpec::smooth: field and gradient are both required");
    GaugeSpec g;
    g.kind_ = Kind::Smooth;
    g.field_ = std::move(field);
    g.gradient_ = std::move(gradient);
    return g;
}

double GaugeSpec::value(const ObjectParams& r) const {
    switch (kind_) {
        case Kind::Zero: return 0.0;
        case Kind::Constant: return theta_;
        case Kind::Smooth: return field_(r);
    }
    return 0.0;
}

ObjectParams GaugeSpec::gradient(const ObjectParams& r) const {
    if (kind_ == Kind::Smooth) return gradient_(r);
    return ObjectParams::Zero();
}

bool check_gauge_gradient(const GaugeSpec& gauge, const ObjectParams& r, double tol) {
    const double h = 1e-6;
    ObjectParams fd;
    for (int k = 0; k < 4; ++k) {
        ObjectParams plus = r;
        ObjectParams minus = r;
        plus[k] += h;
        minus[k] -= h;
        fd[k] = (gauge.value(plus) - gauge.value(minus)) / (2.0 * h);
    }
    return (fd - gauge.gradient(r)).cwiseAbs().maxCoeff() <= tol;
}

// ------------------------------ machine rules --------------------------------

MachineRule MachineRule::conjugate() {
    MachineRule rule;
    rule.name = "conjugate";
    rule.value = [](const ObjectState& obj) { return ObjectState(obj.conjugate()); };
    rule.partials = [](const ObjectState&) {
        Eigen::Matrix<Complex, 2, 4> p = Eigen::Matrix<Complex, 2, 4>::Zero();
        p(0, 0) = 1.0;
        p(0, 1) = -kI;
        p(1, 2) = 1.0;
        p(1, 3) = -kI;
        return p;
    };
    return rule;
}

MachineRule MachineRule::constant(const ObjectState& machine) {
    MachineRule rule;
    rule.name = "constant";
    rule.value = [machine](const ObjectState&) { return machine; };
    rule.partials = [](const ObjectState&) {
        return Eigen::Matrix<Complex, 2, 4>::Zero().eval();
    };
    return rule;
}

// ------------------------------ map definitions ------------------------------

MapDefinition::MapDefinition(std::string name, SpaceDescriptor domain, SpaceDescriptor codomain)
    : name_(std::move(name)), domain_(domain), codomain_(codomain) {}

const std::array<int, 2>& MapDefinition::object_slots() const {
    if (!parameterized_) {
        throw std::invalid_argument("object_slots: map has no object parameterization");
    }
    return slots_;
}

MapDefinition MapDefinition::self_replication(GaugeSpec gauge) {
    const auto space = SpaceDescriptor::quantum(4);
    MapDefinition map("self-replication", space, space);
    map.gauge_ = gauge;
    map.parameterized_ = true;
    map.slots_ = {0, 2};
    const auto slots = map.slots_;
    map.forward_ = [space, slots, gauge](const RealVector& coords) {
        const ObjectState obj = read_object(space, slots, coords);
        return write_point(space, replicated_amplitudes(obj, gauge), RealVector());
    };
    map.jacobian_ = [space, slots, gauge](const RealVector& coords) {
        const ObjectState obj = read_object(space, slots, coords);
        const AmplitudeDerivatives d{replicated_partials(obj, gauge),
                                     Eigen::Matrix<double, Eigen::Dynamic, 4>(0, 4)};
        return assemble_jacobian(space, space, slots, d);
    };
    return map;
}

MapDefinition MapDefinition::quantum_cloning(MachineRule rule, GaugeSpec gauge) {
    const auto space = SpaceDescriptor::quantum(8);
    MapDefinition map("quantum-cloning(" + rule.name + ")", space, space);
    map.gauge_ = gauge;
    map.parameterized_ = true;
    map.slots_ = {0, 4};
    const auto slots = map.slots_;
    require(static_cast<bool>(rule.value), "quantum_cloning: machine rule lacks a value function");

    // image amplitudes F[2u + m] = e^{i theta} G[u] M[m], u over the replicated
    // object (x) target entries, m over the machine basis
    map.forward_ = [space, slots, gauge, rule](const RealVector& coords) {
        const ObjectState obj = read_object(space, slots, coords);
        const Eigen::Vector4cd g = replicated_amplitudes(obj, gauge);
        const ObjectState m = rule.value(obj);
        ComplexVector amps(8);
        for (int u = 0; u < 4; ++u) {
            amps[2 * u] = g[u] * m[0];
            amps[2 * u + 1] = g[u] * m[1];
        }
        return write_point(space, amps, RealVector());
    };
    if (rule.partials) {
        map.jacobian_ = [space, slots, gauge, rule](const RealVector& coords) {
            const ObjectState obj = read_object(space, slots, coords);
            const Eigen::Vector4cd g = replicated_amplitudes(obj, gauge);
            const Eigen::Matrix<Complex, 4, 4> dg = replicated_partials(obj, gauge);
            const ObjectState m = rule.value(obj);
            const Eigen::Matrix<Complex, 2, 4> dm = rule.partials(obj);
            Eigen::MatrixXcd quantum(8, 4);
            for (int k = 0; k < 4; ++k) {
                for (int u = 0; u < 4; ++u) {
                    quantum(2 * u, k) = dg(u, k) * m[0] + g[u] * dm(0, k);
                    quantum(2 * u + 1, k) = dg(u, k) * m[1] + g[u] * dm(1, k);
                }
            }
            const AmplitudeDerivatives d{quantum, Eigen::Matrix<double, Eigen::Dynamic, 4>(0, 4)};
            return assemble_jacobian(space, space, slots, d);
        };
    }
    return map;
}

MapDefinition MapDefinition::hybrid_cloning(GaugeSpec gauge) {
    const auto space =
        phase::compose_hybrid(SpaceDescriptor::classical(2), SpaceDescriptor::quantum(4));
    MapDefinition map("hybrid-cloning", space, space);
    map.gauge_ = gauge;
    map.parameterized_ = true;
    map.slots_ = {0, 2};
    const auto slots = map.slots_;
    map.forward_ = [space, slots, gauge](const RealVector& coords) {
        const ObjectState obj = read_object(space, slots, coords);
        return write_point(space, replicated_amplitudes(obj, gauge), hybrid_machine_coords(obj));
    };
    map.jacobian_ = [space, slots, gauge](const RealVector& coords) {
        const ObjectState obj = read_object(space, slots, coords);
        const AmplitudeDerivatives d{replicated_partials(obj, gauge), hybrid_machine_partials()};
        return assemble_jacobian(space, space, slots, d);
    };
    return map;
}

MapDefinition MapDefinition::identity(const SpaceDescriptor& space) {
    MapDefinition map("identity", space, space);
    map.forward_ = [](const RealVector& coords) { return coords; };
    const int dim = space.total_real_dim();
    map.jacobian_ = [dim](const RealVector&) { return RealMatrix::Identity(dim, dim).eval(); };
    return map;
}

MapDefinition MapDefinition::linear(std::string name, const SpaceDescriptor& space,
                                    RealMatrix matrix) {
    require(matrix.rows() == space.total_real_dim() && matrix.cols() == space.total_real_dim(),
            "MapDefinition::linear: matrix shape does not match the space");
    MapDefinition map(std::move(name), space, space);
    map.forward_ = [matrix](const RealVector& coords) { return (matrix * coords).eval(); };
    map.jacobian_ = [matrix](const RealVector&) { return matrix; };
    return map;
}

PhasePoint MapDefinition::forward(const PhasePoint& x) const {
    require(x.space == domain_, "forward: point is not in the map domain");
    return PhasePoint(codomain_, forward_(x.coords));
}

RealMatrix MapDefinition::analytic_jacobian(const PhasePoint& x) const {
    require(x.space == domain_, "analytic_jacobian: point is not in the map domain");
    if (!jacobian_) {
        throw std::invalid_argument("analytic_jacobian: not available for map " + name_);
    }
    RealMatrix jac = jacobian_(x.coords);
    if (perturbation_ != 0.0) {
        jac(0, parameterized_ ? domain_.x_offset() + slots_[0] : 0) += perturbation_;
    }
    return jac;
}

// ------------------------------ input submanifold ----------------------------

PhasePoint initial_point(const MapDefinition& map, const ObjectState& object) {
    require(map.is_parameterized(), "initial_point: map has no object parameterization");
    require(std::abs(object.squaredNorm() - 1.0) <= 1e-9,
            "initial_point: object state must be normalized");
    const auto& dom = map.domain();
    const auto& slots = map.object_slots();
    ComplexVector amps = ComplexVector::Zero(dom.quantum_dim());
    amps[slots[0]] = object[0];
    amps[slots[1]] = object[1];
    RealVector classical;
    if (dom.classical_dofs() > 0) {
        // classical machine starts at complex coordinates (1, 0)
        classical = RealVector::Zero(2 * dom.classical_dofs());
        classical[0] = 1.0;
    }
    return PhasePoint(dom, write_point(dom, amps, classical));
}

TangentVector unnormalized_tangent(const MapDefinition& map, const ObjectState& object,
                                   const TangentParams& params) {
    require(params.g1 != 0.0 || params.g2 != 0.0 || params.g3 != 0.0,
            "tangent_from_params: zero parameter triple");
    PhasePoint base = initial_point(map, object);
    const auto& dom = map.domain();
    const auto& slots = map.object_slots();
    const double a_re = object[0].real(), a_im = object[0].imag();
    const double b_re = object[1].real(), b_im = object[1].imag();
    const Complex da(-params.g1 * a_im + params.g3 * b_re, params.g1 * a_re + params.g3 * b_im);
    const Complex db(-params.g3 * a_re - params.g2 * b_im, -params.g3 * a_im + params.g2 * b_re);
    const double scale = std::sqrt(2.0 / dom.hbar());
    RealVector comp = RealVector::Zero(dom.total_real_dim());
    comp[dom.x_offset() + slots[0]] = scale * da.real();
    comp[dom.y_offset() + slots[0]] = scale * da.imag();
    comp[dom.x_offset() + slots[1]] = scale * db.real();
    comp[dom.y_offset() + slots[1]] = scale * db.imag();
    return TangentVector(std::move(base), std::move(comp));
}

TangentVector tangent_from_params(const MapDefinition& map, const ObjectState& object,
                                  const TangentParams& params) {
    TangentVector v = unnormalized_tangent(map, object, params);
    const double n = v.components.norm();
    require(n > 1e-12, "tangent_from_params: parameters collapse to a null tangent");
    v.components /= n;
    return v;
}

// ------------------------------ pushforward ----------------------------------

TangentVector pushforward(const MapDefinition& map, const PhasePoint& x, const TangentVector& v,
                          PushforwardMethod method) {
    require(x.space == map.domain(), "pushforward: point is not in the map domain");
    require(v.base.space == x.space, "pushforward: tangent vector base-space mismatch");
    require((v.base.coords - x.coords).cwiseAbs().maxCoeff() <= 1e-12,
            "pushforward: tangent vector is not based at the given point");
    PhasePoint image = map.forward(x);
    RealVector out;
    if (method == PushforwardMethod::Analytic) {
        out = map.analytic_jacobian(x) * v.components;
    } else {
        const double h = 1e-6;
        PhasePoint plus = x;
        PhasePoint minus = x;
        plus.coords += h * v.components;
        minus.coords -= h * v.components;
        out = (map.forward(plus).coords - map.forward(minus).coords) / (2.0 * h);
        if (!out.allFinite()) {
            throw std::runtime_error("pushforward: non-finite finite differences");
        }
    }
    return TangentVector(std::move(image), std::move(out));
}

RealMatrix finite_difference_jacobian(const MapDefinition& map, const PhasePoint& x, double step) {
    require(x.space == map.domain(), "finite_difference_jacobian: point is not in the map domain");
    const int n = x.coords.size();
    RealMatrix jac(map.codomain().total_real_dim(), n);
    for (int i = 0; i < n; ++i) {
        PhasePoint plus = x;
        PhasePoint minus = x;
        plus.coords[i] += step;
        minus.coords[i] -= step;
        jac.col(i) = (map.forward(plus).coords - map.forward(minus).coords) / (2.0 * step);
    }
    if (!jac.allFinite()) {
        throw std::runtime_error("finite_difference_jacobian: non-finite differences");
    }
    return jac;
}

// ------------------------------ areas and verdicts ---------------------------

double skew_product(const TangentVector& u, const TangentVector& v) {
    require(u.base.space == v.base.space, "skew_product: base-space mismatch");
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
    return cl + 0.5 * s.hbar() * qu;
}

double initial_area_closed_form(const ObjectState& object, const TangentParams& pg,
                                const TangentParams& ph) {
    const double object_factor = object[0].real() * object[1].real() +
                                 object[0].imag() * object[1].imag();
    return params_factor(pg, ph) * object_factor;
}

RatioVerdict area_ratio(const MapDefinition& map, const ObjectState& object,
                        const TangentParams& pg, const TangentParams& ph,
                        PushforwardMethod method) {
    const TangentVector g = tangent_from_params(map, object, pg);
    const TangentVector h = tangent_from_params(map, object, ph);
    const double before = skew_product(g, h);
    if (std::abs(before) <= 1e-8) {
        throw DegenerateAreaError("area_ratio: degenerate initial area for map " + map.name());
    }
    const PhasePoint& x = g.base;
    const TangentVector gi = pushforward(map, x, g, method);
    const TangentVector hi = pushforward(map, x, h, method);
    const double after = skew_product(gi, hi);
    return RatioVerdict{map.name(), object, pg, ph, before, after, after / before, method};
}

// ------------------------------ sampling and sweeps --------------------------

ObjectState sample_object_state(std::uint64_t seed, double min_area_factor) {
    require(min_area_factor >= 0.0, "sample_object_state: min_area_factor must be >= 0");
    rng::Stream stream(seed);
    return sample_object(stream, min_area_factor);
}

RatioSweep sweep_ratios(const MapDefinition& map, int n, std::uint64_t seed,
                        PushforwardMethod method, double min_area_factor, int jobs) {
    require(n >= 1, "sweep_ratios: instance count must be >= 1");
    require(min_area_factor >= 0.0, "sweep_ratios: min_area_factor must be >= 0");
    require(jobs >= 1, "sweep_ratios: jobs must be >= 1");

    RatioSweep sweep;
    sweep.verdicts.resize(n);
    auto run_range = [&](int begin, int end) {
        for (int i = begin; i < end; ++i) {
            rng::Stream stream(rng::mix(seed, static_cast<std::uint64_t>(i)));
            const ObjectState object = sample_object(stream, min_area_factor);
            TangentParams pg;
            TangentParams ph;
            int attempts = 0;
            do {
                pg = draw_params(stream);
                ph = draw_params(stream);
                if (++attempts > 1000000) {
                    throw std::runtime_error("sweep_ratios: tangent-parameter rejection failed");
                }
            } while (std::abs(params_factor(pg, ph)) < 0.05);
            sweep.verdicts[i] = area_ratio(map, object, pg, ph, method);
        }
    };

    const int workers = std::min(jobs, n);
    if (workers <= 1) {
        run_range(0, n);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(workers);
        const int chunk = (n + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const int begin = w * chunk;
            const int end = std::min(n, begin + chunk);
            pool.emplace_back([&, w, begin, end] {
                try {
                    run_range(begin, end);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        for (const auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }

    sweep.min_ratio = sweep.verdicts.front().ratio;
    sweep.max_ratio = sweep.verdicts.front().ratio;
    double sum = 0.0;
    for (const auto& v : sweep.verdicts) {
        sweep.min_ratio = std::min(sweep.min_ratio, v.ratio);
        sweep.max_ratio = std::max(sweep.max_ratio, v.ratio);
        sum += v.ratio;
    }
    sweep.mean_ratio = sum / n;
    return sweep;
}

// ------------------------------ direct images --------------------------------

PhasePoint self_replication_map(const ObjectState& object, const GaugeSpec& gauge) {
    const auto map = MapDefinition::self_replication(gauge);
    return map.forward(initial_point(map, object));
}

PhasePoint quantum_cloning_map(const ObjectState& object, const MachineRule& rule) {
    const auto map = MapDefinition::quantum_cloning(rule);
    const PhasePoint in = initial_point(map, object);
    require(std::abs(rule.value(object).squaredNorm() - 1.0) <= 1e-9,
            "quantum_cloning_map: machine rule must return a normalized state");
    return map.forward(in);
}

PhasePoint hybrid_cloning_map(const ObjectState& object) {
    const auto map = MapDefinition::hybrid_cloning();
    return map.forward(initial_point(map, object));
}

}  // namespace symclone::maps
