#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <symclone/maps.hpp>
#include <symclone/random.hpp>

#include <cmath>

using namespace symclone;
using maps::GaugeSpec;
using maps::MachineRule;
using maps::MapDefinition;
using maps::ObjectState;
using maps::PushforwardMethod;
using maps::TangentParams;
using phase::Complex;
using phase::ComplexVector;
using phase::PhasePoint;
using phase::RealMatrix;
using phase::RealVector;
using phase::SpaceDescriptor;
using phase::TangentVector;

namespace {

const double kSqrt2 = std::sqrt(2.0);

ObjectState obj_state(Complex a, Complex b) { return ObjectState(a, b); }

ObjectState random_object(rng::Stream& s) {
    Complex a(s.gaussian(), s.gaussian());
    Complex b(s.gaussian(), s.gaussian());
    const double n = std::sqrt(std::norm(a) + std::norm(b));
    return ObjectState(a / n, b / n);
}

PhasePoint random_domain_point(rng::Stream& s, const SpaceDescriptor& space) {
    RealVector coords(space.total_real_dim());
    for (int i = 0; i < coords.size(); ++i) coords[i] = s.gaussian();
    return PhasePoint(space, coords);
}

GaugeSpec smooth_gauge(double c) {
    return GaugeSpec::smooth([c](const maps::ObjectParams& r) { return c * r[0]; },
                             [c](const maps::ObjectParams&) {
                                 maps::ObjectParams g = maps::ObjectParams::Zero();
                                 g[0] = c;
                                 return g;
                             });
}

}  // namespace

TEST_CASE("self-replication images") {
    auto out = phase::from_canonical(maps::self_replication_map(obj_state(1.0, 0.0)));
    ComplexVector expected(4);
    expected << 1.0, 0.0, 0.0, 0.0;
    CHECK((out - expected).cwiseAbs().maxCoeff() < 1e-14);

    out = phase::from_canonical(maps::self_replication_map(obj_state(1 / kSqrt2, 1 / kSqrt2)));
    expected << 0.5, 0.5, 0.5, 0.5;
    CHECK((out - expected).cwiseAbs().maxCoeff() < 1e-14);

    out = phase::from_canonical(
        maps::self_replication_map(obj_state(0.0, 1.0), GaugeSpec::constant(M_PI / 2)));
    expected << 0.0, 0.0, 0.0, Complex(0.0, 1.0);
    CHECK((out - expected).cwiseAbs().maxCoeff() < 1e-14);

    CHECK_THROWS_AS(maps::self_replication_map(obj_state(1.0, 1.0)), std::invalid_argument);

    rng::Stream s(2);
    for (int trial = 0; trial < 50; ++trial) {
        const auto object = random_object(s);
        const auto image = maps::self_replication_map(object);
        CHECK(phase::is_normalized(image, 1e-11));
        const auto amps = phase::from_canonical(image);
        CHECK(std::abs(amps[1] - amps[2]) < 1e-14);  // symmetric under factor swap
    }
}

TEST_CASE("quantum cloning images") {
    auto out = phase::from_canonical(maps::quantum_cloning_map(obj_state(1.0, 0.0)));
    ComplexVector expected = ComplexVector::Zero(8);
    expected[0] = 1.0;
    CHECK((out - expected).cwiseAbs().maxCoeff() < 1e-14);

    // conjugation rule: object and target factors keep the object state, the
    // machine ends conjugated
    const Complex i(0.0, 1.0);
    const ObjectState object(1 / kSqrt2, i / kSqrt2);
    const auto q2 = SpaceDescriptor::quantum(2);
    const auto obj_pt = phase::to_canonical(ComplexVector(object), q2);
    const auto machine_pt = phase::to_canonical(ComplexVector(object.conjugate()), q2);
    const auto product = phase::product_embed(phase::product_embed(obj_pt, obj_pt), machine_pt);
    out = phase::from_canonical(maps::quantum_cloning_map(object));
    CHECK((out - phase::from_canonical(product)).cwiseAbs().maxCoeff() < 1e-14);

    // frozen direct evaluation for a real-amplitude state
    const double a = std::sqrt(1.0 / 3.0);
    const double b = std::sqrt(2.0 / 3.0);
    out = phase::from_canonical(maps::quantum_cloning_map(obj_state(a, b)));
    ComplexVector direct(8);
    direct << a * a * a, a * a * b, a * b * a, a * b * b, b * a * a, b * a * b, b * b * a,
        b * b * b;
    CHECK((out - direct).cwiseAbs().maxCoeff() < 1e-14);

    CHECK_THROWS_AS(maps::quantum_cloning_map(obj_state(0.5, 0.5)), std::invalid_argument);

    MachineRule bad;
    bad.name = "unnormalized";
    bad.value = [](const ObjectState&) { return ObjectState(2.0, 0.0); };
    CHECK_THROWS_AS(maps::quantum_cloning_map(obj_state(1.0, 0.0), bad), std::invalid_argument);
}

TEST_CASE("hybrid cloning images") {
    auto image = maps::hybrid_cloning_map(obj_state(1.0, 0.0));
    auto amps = phase::quantum_amplitudes(image);
    ComplexVector expected(4);
    expected << 1.0, 0.0, 0.0, 0.0;
    CHECK((amps - expected).cwiseAbs().maxCoeff() < 1e-14);
    // classical block stores (q1, q2, p1, p2); the machine lands on i = a_im + i a_re
    RealVector classical = image.coords.head(4);
    CHECK(classical.isApprox((RealVector(4) << 0, 0, 1, 0).finished(), 1e-14));

    image = maps::hybrid_cloning_map(obj_state(Complex(0.0, 1.0), 0.0));
    classical = image.coords.head(4);
    CHECK(classical.isApprox((RealVector(4) << 1, 0, 0, 0).finished(), 1e-14));

    image = maps::hybrid_cloning_map(obj_state(1 / kSqrt2, 1 / kSqrt2));
    amps = phase::quantum_amplitudes(image);
    expected << 0.5, 0.5, 0.5, 0.5;
    CHECK((amps - expected).cwiseAbs().maxCoeff() < 1e-14);
    classical = image.coords.head(4);
    CHECK(classical.isApprox((RealVector(4) << 0, 0, 1 / kSqrt2, 1 / kSqrt2).finished(), 1e-14));

    CHECK_THROWS_AS(maps::hybrid_cloning_map(obj_state(1.0, 1.0)), std::invalid_argument);
}

TEST_CASE("initial points follow the fixed target and machine layout") {
    const Complex alpha(0.6, 0.2);
    const Complex beta = std::sqrt(1.0 - std::norm(alpha));
    const ObjectState object(alpha, beta);

    const auto sr = MapDefinition::self_replication();
    auto view = phase::complex_view(maps::initial_point(sr, object));
    ComplexVector expected(4);
    expected << alpha, 0.0, beta, 0.0;
    CHECK((view - expected).cwiseAbs().maxCoeff() < 1e-14);

    const auto qc = MapDefinition::quantum_cloning();
    view = phase::complex_view(maps::initial_point(qc, object));
    ComplexVector expected8 = ComplexVector::Zero(8);
    expected8[0] = alpha;
    expected8[4] = beta;
    CHECK((view - expected8).cwiseAbs().maxCoeff() < 1e-14);

    const auto hc = MapDefinition::hybrid_cloning();
    view = phase::complex_view(maps::initial_point(hc, object));
    ComplexVector expected6(6);
    expected6 << alpha, 0.0, beta, 0.0, 1.0, 0.0;
    CHECK((view - expected6).cwiseAbs().maxCoeff() < 1e-14);

    CHECK_THROWS_AS(maps::initial_point(sr, obj_state(1.0, 1.0)), std::invalid_argument);
}

TEST_CASE("tangents from parameter triples") {
    const auto sr = MapDefinition::self_replication();

    // basis object: the (1,0,0) triple is the pure phase direction
    auto raw = maps::unnormalized_tangent(sr, obj_state(1.0, 0.0), TangentParams{1, 0, 0});
    RealVector expected = RealVector::Zero(8);
    expected[4] = kSqrt2;  // y-slot of the first amplitude
    CHECK((raw.components - expected).cwiseAbs().maxCoeff() < 1e-14);
    auto unit = maps::tangent_from_params(sr, obj_state(1.0, 0.0), TangentParams{1, 0, 0});
    expected[4] = 1.0;
    CHECK((unit.components - expected).cwiseAbs().maxCoeff() < 1e-14);

    unit = maps::tangent_from_params(sr, obj_state(1 / kSqrt2, 1 / kSqrt2), TangentParams{0, 0, 1});
    expected = RealVector::Zero(8);
    expected[0] = 1 / kSqrt2;
    expected[2] = -1 / kSqrt2;
    CHECK((unit.components - expected).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(std::abs(unit.components.norm() - 1.0) < 1e-14);

    CHECK_THROWS_AS(maps::tangent_from_params(sr, obj_state(1.0, 0.0), TangentParams{0, 0, 0}),
                    std::invalid_argument);

    // tangency to the normalization sphere: the radial metric component vanishes
    rng::Stream s(11);
    for (int trial = 0; trial < 100; ++trial) {
        const auto object = random_object(s);
        TangentParams p{s.gaussian(), s.gaussian(), s.gaussian()};
        if (std::abs(p.g1) + std::abs(p.g2) + std::abs(p.g3) < 1e-6) continue;
        const auto v = maps::unnormalized_tangent(sr, object, p);
        CHECK(std::abs(v.base.coords.dot(v.components)) < 1e-12);
    }
}

TEST_CASE("pushforward of identity and linear maps") {
    rng::Stream s(5);
    const auto q2 = SpaceDescriptor::quantum(2);
    const auto id = MapDefinition::identity(q2);
    const PhasePoint x = random_domain_point(s, q2);
    const TangentVector v(x, (RealVector(4) << 0.3, -1.0, 2.0, 0.7).finished());
    auto pushed = maps::pushforward(id, x, v, PushforwardMethod::Analytic);
    CHECK((pushed.components - v.components).cwiseAbs().maxCoeff() < 1e-14);

    RealMatrix omega = RealMatrix::Zero(4, 4);
    omega.block(0, 2, 2, 2) = RealMatrix::Identity(2, 2);
    omega.block(2, 0, 2, 2) = -RealMatrix::Identity(2, 2);
    const auto lin = MapDefinition::linear("unit-symplectic", q2, omega);
    for (auto method : {PushforwardMethod::Analytic, PushforwardMethod::FiniteDifference}) {
        pushed = maps::pushforward(lin, x, v, method);
        CHECK((pushed.components - omega * v.components).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("analytic and finite-difference pushforward agree") {
    const auto sr = MapDefinition::self_replication();
    const ObjectState object(1 / kSqrt2, 1 / kSqrt2);
    const auto x = maps::initial_point(sr, object);
    const auto v = maps::tangent_from_params(sr, object, TangentParams{1, 0, 0});
    const auto a = maps::pushforward(sr, x, v, PushforwardMethod::Analytic);
    const auto f = maps::pushforward(sr, x, v, PushforwardMethod::FiniteDifference);
    CHECK((a.components - f.components).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("pushforward is linear at a fixed base point") {
    rng::Stream s(23);
    const auto hc = MapDefinition::hybrid_cloning();
    const auto object = random_object(s);
    const auto x = maps::initial_point(hc, object);
    const auto u = maps::tangent_from_params(hc, object, TangentParams{1, -0.4, 0.3});
    const auto v = maps::tangent_from_params(hc, object, TangentParams{-0.1, 0.8, 1.1});
    const double a = 1.7;
    const double b = -0.6;
    const auto lhs = maps::pushforward(hc, x, a * u + b * v, PushforwardMethod::Analytic);
    const auto rhs = a * maps::pushforward(hc, x, u, PushforwardMethod::Analytic) +
                     b * maps::pushforward(hc, x, v, PushforwardMethod::Analytic);
    CHECK((lhs.components - rhs.components).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("analytic Jacobians match the finite-difference oracle everywhere") {
    rng::Stream s(37);
    std::vector<MapDefinition> defs;
    defs.push_back(MapDefinition::self_replication());
    defs.push_back(MapDefinition::self_replication(smooth_gauge(0.7)));
    defs.push_back(MapDefinition::self_replication(GaugeSpec::constant(1.3)));
    defs.push_back(MapDefinition::quantum_cloning());
    defs.push_back(MapDefinition::quantum_cloning(MachineRule::constant(obj_state(1.0, 0.0))));
    defs.push_back(MapDefinition::hybrid_cloning());
    for (const auto& map : defs) {
        CHECK(map.has_analytic_jacobian());
        double worst = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            const auto x = random_domain_point(s, map.domain());
            const RealMatrix diff = map.analytic_jacobian(x) - maps::finite_difference_jacobian(map, x);
            worst = std::max(worst, diff.cwiseAbs().maxCoeff());
        }
        INFO(map.name());
        CHECK(worst < 1e-6);
    }
}

TEST_CASE("machine rules without partials disable the analytic path") {
    MachineRule opaque;
    opaque.name = "opaque";
    opaque.value = [](const ObjectState& o) { return ObjectState(o.conjugate()); };
    const auto map = MapDefinition::quantum_cloning(opaque);
    CHECK_FALSE(map.has_analytic_jacobian());
    const ObjectState object(0.6, 0.8);
    const auto x = maps::initial_point(map, object);
    const auto v = maps::tangent_from_params(map, object, TangentParams{0.2, 0.5, 1.0});
    CHECK_THROWS_AS(maps::pushforward(map, x, v, PushforwardMethod::Analytic),
                    std::invalid_argument);
    CHECK_NOTHROW(maps::pushforward(map, x, v, PushforwardMethod::FiniteDifference));
}

TEST_CASE("gauge gradient validation") {
    rng::Stream s(3);
    maps::ObjectParams r;
    for (int k = 0; k < 4; ++k) r[k] = s.gaussian();
    CHECK(maps::check_gauge_gradient(smooth_gauge(0.7), r));
    auto wrong = GaugeSpec::smooth([](const maps::ObjectParams& p) { return 0.7 * p[0]; },
                                   [](const maps::ObjectParams&) {
                                       maps::ObjectParams g = maps::ObjectParams::Zero();
                                       g[0] = 0.9;
                                       return g;
                                   });
    CHECK_FALSE(maps::check_gauge_gradient(wrong, r));
}

TEST_CASE("closed-form initial area matches the generic evaluation") {
    rng::Stream s(101);
    const auto sr = MapDefinition::self_replication();
    const auto hc = MapDefinition::hybrid_cloning();
    for (int trial = 0; trial < 1000; ++trial) {
        const auto& map = (trial % 2 == 0) ? sr : hc;
        const auto object = random_object(s);
        const TangentParams pg{s.gaussian(), s.gaussian(), s.gaussian()};
        const TangentParams ph{s.gaussian(), s.gaussian(), s.gaussian()};
        if (std::abs(pg.g1) + std::abs(pg.g2) + std::abs(pg.g3) < 1e-6) continue;
        if (std::abs(ph.g1) + std::abs(ph.g2) + std::abs(ph.g3) < 1e-6) continue;
        const auto g = maps::unnormalized_tangent(map, object, pg);
        const auto h = maps::unnormalized_tangent(map, object, ph);
        const double closed = maps::initial_area_closed_form(object, pg, ph);
        CHECK(std::abs(maps::skew_product(g, h) - closed) < 1e-12);
        // the canonical symplectic form differs by the square of the sqrt(2)
        // coordinate scale on the quantum sector
        CHECK(std::abs(phase::symplectic_form(g, h) - 2.0 * closed) < 1e-12);
        // and for unit tangents by the two normalization factors
        const double ng = g.components.norm();
        const double nh = h.components.norm();
        const auto gn = maps::tangent_from_params(map, object, pg);
        const auto hn = maps::tangent_from_params(map, object, ph);
        CHECK(std::abs(maps::skew_product(gn, hn) * ng * nh - closed) < 1e-12);
    }
}

TEST_CASE("self-replication doubles the symplectic area") {
    const ObjectState object(1 / kSqrt2, 1 / kSqrt2);
    for (auto method : {PushforwardMethod::Analytic, PushforwardMethod::FiniteDifference}) {
        const auto verdict = maps::area_ratio(MapDefinition::self_replication(), object,
                                              TangentParams{1, 0, 0}, TangentParams{0, 0, 1},
                                              method);
        const double tol = method == PushforwardMethod::Analytic ? 1e-12 : 1e-6;
        CHECK(std::abs(verdict.ratio - 2.0) < tol);
        CHECK(verdict.ratio == doctest::Approx(verdict.area_after / verdict.area_before));
    }
}

TEST_CASE("degenerate object states are rejected") {
    CHECK_THROWS_AS(maps::area_ratio(MapDefinition::self_replication(), obj_state(1.0, 0.0),
                                     TangentParams{1, 0, 0}, TangentParams{0, 0, 1},
                                     PushforwardMethod::Analytic),
                    maps::DegenerateAreaError);
}

TEST_CASE("gauge choice does not change the self-replication ratio") {
    rng::Stream s(59);
    for (int trial = 0; trial < 50; ++trial) {
        const auto object = maps::sample_object_state(rng::mix(900, trial), 0.05);
        const TangentParams pg{s.gaussian(), s.gaussian(), 1.0 + s.uniform()};
        const TangentParams ph{1.0 + s.uniform(), s.gaussian(), s.gaussian()};
        std::vector<GaugeSpec> gauges;
        gauges.push_back(GaugeSpec::zero());
        gauges.push_back(GaugeSpec::constant(s.gaussian()));
        gauges.push_back(smooth_gauge(s.gaussian()));
        std::vector<double> ratios;
        for (const auto& gauge : gauges) {
            ratios.push_back(maps::area_ratio(MapDefinition::self_replication(gauge), object, pg,
                                              ph, PushforwardMethod::Analytic)
                                 .ratio);
        }
        CHECK(std::abs(ratios[1] - ratios[0]) < 1e-9);
        CHECK(std::abs(ratios[2] - ratios[0]) < 1e-9);
    }
}

TEST_CASE("sweep verdicts reproduce the area-ratio results") {
    const auto sr = maps::sweep_ratios(MapDefinition::self_replication(), 1000, 7,
                                       PushforwardMethod::Analytic);
    CHECK(sr.min_ratio > 2.0 - 1e-6);
    CHECK(sr.max_ratio < 2.0 + 1e-6);

    const auto qc = maps::sweep_ratios(MapDefinition::quantum_cloning(), 1000, 11,
                                       PushforwardMethod::Analytic);
    CHECK(qc.min_ratio > 1.0 - 1e-6);
    CHECK(qc.max_ratio < 1.0 + 1e-6);

    const auto hc = maps::sweep_ratios(MapDefinition::hybrid_cloning(), 500, 13,
                                       PushforwardMethod::Analytic);
    CHECK(hc.min_ratio > 1.0 - 1e-6);
    CHECK(hc.max_ratio < 1.0 + 1e-6);

    CHECK_THROWS_AS(
        maps::sweep_ratios(MapDefinition::self_replication(), 0, 7, PushforwardMethod::Analytic),
        std::invalid_argument);
}

TEST_CASE("an object-independent machine state spoils the unit ratio") {
    const auto control =
        MapDefinition::quantum_cloning(MachineRule::constant(obj_state(1.0, 0.0)));
    const auto sweep = maps::sweep_ratios(control, 50, 3, PushforwardMethod::Analytic);
    bool deviates = false;
    for (const auto& v : sweep.verdicts) {
        if (std::abs(v.ratio - 1.0) > 0.1) deviates = true;
    }
    CHECK(deviates);
}

TEST_CASE("analytic and finite-difference sweeps agree per instance") {
    for (const auto& map : {MapDefinition::self_replication(), MapDefinition::quantum_cloning(),
                            MapDefinition::hybrid_cloning()}) {
        const auto a = maps::sweep_ratios(map, 50, 17, PushforwardMethod::Analytic);
        const auto f = maps::sweep_ratios(map, 50, 17, PushforwardMethod::FiniteDifference);
        for (int i = 0; i < 50; ++i) {
            CHECK(std::abs(a.verdicts[i].ratio - f.verdicts[i].ratio) < 1e-5);
        }
    }
}

TEST_CASE("sweeps are deterministic and job-count independent") {
    const auto one = maps::sweep_ratios(MapDefinition::hybrid_cloning(), 64, 29,
                                        PushforwardMethod::Analytic, 0.05, 1);
    const auto four = maps::sweep_ratios(MapDefinition::hybrid_cloning(), 64, 29,
                                         PushforwardMethod::Analytic, 0.05, 4);
    for (int i = 0; i < 64; ++i) {
        CHECK(one.verdicts[i].ratio == four.verdicts[i].ratio);
        CHECK(one.verdicts[i].object == four.verdicts[i].object);
    }
}

TEST_CASE("object-state sampling") {
    const auto a = maps::sample_object_state(42, 0.05);
    const auto b = maps::sample_object_state(42, 0.05);
    CHECK(a == b);
    for (int trial = 0; trial < 200; ++trial) {
        const auto v = maps::sample_object_state(trial, 0.05);
        CHECK(std::abs(v.squaredNorm() - 1.0) < 1e-12);
        const double factor = v[0].real() * v[1].real() + v[0].imag() * v[1].imag();
        CHECK(std::abs(factor) >= 0.05);
    }

    // acceptance probability of the 0.05 cut, estimated on unconstrained draws
    int accepted = 0;
    const int total = 10000;
    for (int trial = 0; trial < total; ++trial) {
        const auto v = maps::sample_object_state(rng::mix(777, trial), 0.0);
        const double factor = v[0].real() * v[1].real() + v[0].imag() * v[1].imag();
        if (std::abs(factor) >= 0.05) ++accepted;
    }
    CHECK(accepted > total / 2);

    CHECK_THROWS_AS(maps::sample_object_state(1, 0.6), std::runtime_error);
    CHECK_THROWS_AS(maps::sample_object_state(1, -0.1), std::invalid_argument);
}
