// maps.hpp — State-duplication maps on qubit phase spaces, their tangent
// (pushforward) maps by analytic Jacobian or finite differences, and the
// symplectic-area-ratio verdict machinery.
//
// Each bundled map acts on an input submanifold parameterized by the object
// amplitudes (alpha, beta); the target and machine factors start in fixed
// states. The forward rules extend smoothly to the whole domain space by
// reading the object amplitudes off their slots and ignoring the rest, which
// keeps finite differencing and Jacobian checks well defined everywhere.
#pragma once

#include "symclone/phase_space.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace symclone::maps {

using phase::Complex;
using phase::ComplexVector;
using phase::PhasePoint;
using phase::RealMatrix;
using phase::RealVector;
using phase::SpaceDescriptor;
using phase::TangentVector;

using ObjectState = Eigen::Vector2cd;   // (alpha, beta)
using ObjectParams = Eigen::Vector4d;   // (a_re, a_im, b_re, b_im)

ObjectParams object_params(const ObjectState& object);

// ------------------------------ gauge ----------------------------------------

// Global phase attached to the quantum image, as a function of the object
// parameters. The smooth variant must supply partial derivatives.
class GaugeSpec {
public:
    enum class Kind { Zero, Constant, Smooth };

    static GaugeSpec zero();
    static GaugeSpec constant(double theta);
    static GaugeSpec smooth(std::function<double(const ObjectParams&)> field,
                            std::function<ObjectParams(const ObjectParams&)> gradient);

    Kind kind() const { return kind_; }
    double value(const ObjectParams& r) const;
    ObjectParams gradient(const ObjectParams& r) const;

private:
    Kind kind_ = Kind::Zero;
    double theta_ = 0.0;
    std::function<double(const ObjectParams&)> field_;
    std::function<ObjectParams(const ObjectParams&)> gradient_;
};

// true when the supplied gradient matches central finite differences at r
bool check_gauge_gradient(const GaugeSpec& gauge, const ObjectParams& r, double tol = 1e-6);

// ------------------------------ machine rules --------------------------------

// Final machine state as a function of the object amplitudes. `partials`
// holds d(machine)/d(object params) and enables analytic Jacobians.
struct MachineRule {
    std::string name;
    std::function<ObjectState(const ObjectState&)> value;
    std::function<Eigen::Matrix<Complex, 2, 4>(const ObjectState&)> partials;

    static MachineRule conjugate();
    static MachineRule constant(const ObjectState& machine);
};

// ------------------------------ map definitions ------------------------------

struct TangentParams {
    double g1 = 0.0;
    double g2 = 0.0;
    double g3 = 0.0;
};

class MapDefinition {
public:
    // object (x) target, image (alpha^2, alpha beta, beta alpha, beta^2) e^{i theta}
    static MapDefinition self_replication(GaugeSpec gauge = GaugeSpec::zero());

    // object (x) target (x) qubit machine; image factors as
    // (object (x) object) (x) machine_final(object)
    static MapDefinition quantum_cloning(MachineRule rule = MachineRule::conjugate(),
                                         GaugeSpec gauge = GaugeSpec::zero());

    // classical two-DOF machine; quantum image as in self-replication, machine
    // image (q1+ip1, q2+ip2) = (a_im + i a_re, b_im + i b_re)
    static MapDefinition hybrid_cloning(GaugeSpec gauge = GaugeSpec::zero());

    static MapDefinition identity(const SpaceDescriptor& space);
    static MapDefinition linear(std::string name, const SpaceDescriptor& space, RealMatrix matrix);

    const std::string& name() const { return name_; }
    const SpaceDescriptor& domain() const { return domain_; }
    const SpaceDescriptor& codomain() const { return codomain_; }
    const GaugeSpec& gauge() const { return gauge_; }
    bool has_analytic_jacobian() const { return static_cast<bool>(jacobian_); }
    bool is_parameterized() const { return parameterized_; }
    const std::array<int, 2>& object_slots() const;

    PhasePoint forward(const PhasePoint& x) const;
    RealMatrix analytic_jacobian(const PhasePoint& x) const;

    // test hook: adds eps to one Jacobian entry so oracle gates must trip
    void perturb_jacobian(double eps) { perturbation_ = eps; }

private:
    MapDefinition(std::string name, SpaceDescriptor domain, SpaceDescriptor codomain);

    std::string name_;
    SpaceDescriptor domain_;
    SpaceDescriptor codomain_;
    GaugeSpec gauge_;
    bool parameterized_ = false;
    std::array<int, 2> slots_{0, 0};
    std::function<RealVector(const RealVector&)> forward_;
    std::function<RealMatrix(const RealVector&)> jacobian_;
    double perturbation_ = 0.0;
};

// ------------------------------ input submanifold ----------------------------

// Embedded start point with target (and machine) in their fixed states.
PhasePoint initial_point(const MapDefinition& map, const ObjectState& object);

// Tangent vector at initial_point() spanned by the parameter triple:
// d alpha = (-g1 a_im + g3 b_re) + i (g1 a_re + g3 b_im),
// d beta  = (-g3 a_re - g2 b_im) + i (-g3 a_im + g2 b_re),
// zero-padded into the non-object slots.
TangentVector unnormalized_tangent(const MapDefinition& map, const ObjectState& object,
                                   const TangentParams& params);

// same, rescaled to unit norm
TangentVector tangent_from_params(const MapDefinition& map, const ObjectState& object,
                                  const TangentParams& params);

// ------------------------------ pushforward ----------------------------------

enum class PushforwardMethod { Analytic, FiniteDifference };

TangentVector pushforward(const MapDefinition& map, const PhasePoint& x, const TangentVector& v,
                          PushforwardMethod method);

RealMatrix finite_difference_jacobian(const MapDefinition& map, const PhasePoint& x,
                                      double step = 1e-6);

// ------------------------------ areas and verdicts ---------------------------

// Skew product in the complex-coordinate frame: quantum amplitude re/im pairs
// and classical (q, p) pairs enter with equal weight. Ratios of pure-quantum
// maps agree with symplectic_form; verdicts on hybrid codomains, whose machine
// coordinates are read off amplitude parts directly, are taken in this frame.
double skew_product(const TangentVector& u, const TangentVector& v);

// closed form of the skew product of two parameter-triple tangents at the
// initial point, before normalization:
// (g3 (h1 - h2) + (g2 - g1) h3) (a_re b_re + a_im b_im)
double initial_area_closed_form(const ObjectState& object, const TangentParams& pg,
                                const TangentParams& ph);

struct DegenerateAreaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RatioVerdict {
    std::string map_name;
    ObjectState object;
    TangentParams pg;
    TangentParams ph;
    double area_before = 0.0;
    double area_after = 0.0;
    double ratio = 0.0;
    PushforwardMethod method = PushforwardMethod::Analytic;
};

// area_after / area_before for the pushed tangent pair; throws
// DegenerateAreaError when |area_before| <= 1e-8 (caller must resample)
RatioVerdict area_ratio(const MapDefinition& map, const ObjectState& object,
                        const TangentParams& pg, const TangentParams& ph,
                        PushforwardMethod method);

// ------------------------------ sampling and sweeps --------------------------

// Haar-uniform qubit state, rejection-sampled until
// |a_re b_re + a_im b_im| >= min_area_factor (supremum of the factor is 1/2)
ObjectState sample_object_state(std::uint64_t seed, double min_area_factor);

struct RatioSweep {
    std::vector<RatioVerdict> verdicts;
    double min_ratio = 0.0;
    double max_ratio = 0.0;
    double mean_ratio = 0.0;
};

RatioSweep sweep_ratios(const MapDefinition& map, int n, std::uint64_t seed,
                        PushforwardMethod method, double min_area_factor = 0.05, int jobs = 1);

// ------------------------------ direct images --------------------------------

PhasePoint self_replication_map(const ObjectState& object, const GaugeSpec& gauge = GaugeSpec::zero());
PhasePoint quantum_cloning_map(const ObjectState& object,
                               const MachineRule& rule = MachineRule::conjugate());
PhasePoint hybrid_cloning_map(const ObjectState& object);

}  // namespace symclone::maps
