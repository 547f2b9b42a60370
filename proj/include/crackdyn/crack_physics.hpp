#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "crackdyn/errors.hpp"
#include "crackdyn/log.hpp"

namespace crackdyn {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Minimum admissible gap between crack positions (and to the ends) in the
// non-dimensional model; closer cracks produce degenerate segments.
inline constexpr double kMinCrackGap = 1e-6;

// Resolved non-dimensional flexibilities below this are treated as "no crack"
// (the 1/theta junction penalty diverges as theta -> 0).
inline constexpr double kMinFlexibility = 1e-14;

enum class CrackKind { single_sided, double_sided, direct };

// One crack: a position along the axis plus either a depth ratio (converted
// to a rotational-spring flexibility by the kind-specific correlation) or a
// directly prescribed flexibility.
struct CrackSpec {
    double position = 0.0;
    CrackKind kind = CrackKind::direct;
    double depth_ratio = 0.0;  // a/H, used unless kind == direct
    double flexibility = 0.0;  // meters (dimensional) or unitless (non-dimensional)
};

// Dimensional description of a hinged beam or shallow arch.
struct PhysicalBeam {
    double length = 0.0;              // m
    double youngs_modulus = 0.0;      // N/m^2
    double area_moment = 0.0;         // m^4
    double cross_section_area = 0.0;  // m^2
    double density = 0.0;             // kg/m^3
    double damping = 0.0;             // kg/(m s)
    double viscosity = 0.0;           // normalized dynamic viscosity, unitless
    double initial_axial_force = 0.0; // N, positive = tensile
    double section_height = 0.0;      // m; half-height for double-sided cracks,
                                      // full height for single-sided ones
    std::vector<CrackSpec> cracks;    // strictly increasing positions in (0, L)
};

// Scale factors produced by the change of variables.
struct NondimSummary {
    double omega0 = 0.0;          // t-scale, 1/s
    double gyration_radius = 0.0; // r = sqrt(I/A), m
    double beta = 0.0;            // renormalized axial force, unitless
    double energy_factor = 0.0;   // e_I = (pi/L)^3 r^2 E I, J
};

// Non-dimensional problem on (0, pi).
struct NondimModel {
    std::vector<double> crack_positions; // strictly increasing in (0, pi)
    std::vector<double> flexibilities;   // positive, same length
    double beta = 0.0;
    double c_d = 0.0;
    double mu = 0.0;

    std::size_t crack_count() const { return crack_positions.size(); }

    // Segment boundaries 0 = x_0 < x_1 < ... < x_m < x_{m+1} = pi.
    std::vector<double> segment_nodes() const {
        std::vector<double> nodes;
        nodes.reserve(crack_positions.size() + 2);
        nodes.push_back(0.0);
        nodes.insert(nodes.end(), crack_positions.begin(), crack_positions.end());
        nodes.push_back(kPi);
        return nodes;
    }
};

inline void validate(const NondimModel& model) {
    if (model.crack_positions.size() != model.flexibilities.size())
        throw std::invalid_argument("crack_positions and flexibilities differ in length");
    if (model.c_d < 0.0) throw std::invalid_argument("c_d must be nonnegative");
    if (model.mu < 0.0) throw std::invalid_argument("mu must be nonnegative");
    double prev = 0.0;
    for (std::size_t i = 0; i < model.crack_positions.size(); ++i) {
        const double x = model.crack_positions[i];
        if (x - prev < kMinCrackGap)
            throw std::invalid_argument("crack positions must be separated by at least 1e-6 and lie in (0, pi)");
        if (kPi - x < kMinCrackGap)
            throw std::invalid_argument("crack positions must stay at least 1e-6 away from pi");
        if (model.flexibilities[i] <= 0.0)
            throw std::invalid_argument("crack flexibilities must be positive");
        prev = x;
    }
}

inline void validate(const PhysicalBeam& pb) {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0)) throw std::invalid_argument(std::string(name) + " must be positive");
    };
    positive(pb.length, "length");
    positive(pb.youngs_modulus, "youngs_modulus");
    positive(pb.area_moment, "area_moment");
    positive(pb.cross_section_area, "cross_section_area");
    positive(pb.density, "density");
    if (pb.damping < 0.0) throw std::invalid_argument("damping must be nonnegative");
    if (pb.viscosity < 0.0) throw std::invalid_argument("viscosity must be nonnegative");
    double prev = 0.0;
    for (const CrackSpec& c : pb.cracks) {
        if (!(c.position > prev) || !(c.position < pb.length))
            throw std::invalid_argument("crack positions must be strictly increasing inside (0, L)");
        if (c.kind != CrackKind::direct) {
            positive(pb.section_height, "section_height");
            if (!(c.depth_ratio >= 0.0 && c.depth_ratio < 1.0))
                throw std::domain_error("depth_ratio must lie in [0, 1)");
        }
        if (c.kind == CrackKind::direct && c.flexibility < 0.0)
            throw std::domain_error("flexibility must be nonnegative");
        prev = c.position;
    }
}

namespace detail {

// theta = 6 pi H mu^2 p(mu) with the kind-specific depth polynomial.
inline double crack_flexibility(double height, double mu_hat,
                                std::span<const double> coeffs_desc) {
    if (!(height > 0.0)) throw std::domain_error("section height must be positive");
    if (!(mu_hat >= 0.0 && mu_hat < 1.0)) throw std::domain_error("depth ratio must lie in [0, 1)");
    double poly = 0.0;
    for (double c : coeffs_desc) poly = poly * mu_hat + c;
    const double theta = 6.0 * kPi * height * mu_hat * mu_hat * poly;
    // The published depth polynomials turn negative close to mu_hat = 1; a
    // negative spring flexibility is unphysical, so refuse rather than return it.
    if (theta < 0.0)
        throw std::domain_error("depth ratio is outside the validity range of the flexibility correlation");
    return theta;
}

} // namespace detail

// Flexibility of a double-sided crack; `height` is the cross-section half-height.
inline double flexibility_double_sided(double height, double mu_hat) {
    static constexpr double coeffs[] = {5.793, -3.181, 3.500, -0.929, 0.535};
    return detail::crack_flexibility(height, mu_hat, coeffs);
}

// Flexibility of a single-sided crack; `height` is the full cross-section height.
inline double flexibility_single_sided(double height, double mu_hat) {
    static constexpr double coeffs[] = {-7.332, 7.553, -5.1773, 3.7201, -1.035, 0.6384};
    return detail::crack_flexibility(height, mu_hat, coeffs);
}

// Dimensional flexibility of one crack, resolving the kind.
inline double resolve_flexibility(const CrackSpec& crack, double section_height) {
    switch (crack.kind) {
        case CrackKind::single_sided: return flexibility_single_sided(section_height, crack.depth_ratio);
        case CrackKind::double_sided: return flexibility_double_sided(section_height, crack.depth_ratio);
        case CrackKind::direct: return crack.flexibility;
    }
    throw std::invalid_argument("unknown crack kind");
}

// Change of variables x <- pi x / L, theta <- pi theta / L, c_d <- c_d/(rho A w0),
// beta = L^2 S0 / (E A pi r^2). Cracks whose resolved non-dimensional
// flexibility falls below 1e-14 are dropped with a warning.
inline std::pair<NondimModel, NondimSummary> nondimensionalize(const PhysicalBeam& pb) {
    validate(pb);

    NondimSummary summary;
    summary.gyration_radius = std::sqrt(pb.area_moment / pb.cross_section_area);
    const double pi_over_L = kPi / pb.length;
    summary.omega0 = pi_over_L * pi_over_L *
                     std::sqrt(pb.youngs_modulus * pb.area_moment / (pb.density * pb.cross_section_area));
    summary.energy_factor = pi_over_L * pi_over_L * pi_over_L *
                            summary.gyration_radius * summary.gyration_radius *
                            pb.youngs_modulus * pb.area_moment;
    summary.beta = pb.length * pb.length * pb.initial_axial_force /
                   (pb.youngs_modulus * pb.cross_section_area * kPi *
                    summary.gyration_radius * summary.gyration_radius);

    NondimModel model;
    model.beta = summary.beta;
    model.c_d = pb.damping / (pb.density * pb.cross_section_area * summary.omega0);
    model.mu = pb.viscosity;
    for (const CrackSpec& crack : pb.cracks) {
        const double theta = resolve_flexibility(crack, pb.section_height) * pi_over_L;
        if (theta < kMinFlexibility) {
            log::warn("dropping crack at x=%g: resolved flexibility %g is below 1e-14 (no crack)",
                      crack.position, theta);
            continue;
        }
        model.crack_positions.push_back(crack.position * pi_over_L);
        model.flexibilities.push_back(theta);
    }
    for (std::size_t i = 0; i + 1 < model.crack_positions.size(); ++i)
        if (model.crack_positions[i + 1] - model.crack_positions[i] < kMinCrackGap)
            throw std::invalid_argument("crack positions collide within 1e-6 after scaling");
    validate(model);
    return {std::move(model), summary};
}

// Physical natural frequencies w_k = lambda_k^2 (pi/L)^2 sqrt(EI/(rho A)).
inline std::vector<double> natural_frequencies(const std::vector<double>& lambdas,
                                               const PhysicalBeam& pb) {
    validate(pb);
    double prev = 0.0;
    for (double l : lambdas) {
        if (!(l > 0.0)) throw std::invalid_argument("lambdas must be positive");
        if (l < prev) throw std::invalid_argument("lambdas must be sorted increasing");
        prev = l;
    }
    const double pi_over_L = kPi / pb.length;
    const double scale = pi_over_L * pi_over_L *
                         std::sqrt(pb.youngs_modulus * pb.area_moment /
                                   (pb.density * pb.cross_section_area));
    std::vector<double> omegas;
    omegas.reserve(lambdas.size());
    for (double l : lambdas) omegas.push_back(l * l * scale);
    return omegas;
}

// Maps between physical and non-dimensional samples of the deflection field:
// x <- pi x / L, y <- y / r (and back). Used for round-trip checks and output.
struct FieldScaling {
    double length = 0.0;
    double gyration_radius = 0.0;

    double x_to_nondim(double x_phys) const { return kPi * x_phys / length; }
    double x_to_physical(double x_nd) const { return length * x_nd / kPi; }
    double y_to_nondim(double y_phys) const { return y_phys / gyration_radius; }
    double y_to_physical(double y_nd) const { return gyration_radius * y_nd; }
};

} // namespace crackdyn
