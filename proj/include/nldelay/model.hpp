#ifndef NLDELAY_MODEL_HPP
#define NLDELAY_MODEL_HPP

#include <optional>
#include <string_view>

namespace nldelay {

enum class VelocityKind { Greenshields, NormalizedGreenshields, Cropped };
enum class SaturationKind { None, Linear, Exponential };
enum class KernelKind { Constant, LinearDecreasing };

/**
 * Mean traffic speed as a function of the (look-ahead averaged) density.
 *
 * Cropped, v(rho) = 1 - min(rho, 1), is kept to reproduce the reference
 * no-saturation experiments. It is only Lipschitz, so bounds that need v''
 * are unavailable for it.
 */
class Velocity {
public:
    static Velocity greenshields(double max_speed, double max_density);
    static Velocity normalized_greenshields();
    static Velocity cropped();

    double operator()(double rho) const;

    VelocityKind kind() const { return kind_; }
    double max_speed() const { return max_speed_; }
    double max_density() const { return max_density_; }

    /// True when v is C^2 on [0, R].
    bool is_smooth() const { return kind_ != VelocityKind::Cropped; }

    double sup_derivative() const;
    std::optional<double> sup_second_derivative() const;

private:
    Velocity(VelocityKind kind, double max_speed, double max_density);

    VelocityKind kind_;
    double max_speed_;
    double max_density_;
};

/**
 * Saturation factor f multiplying the density in the flux, F(rho) = rho f(rho).
 *
 * Linear and Exponential are extended by 1 below zero and by 0 above R.
 * None is f == 1 everywhere (the plain delayed model).
 */
class Saturation {
public:
    static Saturation none();
    static Saturation linear(double max_density);
    /// Throws std::invalid_argument unless steepness > 0.
    static Saturation exponential(double max_density, double steepness);

    double operator()(double rho) const;
    double flux(double rho) const { return rho * (*this)(rho); }

    SaturationKind kind() const { return kind_; }
    double max_density() const { return max_density_; }
    double steepness() const { return steepness_; }

    double sup_derivative() const;

private:
    Saturation(SaturationKind kind, double max_density, double steepness);

    SaturationKind kind_;
    double max_density_;
    double steepness_;
};

/**
 * Non-increasing look-ahead kernel supported on [0, L] with unit mass.
 */
class Kernel {
public:
    static Kernel constant(double look_ahead);
    static Kernel linear_decreasing(double look_ahead);

    double operator()(double x) const;

    /// Integral of the kernel over [0, x], clamped to the support.
    double cumulative(double x) const;

    KernelKind kind() const { return kind_; }
    double look_ahead() const { return look_ahead_; }

    double sup() const;
    double mass() const { return 1.0; }

    // Total variation of the kernel extended by zero on the real line,
    // counting the jumps at 0 and L.
    double derivative_l1() const;
    // Sup of |w'| on the open support.
    double derivative_sup() const;

private:
    Kernel(KernelKind kind, double look_ahead);

    KernelKind kind_;
    double look_ahead_;
};

struct Model {
    Velocity velocity = Velocity::normalized_greenshields();
    Saturation saturation = Saturation::none();
    Kernel kernel = Kernel::constant(1.0);

    double max_density() const { return velocity.max_density(); }
    double max_speed() const { return velocity.max_speed(); }
};

/**
 * Analytic sup-norms entering the CFL conditions and the a-priori constants.
 */
struct BoundSet {
    double max_speed = 0.0;              // V
    double max_density = 0.0;            // R
    double velocity_derivative = 0.0;    // ||v'||
    std::optional<double> velocity_second_derivative;  // ||v''||, empty if v not C^2
    double saturation_derivative = 0.0;  // ||f'||
    double kernel_sup = 0.0;             // ||w||
    double kernel_mass = 1.0;            // J0
    double kernel_derivative_l1 = 0.0;   // ||w'||_1
    double kernel_derivative_sup = 0.0;  // ||w'||

    bool smooth_velocity() const { return velocity_second_derivative.has_value(); }
};

BoundSet derivative_bounds(const Model& model);

std::string_view to_string(VelocityKind kind);
std::string_view to_string(SaturationKind kind);
std::string_view to_string(KernelKind kind);

}  // namespace nldelay

#endif  // NLDELAY_MODEL_HPP
