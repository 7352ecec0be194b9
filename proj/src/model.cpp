#include "nldelay/model.hpp"

#include "nldelay/common.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nldelay {

std::string_view to_string(SchemeKind kind)
{
    return kind == SchemeKind::LaxFriedrichs ? "lf" : "hw";
}

std::string_view to_string(Boundary boundary)
{
    return boundary == Boundary::FreeFlow ? "free-flow" : "periodic";
}

std::optional<SchemeKind> parse_scheme(std::string_view text)
{
    if (text == "lf" || text == "lax-friedrichs") return SchemeKind::LaxFriedrichs;
    if (text == "hw" || text == "hilliges-weidlich") return SchemeKind::HilligesWeidlich;
    return std::nullopt;
}

std::optional<Boundary> parse_boundary(std::string_view text)
{
    if (text == "free-flow") return Boundary::FreeFlow;
    if (text == "periodic") return Boundary::Periodic;
    return std::nullopt;
}

// ---------------------------------------------------------------- Velocity

Velocity::Velocity(VelocityKind kind, double max_speed, double max_density)
    : kind_(kind), max_speed_(max_speed), max_density_(max_density)
{
}

Velocity Velocity::greenshields(double max_speed, double max_density)
{
    if (!(max_speed > 0.0) || !(max_density > 0.0)) {
        throw std::invalid_argument("greenshields velocity needs V > 0 and R > 0");
    }
    return Velocity(VelocityKind::Greenshields, max_speed, max_density);
}

Velocity Velocity::normalized_greenshields()
{
    return Velocity(VelocityKind::NormalizedGreenshields, 1.0, 1.0);
}

Velocity Velocity::cropped()
{
    return Velocity(VelocityKind::Cropped, 1.0, 1.0);
}

double Velocity::operator()(double rho) const
{
    switch (kind_) {
    case VelocityKind::Greenshields:
        return max_speed_ * (1.0 - rho / max_density_);
    case VelocityKind::NormalizedGreenshields:
        return 1.0 - rho;
    case VelocityKind::Cropped:
        return 1.0 - std::min(rho, 1.0);
    }
    return 0.0;
}

double Velocity::sup_derivative() const
{
    return max_speed_ / max_density_;
}

std::optional<double> Velocity::sup_second_derivative() const
{
    if (kind_ == VelocityKind::Cropped) return std::nullopt;
    return 0.0;
}

// -------------------------------------------------------------- Saturation

Saturation::Saturation(SaturationKind kind, double max_density, double steepness)
    : kind_(kind), max_density_(max_density), steepness_(steepness)
{
}

Saturation Saturation::none()
{
    return Saturation(SaturationKind::None, 0.0, 0.0);
}

Saturation Saturation::linear(double max_density)
{
    if (!(max_density > 0.0)) throw std::invalid_argument("linear saturation needs R > 0");
    return Saturation(SaturationKind::Linear, max_density, 0.0);
}

Saturation Saturation::exponential(double max_density, double steepness)
{
    if (!(max_density > 0.0)) throw std::invalid_argument("exponential saturation needs R > 0");
    if (!(steepness > 0.0)) {
        throw std::invalid_argument("exponential saturation needs epsilon > 0, got " +
                                    std::to_string(steepness));
    }
    return Saturation(SaturationKind::Exponential, max_density, steepness);
}

double Saturation::operator()(double rho) const
{
    if (kind_ == SaturationKind::None) return 1.0;
    if (rho < 0.0) return 1.0;
    if (rho > max_density_) return 0.0;
    if (kind_ == SaturationKind::Linear) return 1.0 - rho / max_density_;
    return 1.0 - std::exp((rho - max_density_) / steepness_);
}

double Saturation::sup_derivative() const
{
    switch (kind_) {
    case SaturationKind::None:
        return 0.0;
    case SaturationKind::Linear:
        return 1.0 / max_density_;
    case SaturationKind::Exponential:
        // |f'| = e^{(rho-R)/eps}/eps is increasing, so the sup sits at rho = R.
        return 1.0 / steepness_;
    }
    return 0.0;
}

// ------------------------------------------------------------------ Kernel

Kernel::Kernel(KernelKind kind, double look_ahead) : kind_(kind), look_ahead_(look_ahead)
{
    if (!(look_ahead > 0.0) || !std::isfinite(look_ahead)) {
        throw std::invalid_argument("kernel look-ahead distance must be positive");
    }
}

Kernel Kernel::constant(double look_ahead)
{
    return Kernel(KernelKind::Constant, look_ahead);
}

Kernel Kernel::linear_decreasing(double look_ahead)
{
    return Kernel(KernelKind::LinearDecreasing, look_ahead);
}

double Kernel::operator()(double x) const
{
    if (x < 0.0 || x > look_ahead_) return 0.0;
    if (kind_ == KernelKind::Constant) return 1.0 / look_ahead_;
    return 2.0 / look_ahead_ * (1.0 - x / look_ahead_);
}

double Kernel::cumulative(double x) const
{
    const double s = std::clamp(x, 0.0, look_ahead_);
    if (kind_ == KernelKind::Constant) return s / look_ahead_;
    return 2.0 / look_ahead_ * (s - s * s / (2.0 * look_ahead_));
}

double Kernel::sup() const
{
    return kind_ == KernelKind::Constant ? 1.0 / look_ahead_ : 2.0 / look_ahead_;
}

double Kernel::derivative_l1() const
{
    // constant: jumps of 1/L at both ends; linear: jump 2/L at 0 plus slope mass 2/L
    return kind_ == KernelKind::Constant ? 2.0 / look_ahead_ : 4.0 / look_ahead_;
}

double Kernel::derivative_sup() const
{
    return kind_ == KernelKind::Constant ? 0.0 : 2.0 / (look_ahead_ * look_ahead_);
}

// ------------------------------------------------------------------ Bounds

BoundSet derivative_bounds(const Model& model)
{
    BoundSet b;
    b.max_speed = model.velocity.max_speed();
    b.max_density = model.velocity.max_density();
    b.velocity_derivative = model.velocity.sup_derivative();
    b.velocity_second_derivative = model.velocity.sup_second_derivative();
    b.saturation_derivative = model.saturation.sup_derivative();
    b.kernel_sup = model.kernel.sup();
    b.kernel_mass = model.kernel.mass();
    b.kernel_derivative_l1 = model.kernel.derivative_l1();
    b.kernel_derivative_sup = model.kernel.derivative_sup();
    return b;
}

std::string_view to_string(VelocityKind kind)
{
    switch (kind) {
    case VelocityKind::Greenshields: return "greenshields";
    case VelocityKind::NormalizedGreenshields: return "normalized-greenshields";
    case VelocityKind::Cropped: return "cropped";
    }
    return "?";
}

std::string_view to_string(SaturationKind kind)
{
    switch (kind) {
    case SaturationKind::None: return "none";
    case SaturationKind::Linear: return "linear";
    case SaturationKind::Exponential: return "exponential";
    }
    return "?";
}

std::string_view to_string(KernelKind kind)
{
    return kind == KernelKind::Constant ? "constant" : "linear-decreasing";
}

}  // namespace nldelay
