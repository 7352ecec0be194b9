#ifndef NLDELAY_SCENARIO_HPP
#define NLDELAY_SCENARIO_HPP

#include "nldelay/common.hpp"
#include "nldelay/initial_data.hpp"
#include "nldelay/model.hpp"

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nldelay {

/// Invalid scenario input; `key()` is the offending `section.key`.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& message)
        : std::runtime_error(key.empty() ? message : key + ": " + message), key_(std::move(key))
    {
    }

    const std::string& key() const { return key_; }

private:
    std::string key_;
};

struct VelocitySpec {
    VelocityKind kind = VelocityKind::NormalizedGreenshields;
    double max_speed = 1.0;
    double max_density = 1.0;
};

struct SaturationSpec {
    SaturationKind kind = SaturationKind::None;
    double epsilon = 1.0 / 50.0;
};

struct KernelSpec {
    KernelKind kind = KernelKind::Constant;
    double length = 0.1;
};

struct Scenario {
    std::string name = "scenario";

    double x_min = 0.0;
    double x_max = 1.0;
    double dx = 0.0;
    Boundary boundary = Boundary::FreeFlow;

    double horizon = 0.0;
    double tau = 0.0;
    double safety = 1.0;

    SchemeKind scheme = SchemeKind::HilligesWeidlich;
    VelocitySpec velocity;
    SaturationSpec saturation;
    KernelSpec kernel;
    InitialDatumSpec initial = datum_defaults("constant");

    std::vector<double> snapshots;
    std::string output_dir = "out";
    std::size_t stride = 1;

    Model model() const;

    /// Throws ConfigError naming the first violated key.
    void validate() const;
};

/**
 * Parses the scenario text format:
 *
 *   # comment
 *   [section]
 *   key = value
 *
 * Numbers may be fractions ("1/50"). Unknown sections or keys are errors.
 */
Scenario parse_scenario(std::string_view text, std::string_view origin = "<string>");
Scenario load_scenario(const std::filesystem::path& path);

/// Serializes a scenario so that parse_scenario reproduces it exactly.
std::string write_scenario(const Scenario& s);

/// Names of the built-in scenarios.
std::vector<std::string> preset_names();
/// Throws std::invalid_argument for unknown names.
Scenario preset(std::string_view name);

}  // namespace nldelay

#endif  // NLDELAY_SCENARIO_HPP
