#pragma once

#include <string>
#include <vector>

#include "lvdsm/feeder.hpp"

namespace lvdsm {

inline constexpr int kUnlimited = -1;

struct Contract {
    std::string user_id;
    double p_gtd_kw = 0.0;
    double q_gtd_kvar = 0.0;
    int eta = kUnlimited;          // activations per horizon
    int alpha_steps = kUnlimited;  // longest action, timesteps
    int delta_steps = 0;           // minimum gap between actions, timesteps

    // y and z are only needed to count actions or enforce gaps.
    bool needs_transitions() const { return eta != kUnlimited || delta_steps > 0; }
    // Throws std::invalid_argument describing the first bad parameter.
    void validate() const;
};

struct ModalityPreset {
    std::string name;
    int eta = kUnlimited;
    int alpha_steps = kUnlimited;
    int delta_steps = 0;
};

// Simple, Single, Double, Double w. delta and Triple w. delta with durations
// converted to steps. Throws when an hour-valued parameter is not a whole
// number of steps.
std::vector<ModalityPreset> preset_modalities(int step_minutes);
ModalityPreset find_preset(const std::string& name, int step_minutes);

// Reactive threshold matching a power factor.
double q_for_power_factor(double p_kw, double power_factor);

// One contract per feeder user with the same modality and thresholds; q_gtd
// defaults to the 0.95 power-factor value.
std::vector<Contract> uniform_contracts(const Feeder& feeder, const ModalityPreset& modality, double p_gtd_kw,
                                        double power_factor = 0.95);

}  // namespace lvdsm
