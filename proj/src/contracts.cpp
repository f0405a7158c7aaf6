#include "lvdsm/contracts.hpp"

#include <cmath>
#include <stdexcept>

namespace lvdsm {

void Contract::validate() const
{
    if (!(p_gtd_kw >= 0.0)) throw std::invalid_argument("contract " + user_id + ": p_gtd_kw must be >= 0");
    if (eta != kUnlimited && eta < 0) throw std::invalid_argument("contract " + user_id + ": eta must be >= 0");
    if (alpha_steps != kUnlimited && alpha_steps < 1)
        throw std::invalid_argument("contract " + user_id + ": alpha_steps must be >= 1");
    if (delta_steps < 0) throw std::invalid_argument("contract " + user_id + ": delta_steps must be >= 0");
}

namespace {

int hours_to_steps(double hours, int step_minutes, const std::string& preset)
{
    const double minutes = hours * 60.0;
    const long steps = std::lround(minutes / step_minutes);
    if (std::abs(steps * step_minutes - minutes) > 1e-9)
        throw std::invalid_argument("preset " + preset + ": " + std::to_string(hours) + " h is not a whole number of " +
                                    std::to_string(step_minutes) + "-minute steps");
    return static_cast<int>(steps);
}

}  // namespace

std::vector<ModalityPreset> preset_modalities(int step_minutes)
{
    if (step_minutes <= 0) throw std::invalid_argument("step_minutes must be positive");
    struct Row {
        const char* name;
        int eta;
        double alpha_h;  // < 0: unlimited
        double delta_h;
    };
    static const Row rows[] = {
        {"simple", kUnlimited, -1.0, 0.0},
        {"single", 1, 6.0, 0.0},
        {"double", 2, 3.0, 0.0},
        {"double_delta", 2, 3.0, 3.0},
        {"triple_delta", 3, 2.0, 2.0},
    };
    std::vector<ModalityPreset> out;
    for (const Row& r : rows) {
        ModalityPreset m;
        m.name = r.name;
        m.eta = r.eta;
        m.alpha_steps = r.alpha_h < 0 ? kUnlimited : hours_to_steps(r.alpha_h, step_minutes, r.name);
        m.delta_steps = hours_to_steps(r.delta_h, step_minutes, r.name);
        out.push_back(m);
    }
    return out;
}

ModalityPreset find_preset(const std::string& name, int step_minutes)
{
    for (ModalityPreset& m : preset_modalities(step_minutes))
        if (m.name == name) return m;
    throw std::invalid_argument("unknown modality '" + name + "'");
}

double q_for_power_factor(double p_kw, double power_factor)
{
    if (!(power_factor > 0.0 && power_factor <= 1.0)) throw std::invalid_argument("power factor must lie in (0, 1]");
    return p_kw * std::tan(std::acos(power_factor));
}

std::vector<Contract> uniform_contracts(const Feeder& feeder, const ModalityPreset& modality, double p_gtd_kw,
                                        double power_factor)
{
    std::vector<Contract> out;
    for (const UserAttachment& u : feeder.users) {
        Contract c;
        c.user_id = u.user_id;
        c.p_gtd_kw = p_gtd_kw;
        c.q_gtd_kvar = q_for_power_factor(p_gtd_kw, power_factor);
        c.eta = modality.eta;
        c.alpha_steps = modality.alpha_steps;
        c.delta_steps = modality.delta_steps;
        c.validate();
        out.push_back(c);
    }
    return out;
}

}  // namespace lvdsm
