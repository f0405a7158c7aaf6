#include "lvdsm/phase.hpp"

namespace lvdsm {

std::optional<Phase> parse_phase(std::string_view text)
{
    if (text.size() != 1) return std::nullopt;
    switch (text[0]) {
    case 'a': case 'A': return Phase::a;
    case 'b': case 'B': return Phase::b;
    case 'c': case 'C': return Phase::c;
    default: return std::nullopt;
    }
}

std::string PhaseSet::to_string() const
{
    std::string out;
    for (Phase p : kAllPhases)
        if (contains(p)) out.push_back(phase_char(p));
    return out;
}

std::optional<PhaseSet> PhaseSet::parse(std::string_view text)
{
    PhaseSet set;
    for (char ch : text) {
        auto p = parse_phase(std::string_view(&ch, 1));
        if (!p || set.contains(*p)) return std::nullopt;
        set.insert(*p);
    }
    if (set.empty()) return std::nullopt;
    return set;
}

}  // namespace lvdsm
