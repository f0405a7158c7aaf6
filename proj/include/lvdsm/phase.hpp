#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace lvdsm {

enum class Phase : std::uint8_t { a = 0, b = 1, c = 2 };

inline constexpr std::array<Phase, 3> kAllPhases{Phase::a, Phase::b, Phase::c};
inline constexpr int kPhaseCount = 3;

constexpr int index(Phase p) { return static_cast<int>(p); }

inline char phase_char(Phase p) { return "abc"[index(p)]; }

std::optional<Phase> parse_phase(std::string_view text);

// Subset of {a, b, c} stored as a bit mask.
class PhaseSet {
public:
    constexpr PhaseSet() = default;
    constexpr explicit PhaseSet(std::uint8_t mask) : mask_(mask & 0x7u) {}
    constexpr PhaseSet(std::initializer_list<Phase> phases)
    {
        for (Phase p : phases) mask_ |= bit(p);
    }

    static constexpr PhaseSet all() { return PhaseSet(std::uint8_t{0x7}); }

    constexpr bool contains(Phase p) const { return (mask_ & bit(p)) != 0; }
    constexpr bool empty() const { return mask_ == 0; }
    constexpr int size() const { return ((mask_ >> 0) & 1) + ((mask_ >> 1) & 1) + ((mask_ >> 2) & 1); }
    constexpr std::uint8_t mask() const { return mask_; }
    constexpr bool subset_of(PhaseSet other) const { return (mask_ & ~other.mask_) == 0; }

    constexpr void insert(Phase p) { mask_ |= bit(p); }

    // Iterates the member phases in a, b, c order.
    class iterator {
    public:
        constexpr iterator(std::uint8_t mask, int pos) : mask_(mask), pos_(pos) { skip(); }
        constexpr Phase operator*() const { return static_cast<Phase>(pos_); }
        constexpr iterator& operator++()
        {
            ++pos_;
            skip();
            return *this;
        }
        constexpr bool operator==(const iterator&) const = default;

    private:
        constexpr void skip()
        {
            while (pos_ < 3 && !((mask_ >> pos_) & 1)) ++pos_;
        }
        std::uint8_t mask_;
        int pos_;
    };
    constexpr iterator begin() const { return {mask_, 0}; }
    constexpr iterator end() const { return {mask_, 3}; }

    constexpr bool operator==(const PhaseSet&) const = default;

    // "abc", "a", "bc", ...
    std::string to_string() const;
    static std::optional<PhaseSet> parse(std::string_view text);

private:
    static constexpr std::uint8_t bit(Phase p) { return static_cast<std::uint8_t>(1u << index(p)); }
    std::uint8_t mask_ = 0;
};

}  // namespace lvdsm
