#pragma once

#include <array>
#include <cstddef>
#include <string_view>

namespace qkdrate {

// Bit/basis setting encoded on the relative phase: 0_Z, 1_Z, 0_X.
enum class Setting : std::size_t { Z0 = 0, Z1 = 1, X0 = 2 };

// Intensity setting: signal pulse or one of the two decoy pulses.
enum class Pulse : std::size_t { Signal = 0, Decoy1 = 1, Decoy2 = 2 };

// Bob's measurement basis.
enum class Basis : std::size_t { Z = 0, X = 1 };

inline constexpr std::array<Setting, 3> kSettings{Setting::Z0, Setting::Z1,
                                                  Setting::X0};
inline constexpr std::array<Pulse, 3> kPulses{Pulse::Signal, Pulse::Decoy1,
                                              Pulse::Decoy2};

constexpr std::size_t index(Setting c) { return static_cast<std::size_t>(c); }
constexpr std::size_t index(Pulse k) { return static_cast<std::size_t>(k); }
constexpr std::size_t index(Basis w) { return static_cast<std::size_t>(w); }

// Value container keyed by bit/basis setting.
template <typename T>
using SettingMap = std::array<T, 3>;

// Value container keyed by intensity setting.
template <typename T>
using PulseMap = std::array<T, 3>;

constexpr std::string_view name(Setting c) {
  switch (c) {
    case Setting::Z0: return "0_Z";
    case Setting::Z1: return "1_Z";
    case Setting::X0: return "0_X";
  }
  return "?";
}

constexpr std::string_view name(Pulse k) {
  switch (k) {
    case Pulse::Signal: return "s";
    case Pulse::Decoy1: return "d1";
    case Pulse::Decoy2: return "d2";
  }
  return "?";
}

}  // namespace qkdrate
