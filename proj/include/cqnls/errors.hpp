#pragma once
#include <stdexcept>
#include <string>

namespace cqnls {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct NonPowerOfTwoError : Error { using Error::Error; };
struct SymbolSingularityError : Error { using Error::Error; };
struct NoStableEquilibriumError : Error { using Error::Error; };
struct DegenerateRootError : Error { using Error::Error; };
struct FieldBlowupError : Error { using Error::Error; };
struct BandCapExceededError : Error { using Error::Error; };
struct NonCompactSupportError : Error { using Error::Error; };
struct UnresolvedOscillationError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct SnapshotFormatError : Error { using Error::Error; };

}  // namespace cqnls
