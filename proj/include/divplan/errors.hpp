#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace divplan {

/// Error with a stable machine-readable code alongside the human message.
/// Codes are what the CLI reports and what callers should branch on.
class Error : public std::runtime_error {
  public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

  private:
    std::string code_;
};

namespace errc {
inline constexpr std::string_view domain = "domain";
inline constexpr std::string_view samples_per_class_below_one = "samples_per_class_below_one";
inline constexpr std::string_view monotone_regime = "monotone_regime";
inline constexpr std::string_view underdetermined = "underdetermined";
inline constexpr std::string_view singular_design = "singular_design";
inline constexpr std::string_view ill_conditioned_design = "ill_conditioned_design";
inline constexpr std::string_view mixed_n = "mixed_n";
inline constexpr std::string_view mixed_task = "mixed_task";
inline constexpr std::string_view infeasible = "infeasible";
inline constexpr std::string_view class_short = "class_short";
inline constexpr std::string_view too_many_classes = "too_many_classes";
inline constexpr std::string_view empty_input = "empty_input";
inline constexpr std::string_view union_requires_manifests = "union_requires_manifests";
inline constexpr std::string_view parse = "parse";
inline constexpr std::string_view io = "io";
}  // namespace errc

[[noreturn]] inline void fail(std::string_view code, const std::string& message) {
    throw Error(std::string(code), message);
}

}  // namespace divplan
