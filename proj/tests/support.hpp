#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>

#include "divplan/errors.hpp"

namespace testsupport {

/// Runs f and returns the divplan error code it throws, or "" if it doesn't.
inline std::string error_code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const divplan::Error& e) {
        return e.code();
    }
    return {};
}

inline bool close_rel(double a, double b, double rel) {
    const double scale = std::max({std::abs(a), std::abs(b), 1.0});
    return std::abs(a - b) <= rel * scale;
}

/// Fresh scratch directory under the system temp dir, removed on scope exit.
class ScratchDir {
  public:
    explicit ScratchDir(const std::string& tag) {
        static std::uint64_t counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("divplan-" + tag + "-" + std::to_string(++counter) + "-" +
                 std::to_string(static_cast<std::uint64_t>(
                     std::hash<std::string>{}(tag + std::to_string(counter)))));
        std::filesystem::create_directories(path_);
    }
    ~ScratchDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path file(const std::string& name) const { return path_ / name; }

  private:
    std::filesystem::path path_;
};

}  // namespace testsupport

#include "divplan/composer.hpp"

namespace testsupport {

/// Inventory with `classes` classes of `per_class` samples each,
/// identifiers zero-padded so sorted order is stable.
inline divplan::ClassInventory make_inventory(int classes, int per_class) {
    divplan::ClassInventory inventory;
    for (int c = 0; c < classes; ++c) {
        std::string cls = "class" + std::to_string(1000 + c);
        auto& samples = inventory.classes[cls];
        for (int s = 0; s < per_class; ++s)
            samples.push_back("sample" + std::to_string(100000 + s));
    }
    return inventory;
}

}  // namespace testsupport
