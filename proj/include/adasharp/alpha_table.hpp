#pragma once

#include <array>
#include <string>
#include <string_view>

namespace adasharp {

/// Sharpening/blurring strength per CU size. Defaults are low for 8x8 and
/// 64x64 CUs (flat or very dense texture) and high for 16x16 and 32x32.
class AlphaTable {
public:
    AlphaTable() = default;
    AlphaTable(double a8, double a16, double a32, double a64);

    static AlphaTable uniform(double alpha) { return {alpha, alpha, alpha, alpha}; }

    /// Parses "8:1.5,16:3.0,32:3.0,64:1.5". All four sizes must appear once.
    static AlphaTable parse(std::string_view text);
    std::string to_string() const;

    /// Throws PreconditionError unless size is a CU size.
    double at(int cu_size) const;
    double max() const;
    double min() const;

    friend bool operator==(const AlphaTable&, const AlphaTable&) = default;

private:
    std::array<double, 4> alpha_ = {1.5, 3.0, 3.0, 1.5};
};

}  // namespace adasharp
