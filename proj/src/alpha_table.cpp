#include "adasharp/alpha_table.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "adasharp/error.hpp"
#include "adasharp/partition_mask.hpp"

namespace adasharp {

AlphaTable::AlphaTable(double a8, double a16, double a32, double a64) : alpha_{a8, a16, a32, a64} {
    for (std::size_t i = 0; i < alpha_.size(); ++i) {
        if (!std::isfinite(alpha_[i]) || alpha_[i] < 0.0) {
            throw PreconditionError("alpha for CU size " + std::to_string(kCuSizes[i]) +
                                    " must be finite and >= 0");
        }
    }
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos) {
        return {};
    }
    return s.substr(first, s.find_last_not_of(" \t") - first + 1);
}

}  // namespace

AlphaTable AlphaTable::parse(std::string_view text) {
    std::array<double, 4> values{};
    std::array<bool, 4> seen{};
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        const std::string_view entry = trim(text.substr(pos, comma - pos));
        const std::size_t colon = entry.find(':');
        if (colon == std::string_view::npos) {
            throw PreconditionError("alpha table entry '" + std::string(entry) +
                                    "' is not of the form size:alpha");
        }
        int size = 0;
        const auto key = trim(entry.substr(0, colon));
        auto [kp, kec] = std::from_chars(key.data(), key.data() + key.size(), size);
        if (kec != std::errc() || kp != key.data() + key.size() || !is_cu_size(size)) {
            throw PreconditionError("alpha table key '" + std::string(key) +
                                    "' is not one of 8, 16, 32, 64");
        }
        // std::from_chars for double is unavailable on older libstdc++.
        const std::string val(trim(entry.substr(colon + 1)));
        std::istringstream is(val);
        double alpha = 0.0;
        if (!(is >> alpha) || !is.eof()) {
            throw PreconditionError("alpha table value '" + val + "' is not a number");
        }
        const auto idx = static_cast<std::size_t>(cu_size_index(size));
        if (seen[idx]) {
            throw PreconditionError("alpha table lists CU size " + std::to_string(size) + " twice");
        }
        seen[idx] = true;
        values[idx] = alpha;
        pos = comma + 1;
    }
    for (std::size_t i = 0; i < seen.size(); ++i) {
        if (!seen[i]) {
            throw PreconditionError("alpha table is missing CU size " +
                                    std::to_string(kCuSizes[i]));
        }
    }
    return AlphaTable(values[0], values[1], values[2], values[3]);
}

std::string AlphaTable::to_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < alpha_.size(); ++i) {
        os << (i ? "," : "") << kCuSizes[i] << ':' << alpha_[i];
    }
    return os.str();
}

double AlphaTable::at(int cu_size) const {
    if (!is_cu_size(cu_size)) {
        throw PreconditionError("no alpha for CU size " + std::to_string(cu_size));
    }
    return alpha_[static_cast<std::size_t>(cu_size_index(cu_size))];
}

double AlphaTable::max() const { return *std::max_element(alpha_.begin(), alpha_.end()); }

double AlphaTable::min() const { return *std::min_element(alpha_.begin(), alpha_.end()); }

}  // namespace adasharp
