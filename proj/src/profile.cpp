#include "mftpe/profile.hpp"

#include <algorithm>

#include "mftpe/error.hpp"

namespace mftpe {

namespace {

constexpr std::uint8_t kSumOnly2 = 1;
constexpr std::uint8_t kSumOnly3 = 2;
constexpr std::uint8_t kSumGeoMean = 3;
constexpr std::uint8_t kSumRange = 4;
constexpr std::uint8_t kSumWeighted = 5;

}  // namespace

FactorProfile FactorProfile::sum_only(int arity) {
    if (arity != 2 && arity != 3) throw Error(Errc::ArityMismatch, "sum-only groups have 2 or 3 pixels");
    return {FactorKind::SumOnly, arity, {1, 1, 1}};
}

FactorProfile FactorProfile::sum_geo_mean() { return {FactorKind::SumGeoMean, 3, {1, 1, 1}}; }

FactorProfile FactorProfile::sum_range() { return {FactorKind::SumRange, 2, {1, 1, 1}}; }

FactorProfile FactorProfile::sum_weighted_mean(const Weights& weights) {
    if (std::any_of(weights.begin(), weights.end(), [](std::uint32_t w) { return w == 0; }))
        throw Error(Errc::InvalidParams, "weights must be positive");
    return {FactorKind::SumWeightedMean, 3, weights};
}

std::uint8_t FactorProfile::wire_id() const noexcept {
    switch (kind_) {
        case FactorKind::SumOnly: return arity_ == 2 ? kSumOnly2 : kSumOnly3;
        case FactorKind::SumGeoMean: return kSumGeoMean;
        case FactorKind::SumRange: return kSumRange;
        case FactorKind::SumWeightedMean: return kSumWeighted;
    }
    return 0;
}

std::optional<FactorProfile> FactorProfile::from_wire_id(std::uint8_t id, const Weights& weights) {
    switch (id) {
        case kSumOnly2: return sum_only(2);
        case kSumOnly3: return sum_only(3);
        case kSumGeoMean: return sum_geo_mean();
        case kSumRange: return sum_range();
        case kSumWeighted: return sum_weighted_mean(weights);
        default: return std::nullopt;
    }
}

std::string FactorProfile::name() const {
    switch (kind_) {
        case FactorKind::SumOnly: return arity_ == 2 ? "sum-only-2" : "sum-only-3";
        case FactorKind::SumGeoMean: return "sum-geomean";
        case FactorKind::SumRange: return "sum-range";
        case FactorKind::SumWeightedMean: return "sum-weighted";
    }
    return "unknown";
}

std::optional<FactorProfile> FactorProfile::from_name(std::string_view name, const Weights& weights) {
    if (name == "sum-only-2" || name == "sum-only") return sum_only(2);
    if (name == "sum-only-3") return sum_only(3);
    if (name == "sum-geomean") return sum_geo_mean();
    if (name == "sum-range") return sum_range();
    if (name == "sum-weighted") return sum_weighted_mean(weights);
    return std::nullopt;
}

}  // namespace mftpe
