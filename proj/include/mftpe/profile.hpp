#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace mftpe {

enum class FactorKind : std::uint8_t {
    SumOnly,
    SumGeoMean,
    SumRange,
    SumWeightedMean,
};

/// Public weights of the weighted-mean profile. Each weight is a positive integer.
using Weights = std::array<std::uint32_t, 3>;

/// Which per-group invariants the substitution step preserves, and the group arity it uses.
///
/// SumOnly works on pairs or triples. SumGeoMean and SumWeightedMean always use triples,
/// SumRange always uses pairs.
class FactorProfile {
public:
    static FactorProfile sum_only(int arity);
    static FactorProfile sum_geo_mean();
    static FactorProfile sum_range();
    static FactorProfile sum_weighted_mean(const Weights& weights);

    FactorKind kind() const noexcept { return kind_; }
    int arity() const noexcept { return arity_; }
    bool has_weights() const noexcept { return kind_ == FactorKind::SumWeightedMean; }
    /// Only meaningful for SumWeightedMean.
    const Weights& weights() const noexcept { return weights_; }

    /// Identifier stored in the ciphertext envelope.
    std::uint8_t wire_id() const noexcept;
    /// Inverse of wire_id(); the weights must be supplied separately for the weighted profile.
    static std::optional<FactorProfile> from_wire_id(std::uint8_t id, const Weights& weights = {1, 1, 1});

    /// CLI name: sum-only-2, sum-only-3, sum-geomean, sum-range, sum-weighted.
    std::string name() const;
    static std::optional<FactorProfile> from_name(std::string_view name, const Weights& weights = {1, 1, 1});

    friend bool operator==(const FactorProfile&, const FactorProfile&) = default;

private:
    FactorProfile(FactorKind kind, int arity, const Weights& weights)
        : kind_(kind), arity_(arity), weights_(weights) {}

    FactorKind kind_;
    int arity_;
    Weights weights_;
};

}  // namespace mftpe
