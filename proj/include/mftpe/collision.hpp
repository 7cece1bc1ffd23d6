#pragma once

// Thumbnail collision probabilities: closed forms, their literal published
// variants for comparison, and an exhaustive oracle for small instances.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

#include "mftpe/image.hpp"
#include "mftpe/profile.hpp"

namespace mftpe {

using BigRational = boost::multiprecision::cpp_rational;

/// A probability held either as an exact rational or as its natural log.
class Probability {
public:
    static Probability exact(BigRational value);
    static Probability from_log(double log_value);

    bool is_exact() const noexcept { return exact_; }
    /// Throws InvalidParams in log mode.
    const BigRational& rational() const;
    /// Natural log; -inf for zero.
    double log() const;
    double value() const;
    std::string to_string() const;

private:
    Probability() = default;

    bool exact_ = true;
    BigRational rational_;
    double log_ = 0.0;
};

enum class EvalMode { Auto, Exact, Log };

/// How the A^2 / A^3 symbols of the published two- and three-block formulas are read.
/// Power: Psi^k. Permutation: falling factorial Psi (Psi-1) ... (k terms).
enum class Notation { Power, Permutation };

/// Exact evaluation is chosen in Auto mode while the denominator stays below this many bits.
inline constexpr double kExactBitLimit = 1e6;

/// P[sum(B2) = s1] for a uniform block of n pixels: Psi_d(s1, n) / (d+1)^n.
Probability p_block_fixed_vs_random(int d, int n, long long s1, EvalMode mode = EvalMode::Auto);

/// P[sum(B1) = sum(B2)] for two uniform blocks: sum_s Psi^2 / (d+1)^{2n} under the Power reading.
/// The Permutation reading evaluates the published (2 + sum_{s=1}^{dn-1} A^2) / (d+1)^{2n} literally.
Probability p_block_two_random(int d, int n, Notation notation = Notation::Power, EvalMode mode = EvalMode::Auto);

/// Probability that at least two of three uniform blocks share a sum (inclusion-exclusion), exact.
Probability p_block_three_any_pair(int d, int n);

/// The published three-block expression (2 + sum_{s=1}^{dn-1} A^3) / (d+1)^{2n}, evaluated as written.
Probability p_block_three_as_written(int d, int n, Notation notation);

/// Per-block sums of an image whose thumbnail is given.
struct ImageSpec {
    int d = kMaxPixel;
    int n = 0;  // pixels per block
    std::vector<long long> block_sums;

    int m() const noexcept { return static_cast<int>(block_sums.size()); }
};

/// prod_i Psi_d(s_i, n) / (d+1)^n.
Probability p_image_fixed_vs_random(const ImageSpec& spec, EvalMode mode = EvalMode::Auto);

/// (sum_s Psi^2)^m / (d+1)^{2mn} (Power) or the published A^2 form raised to m (Permutation).
Probability p_image_two_random(int d, int n, int m, Notation notation = Notation::Power,
                               EvalMode mode = EvalMode::Auto);

/// Three-image closed form as published, given the sums of images 1 and 2:
/// (S1 + S1 S2) / D - S1^2 S2 / D^2 with S_k = prod_i Psi(s_ki, n), D = (d+1)^{mn}.
Probability p_image_three(const ImageSpec& first, const ImageSpec& second, EvalMode mode = EvalMode::Auto);

/// Denominator of the i-th prefix product in the N-image form.
/// Shared: every prefix is divided by D = (d+1)^{mn}, as published; consistent
/// with the three-image closed form. PerImage: the i-th prefix is divided by D^i,
/// i.e. a product of per-image match probabilities S_j / D.
enum class PrefixDenominator { Shared, PerImage };

/// N-image product form 1 - prod_{i=1}^{N-1} (1 - prod_{j<=i} S_j / D), for
/// N = fixed.size() + 1 images; the last image is the random one.
/// Throws ProbabilityOverUnity if any prefix term exceeds 1 (possible only with Shared).
Probability p_image_n(std::span<const ImageSpec> fixed, EvalMode mode = EvalMode::Auto,
                      PrefixDenominator denominator = PrefixDenominator::Shared);

/// Upper bound on enumerated states for the oracle.
inline constexpr double kOracleStateLimit = 1e7;

/// Exhaustive enumeration: `images` images (2 or 3) of m blocks with n pixels
/// each in [0, d]. The first fixed.size() images have the given block sums
/// (only the thumbnail of an image enters); the rest range over all
/// (d+1)^{mn} images. Returns P[some two thumbnails (block-sum vectors) are equal].
/// Throws InstanceTooLarge beyond kOracleStateLimit states.
Probability brute_force_collision(int d, int n, int m, int images, std::span<const std::vector<long long>> fixed = {});

/// Sum over pixel groups of the size of each group's constrained set: Psi(s, n)
/// for SumOnly, |{sum, product}| for SumGeoMean, |{sum, weighted sum}| for
/// SumWeightedMean and the window beta - alpha + 1 for SumRange (evaluated for
/// every pair, the convention behind the published totals). Each block is a
/// row-major pixel list; leftovers do not contribute.
BigInt set_size_total(std::span<const std::vector<std::uint8_t>> blocks, const FactorProfile& profile,
                      int d = kMaxPixel);
BigInt set_size_total(const Image& image, int block_size, const FactorProfile& profile);

nlohmann::json to_json(const Probability& p);

/// JSON report for a two/three-image collision question: inputs, formula
/// values under both notational readings, optional oracle, agreement flags.
/// mode: "fixed" (needs sums), "pair" or "triple".
nlohmann::json collision_report(int d, int n, int m, const std::string& mode, const std::vector<long long>& sums,
                                bool run_oracle);

}  // namespace mftpe
