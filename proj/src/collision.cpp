#include "mftpe/collision.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>

#include "mftpe/combinatorics.hpp"
#include "mftpe/error.hpp"
#include "mftpe/rank_cipher.hpp"

namespace mftpe {

namespace {

constexpr double kLn2 = 0.69314718055994530942;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double big_log(const BigInt& x) {
    if (x <= 0) return kNegInf;
    const auto bits = static_cast<long long>(boost::multiprecision::msb(x));
    if (bits < 62) return std::log(static_cast<double>(x));
    const long long shift = bits - 60;
    const BigInt top = x >> static_cast<unsigned>(shift);
    return std::log(static_cast<double>(top)) + static_cast<double>(shift) * kLn2;
}

// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x)) comp_ += (sum_ - t) + x;
        else comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

void check_dn(int d, int n) {
    if (d < 1) throw Error(Errc::InvalidParams, "d must be >= 1");
    if (n < 1) throw Error(Errc::InvalidParams, "n must be >= 1");
}

void check_spec(const ImageSpec& spec) {
    check_dn(spec.d, spec.n);
    if (spec.block_sums.empty()) throw Error(Errc::InvalidParams, "image needs at least one block");
}

bool use_exact(EvalMode mode, double denominator_bits) {
    if (mode == EvalMode::Exact) return true;
    if (mode == EvalMode::Log) return false;
    return denominator_bits < kExactBitLimit;
}

double bits_per_block(int d, int n) { return n * std::log2(static_cast<double>(d) + 1.0); }

BigInt pow_big(const BigInt& base, long long e) {
    BigInt out = 1;
    BigInt b = base;
    while (e > 0) {
        if (e & 1) out *= b;
        e >>= 1;
        if (e) b *= b;
    }
    return out;
}

// sum_s Psi^k over s = 0..dn (Power) or the published A^k form (Permutation).
BigInt psi_moment(int d, int n, int k, Notation notation) {
    const auto row = psi_table(d).row(n);
    BigInt total = 0;
    if (notation == Notation::Power) {
        for (const auto& v : row) total += pow_big(v, k);
        return total;
    }
    // 2 + sum_{s=1}^{dn-1} Psi (Psi - 1) ... (Psi - k + 1)
    total = 2;
    for (std::size_t s = 1; s + 1 < row.size(); ++s) {
        BigInt term = 1;
        for (int j = 0; j < k; ++j) term *= row[s] - j;
        total += term;
    }
    return total;
}

BigInt psi_product(const ImageSpec& spec) {
    BigInt prod = 1;
    for (auto s : spec.block_sums) prod *= psi(spec.d, s, spec.n);
    return prod;
}

double log_psi_product(const ImageSpec& spec) {
    CompensatedSum acc;
    for (auto s : spec.block_sums) {
        const double l = big_log(psi(spec.d, s, spec.n));
        if (l == kNegInf) return kNegInf;
        acc.add(l);
    }
    return acc.value();
}

Probability rational(const BigInt& num, const BigInt& den) { return Probability::exact(BigRational(num, den)); }

}  // namespace

// ---------------------------------------------------------------------------

Probability Probability::exact(BigRational value) {
    if (value < 0 || value > 1) throw Error(Errc::ProbabilityOverUnity, "probability outside [0, 1]");
    Probability p;
    p.exact_ = true;
    p.rational_ = std::move(value);
    return p;
}

Probability Probability::from_log(double log_value) {
    if (log_value > 1e-12) throw Error(Errc::ProbabilityOverUnity, "log probability above 0");
    Probability p;
    p.exact_ = false;
    p.log_ = std::min(log_value, 0.0);
    return p;
}

const BigRational& Probability::rational() const {
    if (!exact_) throw Error(Errc::InvalidParams, "probability was evaluated in log space");
    return rational_;
}

double Probability::log() const {
    if (!exact_) return log_;
    return big_log(boost::multiprecision::numerator(rational_)) - big_log(boost::multiprecision::denominator(rational_));
}

double Probability::value() const {
    if (exact_) {
        const auto& num = boost::multiprecision::numerator(rational_);
        const auto& den = boost::multiprecision::denominator(rational_);
        if (num == 0) return 0.0;
        if (boost::multiprecision::msb(den) < 1000) return static_cast<double>(rational_);
    }
    return std::exp(log());
}

std::string Probability::to_string() const {
    if (exact_) {
        const auto& num = boost::multiprecision::numerator(rational_);
        const auto& den = boost::multiprecision::denominator(rational_);
        if (boost::multiprecision::msb(den) < 64 || num == 0) return num.str() + "/" + den.str();
    }
    char buf[64];
    const double v = value();
    if (v > 0.0 && std::isfinite(v) && v >= 1e-300) std::snprintf(buf, sizeof buf, "%.12g", v);
    else if (log() == kNegInf) std::snprintf(buf, sizeof buf, "0");
    else std::snprintf(buf, sizeof buf, "10^%.6f", log() / std::log(10.0));
    return buf;
}

// ---------------------------------------------------------------------------

Probability p_block_fixed_vs_random(int d, int n, long long s1, EvalMode mode) {
    return p_image_fixed_vs_random(ImageSpec{d, n, {s1}}, mode);
}

Probability p_block_two_random(int d, int n, Notation notation, EvalMode mode) {
    return p_image_two_random(d, n, 1, notation, mode);
}

Probability p_block_three_any_pair(int d, int n) {
    check_dn(d, n);
    const BigInt base = pow_big(BigInt(d + 1), n);
    const BigRational p2(psi_moment(d, n, 2, Notation::Power), base * base);
    const BigRational p3(psi_moment(d, n, 3, Notation::Power), base * base * base);
    return Probability::exact(3 * p2 - 2 * p3);
}

Probability p_block_three_as_written(int d, int n, Notation notation) {
    check_dn(d, n);
    const BigInt base = pow_big(BigInt(d + 1), n);
    const BigRational v(psi_moment(d, n, 3, notation), base * base);
    if (v > 1) throw Error(Errc::ProbabilityOverUnity, "three-block expression exceeds 1: " + v.str());
    return Probability::exact(v);
}

Probability p_image_fixed_vs_random(const ImageSpec& spec, EvalMode mode) {
    check_spec(spec);
    const int m = spec.m();
    if (use_exact(mode, m * bits_per_block(spec.d, spec.n)))
        return rational(psi_product(spec), pow_big(BigInt(spec.d + 1), static_cast<long long>(m) * spec.n));
    const double l = log_psi_product(spec);
    if (l == kNegInf) return Probability::from_log(kNegInf);
    return Probability::from_log(l - static_cast<double>(m) * spec.n * std::log(spec.d + 1.0));
}

Probability p_image_two_random(int d, int n, int m, Notation notation, EvalMode mode) {
    check_dn(d, n);
    if (m < 1) throw Error(Errc::InvalidParams, "m must be >= 1");
    const BigInt moment = psi_moment(d, n, 2, notation);
    if (use_exact(mode, 2.0 * m * bits_per_block(d, n)))
        return rational(pow_big(moment, m), pow_big(BigInt(d + 1), 2LL * m * n));
    return Probability::from_log(m * (big_log(moment) - 2.0 * n * std::log(d + 1.0)));
}

Probability p_image_three(const ImageSpec& first, const ImageSpec& second, EvalMode mode) {
    check_spec(first);
    check_spec(second);
    if (first.d != second.d || first.n != second.n || first.m() != second.m())
        throw Error(Errc::InvalidParams, "images must share d, n and block count");
    const int m = first.m();
    if (use_exact(mode, 2.0 * m * bits_per_block(first.d, first.n))) {
        const BigInt s1 = psi_product(first);
        const BigInt s2 = psi_product(second);
        const BigInt den = pow_big(BigInt(first.d + 1), static_cast<long long>(m) * first.n);
        const BigRational v = BigRational(s1 + s1 * s2, den) - BigRational(s1 * s1 * s2, den * den);
        if (v > 1) throw Error(Errc::ProbabilityOverUnity, "three-image expression exceeds 1");
        return Probability::exact(v);
    }
    // p = e^a (1 + e^{b-a} - e^b) with a = log S1/D, b = log S1 S2/D.
    const double log_d = static_cast<double>(m) * first.n * std::log(first.d + 1.0);
    const double l1 = log_psi_product(first);
    const double l2 = log_psi_product(second);
    if (l1 == kNegInf) return Probability::from_log(kNegInf);
    const double a = l1 - log_d;
    if (l2 == kNegInf) return Probability::from_log(a);
    const double b = l1 + l2 - log_d;
    const double t = std::exp(b - a) - std::exp(b);
    if (t <= -1.0) return Probability::from_log(kNegInf);
    return Probability::from_log(a + std::log1p(t));
}

Probability p_image_n(std::span<const ImageSpec> fixed, EvalMode mode, PrefixDenominator denominator) {
    if (fixed.empty()) throw Error(Errc::InvalidParams, "need at least one fixed image");
    for (const auto& f : fixed) {
        check_spec(f);
        if (f.d != fixed[0].d || f.n != fixed[0].n || f.m() != fixed[0].m())
            throw Error(Errc::InvalidParams, "images must share d, n and block count");
    }
    const int d = fixed[0].d, n = fixed[0].n, m = fixed[0].m();
    const std::size_t factors = fixed.size();
    const bool per_image = denominator == PrefixDenominator::PerImage;
    const double bits = static_cast<double>(factors) * m * bits_per_block(d, n) * (per_image ? factors : 1);

    if (use_exact(mode, bits)) {
        const BigInt d_mn = pow_big(BigInt(d + 1), static_cast<long long>(m) * n);
        BigInt prefix = 1, den = 1;
        BigRational keep = 1;
        for (std::size_t i = 0; i < factors; ++i) {
            prefix *= psi_product(fixed[i]);
            den = per_image ? den * d_mn : d_mn;
            const BigRational x(prefix, den);
            if (x > 1)
                throw Error(Errc::ProbabilityOverUnity,
                            "factor " + std::to_string(i + 1) + " has prefix product / D = " + x.str() + " > 1");
            keep *= 1 - x;
        }
        return Probability::exact(1 - keep);
    }

    const double log_d = static_cast<double>(m) * n * std::log(d + 1.0);
    CompensatedSum prefix, log_keep;
    bool certain = false;
    for (std::size_t i = 0; i < factors; ++i) {
        const double l = log_psi_product(fixed[i]);
        if (l == kNegInf) break;  // this and every later prefix product is zero
        prefix.add(l);
        const double lx = prefix.value() - log_d * (per_image ? static_cast<double>(i + 1) : 1.0);
        if (lx > 1e-12)
            throw Error(Errc::ProbabilityOverUnity, "factor " + std::to_string(i + 1) +
                                                        " has log(prefix product / D) = " + std::to_string(lx) + " > 0");
        const double x = std::exp(lx);
        if (x >= 1.0) certain = true;  // keep checking later factors for overflow
        else log_keep.add(std::log1p(-x));
    }
    if (certain) return Probability::from_log(0.0);
    const double p = -std::expm1(log_keep.value());
    return Probability::from_log(p > 0.0 ? std::log(p) : kNegInf);
}

// ---------------------------------------------------------------------------

Probability brute_force_collision(int d, int n, int m, int images, std::span<const std::vector<long long>> fixed) {
    check_dn(d, n);
    if (m < 1) throw Error(Errc::InvalidParams, "m must be >= 1");
    if (images != 2 && images != 3) throw Error(Errc::InvalidParams, "oracle supports 2 or 3 images");
    if (fixed.size() >= static_cast<std::size_t>(images))
        throw Error(Errc::InvalidParams, "at least one image must be random");
    for (const auto& f : fixed)
        if (f.size() != static_cast<std::size_t>(m)) throw Error(Errc::InvalidParams, "fixed sums need m entries");

    const int free_images = images - static_cast<int>(fixed.size());
    const double per_image = std::pow(d + 1.0, static_cast<double>(m) * n);
    const double states = std::pow(per_image, free_images);
    if (!(states <= kOracleStateLimit))
        throw Error(Errc::InstanceTooLarge, "oracle would enumerate " + std::to_string(states) + " states (limit " +
                                                std::to_string(static_cast<long long>(kOracleStateLimit)) + ")");

    // Thumbnail signature of every raw image, as a base-(dn+1) code of its block sums.
    const long long radix = static_cast<long long>(d) * n + 1;
    const auto count = static_cast<std::size_t>(per_image);
    const std::size_t pixels = static_cast<std::size_t>(m) * n;
    std::vector<long long> sigs;
    sigs.reserve(count);
    std::vector<int> px(pixels, 0);
    for (std::size_t idx = 0; idx < count; ++idx) {
        long long code = 0;
        for (int b = m; b-- > 0;) {
            long long s = 0;
            for (int k = 0; k < n; ++k) s += px[static_cast<std::size_t>(b) * n + k];
            code = code * radix + s;
        }
        sigs.push_back(code);
        for (std::size_t p = 0; p < pixels; ++p) {
            if (++px[p] <= d) break;
            px[p] = 0;
        }
    }

    std::vector<long long> fixed_sigs;
    for (const auto& f : fixed) {
        long long code = 0;
        for (int b = m; b-- > 0;) code = code * radix + f[b];
        fixed_sigs.push_back(code);
    }

    std::uint64_t hits = 0;
    auto any_equal = [](const long long* v, int k) {
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j)
                if (v[i] == v[j]) return true;
        return false;
    };
    long long tuple[3];
    const int nf = static_cast<int>(fixed_sigs.size());
    for (int i = 0; i < nf; ++i) tuple[i] = fixed_sigs[i];
    if (free_images == 1) {
        for (auto a : sigs) {
            tuple[nf] = a;
            hits += any_equal(tuple, images);
        }
    } else if (free_images == 2) {
        for (auto a : sigs)
            for (auto b : sigs) {
                tuple[nf] = a;
                tuple[nf + 1] = b;
                hits += any_equal(tuple, images);
            }
    } else {
        for (auto a : sigs)
            for (auto b : sigs)
                for (auto c : sigs) {
                    tuple[0] = a;
                    tuple[1] = b;
                    tuple[2] = c;
                    hits += any_equal(tuple, 3);
                }
    }
    return rational(BigInt(hits), pow_big(BigInt(count), free_images));
}

// ---------------------------------------------------------------------------

BigInt set_size_total(std::span<const std::vector<std::uint8_t>> blocks, const FactorProfile& profile, int d) {
    const int n = profile.arity();
    BigInt total = 0;
    for (const auto& block : blocks) {
        const std::size_t groups = block.size() / n;
        if (groups == 0) continue;
        switch (profile.kind()) {
            case FactorKind::SumOnly:
                for (std::size_t g = 0; g < groups; ++g) {
                    long long s = 0;
                    for (int k = 0; k < n; ++k) s += block[g * n + k];
                    total += psi(d, s, n);
                }
                break;
            case FactorKind::SumRange: {
                int lo = 255, hi = 0;
                for (auto v : block) {
                    lo = std::min<int>(lo, v);
                    hi = std::max<int>(hi, v);
                }
                for (std::size_t g = 0; g < groups; ++g)
                    total += sum_range_window(block[2 * g] + block[2 * g + 1], lo, hi).size();
                break;
            }
            case FactorKind::SumGeoMean:
            case FactorKind::SumWeightedMean: {
                RankCipher cipher(profile, d);
                for (std::size_t g = 0; g < groups; ++g)
                    total += cipher.set_size(std::span<const std::uint8_t>(block.data() + g * n, n), std::nullopt);
                break;
            }
        }
    }
    return total;
}

BigInt set_size_total(const Image& image, int block_size, const FactorProfile& profile) {
    const BlockGrid grid = partition(image, block_size);
    std::vector<std::vector<std::uint8_t>> blocks;
    blocks.reserve(static_cast<std::size_t>(grid.blocks_per_channel()) * image.channels());
    for (int c = 0; c < image.channels(); ++c)
        for (int b = 0; b < grid.blocks_per_channel(); ++b) {
            std::vector<std::uint8_t> buf(grid.pixels_per_block());
            read_block(image, grid, c, b, buf);
            blocks.push_back(std::move(buf));
        }
    return set_size_total(blocks, profile);
}

// ---------------------------------------------------------------------------

nlohmann::json to_json(const Probability& p) {
    nlohmann::json j;
    j["mode"] = p.is_exact() ? "exact" : "log";
    if (p.is_exact()) j["exact"] = p.rational().str();
    j["value"] = p.value();
    j["log"] = p.log() == kNegInf ? nlohmann::json(nullptr) : nlohmann::json(p.log());
    j["text"] = p.to_string();
    return j;
}

nlohmann::json collision_report(int d, int n, int m, const std::string& mode, const std::vector<long long>& sums,
                                bool run_oracle) {
    check_dn(d, n);
    if (m < 1) throw Error(Errc::InvalidParams, "m must be >= 1");
    nlohmann::json r;
    r["d"] = d;
    r["n"] = n;
    r["m"] = m;
    r["mode"] = mode;

    auto attach_oracle = [&](int images, const std::vector<std::vector<long long>>& fixed,
                             const Probability& reference) {
        if (!run_oracle) return;
        try {
            const Probability o = brute_force_collision(d, n, m, images, fixed);
            r["oracle"] = to_json(o);
            r["agrees"] = reference.is_exact() && o.rational() == reference.rational();
        } catch (const Error& e) {
            if (e.code() != Errc::InstanceTooLarge) throw;
            r["oracle"] = nullptr;
            r["oracle_error"] = e.what();
        }
    };

    // Literal published forms may leave [0, 1]; that is reported, not fatal.
    auto guarded = [&](const char* name, auto&& eval) {
        try {
            r[name] = to_json(eval());
        } catch (const Error& e) {
            if (e.code() != Errc::ProbabilityOverUnity) throw;
            r[name] = nullptr;
            r[std::string(name) + "_error"] = e.what();
        }
    };

    if (mode == "fixed") {
        if (sums.size() != static_cast<std::size_t>(m))
            throw Error(Errc::InvalidParams, "fixed mode needs exactly m block sums");
        r["sums"] = sums;
        const Probability p = p_image_fixed_vs_random(ImageSpec{d, n, sums});
        r["formula"] = to_json(p);
        attach_oracle(2, {sums}, p);
    } else if (mode == "pair") {
        const Probability p = p_image_two_random(d, n, m, Notation::Power);
        r["formula"] = to_json(p);
        r["as_written_permutation"] = to_json(p_image_two_random(d, n, m, Notation::Permutation));
        attach_oracle(2, {}, p);
    } else if (mode == "triple") {
        if (sums.size() == 2 * static_cast<std::size_t>(m)) {
            const ImageSpec a{d, n, std::vector<long long>(sums.begin(), sums.begin() + m)};
            const ImageSpec b{d, n, std::vector<long long>(sums.begin() + m, sums.end())};
            r["sums"] = {a.block_sums, b.block_sums};
            const ImageSpec both[] = {a, b};
            std::optional<Probability> closed;
            guarded("formula_closed_form", [&] {
                closed = p_image_three(a, b);
                return *closed;
            });
            guarded("formula_product", [&] { return p_image_n(both); });
            guarded("formula_product_per_image",
                    [&] { return p_image_n(both, EvalMode::Auto, PrefixDenominator::PerImage); });
            if (run_oracle) {
                try {
                    const Probability o = brute_force_collision(d, n, m, 3, std::vector{a.block_sums, b.block_sums});
                    r["oracle"] = to_json(o);
                    if (closed) r["deviation_closed_form"] = std::fabs(o.value() - closed->value());
                } catch (const Error& e) {
                    if (e.code() != Errc::InstanceTooLarge) throw;
                    r["oracle"] = nullptr;
                    r["oracle_error"] = e.what();
                }
            }
        } else if (sums.empty()) {
            if (m != 1) throw Error(Errc::InvalidParams, "random triple mode is defined for one block (m = 1)");
            const Probability p = p_block_three_any_pair(d, n);
            r["formula"] = to_json(p);
            guarded("as_written_power", [&] { return p_block_three_as_written(d, n, Notation::Power); });
            guarded("as_written_permutation",
                    [&] { return p_block_three_as_written(d, n, Notation::Permutation); });
            attach_oracle(3, {}, p);
        } else {
            throw Error(Errc::InvalidParams, "triple mode takes no sums or 2m sums");
        }
    } else {
        throw Error(Errc::InvalidParams, "unknown mode '" + mode + "' (fixed, pair, triple)");
    }
    return r;
}

}  // namespace mftpe
