// Acceptance suite: one PASS/FAIL line per criterion, details indented below.
// Exit status is the number of failing criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mftpe/collision.hpp"
#include "mftpe/combinatorics.hpp"
#include "mftpe/engine.hpp"
#include "mftpe/error.hpp"
#include "mftpe/image.hpp"
#include "mftpe/metrics.hpp"
#include "mftpe/png_io.hpp"
#include "mftpe/rank_cipher.hpp"
#include "mftpe/simd/kernels.hpp"

using namespace mftpe;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = true;
    std::string summary;
    std::vector<std::string> details;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            details.push_back("violated: " + what);
        }
    }
    void note(const std::string& line) { details.push_back(line); }
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::string data_path(const char* name) { return std::string(MFTPE_TEST_DATA) + "/" + name; }

Image random_image(int w, int h, int c, std::mt19937_64& rng) {
    std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * h * c);
    for (auto& v : px) v = static_cast<std::uint8_t>(rng());
    return Image(w, h, c, std::move(px));
}

template <std::size_t N>
std::array<std::uint8_t, N> random_bytes(std::mt19937_64& rng) {
    std::array<std::uint8_t, N> out;
    for (auto& v : out) v = static_cast<std::uint8_t>(rng());
    return out;
}

MasterKey fixed_key() {
    MasterKey k;
    for (std::size_t i = 0; i < k.size(); ++i) k[i] = static_cast<std::uint8_t>(0x40 + i);
    return k;
}

// Profiles exercised by the round-trip criteria: the sum-only baseline and the three factor schemes.
std::vector<FactorProfile> four_profiles(const Weights& w) {
    return {FactorProfile::sum_only(2), FactorProfile::sum_geo_mean(), FactorProfile::sum_range(),
            FactorProfile::sum_weighted_mean(w)};
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
    Outcome o;
    PsiTable fresh(255);
    const auto t0 = Clock::now();
    const BigInt v = fresh(2, 3);
    const double ms = ms_since(t0);
    o.require(v == 6, "psi(255, 2, 3) = 6, got " + v.str());
    o.require(ms < 1.0, fmt("runtime %.4f ms < 1 ms", ms));
    o.summary = fmt("psi(255,2,3) = %s in %.4f ms (fresh table)", v.str().c_str(), ms);
    return o;
}

Outcome criterion2() {
    Outcome o;
    const std::vector<std::vector<std::uint8_t>> blocks = {{25, 175, 163, 254, 51, 58}, {18, 199, 87, 85, 204, 173}};
    const auto t0 = Clock::now();
    const BigInt only2 = set_size_total(blocks, FactorProfile::sum_only(2));
    const BigInt only3 = set_size_total(blocks, FactorProfile::sum_only(3));
    const BigInt range = set_size_total(blocks, FactorProfile::sum_range());
    const BigInt geo = set_size_total(blocks, FactorProfile::sum_geo_mean());
    const double ms = ms_since(t0);
    o.require(only2 == 930, "sum-only n=2 total 930, got " + only2.str());
    o.require(only3 == 183366, "sum-only n=3 total 183366, got " + only3.str());
    o.require(range == 642, "sum-range total 642, got " + range.str());
    o.require(geo == 24, "sum-geomean total 24, got " + geo.str());
    const double reduction = 100.0 * (1.0 - static_cast<double>(range) / static_cast<double>(only2));
    o.require(std::fabs(reduction - 30.9) <= 0.1, fmt("reduction 30.9%% +- 0.1, got %.3f%%", reduction));

    // Weighted total with fixed weights never exceeds the sum-only total; check a spread of weights.
    BigInt worst = 0;
    std::string worst_w;
    int checked = 0;
    for (std::uint32_t a = 1; a <= 8; ++a)
        for (std::uint32_t b = 1; b <= 8; ++b)
            for (std::uint32_t c = 1; c <= 8; ++c) {
                const BigInt t = set_size_total(blocks, FactorProfile::sum_weighted_mean({a, b, c}));
                ++checked;
                o.require(t <= only3, fmt("weighted total <= 183366 for w=(%u,%u,%u)", a, b, c));
                if (t > worst) {
                    worst = t;
                    worst_w = fmt("(%u,%u,%u)", a, b, c);
                }
            }
    o.require(ms < 1000.0, fmt("runtime %.2f ms < 1 s", ms));
    o.summary = fmt("totals %s / %s / %s / %s, reduction %.2f%% (%.2f ms)", only2.str().c_str(), only3.str().c_str(),
                    range.str().c_str(), geo.str().c_str(), reduction, ms);
    o.note(fmt("weighted totals over %d weight vectors in [1,8]^3: max %s at w=%s (<= %s)", checked,
               worst.str().c_str(), worst_w.c_str(), only3.str().c_str()));
    return o;
}

// Criteria 3 and 4 share one sweep.
struct RoundTripStats {
    int cases = 0;
    int roundtrip_fail = 0;
    int thumb_fail = 0;
    int ext_fail = 0;
    double seconds = 0;
};

RoundTripStats sweep_roundtrips() {
    RoundTripStats st;
    std::mt19937_64 rng(2024);
    const auto t0 = Clock::now();
    for (int i = 0; i < 100; ++i) {
        const Image img = random_image(64, 64, 3, rng);
        const auto key = random_bytes<32>(rng);
        const auto nonce = random_bytes<16>(rng);
        for (const auto& profile : four_profiles(derive_weights(key, nonce)))
            for (int rounds : {1, 3})
                for (int block : {8, 16}) {
                    const CipherParams params(profile, block, rounds, key, nonce);
                    const Image c = encrypt_image(img, params);
                    ++st.cases;
                    if (decrypt_image(c, params) != img) ++st.roundtrip_fail;
                    if (thumbnail(c, block) != thumbnail(img, block)) ++st.thumb_fail;
                    if (extended_thumbnail(c, block, profile) != extended_thumbnail(img, block, profile)) ++st.ext_fail;
                }
    }
    st.seconds = ms_since(t0) / 1000.0;
    return st;
}

Outcome criterion3(const RoundTripStats& st) {
    Outcome o;
    o.require(st.cases == 1600, fmt("1600 cases, ran %d", st.cases));
    o.require(st.roundtrip_fail == 0, fmt("%d round-trip failures", st.roundtrip_fail));
    o.require(st.seconds < 60.0, fmt("runtime %.2f s < 60 s (includes thumbnail checks)", st.seconds));
    o.summary = fmt("%d cases (100 images x 4 profiles x R{1,3} x B{8,16}), %d mismatches, %.2f s", st.cases,
                    st.roundtrip_fail, st.seconds);
    return o;
}

Outcome criterion4(const RoundTripStats& st) {
    Outcome o;
    o.require(st.thumb_fail == 0, fmt("%d thumbnail mismatches", st.thumb_fail));
    o.require(st.ext_fail == 0, fmt("%d extended-thumbnail mismatches", st.ext_fail));
    o.summary = fmt("%d cases: thumbnail mismatches %d, extended-thumbnail mismatches %d", st.cases, st.thumb_fail,
                    st.ext_fail);
    return o;
}

Outcome criterion5() {
    Outcome o;
    constexpr int d = 7;
    const auto t0 = Clock::now();
    std::uint64_t applications = 0;
    const Weights w{2, 3, 5};

    auto secondary = [&](const FactorProfile& p, const std::vector<std::uint8_t>& g) -> std::uint64_t {
        if (p.kind() == FactorKind::SumGeoMean) return std::uint64_t{g[0]} * g[1] * g[2];
        if (p.kind() == FactorKind::SumWeightedMean) return w[0] * g[0] + w[1] * g[1] + w[2] * g[2];
        return 0;
    };

    for (const auto& profile : {FactorProfile::sum_only(2), FactorProfile::sum_only(3), FactorProfile::sum_geo_mean(),
                                FactorProfile::sum_weighted_mean(w)}) {
        const int n = profile.arity();
        RankCipher cipher(profile, d);
        std::map<std::pair<int, std::uint64_t>, std::vector<std::vector<std::uint8_t>>> sets;
        std::vector<std::uint8_t> v(n, 0);
        while (true) {
            int s = 0;
            for (auto x : v) s += x;
            sets[{s, secondary(profile, v)}].push_back(v);
            int i = 0;
            while (i < n && ++v[i] > d) v[i++] = 0;
            if (i == n) break;
        }
        bool ok = true;
        for (const auto& [id, members] : sets) {
            const auto bound = static_cast<std::uint64_t>(psi(d, id.first, n));
            for (std::uint64_t k = 0; k < bound; ++k) {
                std::set<std::vector<std::uint8_t>> seen;
                for (const auto& m : members) {
                    auto x = m;
                    cipher.substitute(x, std::nullopt, Subkey::from_u64(k));
                    ++applications;
                    int s = 0;
                    for (auto e : x) s += e;
                    ok = ok && s == id.first && secondary(profile, x) == id.second;
                    seen.insert(x);
                    auto y = x;
                    cipher.desubstitute(y, std::nullopt, Subkey::from_u64(k));
                    ok = ok && y == m;
                }
                ok = ok && seen.size() == members.size();
                for (const auto& x : seen) ok = ok && std::find(members.begin(), members.end(), x) != members.end();
            }
        }
        o.require(ok, profile.name() + ": bijection / factor preservation");
    }

    RankCipher range(FactorProfile::sum_range(), d);
    bool ok = true;
    for (int lo = 0; lo <= d; ++lo)
        for (int hi = lo; hi <= d; ++hi) {
            const BlockRange block{std::uint8_t(lo), std::uint8_t(hi)};
            for (int s = 2 * lo; s <= 2 * hi; ++s) {
                std::vector<std::vector<std::uint8_t>> members;
                for (int a = lo; a <= hi; ++a)
                    if (s - a >= lo && s - a <= hi) members.push_back({std::uint8_t(a), std::uint8_t(s - a)});
                const auto bound = static_cast<std::uint64_t>(psi(d, s, 2));
                for (std::uint64_t k = 0; k < bound; ++k) {
                    std::set<std::vector<std::uint8_t>> seen;
                    for (const auto& m : members) {
                        auto x = m;
                        range.substitute(x, block, Subkey::from_u64(k));
                        ++applications;
                        ok = ok && x[0] + x[1] == s && x[0] >= lo && x[0] <= hi && x[1] >= lo && x[1] <= hi;
                        if (!touches_extreme(m, block))
                            ok = ok && x[0] > lo && x[0] < hi && x[1] > lo && x[1] < hi;
                        else
                            ok = ok && x[0] == m[1] && x[1] == m[0];
                        seen.insert(x);
                        auto y = x;
                        range.desubstitute(y, block, Subkey::from_u64(k));
                        ok = ok && y == m;
                    }
                    ok = ok && seen.size() == members.size();
                }
            }
        }
    o.require(ok, "sum-range: bijection, sum and extremes preserved, normal path strictly inside");
    const double s = ms_since(t0) / 1000.0;
    o.require(s < 30.0, fmt("runtime %.2f s < 30 s", s));
    o.summary = fmt("d=7, all groups x all subkeys < Psi, 5 profiles: %llu substitutions checked in %.2f s",
                    static_cast<unsigned long long>(applications), s);
    return o;
}

std::vector<std::vector<long long>> sum_vectors(int d, int n, int m) {
    std::vector<std::vector<long long>> out;
    std::vector<long long> v(m, 0);
    while (true) {
        out.push_back(v);
        int i = 0;
        while (i < m && ++v[i] > static_cast<long long>(d) * n) v[i++] = 0;
        if (i == m) break;
    }
    return out;
}

Outcome criterion6() {
    Outcome o;
    int compared = 0, skipped = 0;
    double max_dev_closed = 0, max_dev_product = 0, max_dev_per_image = 0;
    std::string worst_case;
    int over_unity = 0, triple_instances = 0;
    for (int d = 1; d <= 3; ++d)
        for (int n = 1; n <= 2; ++n)
            for (int m = 1; m <= 2; ++m) {
                const std::string at = fmt("(d=%d,n=%d,m=%d)", d, n, m);
                const auto vecs = sum_vectors(d, n, m);
                // One fixed image, one random.
                for (const auto& s : vecs) {
                    const auto oracle = brute_force_collision(d, n, m, 2, std::vector<std::vector<long long>>{s});
                    const auto formula = p_image_fixed_vs_random({d, n, s});
                    o.require(oracle.rational() == formula.rational(), "fixed-vs-random at " + at);
                    const ImageSpec one[] = {{d, n, s}};
                    o.require(p_image_n(one).rational() == formula.rational(), "N=2 product form at " + at);
                    compared += 2;
                }
                // Two random images.
                try {
                    const auto oracle = brute_force_collision(d, n, m, 2);
                    o.require(oracle.rational() == p_image_two_random(d, n, m).rational(), "two-random at " + at);
                    ++compared;
                } catch (const Error& e) {
                    if (e.code() != Errc::InstanceTooLarge) throw;
                    ++skipped;
                }
                // N = 3: images 1 and 2 fixed, image 3 random.
                for (const auto& a : vecs)
                    for (const auto& b : vecs) {
                        const ImageSpec sa{d, n, a}, sb{d, n, b};
                        const double oracle = brute_force_collision(d, n, m, 3, std::vector{a, b}).value();
                        ++triple_instances;
                        try {
                            const double closed = p_image_three(sa, sb).value();
                            if (std::fabs(closed - oracle) > max_dev_closed) {
                                max_dev_closed = std::fabs(closed - oracle);
                                worst_case = at + " sums " + std::to_string(a[0]) + "," + std::to_string(b[0]);
                            }
                        } catch (const Error& e) {
                            if (e.code() != Errc::ProbabilityOverUnity) throw;
                            ++over_unity;
                        }
                        try {
                            const ImageSpec two[] = {sa, sb};
                            max_dev_product = std::max(max_dev_product, std::fabs(p_image_n(two).value() - oracle));
                            const double per_image =
                                p_image_n(two, EvalMode::Auto, PrefixDenominator::PerImage).value();
                            max_dev_per_image = std::max(max_dev_per_image, std::fabs(per_image - oracle));
                        } catch (const Error& e) {
                            if (e.code() != Errc::ProbabilityOverUnity) throw;
                        }
                    }
            }
    const auto perm = p_block_two_random(1, 2, Notation::Permutation).rational();
    const auto power = p_block_two_random(1, 2, Notation::Power).rational();
    o.note("permutation-count reading at (d=1,n=2): " + perm.str() + " (= 4/16) vs power reading / oracle " +
           power.str() + " (= 6/16): disagree");
    o.note(fmt("N=3 (two fixed images, one random) over %d instances: max |closed form - oracle| = %.6f (at %s), "
               "max |product form - oracle| = %.6f (per-image denominators: %.6f), "
               "%d instances where the closed form exceeds 1",
               triple_instances, max_dev_closed, worst_case.c_str(), max_dev_product, max_dev_per_image, over_unity));
    const auto three_true = p_block_three_any_pair(1, 2).rational();
    const auto three_oracle = brute_force_collision(1, 2, 1, 3).rational();
    o.require(three_true == three_oracle, "three random blocks (inclusion-exclusion) at (1,2,1)");
    o.note("three random blocks at (d=1,n=2): oracle " + three_oracle.str() + ", as-written power " +
           p_block_three_as_written(1, 2, Notation::Power).to_string() + ", as-written permutation " +
           p_block_three_as_written(1, 2, Notation::Permutation).to_string());
    o.summary = fmt("%d exact formula/oracle comparisons over d{1,2,3} x n{1,2} x m{1,2} (%d two-random cases over "
                    "the state limit)",
                    compared, skipped);
    return o;
}

Outcome criterion7(const Image& img) {
    Outcome o;
    const auto key = fixed_key();
    const Nonce nonce{0x17};
    const CipherParams params(FactorProfile::sum_weighted_mean(derive_weights(key, nonce)), 16, 3, key, nonce);
    const Image c = encrypt_image(img, params);
    double worst = 0;
    std::string line;
    for (int ch = 0; ch < img.channels(); ++ch) {
        const double plain_h = adjacent_correlation(img, Direction::Horizontal, ch);
        o.require(plain_h > 0.8, fmt("plaintext horizontal r > 0.8 (channel %d: %.4f)", ch, plain_h));
        std::string cl = fmt("channel %d: plain h %.4f; cipher", ch, plain_h);
        for (auto dir : {Direction::Horizontal, Direction::Vertical, Direction::Diagonal}) {
            const double r = adjacent_correlation(c, dir, ch);
            worst = std::max(worst, std::fabs(r));
            o.require(std::fabs(r) < 0.15, fmt("cipher |r| < 0.15 (channel %d %s: %.4f)", ch, direction_name(dir), r));
            cl += fmt(" %s %.4f", direction_name(dir), r);
        }
        o.note(cl);
    }
    // Share of the variance carried by the preserved block means, which bounds how far permutation can decorrelate.
    for (int ch = 0; ch < img.channels(); ++ch) {
        const auto plane = img.plane(ch);
        double mean = 0;
        for (auto v : plane) mean += v;
        mean /= plane.size();
        double total = 0;
        for (auto v : plane) total += (v - mean) * (v - mean);
        total /= plane.size();
        double between = 0;
        const int bx = img.width() / 16, by = img.height() / 16;
        for (int b = 0; b < bx * by; ++b) {
            double s = 0;
            for (int y = 0; y < 16; ++y)
                for (int x = 0; x < 16; ++x) s += img.at((b % bx) * 16 + x, (b / bx) * 16 + y, ch);
            s /= 256.0;
            between += (s - mean) * (s - mean);
        }
        between /= bx * by;
        o.note(fmt("channel %d: between-block variance share %.4f; with ideal in-block mixing the expected adjacent "
                   "r is about %.3f",
                   ch, between / total, between / total));
    }
    o.summary = fmt("bundled %dx%d image, sum-weighted B=16 R=3: max cipher |r| = %.4f (threshold 0.15)",
                    img.width(), img.height(), worst);
    return o;
}

Outcome criterion8(const Image& img) {
    Outcome o;
    const auto key = fixed_key();
    const Nonce nonce{0x18};
    std::string psnrs;
    for (const auto& profile : four_profiles(derive_weights(key, nonce))) {
        const CipherParams params(profile, 16, 3, key, nonce);
        const Image c = encrypt_image(img, params);
        const BlockGrid grid = partition(c, 16);

        // One block replaced by random bytes.
        std::mt19937_64 rng(8);
        Image corrupted = c;
        const int target_c = img.channels() - 1, target_b = grid.blocks_per_channel() / 2 + 3;
        std::vector<std::uint8_t> buf(grid.pixels_per_block());
        for (auto& v : buf) v = static_cast<std::uint8_t>(rng());
        write_block(corrupted, grid, target_c, target_b, buf);
        const Image dec = decrypt_image(corrupted, params);
        int differing = 0;
        std::vector<std::uint8_t> pa(buf.size()), pb(buf.size());
        for (int ch = 0; ch < img.channels(); ++ch)
            for (int b = 0; b < grid.blocks_per_channel(); ++b) {
                read_block(img, grid, ch, b, pa);
                read_block(dec, grid, ch, b, pb);
                if (pa != pb && !(ch == target_c && b == target_b)) ++differing;
            }
        o.require(differing == 0, fmt("%s: %d untouched blocks differ after one-block corruption",
                                      profile.name().c_str(), differing));

        const Image noisy = add_noise(c, {NoiseKind::SaltPepper, 0.01, 99});
        const double p = psnr(img, decrypt_image(noisy, params));
        o.require(p > 20.0, fmt("%s: PSNR %.2f dB > 20 dB under 1%% salt-and-pepper", profile.name().c_str(), p));
        psnrs += fmt(" %s %.2f dB;", profile.name().c_str(), p);
    }
    o.summary = "one-block corruption stays local for all 4 profiles; salt-and-pepper 1% PSNR:" + psnrs;
    return o;
}

Outcome criterion9(const Image& img) {
    Outcome o;
    const auto key = fixed_key();
    const Nonce nonce{0x19};
    std::map<std::string, double> seconds;
    std::string line;
    for (const auto& profile : {FactorProfile::sum_only(2), FactorProfile::sum_only(3), FactorProfile::sum_geo_mean(),
                                FactorProfile::sum_range(),
                                FactorProfile::sum_weighted_mean(derive_weights(key, nonce))}) {
        const CipherParams params(profile, 16, 1, key, nonce);
        Image work = img;
        const auto t0 = Clock::now();
        encrypt_round(work, params, 1);
        const double s = ms_since(t0) / 1000.0;
        seconds[profile.name()] = s;
        o.require(s < 5.0, fmt("%s one round %.3f s < 5 s", profile.name().c_str(), s));
        line += fmt(" %s %.3f s;", profile.name().c_str(), s);
    }
    const double ratio = seconds["sum-range"] / seconds["sum-only-2"];
    o.require(ratio <= 3.0, fmt("sum-range / sum-only time ratio %.2f <= 3", ratio));
    o.summary = fmt("one round, %dx%dx%d, kernels %s:", img.width(), img.height(), img.channels(),
                    std::string(simd::isa_name(simd::kernels().isa)).c_str()) +
                line + fmt(" range/baseline %.2f", ratio);
    return o;
}

Outcome criterion10() {
    Outcome o;
    // 4x4 images, B = 4: same block sum, different pixel products.
    std::vector<std::uint8_t> a(16, 100), b(16, 100);
    a[0] = 90;
    a[1] = 110;  // product 9900 instead of 10000
    b[0] = 0;
    b[1] = 200;  // product 0
    const Image ia(4, 4, 1, a), ib(4, 4, 1, b);
    const auto geo = FactorProfile::sum_geo_mean();
    o.require(ia != ib, "images differ");
    o.require(thumbnail(ia, 4) == thumbnail(ib, 4), "plain thumbnails equal");
    const auto ea = extended_thumbnail(ia, 4, geo), eb = extended_thumbnail(ib, 4, geo);
    o.require(ea.primary == eb.primary, "extended primary parts equal");
    o.require(ea != eb, "sum-geomean extended thumbnails differ");
    o.summary = fmt("two 4x4 images with block sum %d: thumbnails equal, block products %s vs %s differ", 1600,
                    ea.products[0].str().c_str(), eb.products[0].str().c_str());
    return o;
}

}  // namespace

int main() {
    int failures = 0;
    auto report = [&](int id, const char* title, const std::function<Outcome()>& fn) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o.pass = false;
            o.summary = std::string("exception: ") + e.what();
        }
        std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << id << " (" << title << "): " << o.summary << '\n';
        for (const auto& d : o.details) std::cout << "        " << d << '\n';
        std::cout.flush();
        if (!o.pass) ++failures;
    };

    std::cout << "kernels: " << simd::isa_name(simd::kernels().isa) << '\n';
    const Image bundled = read_png(data_path("astronaut.png"));

    report(1, "golden psi", criterion1);
    report(2, "golden set-size totals", criterion2);
    RoundTripStats sweep;
    bool swept = false;
    auto ensure_sweep = [&] {
        if (!swept) sweep = sweep_roundtrips();
        swept = true;
    };
    report(3, "round trip", [&] {
        ensure_sweep();
        return criterion3(sweep);
    });
    report(4, "thumbnail preservation", [&] {
        ensure_sweep();
        return criterion4(sweep);
    });
    report(5, "exhaustive factor invariants", criterion5);
    report(6, "formula/oracle equivalence", criterion6);
    report(7, "adjacent-pixel correlation", [&] { return criterion7(bundled); });
    report(8, "noise locality", [&] { return criterion8(bundled); });
    report(9, "timing", [&] { return criterion9(bundled); });
    report(10, "collision demonstration", criterion10);

    std::cout << (failures == 0 ? "ALL CRITERIA PASS" : std::to_string(failures) + " criterion/criteria FAIL") << '\n';
    return failures;
}
