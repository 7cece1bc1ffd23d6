#include "mftpe/combinatorics.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <unordered_map>

#include "mftpe/error.hpp"

namespace mftpe {

PsiTable::PsiTable(int d) : d_(d) {
    if (d < 1) throw Error(Errc::InvalidParams, "d must be >= 1");
}

const std::vector<BigInt>& PsiTable::row_locked(int n) {
    if (auto it = rows_.find(n); it != rows_.end()) return it->second;

    // Start from the longest cached row below n, or from n = 1.
    int have = 0;
    std::vector<BigInt> cur;
    if (auto it = rows_.lower_bound(n); it != rows_.begin()) {
        --it;
        have = it->first;
        cur = it->second;
    }
    if (have == 0) {
        cur.assign(static_cast<std::size_t>(d_) + 1, BigInt(1));
        have = 1;
        rows_.emplace(1, cur);
    }
    while (have < n) {
        // next[s] = sum of cur[s-d .. s]; sliding window over the previous row.
        const std::size_t len = static_cast<std::size_t>(d_) * (have + 1) + 1;
        std::vector<BigInt> next(len);
        BigInt window = 0;
        for (std::size_t s = 0; s < len; ++s) {
            if (s < cur.size()) window += cur[s];
            if (s >= static_cast<std::size_t>(d_) + 1 && s - d_ - 1 < cur.size()) window -= cur[s - d_ - 1];
            next[s] = window;
        }
        cur = std::move(next);
        ++have;
        // Small rows are cheap to keep; large ones are only kept when asked for.
        if (have == n || have <= 16) rows_.emplace(have, cur);
    }
    return rows_.at(n);
}

BigInt PsiTable::operator()(long long s, int n) {
    if (n < 1) throw Error(Errc::InvalidParams, "psi requires n >= 1");
    if (s < 0 || s > static_cast<long long>(d_) * n) return 0;
    std::lock_guard lock(mutex_);
    return row_locked(n)[static_cast<std::size_t>(s)];
}

std::vector<BigInt> PsiTable::row(int n) {
    if (n < 1) throw Error(Errc::InvalidParams, "psi requires n >= 1");
    std::lock_guard lock(mutex_);
    return row_locked(n);
}

PsiTable& psi_table(int d) {
    static std::mutex mutex;
    static std::unordered_map<int, std::unique_ptr<PsiTable>> tables;
    std::lock_guard lock(mutex);
    auto& slot = tables[d];
    if (!slot) slot = std::make_unique<PsiTable>(d);
    return *slot;
}

BigInt psi(int d, long long s, int n) { return psi_table(d)(s, n); }

namespace {

inline Triple triple(int i, int j, int k) {
    return {static_cast<std::uint8_t>(i), static_cast<std::uint8_t>(j), static_cast<std::uint8_t>(k)};
}

// Valid j for a fixed first element: j and t - j both in [0, d].
inline int j_lo(int d, int t) { return std::max(0, t - d); }
inline int j_hi(int d, int t) { return std::min(d, t); }

void check_domain(int d) {
    if (d < 1 || d > 255) throw Error(Errc::InvalidParams, "d must be in [1, 255]");
}

}  // namespace

std::vector<Triple> enumerate_sum_product(int d, int s, std::uint64_t p) {
    check_domain(d);
    std::vector<Triple> out;
    if (s < 0 || s > 3 * d) return out;
    for (int i = 0; i <= std::min(s, d); ++i) {
        const int t = s - i;
        if (t > 2 * d) continue;
        if (p == 0) {
            if (i == 0) {
                for (int j = j_lo(d, t); j <= j_hi(d, t); ++j) out.push_back(triple(0, j, t - j));
            } else {
                // j*k = 0 with j + k = t: (0, t) then (t, 0).
                if (t <= d) {
                    out.push_back(triple(i, 0, t));
                    if (t > 0) out.push_back(triple(i, t, 0));
                }
            }
            continue;
        }
        if (i == 0 || p % static_cast<std::uint64_t>(i) != 0) continue;
        // j + k = t and j * k = q: j, k are the roots of x^2 - t x + q.
        const auto q = static_cast<long long>(p / static_cast<std::uint64_t>(i));
        const long long disc = static_cast<long long>(t) * t - 4 * q;
        if (disc < 0) continue;
        auto r = static_cast<long long>(std::llround(std::sqrt(static_cast<double>(disc))));
        while (r * r > disc) --r;
        while ((r + 1) * (r + 1) <= disc) ++r;
        if (r * r != disc || (t - r) % 2 != 0) continue;
        const long long j1 = (t - r) / 2;
        const long long j2 = (t + r) / 2;
        for (long long j : {j1, j2}) {
            const long long k = t - j;
            if (j >= 1 && j <= d && k >= 1 && k <= d) out.push_back(triple(i, static_cast<int>(j), static_cast<int>(k)));
            if (r == 0) break;
        }
    }
    return out;
}

std::vector<Triple> enumerate_sum_weighted(int d, int s, std::uint64_t v, const Weights& w) {
    check_domain(d);
    std::vector<Triple> out;
    if (s < 0 || s > 3 * d) return out;
    const long long w1 = w[0], w2 = w[1], w3 = w[2];
    const auto target = static_cast<long long>(v);
    for (int i = 0; i <= std::min(s, d); ++i) {
        const int t = s - i;
        if (t > 2 * d) continue;
        // i*w1 + j*w2 + (t-j)*w3 = v  =>  j*(w2-w3) = v - i*w1 - t*w3
        const long long rem = target - i * w1 - t * w3;
        const long long slope = w2 - w3;
        if (slope == 0) {
            if (rem != 0) continue;
            for (int j = j_lo(d, t); j <= j_hi(d, t); ++j) out.push_back(triple(i, j, t - j));
            continue;
        }
        if (rem % slope != 0) continue;
        const long long j = rem / slope;
        if (j >= j_lo(d, t) && j <= j_hi(d, t)) out.push_back(triple(i, static_cast<int>(j), t - static_cast<int>(j)));
    }
    return out;
}

std::uint64_t pair_count(int d, int s) {
    if (s < 0 || s > 2 * d) return 0;
    return static_cast<std::uint64_t>(j_hi(d, s) - j_lo(d, s) + 1);
}

std::uint64_t triple_count(int d, int s) {
    if (s < 0 || s > 3 * d) return 0;
    std::uint64_t total = 0;
    for (int i = std::max(0, s - 2 * d); i <= std::min(s, d); ++i) total += pair_count(d, s - i);
    return total;
}

std::uint64_t rank_by_sum(int d, std::span<const std::uint8_t> v) {
    if (v.size() == 2) {
        const int s = v[0] + v[1];
        return static_cast<std::uint64_t>(v[0] - j_lo(d, s));
    }
    if (v.size() == 3) {
        const int s = v[0] + v[1] + v[2];
        std::uint64_t rank = 0;
        for (int i = std::max(0, s - 2 * d); i < v[0]; ++i) rank += pair_count(d, s - i);
        return rank + static_cast<std::uint64_t>(v[1] - j_lo(d, s - v[0]));
    }
    throw Error(Errc::ArityMismatch, "rank_by_sum supports 2 or 3 elements");
}

void unrank_by_sum(int d, int s, std::uint64_t rank, std::span<std::uint8_t> out) {
    if (out.size() == 2) {
        const int a = j_lo(d, s) + static_cast<int>(rank);
        out[0] = static_cast<std::uint8_t>(a);
        out[1] = static_cast<std::uint8_t>(s - a);
        return;
    }
    if (out.size() == 3) {
        for (int i = std::max(0, s - 2 * d); i <= std::min(s, d); ++i) {
            const std::uint64_t c = pair_count(d, s - i);
            if (rank < c) {
                const int j = j_lo(d, s - i) + static_cast<int>(rank);
                out[0] = static_cast<std::uint8_t>(i);
                out[1] = static_cast<std::uint8_t>(j);
                out[2] = static_cast<std::uint8_t>(s - i - j);
                return;
            }
            rank -= c;
        }
        throw Error(Errc::InvalidParams, "rank out of range");
    }
    throw Error(Errc::ArityMismatch, "unrank_by_sum supports 2 or 3 elements");
}

RangeWindow sum_range_window(int s, int block_min, int block_max) {
    return {std::max(block_min + 1, s - block_max + 1), std::min(s - block_min - 1, block_max - 1)};
}

}  // namespace mftpe
