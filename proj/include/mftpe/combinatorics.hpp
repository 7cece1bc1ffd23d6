#pragma once

// Counting and ordered enumeration of bounded pixel vectors with fixed sum
// (and optionally fixed product or fixed weighted sum).

#include <array>
#include <cstdint>
#include <map>
#include <mutex>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "mftpe/profile.hpp"

namespace mftpe {

using BigInt = boost::multiprecision::cpp_int;

/// Memoized count of vectors in [0, d]^n whose elements sum to s.
///
/// Rows are built on demand by the recurrence
///   psi(s, 1) = 1                              for 0 <= s <= d
///   psi(s, n) = sum_{i=0}^{min(s, d)} psi(s - i, n - 1)
/// and psi = 0 outside 0 <= s <= dn. Safe for concurrent use.
class PsiTable {
public:
    explicit PsiTable(int d);

    int d() const noexcept { return d_; }

    /// Exact count; 0 when s is out of range. Requires n >= 1.
    BigInt operator()(long long s, int n);

    /// Whole row s = 0..dn for length n.
    std::vector<BigInt> row(int n);

private:
    const std::vector<BigInt>& row_locked(int n);

    int d_;
    std::mutex mutex_;
    std::map<int, std::vector<BigInt>> rows_;
};

/// Process-wide table for d (lazily created, shared).
PsiTable& psi_table(int d);

/// Shorthand for psi_table(d)(s, n).
BigInt psi(int d, long long s, int n);

using Triple = std::array<std::uint8_t, 3>;

/// Triples in [0,d]^3 with i+j+k = s and i*j*k = p, lexicographic order.
std::vector<Triple> enumerate_sum_product(int d, int s, std::uint64_t p);

/// Triples in [0,d]^3 with i+j+k = s and i*w1 + j*w2 + k*w3 = v, lexicographic order.
std::vector<Triple> enumerate_sum_weighted(int d, int s, std::uint64_t v, const Weights& w);

/// Number of pairs (a, s - a) in [0,d]^2.
std::uint64_t pair_count(int d, int s);

/// Number of triples in [0,d]^3 with sum s (fits 64 bits for d <= 255).
std::uint64_t triple_count(int d, int s);

/// Lexicographic rank of a pair/triple among all vectors with its sum, and the inverse.
std::uint64_t rank_by_sum(int d, std::span<const std::uint8_t> v);
void unrank_by_sum(int d, int s, std::uint64_t rank, std::span<std::uint8_t> out);

/// Admissible first-element interval for the range-preserving pair cipher.
struct RangeWindow {
    int alpha = 0;
    int beta = 0;

    int size() const noexcept { return beta >= alpha ? beta - alpha + 1 : 0; }
};

/// alpha = max(min+1, s-max+1), beta = min(s-min-1, max-1).
RangeWindow sum_range_window(int s, int block_min, int block_max);

}  // namespace mftpe
