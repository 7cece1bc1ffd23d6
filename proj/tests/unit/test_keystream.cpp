#include <doctest.h>

#include <random>
#include <set>
#include <vector>

#include <sodium.h>

#include "helpers.hpp"
#include "mftpe/keystream.hpp"

using namespace mftpe;

namespace {

template <std::size_t N>
std::array<std::uint8_t, N> hex(const char* s) {
    std::array<std::uint8_t, N> out{};
    REQUIRE(from_hex(s, out));
    return out;
}

struct SodiumInit {
    SodiumInit() { REQUIRE(sodium_init() >= 0); }
};

}  // namespace

TEST_CASE("chacha20 block function: RFC 8439 test vector") {
    const auto key = testing::counting_key();
    const auto nonce = hex<12>("000000090000004a00000000");
    const auto expected = hex<64>(
        "10f1e7e4d13b5915500fdd1fa32071c4c7d1f4c733c068030422aa9ac3d46c4e"
        "d2826446079faa0914c2d705d98b02a2b5129cd1de164eb9cbd083e8a2503c4e");
    CHECK(chacha20_block(key, 1, nonce) == expected);
}

TEST_CASE("chacha20 and hchacha20 agree with libsodium") {
    SodiumInit init;
    std::mt19937_64 rng(21);
    for (int t = 0; t < 50; ++t) {
        const auto key = testing::random_bytes<32>(rng);
        const auto nonce12 = testing::random_bytes<12>(rng);
        const auto counter = static_cast<std::uint32_t>(rng());
        std::array<std::uint8_t, 64> zeros{}, ref{};
        crypto_stream_chacha20_ietf_xor_ic(ref.data(), zeros.data(), 64, nonce12.data(), counter, key.data());
        CHECK(chacha20_block(key, counter, nonce12) == ref);

        const auto in16 = testing::random_bytes<16>(rng);
        std::array<std::uint8_t, 32> sub{};
        crypto_core_hchacha20(sub.data(), in16.data(), key.data(), nullptr);
        CHECK(hchacha20(key, in16) == sub);
    }
}

TEST_CASE("keystream = ChaCha20 under HChaCha20(K, nonce) with the encoded context") {
    SodiumInit init;
    std::mt19937_64 rng(22);
    const auto key = testing::random_bytes<32>(rng);
    const auto nonce = testing::random_bytes<16>(rng);
    const StreamContext ctx{StreamLabel::Permutation, 3, 2, 0x01020304};
    const auto encoded = ctx.encode();
    CHECK(encoded == std::array<std::uint8_t, 12>{2, 2, 3, 0, 4, 3, 2, 1, 0, 0, 0, 0});

    auto reader = Keystream(key, nonce).stream(ctx);
    std::vector<std::uint8_t> ours(64 * 20);
    reader.read(ours);

    const auto session = hchacha20(key, nonce);
    std::vector<std::uint8_t> ref(ours.size());
    crypto_stream_chacha20_ietf(ref.data(), ref.size(), encoded.data(), session.data());
    CHECK(ours == ref);
}

TEST_CASE("contexts are domain separated") {
    const Keystream ks(testing::counting_key(), Nonce{});
    std::set<std::vector<std::uint8_t>> seen;
    for (auto label : {StreamLabel::Substitution, StreamLabel::Permutation, StreamLabel::Weights})
        for (std::uint16_t round : {1, 2})
            for (std::uint8_t ch : {0, 1})
                for (std::uint32_t block : {0u, 1u, 1000u}) {
                    auto r = ks.stream({label, round, ch, block});
                    std::vector<std::uint8_t> head(32);
                    r.read(head);
                    seen.insert(head);
                }
    CHECK(seen.size() == 3 * 2 * 2 * 3);
}

TEST_CASE("reader: subkeys are 16 little-endian bytes, uniform_below stays in range") {
    const Keystream ks(testing::counting_key(), Nonce{1});
    auto a = ks.stream({});
    auto b = ks.stream({});
    std::array<std::uint8_t, 16> raw;
    a.read(raw);
    unsigned __int128 v = 0;
    for (int i = 15; i >= 0; --i) v = (v << 8) | raw[i];
    CHECK(b.next_subkey().value == v);

    auto c = ks.stream({StreamLabel::Permutation, 1, 0, 0});
    std::vector<int> hits(7, 0);
    for (int i = 0; i < 7000; ++i) {
        const auto x = c.uniform_below(7);
        REQUIRE(x < 7);
        ++hits[x];
    }
    for (int h : hits) CHECK(h > 800);
    CHECK(c.uniform_below(1) == 0);
}

TEST_CASE("hex helpers") {
    const std::array<std::uint8_t, 3> bytes{0x00, 0xab, 0xff};
    CHECK(to_hex(bytes) == "00abff");
    std::array<std::uint8_t, 3> back{};
    CHECK(from_hex("00ABff", back));
    CHECK(back == bytes);
    CHECK_FALSE(from_hex("00ab", back));
    CHECK_FALSE(from_hex("00abzz", back));
}
