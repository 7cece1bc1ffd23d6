#include "cli.hpp"

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mftpe/collision.hpp"
#include "mftpe/combinatorics.hpp"
#include "mftpe/engine.hpp"
#include "mftpe/envelope.hpp"
#include "mftpe/error.hpp"
#include "mftpe/image.hpp"
#include "mftpe/keystream.hpp"
#include "mftpe/metrics.hpp"
#include "mftpe/png_io.hpp"
#include "mftpe/profile.hpp"

namespace mftpe::cli {

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SecretArgs {
    std::string key_hex, key_file, nonce_hex, nonce_file;
};

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    const auto e = s.find_last_not_of(" \t\r\n");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

// A file holds either hex text or the raw bytes.
template <std::size_t N>
std::array<std::uint8_t, N> load_secret(const std::string& hex, const std::string& file, const char* what) {
    std::array<std::uint8_t, N> out{};
    if (!hex.empty() && !file.empty()) throw UsageError(std::string("give either --") + what + " or --" + what + "-file");
    if (!hex.empty()) {
        if (!from_hex(hex, out)) throw UsageError(std::string("--") + what + " needs " + std::to_string(2 * N) + " hex digits");
        return out;
    }
    if (file.empty()) throw UsageError(std::string("missing --") + what + " or --" + what + "-file");
    const auto bytes = read_file(file);
    if (bytes.size() == N) {
        std::copy(bytes.begin(), bytes.end(), out.begin());
        return out;
    }
    const std::string text = trim(std::string(bytes.begin(), bytes.end()));
    if (!from_hex(text, out))
        throw Error(Errc::Io, file + ": expected " + std::to_string(N) + " raw bytes or " + std::to_string(2 * N) +
                                  " hex digits");
    return out;
}

void add_secret_options(CLI::App* cmd, SecretArgs& s, bool with_nonce) {
    cmd->add_option("--key", s.key_hex, "master key, 64 hex digits");
    cmd->add_option("--key-file", s.key_file, "file with the key (32 raw bytes or 64 hex digits)");
    if (with_nonce) {
        cmd->add_option("--nonce", s.nonce_hex, "public nonce, 32 hex digits");
        cmd->add_option("--nonce-file", s.nonce_file, "file with the nonce (16 raw bytes or 32 hex digits)");
    }
}

Weights parse_weights(const std::string& text) {
    Weights w{};
    std::stringstream ss(text);
    std::string part;
    std::size_t i = 0;
    while (std::getline(ss, part, ',')) {
        if (i >= 3) throw UsageError("--weights takes three values");
        try {
            std::size_t used = 0;
            const long v = std::stol(part, &used);
            if (used != part.size() || v < 1 || v > 255) throw UsageError("");
            w[i++] = static_cast<std::uint32_t>(v);
        } catch (const std::exception&) {
            throw UsageError("--weights values must be integers in [1, 255]");
        }
    }
    if (i != 3) throw UsageError("--weights takes three values");
    return w;
}

bool is_envelope(const std::vector<std::uint8_t>& bytes) {
    return bytes.size() >= 4 && bytes[0] == 'M' && bytes[1] == 'F' && bytes[2] == 'T' && bytes[3] == 'P';
}

void emit_json(const json& j, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << j.dump(2) << '\n';
        return;
    }
    const std::string text = j.dump(2) + "\n";
    write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

// ---------------------------------------------------------------------------
// golden

struct GoldenRow {
    std::string label;
    std::string expected;
    std::string actual;
    bool pass;
};

int run_golden(std::ostream& out) {
    // Two 6-pixel blocks, grouped row-major.
    const std::vector<std::vector<std::uint8_t>> blocks = {{25, 175, 163, 254, 51, 58}, {18, 199, 87, 85, 204, 173}};
    std::vector<GoldenRow> rows;
    auto check = [&](std::string label, const BigInt& expected, const BigInt& actual) {
        rows.push_back({std::move(label), expected.str(), actual.str(), expected == actual});
    };

    check("psi(d=255, s=2, n=3)", 6, psi(255, 2, 3));
    const BigInt pair_total = set_size_total(blocks, FactorProfile::sum_only(2));
    const BigInt range_total = set_size_total(blocks, FactorProfile::sum_range());
    const BigInt triple_total = set_size_total(blocks, FactorProfile::sum_only(3));
    check("sum-only n=2 total", 930, pair_total);
    check("sum-only n=3 total", 183366, triple_total);
    check("sum-range n=2 total", 642, range_total);
    check("sum-geomean n=3 total", 24, set_size_total(blocks, FactorProfile::sum_geo_mean()));

    const double reduction = 100.0 * (1.0 - static_cast<double>(range_total) / static_cast<double>(pair_total));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", reduction);
    rows.push_back({"sum-range reduction vs n=2", "30.9% +- 0.1", buf, std::fabs(reduction - 30.9) <= 0.1});

    const Weights weights{1, 2, 3};
    const BigInt weighted = set_size_total(blocks, FactorProfile::sum_weighted_mean(weights));
    rows.push_back({"sum-weighted n=3 total, w=(1,2,3)", "<= " + triple_total.str(), weighted.str(),
                    weighted <= triple_total});

    bool all = true;
    std::size_t width = 0;
    for (const auto& r : rows) width = std::max(width, r.label.size());
    for (const auto& r : rows) {
        out << r.label << std::string(width - r.label.size() + 2, ' ') << "expected " << r.expected << "  got "
            << r.actual << "  " << (r.pass ? "ok" : "MISMATCH") << '\n';
        all = all && r.pass;
    }
    out << (all ? "PASS" : "FAIL") << '\n';
    return all ? kOk : kMismatch;
}

// ---------------------------------------------------------------------------

Image load_image_any(const std::string& path, std::optional<CiphertextEnvelope>* envelope = nullptr) {
    const auto bytes = read_file(path);
    if (is_envelope(bytes)) {
        auto env = CiphertextEnvelope::parse(bytes);
        Image img = env.image();
        if (envelope) *envelope = std::move(env);
        return img;
    }
    return decode_png(bytes);
}

json correlation_report(const Image& img, int samples, std::uint64_t seed) {
    json j = json::array();
    for (int c = 0; c < img.channels(); ++c) {
        json ch;
        ch["channel"] = c;
        for (auto dir : {Direction::Horizontal, Direction::Vertical, Direction::Diagonal}) {
            try {
                ch[direction_name(dir)] = adjacent_correlation(img, dir, c, samples, seed);
            } catch (const Error& e) {
                if (e.code() != Errc::DegenerateVariance) throw;
                ch[direction_name(dir)] = nullptr;
            }
        }
        j.push_back(ch);
    }
    return j;
}

json histogram_summary(const Image& img) {
    json j = json::array();
    for (const auto& h : histogram(img)) {
        // Chi-square distance from flat, a one-number uniformity summary.
        const double expected = static_cast<double>(img.width()) * img.height() / 256.0;
        double chi = 0;
        for (auto v : h) chi += (v - expected) * (v - expected) / expected;
        j.push_back({{"counts", h}, {"chi_square_vs_uniform", chi}});
    }
    return j;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multi-factor thumbnail-preserving image encryption", "mftpe"};
    app.set_version_flag("--version", "mftpe 1.0");
    bool gen_key = false, gen_nonce = false;
    app.add_flag("--gen-key", gen_key, "print a fresh random 256-bit key (hex) from the system entropy source");
    app.add_flag("--gen-nonce", gen_nonce, "print a fresh random 128-bit nonce (hex)");
    app.require_subcommand(0, 1);

    const std::string profile_help =
        "sum-only-2 | sum-only-3 | sum-geomean | sum-range | sum-weighted";

    // encrypt
    auto* enc = app.add_subcommand("encrypt", "encrypt a PNG into a .mftpe envelope");
    std::string enc_in, enc_out, enc_profile = "sum-range", enc_weights;
    int enc_block = CipherParams::kDefaultBlockSize, enc_rounds = CipherParams::kDefaultRounds;
    SecretArgs enc_secret;
    enc->add_option("--in", enc_in, "plaintext PNG (8-bit gray or RGB)")->required();
    enc->add_option("--out", enc_out, "output envelope")->required();
    enc->add_option("--profile", enc_profile, profile_help)->capture_default_str();
    enc->add_option("--block", enc_block, "block size B (must divide width and height)")->capture_default_str();
    enc->add_option("--rounds", enc_rounds, "rounds R >= 1")->capture_default_str();
    enc->add_option("--weights", enc_weights,
                    "sum-weighted only: w1,w2,w3 (default: derived from key and nonce, each in [1, 8])");
    add_secret_options(enc, enc_secret, true);

    // decrypt
    auto* dec = app.add_subcommand("decrypt", "decrypt a .mftpe envelope to PNG");
    std::string dec_in, dec_out;
    SecretArgs dec_secret;
    dec->add_option("--in", dec_in, "envelope")->required();
    dec->add_option("--out", dec_out, "output PNG")->required();
    add_secret_options(dec, dec_secret, false);

    // thumbnail
    auto* thumb = app.add_subcommand("thumbnail", "write the block-mean thumbnail and the secondary-factor image");
    std::string th_in, th_out, th_secondary, th_profile, th_weights;
    int th_block = 0;
    thumb->add_option("--in", th_in, "PNG or envelope")->required();
    thumb->add_option("--out", th_out, "thumbnail PNG")->required();
    thumb->add_option("--secondary-out", th_secondary, "secondary-factor PNG (profiles other than sum-only)");
    thumb->add_option("--block", th_block, "block size (default: the envelope's)");
    thumb->add_option("--profile", th_profile, "profile (default: the envelope's, else sum-only-2)");
    thumb->add_option("--weights", th_weights, "w1,w2,w3 for sum-weighted");

    // collide
    auto* col = app.add_subcommand("collide", "thumbnail collision probabilities as JSON");
    int col_d = 255, col_n = 0, col_m = 1;
    std::string col_mode = "pair", col_out;
    std::vector<long long> col_sums;
    bool col_oracle = false;
    col->add_option("--d", col_d, "maximum pixel value")->capture_default_str();
    col->add_option("--n", col_n, "pixels per block")->required();
    col->add_option("--m", col_m, "blocks per image")->capture_default_str();
    col->add_option("--mode", col_mode, "fixed | pair | triple")->capture_default_str();
    col->add_option("--sums", col_sums, "block sums: m for fixed, 2m for triple with two fixed images")
        ->delimiter(',');
    col->add_flag("--oracle", col_oracle, "also enumerate exhaustively (small instances)");
    col->add_option("--out", col_out, "write JSON here instead of stdout");

    // analyze
    auto* ana = app.add_subcommand("analyze", "histograms, adjacent correlation, PSNR and storage metrics");
    std::string an_in, an_cipher, an_decrypted, an_hist_csv, an_out;
    int an_samples = kDefaultCorrelationSamples, an_block = 0;
    std::uint64_t an_seed = 1;
    ana->add_option("--in", an_in, "plaintext PNG")->required();
    ana->add_option("--cipher", an_cipher, "ciphertext PNG or envelope");
    ana->add_option("--decrypted", an_decrypted, "decrypted PNG to compare by PSNR");
    ana->add_option("--block", an_block, "block size for the thumbnail check (default: the envelope's)");
    ana->add_option("--samples", an_samples, "correlation pairs")->capture_default_str();
    ana->add_option("--seed", an_seed, "sampling seed")->capture_default_str();
    ana->add_option("--hist-csv", an_hist_csv, "write plaintext (and ciphertext) histograms as CSV");
    ana->add_option("--out", an_out, "write JSON here instead of stdout");

    // noise
    auto* noi = app.add_subcommand("noise", "corrupt the image inside an envelope");
    std::string no_in, no_out, no_kind = "salt-pepper";
    double no_level = 0.01;
    std::uint64_t no_seed = 1;
    int no_block_index = 0;
    noi->add_option("--in", no_in, "envelope")->required();
    noi->add_option("--out", no_out, "output envelope")->required();
    noi->add_option("--kind", no_kind, "gaussian | salt-pepper | multiplicative | block")->capture_default_str();
    noi->add_option("--level", no_level,
                    "gaussian: sigma; salt-pepper: density; multiplicative: variance")
        ->capture_default_str();
    noi->add_option("--seed", no_seed, "noise seed")->capture_default_str();
    noi->add_option("--block-index", no_block_index, "kind=block: index of the channel-0 block to overwrite")
        ->capture_default_str();

    auto* gold = app.add_subcommand("golden", "replay the reference totals on the embedded two-block image");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (gen_key || gen_nonce) {
            std::random_device rd;
            auto fill = [&](std::span<std::uint8_t> b) {
                for (auto& x : b) x = static_cast<std::uint8_t>(rd());
            };
            if (gen_key) {
                MasterKey k;
                fill(k);
                out << to_hex(k) << '\n';
            }
            if (gen_nonce) {
                Nonce n;
                fill(n);
                out << to_hex(n) << '\n';
            }
            return kOk;
        }

        if (*enc) {
            const auto key = load_secret<32>(enc_secret.key_hex, enc_secret.key_file, "key");
            const auto nonce = load_secret<16>(enc_secret.nonce_hex, enc_secret.nonce_file, "nonce");
            Weights w = derive_weights(key, nonce);
            if (!enc_weights.empty()) {
                if (enc_profile != "sum-weighted") throw UsageError("--weights applies to sum-weighted only");
                w = parse_weights(enc_weights);
            }
            const auto profile = FactorProfile::from_name(enc_profile, w);
            if (!profile) throw UsageError("unknown profile '" + enc_profile + "'");
            const CipherParams params(*profile, enc_block, enc_rounds, key, nonce);
            const Image img = read_png(enc_in);
            const auto env = encrypt(img, params);
            write_file(enc_out, env.serialize());
            return kOk;
        }

        if (*dec) {
            const auto key = load_secret<32>(dec_secret.key_hex, dec_secret.key_file, "key");
            const auto env = CiphertextEnvelope::parse(read_file(dec_in));
            write_png(dec_out, decrypt(env, key));
            return kOk;
        }

        if (*thumb) {
            std::optional<CiphertextEnvelope> env;
            const Image img = load_image_any(th_in, &env);
            const int block = th_block ? th_block : env ? env->block_size : 0;
            if (block == 0) throw UsageError("--block is required for PNG input");
            Weights w{1, 1, 1};
            if (!th_weights.empty()) w = parse_weights(th_weights);
            else if (env && env->profile.has_weights()) w = env->profile.weights();
            std::optional<FactorProfile> profile;
            if (!th_profile.empty()) profile = FactorProfile::from_name(th_profile, w);
            else profile = env ? env->profile : FactorProfile::sum_only(2);
            if (!profile) throw UsageError("unknown profile '" + th_profile + "'");
            const auto ext = extended_thumbnail(img, block, *profile);
            write_png(th_out, ext.primary.as_image());
            if (!th_secondary.empty()) {
                if (profile->kind() == FactorKind::SumOnly)
                    throw UsageError("--secondary-out needs a profile with a secondary factor");
                write_png(th_secondary, render_secondary(ext, block));
            }
            out << json{{"width", ext.primary.width}, {"height", ext.primary.height},
                        {"channels", ext.primary.channels}, {"block", block}, {"profile", profile->name()}}
                       .dump()
                << '\n';
            return kOk;
        }

        if (*col) {
            const json report = collision_report(col_d, col_n, col_m, col_mode, col_sums, col_oracle);
            emit_json(report, col_out, out);
            return kOk;
        }

        if (*ana) {
            const Image plain = read_png(an_in);
            json report;
            report["plain"] = {{"width", plain.width()},
                               {"height", plain.height()},
                               {"channels", plain.channels()},
                               {"correlation", correlation_report(plain, an_samples, an_seed)},
                               {"histogram", histogram_summary(plain)}};
            std::vector<Histogram> hists = histogram(plain);
            if (!an_cipher.empty()) {
                std::optional<CiphertextEnvelope> env;
                const Image cipher = load_image_any(an_cipher, &env);
                if (cipher.width() != plain.width() || cipher.height() != plain.height() ||
                    cipher.channels() != plain.channels())
                    throw Error(Errc::DimensionMismatch, "ciphertext shape differs from plaintext");
                json c = {{"correlation", correlation_report(cipher, an_samples, an_seed)},
                          {"histogram", histogram_summary(cipher)},
                          {"storage_expansion", storage_expansion(plain, cipher)}};
                const int block = an_block ? an_block : env ? env->block_size : 0;
                if (block) c["thumbnail_preserved"] = thumbnail(plain, block).samples == thumbnail(cipher, block).samples;
                report["cipher"] = c;
                const auto ch = histogram(cipher);
                hists.insert(hists.end(), ch.begin(), ch.end());
            }
            if (!an_decrypted.empty()) {
                const double p = psnr(plain, read_png(an_decrypted));
                report["psnr_db"] = std::isinf(p) ? json("inf") : json(p);
            }
            if (!an_hist_csv.empty()) {
                std::ofstream f(an_hist_csv);
                if (!f) throw Error(Errc::Io, "cannot write " + an_hist_csv);
                write_histogram_csv(f, hists);
            }
            emit_json(report, an_out, out);
            return kOk;
        }

        if (*noi) {
            const auto env = CiphertextEnvelope::parse(read_file(no_in));
            Image img = env.image();
            if (no_kind == "block") {
                const BlockGrid grid = partition(img, env.block_size);
                if (no_block_index < 0 || no_block_index >= grid.blocks_per_channel())
                    throw UsageError("--block-index out of range");
                std::mt19937_64 rng(no_seed);
                std::vector<std::uint8_t> buf(grid.pixels_per_block());
                for (auto& v : buf) v = static_cast<std::uint8_t>(rng());
                write_block(img, grid, 0, no_block_index, buf);
            } else {
                NoiseSpec spec;
                spec.parameter = no_level;
                spec.seed = no_seed;
                if (no_kind == "gaussian") spec.kind = NoiseKind::Gaussian;
                else if (no_kind == "salt-pepper") spec.kind = NoiseKind::SaltPepper;
                else if (no_kind == "multiplicative") spec.kind = NoiseKind::Multiplicative;
                else throw UsageError("unknown noise kind '" + no_kind + "'");
                img = add_noise(img, spec);
            }
            write_file(no_out, env.with_image(img).serialize());
            return kOk;
        }

        if (*gold) return run_golden(out);

        out << app.help();
        return kUsage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        switch (e.code()) {
            case Errc::Io:
            case Errc::UnsupportedFormat:
            case Errc::MalformedEnvelope:
            case Errc::InvalidImage:
                return kIo;
            default:
                return kUsage;
        }
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kIo;
    }
}

}  // namespace mftpe::cli
