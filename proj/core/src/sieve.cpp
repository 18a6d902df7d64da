#include "circlelab/sieve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <mutex>
#include <stdexcept>

#include "circlelab/parallel.hpp"

namespace circlelab::sieve {

namespace {

std::mutex g_cache_mutex;
std::string g_cache_dir;

// simple odd-only sieve used for base primes up to sqrt(limit)
std::vector<std::uint64_t> small_primes(std::uint64_t limit) {
    std::vector<std::uint64_t> out;
    if (limit < 2) return out;
    std::vector<std::uint8_t> comp(limit + 1, 0);
    for (std::uint64_t i = 2; i * i <= limit; ++i)
        if (!comp[i])
            for (std::uint64_t j = i * i; j <= limit; j += i) comp[j] = 1;
    for (std::uint64_t i = 2; i <= limit; ++i)
        if (!comp[i]) out.push_back(i);
    return out;
}

std::uint64_t isqrt(std::uint64_t n) { return nth_root_floor(n, 2); }

PrimeTable sieve_primes_impl(std::uint64_t limit, std::uint64_t segment_bits) {
    const auto base = small_primes(isqrt(limit));

    // one bit per odd number; segment s covers [seg_lo(s), seg_lo(s) + span)
    const std::uint64_t span = 2 * segment_bits;
    const std::uint64_t segments = (limit < 3) ? 0 : (limit - 3) / span + 1;

    std::vector<std::vector<std::uint64_t>> per_segment(segments);
    parallel_chunks(segments, 1, [&](std::size_t s, std::uint64_t, std::uint64_t) {
        const std::uint64_t lo = 3 + s * span;                       // odd
        const std::uint64_t hi = std::min(lo + span - 1, limit);     // inclusive
        const std::uint64_t nbits = (hi - lo) / 2 + 1;
        std::vector<std::uint64_t> comp((nbits + 63) / 64, 0);       // 1 = composite
        for (std::uint64_t p : base) {
            if (p == 2) continue;
            if (p * p > hi) break;
            std::uint64_t start = std::max(p * p, ((lo + p - 1) / p) * p);
            if ((start & 1) == 0) start += p;
            for (std::uint64_t m = start; m <= hi; m += 2 * p) {
                const std::uint64_t bit = (m - lo) / 2;
                comp[bit >> 6] |= 1ULL << (bit & 63);
            }
        }
        auto& out = per_segment[s];
        for (std::uint64_t i = 0; i < nbits; ++i)
            if (!((comp[i >> 6] >> (i & 63)) & 1)) out.push_back(lo + 2 * i);
    });

    PrimeTable t;
    t.limit = limit;
    std::size_t total = 1;
    for (const auto& v : per_segment) total += v.size();
    t.primes.reserve(total);
    t.primes.push_back(2);
    for (const auto& v : per_segment) t.primes.insert(t.primes.end(), v.begin(), v.end());
    t.logs.resize(t.primes.size());
    parallel_chunks(t.primes.size(), 4096, [&](std::size_t, std::uint64_t b, std::uint64_t e) {
        for (std::uint64_t i = b; i < e; ++i) t.logs[i] = std::log(static_cast<double>(t.primes[i]));
    });
    return t;
}

}  // namespace

std::uint64_t nth_root_floor(std::uint64_t x, unsigned ell) {
    if (ell == 0) throw std::domain_error("nth_root_floor: ell must be >= 1");
    if (ell == 1 || x < 2) return x;
    if (ell >= 64) return 1;
    std::uint64_t r = static_cast<std::uint64_t>(std::pow(static_cast<double>(x), 1.0 / ell));
    // Newton-style correction around the floating seed, then verify
    auto pow_le = [&](std::uint64_t b) {  // b^ell <= x without overflow
        unsigned __int128 acc = 1;
        for (unsigned i = 0; i < ell; ++i) {
            acc *= b;
            if (acc > x) return false;
        }
        return true;
    };
    while (r > 1 && !pow_le(r)) --r;
    while (pow_le(r + 1)) ++r;
    return r;
}

std::uint64_t checked_pow(std::uint64_t base, unsigned ell) {
    if (ell == 0) return 1;
    unsigned __int128 acc = 1;
    for (unsigned i = 0; i < ell; ++i) {
        acc *= base;
        if (acc > UINT64_MAX) throw std::overflow_error("checked_pow: p^ell exceeds 64 bits");
    }
    return static_cast<std::uint64_t>(acc);
}

PrimeTable sieve_primes(std::uint64_t limit, std::uint64_t segment_bits) {
    if (limit < 2 || limit > kSieveLimitCeiling)
        throw std::out_of_range("sieve_primes: limit must lie in [2, 2^40]");
    if (segment_bits < 64) segment_bits = 64;

    const std::string dir = cache_dir();
    if (dir.empty()) return sieve_primes_impl(limit, segment_bits);

    const std::string path = dir + "/primes_" + std::to_string(limit) + ".clpt";
    if (auto cached = load_prime_cache(path, limit)) return std::move(*cached);
    PrimeTable t = sieve_primes_impl(limit, segment_bits);
    try {
        std::filesystem::create_directories(dir);
        save_prime_cache(t, path);
    } catch (const std::exception&) {
        // cache is best-effort; results never depend on it
    }
    return t;
}

PrimePowerTable prime_powers_in(unsigned ell, std::uint64_t lower, std::uint64_t upper) {
    if (ell < 1) throw std::domain_error("prime_powers_in: ell must be >= 1");
    if (lower < 1 || lower > upper) throw std::out_of_range("prime_powers_in: need 1 <= lower <= upper");

    PrimePowerTable t;
    t.ell = ell;
    t.lower = lower;
    t.upper = upper;
    const std::uint64_t pmax = nth_root_floor(upper, ell);
    if (pmax < 2) return t;
    const PrimeTable primes = sieve_primes(pmax);
    t.entries.reserve(primes.primes.size());
    for (std::size_t i = 0; i < primes.primes.size(); ++i) {
        const std::uint64_t q = checked_pow(primes.primes[i], ell);
        if (q >= lower && q <= upper) t.entries.push_back({q, primes.logs[i]});
    }
    return t;
}

MangoldtTable mangoldt_support(unsigned ell, std::uint64_t upper) {
    if (ell < 1) throw std::domain_error("mangoldt_support: ell must be >= 1");
    if (upper < 2) throw std::out_of_range("mangoldt_support: upper must be >= 2");

    MangoldtTable t;
    t.ell = ell;
    t.upper = upper;
    const std::uint64_t mmax = nth_root_floor(upper, ell);
    if (mmax < 2) return t;
    const PrimeTable primes = sieve_primes(mmax);
    for (std::size_t i = 0; i < primes.primes.size(); ++i) {
        const std::uint64_t p = primes.primes[i];
        // m = p, p^2, p^3, ... while m^ell stays within range
        for (std::uint64_t m = p;; ) {
            t.entries.push_back({checked_pow(m, ell), primes.logs[i]});
            if (m > mmax / p) break;
            m *= p;
        }
    }
    std::sort(t.entries.begin(), t.entries.end(),
              [](const MangoldtEntry& a, const MangoldtEntry& b) { return a.q < b.q; });
    return t;
}

std::uint64_t provenance_hash(const PrimePowerTable& t) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xff;
            h *= 1099511628211ULL;
        }
    };
    mix(t.ell);
    mix(t.lower);
    mix(t.upper);
    mix(t.entries.size());
    for (const auto& e : t.entries) mix(e.q);
    return h;
}

namespace {

void put_u32(std::FILE* f, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    std::fwrite(b, 1, 4, f);
}
void put_u64(std::FILE* f, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    std::fwrite(b, 1, 8, f);
}
bool get_u32(std::FILE* f, std::uint32_t& v) {
    unsigned char b[4];
    if (std::fread(b, 1, 4, f) != 4) return false;
    v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
    return true;
}
bool get_u64(std::FILE* f, std::uint64_t& v) {
    unsigned char b[8];
    if (std::fread(b, 1, 8, f) != 8) return false;
    v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return true;
}

constexpr char kMagic[4] = {'C', 'L', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

void save_prime_cache(const PrimeTable& t, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("save_prime_cache: cannot open " + path);
    std::fwrite(kMagic, 1, 4, f);
    put_u32(f, kVersion);
    put_u64(f, t.limit);
    put_u64(f, t.primes.size());
    std::uint64_t prev = 0;
    for (std::uint64_t p : t.primes) {
        std::uint64_t gap = p - prev;
        prev = p;
        do {
            unsigned char byte = gap & 0x7f;
            gap >>= 7;
            if (gap) byte |= 0x80;
            std::fputc(byte, f);
        } while (gap);
    }
    std::fclose(f);
}

std::optional<PrimeTable> load_prime_cache(const std::string& path, std::uint64_t expected_limit) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) return std::nullopt;
    auto fail = [&]() -> std::optional<PrimeTable> {
        std::fclose(f);
        return std::nullopt;
    };
    char magic[4];
    if (std::fread(magic, 1, 4, f) != 4 || std::memcmp(magic, kMagic, 4) != 0) return fail();
    std::uint32_t version;
    std::uint64_t limit, count;
    if (!get_u32(f, version) || version != kVersion) return fail();
    if (!get_u64(f, limit) || limit != expected_limit) return fail();
    if (!get_u64(f, count)) return fail();

    PrimeTable t;
    t.limit = limit;
    t.primes.reserve(count);
    std::uint64_t prev = 0;
    for (std::uint64_t i = 0; i < count; ++i) {
        std::uint64_t gap = 0;
        int shift = 0;
        for (;;) {
            const int c = std::fgetc(f);
            if (c == EOF || shift > 63) return fail();
            gap |= static_cast<std::uint64_t>(c & 0x7f) << shift;
            if (!(c & 0x80)) break;
            shift += 7;
        }
        const std::uint64_t p = prev + gap;
        if (gap == 0 || p > limit) return fail();
        t.primes.push_back(p);
        prev = p;
    }
    if (std::fgetc(f) != EOF) return fail();
    std::fclose(f);
    t.logs.resize(t.primes.size());
    for (std::size_t i = 0; i < t.primes.size(); ++i)
        t.logs[i] = std::log(static_cast<double>(t.primes[i]));
    return t;
}

void set_cache_dir(const std::string& dir) {
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    g_cache_dir = dir;
}

std::string cache_dir() {
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    return g_cache_dir;
}

}  // namespace circlelab::sieve
