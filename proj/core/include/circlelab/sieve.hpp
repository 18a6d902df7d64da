#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace circlelab::sieve {

// Primes up to `limit` with their natural logs. Immutable after
// construction and safe to share across threads.
struct PrimeTable {
    std::uint64_t limit = 0;
    std::vector<std::uint64_t> primes;
    std::vector<double> logs;
};

struct PrimePowerEntry {
    std::uint64_t q;  // p^ell
    double logp;
};

// Ascending (q = p^ell, log p) for primes p with lower <= p^ell <= upper.
struct PrimePowerTable {
    unsigned ell = 1;
    std::uint64_t lower = 0, upper = 0;
    std::vector<PrimePowerEntry> entries;
};

struct MangoldtEntry {
    std::uint64_t q;  // m^ell for a prime power m
    double lambda;    // Lambda(m) = log p when m = p^j
};

// Support of Lambda carried to the ell-th power: ascending (m^ell, Lambda(m))
// over all prime powers m with m^ell <= upper.
struct MangoldtTable {
    unsigned ell = 1;
    std::uint64_t upper = 0;
    std::vector<MangoldtEntry> entries;
};

inline constexpr std::uint64_t kSieveLimitCeiling = 1ULL << 40;
inline constexpr std::uint64_t kDefaultSegmentBits = 1ULL << 20;  // ~L2-sized segments

// Segmented bit sieve. Segments may be sieved in parallel; the output is an
// ascending merge in segment order, identical for every thread count.
PrimeTable sieve_primes(std::uint64_t limit, std::uint64_t segment_bits = kDefaultSegmentBits);

PrimePowerTable prime_powers_in(unsigned ell, std::uint64_t lower, std::uint64_t upper);

MangoldtTable mangoldt_support(unsigned ell, std::uint64_t upper);

// floor(x^(1/ell)): floating seed, integer Newton correction, verified by
// multiplication (plain floor(pow(...)) is off-by-one near perfect powers)
std::uint64_t nth_root_floor(std::uint64_t x, unsigned ell);

// base^ell with overflow detection; throws std::overflow_error rather than
// wrapping
std::uint64_t checked_pow(std::uint64_t base, unsigned ell);

// FNV-1a over the structural content; used as a provenance stamp in exports
std::uint64_t provenance_hash(const PrimePowerTable& t);

// -------------------------------------------------------------------
// Binary prime cache. Layout (little-endian):
//   magic   "CLPT" (4 bytes)
//   version u32   (currently 1)
//   limit   u64
//   count   u64
//   payload: count varint (LEB128) gaps; first gap is from 0, i.e. "2"
// A load validates magic/version/limit, decodes the full stream, and
// checks count, monotonicity and the limit bound before accepting.
// -------------------------------------------------------------------
void save_prime_cache(const PrimeTable& t, const std::string& path);
std::optional<PrimeTable> load_prime_cache(const std::string& path, std::uint64_t expected_limit);

// Process-wide cache directory ("" disables caching). When set, sieve_primes
// serves repeat limits from disk; a failed validation falls back to sieving
// and rewrites the entry.
void set_cache_dir(const std::string& dir);
std::string cache_dir();

}  // namespace circlelab::sieve
