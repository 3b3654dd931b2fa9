#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace hb {

// Counter-based generator: a Weyl sequence pushed through the splitmix64
// finalizer. The draw at position k depends only on (seed, stream, k), so
// identical seeds reproduce identical streams on every platform, and
// substreams from one seed do not overlap in practice.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next_u64();
    double uniform();                      // [0, 1), 53-bit resolution
    double uniform(double lo, double hi);
    std::uint64_t below(std::uint64_t n);  // [0, n), rejection-sampled

private:
    std::uint64_t counter_ = 0;
    std::uint64_t increment_ = 0;
};

// FNV-1a over raw bytes; used to derive per-run seeds from names.
std::uint64_t hash64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ull);
std::uint64_t hash64(std::uint64_t value, std::uint64_t h = 0xcbf29ce484222325ull);

// Fisher-Yates permutation of 0..n-1.
std::vector<std::size_t> shuffled_indices(std::size_t n, Rng& rng);

}  // namespace hb
