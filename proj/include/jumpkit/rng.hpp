#ifndef JUMPKIT_RNG_HPP
#define JUMPKIT_RNG_HPP

// Seeded RNG stream and the ensemble runner. Every stochastic result in the
// library is a pure function of (inputs, seed); ensembles fan out over worker
// threads but results are indexed by seed, never by completion order.

#include <cstdint>
#include <cstdlib>
#include <random>
#include <thread>
#include <vector>

namespace jumpkit {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits; identical across platforms.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    std::uint64_t seed() const { return seed_; }

  private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
};

// Worker count: min(hardware, JUMPKIT_THREADS if set, cap if nonzero).
inline unsigned worker_count(unsigned cap = 0) {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("JUMPKIT_THREADS")) {
        char* end = nullptr;
        unsigned long parsed = std::strtoul(env, &end, 10);
        if (end != env && parsed >= 1) n = std::min<unsigned long>(n, parsed);
    }
    if (cap > 0) n = std::min(n, cap);
    return n;
}

// Runs fn(i) for i in [0, n) on worker threads with a static block partition,
// so any given index always computes the same work regardless of scheduling.
template <class Fn>
void parallel_for_index(std::size_t n, Fn&& fn, unsigned threads = 0) {
    unsigned workers = worker_count(threads);
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        std::size_t lo = static_cast<std::size_t>(w) * chunk;
        std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace jumpkit

#endif
