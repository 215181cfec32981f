#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace akf {

// Replicate streams are derived from (master seed, replicate index, lane), so
// distinct replicates are independent and any subset can be regenerated
// without touching the others. Lanes keep observation noise, state noise and
// the initial-value draw decoupled: toggling one does not perturb the rest.
enum class NoiseLane : std::uint32_t { observation = 0, state = 1, initial = 2 };

class NormalStream {
public:
    NormalStream(std::uint64_t master, std::uint64_t replicate, NoiseLane lane) {
        std::seed_seq seq{
            static_cast<std::uint32_t>(master & 0xffffffffu),
            static_cast<std::uint32_t>(master >> 32),
            static_cast<std::uint32_t>(replicate & 0xffffffffu),
            static_cast<std::uint32_t>(replicate >> 32),
            static_cast<std::uint32_t>(lane)};
        eng_.seed(seq);
    }

    // Standard normal via Box-Muller with an explicit spare, keeping the
    // draw sequence identical across standard libraries.
    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1, u2;
        do {
            u1 = uniform01();
        } while (u1 <= 0.0);
        u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    double uniform01() { return std::ldexp(static_cast<double>(eng_() >> 11), -53); }

private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

struct SeedPolicy {
    std::uint64_t master = 0;
    NormalStream stream(std::uint64_t replicate, NoiseLane lane) const {
        return NormalStream(master, replicate, lane);
    }
};

}  // namespace akf
