#pragma once

// Seeded samplers for the parametric joint models.
//
// Randomness comes from Philox4x32-10 keyed by the seed; rows are generated
// in blocks of kBlockRows and block b draws from stream b only, so output is
// identical for any thread count.

#include <array>
#include <cstddef>
#include <cstdint>

#include "comodep/model.hpp"

namespace comodep::simulate {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

// Sequential view of one (seed, stream) pair.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream);

    std::uint32_t next_u32();
    // Uniform on the open interval (0, 1) with 53 random bits.
    double uniform();
    // Standard normal by inversion.
    double normal();

private:
    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    std::size_t used_ = 4;
};

inline constexpr std::size_t kBlockRows = 4096;

struct SampleStats {
    SampleMatrix sample;
    // Candidate points drawn; equals rows unless rejection sampling was used.
    std::size_t proposals = 0;
};

// n rows of the model. Samplable: CopulaModel (any copula; Gaussian copulas
// through their factor) and GaussianJoint. ParetoII3 throws
// ModelNotSamplable.
SampleMatrix sample(const JointModel& model, std::size_t n, std::uint64_t seed);
SampleStats sample_with_stats(const JointModel& model, std::size_t n, std::uint64_t seed);

// Conditional inverse of the FGM copula: the u2 with dC/du1 (u1, u2) = w.
double fgm2_conditional_inverse(double alpha, double u1, double w);

}  // namespace comodep::simulate
