#pragma once

#include <cstdint>
#include <random>

#include "qbm/phase_space.hpp"

namespace qbm {

// Reproducible generator: mt19937_64 with a fixed bits-to-double mapping,
// so draws do not depend on the standard library's distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform();  // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

Matrix vacuum_covariance(const PhaseSpaceLayout& layout);
Matrix thermal_covariance(const PhaseSpaceLayout& layout, double nu);
Matrix two_mode_squeezed_covariance(double r);
Matrix factorized_squeezed_covariance(double r1, double r2);

// Symplectic building blocks acting on the interleaved layout.
Matrix rotation(const PhaseSpaceLayout& layout, int r, double phi);
Matrix single_mode_squeezer(const PhaseSpaceLayout& layout, int r, double s);
Matrix beam_splitter(const PhaseSpaceLayout& layout, int r, int q, double theta);
Matrix two_mode_squeezer(const PhaseSpaceLayout& layout, int r, int q, double s);

// Random symplectic matrix composed of rotations, beam splitters and one- and
// two-mode squeezers with squeeze parameters in [0, max_squeeze].
Matrix random_symplectic(const PhaseSpaceLayout& layout, Rng& rng,
                         double max_squeeze = 1.5);

// (1/2) S S^T for a random symplectic S.
Matrix random_pure_covariance(const PhaseSpaceLayout& layout, Rng& rng,
                              double max_squeeze = 1.5);

// Direct sum of independent single-oscillator pure states.
Matrix random_factorized_pure_covariance(const PhaseSpaceLayout& layout,
                                         Rng& rng, double max_squeeze = 1.5);

}  // namespace qbm
