#pragma once

namespace abscompat {

// Default thresholds. Every operation that compares against a tolerance takes
// a Tolerances argument so callers (and the CLI --tol-* flags) can override.
struct Tolerances {
  double herm = 1e-10;     // ||H - H*||_max
  double unit = 1e-10;     // ||U*U - I||_op
  double proj = 1e-10;     // ||P^2 - P||_op
  double spec = 1e-9;      // spectral distance to 0 or 1
  double eig = 1e-10;      // eigen-reconstruction, relative to max(1, ||H||)
  double cluster = 1e-8;   // eigenvalues closer than this form one spectral block
  double compat = 1e-8;    // absolute-compatibility residual, commutators
  double block = 1e-8;     // five-block off-block mass
  double canon = 1e-7;     // canonical-form reconstruction
  double geo = 1e-9;       // Bloch-ball geometry
};

inline constexpr Tolerances kDefaultTolerances{};

}  // namespace abscompat
