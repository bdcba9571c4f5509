#pragma once

// One-excitation model of the emitter -> cavity-1 -> cavity-2 chain.
//
// The excited manifold is spanned by (in this fixed order)
//   |e> = emitter excited, both cavities empty
//   |a> = one photon in cavity 1
//   |b> = one photon in cavity 2
// The shared ground state only collects population, so the density matrix is
// tracked on the 3x3 excited block and the ground population is 1 - trace.
//
// The block is stacked column-major: entry (row, col) -> index 3*col + row,
// which makes the equation of motion a 9x9 linear generator acting on vec(rho).

#include <Eigen/Dense>

#include "cascade/numerics.hpp"
#include "cascade/params.hpp"

namespace cascade {

inline constexpr int kDim = 3;      // excited-manifold dimension
inline constexpr int kVecDim = 9;   // flattened density block

// Flattened position of density-matrix entry (row, col).
constexpr int vec_index(int row, int col) { return kDim * col + row; }

// Convenient aliases for the tracked entries.
inline constexpr int kIdxEE = vec_index(0, 0);
inline constexpr int kIdxAA = vec_index(1, 1);
inline constexpr int kIdxBB = vec_index(2, 2);
inline constexpr int kIdxEA = vec_index(0, 1);
inline constexpr int kIdxEB = vec_index(0, 2);
inline constexpr int kIdxAB = vec_index(1, 2);
inline constexpr int kIdxBA = vec_index(2, 1);

// Coherent part: detuning on the emitter diagonal, nearest-neighbour couplings.
Eigen::Matrix3d build_hamiltonian(const SystemParams& p);

// The full 9x9 generator: commutator with the Hamiltonian plus the three decay
// channels (gamma, kappa1, kappa2) and pure dephasing of the emitter.
Eigen::Matrix<num::cplx, 9, 9> build_generator(const SystemParams& p);

struct LiouvillianDecomposition {
    Eigen::Matrix<num::cplx, 9, 9> generator;
    num::EigDecomposition eig;
};

// Generator plus its spectral decomposition. Throws DegenerateGenerator when
// the eigenbasis cannot reproduce the generator (callers then fall back to
// direct time stepping).
LiouvillianDecomposition build_liouvillian(const SystemParams& p);

} // namespace cascade
