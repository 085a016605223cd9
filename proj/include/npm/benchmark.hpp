#pragma once

#include "npm/iteration.hpp"
#include "npm/matrix.hpp"
#include "npm/stiefel.hpp"

namespace npm {

// Closed-form 3x3 test family
//
//           [ 1   1    2 ]
//   A(a) =  [ 0   a    1 ],   spectrum {1, a, -1},
//           [ 0   0   -1 ]
//
// with unit eigenvectors available analytically. The two unit-modulus
// eigenvalues tie at the top, so the dominant 2-subspace is well defined
// while no single dominant direction exists: the regime the subspace
// iteration experiments probe.

Matrix a_alpha(double alpha);

// Unit eigenvectors for eigenvalues 1, -1, and alpha respectively.
Vector psi1();
Vector psi2(double alpha);
Vector psi3(double alpha);

// Orthogonal projector onto span{psi1, psi2}, the dominant 2-subspace.
SubspaceProjector dominant_projector(double alpha);

// Start frames mixing all three eigendirections (so the dominant block of
// the eigen-expansion has full rank):
//   r=2: polar orthonormalization of [psi1+psi2+psi3, psi2+psi3]
//   r=1: normalized psi1+psi2+psi3
//   r=1 weak: normalized 0.1*psi1+psi2+psi3 (small loading on the
//             eigenvalue-1 direction; drives the oscillating scalar case)
StiefelFrame start_frame_r2(double alpha);
StiefelFrame start_frame_r1(double alpha);
StiefelFrame start_frame_r1_weak(double alpha);

}  // namespace npm
