#pragma once

// Clebsch-Gordan coefficients for integer angular momenta (Condon-Shortley phase).

namespace cavread {

/// <j1 m1; j2 m2 | J M>. Zero outside the selection rules; throws DomainError
/// for negative j.
double clebsch_gordan(int j1, int m1, int j2, int m2, int J, int M);

/// Dipole coupling <F m; 1 q | F' m'> between hyperfine sublevels.
double cg_coefficient(int F, int mF, int q, int Fp, int mFp);

}  // namespace cavread
