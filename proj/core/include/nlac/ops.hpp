#pragma once

#include "nlac/grid.hpp"
#include "nlac/kernel.hpp"

namespace nlac {

/// L_eta u, applied as the Fourier multiplier m_eta(k).
Field apply_nonlocal(const Field& field, const SymbolTable& table);

/// Spectral Laplacian (multiplier -|k|^2).
Field apply_laplacian(const Field& field);

/// E_eta(u) = 1/2 <L_eta u, u> = 1/2 (2pi)^-dim sum_k m_eta(k) |u_hat(k)|^2.
double nonlocal_energy(const Field& field, const SymbolTable& table);
double nonlocal_energy(const Spectrum& spectrum, const SymbolTable& table);

/// 1/2 ||grad u||^2 in L2.
double dirichlet_energy(const Field& field);
double dirichlet_energy(const Spectrum& spectrum);

/// ||L_eta u + Laplacian u||_L2, evaluated from the tabulated symbol deviation.
double consistency_residual(const Field& field, const SymbolTable& table);
double consistency_residual(const Spectrum& spectrum, const SymbolTable& table);

/// L2 projection onto trigonometric polynomials with every |k_i| <= cutoff.
/// Throws InvalidArgument if cutoff > N/2 or cutoff < 0.
Field project(const Field& field, int cutoff);

}  // namespace nlac
