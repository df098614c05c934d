#pragma once
#include <vector>

#include "canonforge/kernel.hpp"

namespace cf {

// Weighted nodes with int_a^b K(w)^power h(w) dw ~ sum_i wk[i] h(w[i]) for smooth h.
// Pieces are split at every log n and at the caller's breaks (kinks of h); the
// term singular at a piece start is integrated with a Gauss-Jacobi weight and
// the remaining terms with Gauss-Legendre panels graded towards the nearest
// singular point on the left.
struct KQuad {
  std::vector<double> w, wk;
  std::size_t size() const { return w.size(); }
};

KQuad kernel_quadrature(const KernelFunction& K, double a, double b, std::vector<double> breaks, int nodes,
                        int power = 1);

// Gauss-Legendre on [a, b] graded geometrically away from a singular point s <= a.
void graded_gauss(double a, double b, double s, int nodes, std::vector<double>& x, std::vector<double>& w);

}  // namespace cf
