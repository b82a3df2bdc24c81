#ifndef DNMF_NNLS_HPP_
#define DNMF_NNLS_HPP_

#include "dnmf/matrix.hpp"

namespace dnmf {

struct NnlsConfig {
  int max_iters = 0;   // active-set passes; 0 means 3*p
  double tol = 1e-10;  // KKT tolerance on the gradient
};

// min_{x >= 0} |M x - b|_2 by the Lawson-Hanson active-set method. M may have
// entries of any sign. Throws IterationLimitError (carrying the best iterate)
// if the active set does not settle within the iteration budget.
Vector nnls_vector(const Matrix& m, const Vector& b, const NnlsConfig& cfg = {});

// Row i of the result solves min_{w >= 0} |H' w - V[i,:]'|_2; the rows are
// independent NNLS problems. Throws DegenerateDictionaryError if a row of H
// is all zeros.
Matrix estimate_w(const Matrix& v, const Matrix& h, const NnlsConfig& cfg = {});

}  // namespace dnmf

#endif  // DNMF_NNLS_HPP_
