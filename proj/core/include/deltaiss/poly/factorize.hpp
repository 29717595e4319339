#pragma once

#include "deltaiss/poly/dictionary.hpp"
#include "deltaiss/poly/poly_matrix.hpp"

namespace deltaiss::poly {

// Builds the N x n polynomial matrix W with W(x) * x == F(x) exactly.
// Each dictionary entry is factored by its lowest-index variable with a
// positive exponent, so row k holds the quotient monomial in that variable's
// column and zeros elsewhere. Possible because every entry has degree >= 1;
// the result is one of many valid factorizations.
PolyMatrix factorize_dictionary(const MonomialDictionary& dict);

}  // namespace deltaiss::poly
