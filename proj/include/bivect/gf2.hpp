#ifndef BIVECT_GF2_HPP
#define BIVECT_GF2_HPP

// Dense linear systems over GF(2) with infeasibility certificates.

#include <boost/dynamic_bitset.hpp>

#include <variant>
#include <vector>

namespace bivect::gf2 {

using Bits = boost::dynamic_bitset<>;

/// One equation: sum of the listed variables = rhs (mod 2).
struct Equation {
    std::vector<int> variables;
    bool rhs = false;
};

/// Rows of the left kernel combination: the listed equations add up to 0 = 1.
struct Certificate {
    std::vector<int> equations;
};

using Outcome = std::variant<Bits, Certificate>;

/// Gaussian elimination with row-combination tracking. Free variables are set
/// to zero, so the returned solution is deterministic.
Outcome solve(int num_variables, const std::vector<Equation>& equations);

/// Checks that the certificate's equations sum to zero on the left with an
/// odd right-hand side.
bool verify_certificate(int num_variables, const std::vector<Equation>& equations,
                        const Certificate& cert);

}  // namespace bivect::gf2

#endif  // BIVECT_GF2_HPP
