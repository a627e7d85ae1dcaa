#pragma once

// Multiprecision scalar types used where double precision is not enough:
// companion-matrix eigenvalues of polynomials with clustered roots and
// evaluation of the partition-function ratio next to high-order zeros.

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace lyzero::detail {

template <unsigned Digits>
using ExtendedFloat = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<Digits>,
    boost::multiprecision::et_off>;

using Extended = ExtendedFloat<100>;

}  // namespace lyzero::detail
