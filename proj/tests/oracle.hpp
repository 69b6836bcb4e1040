#pragma once

#include <complex>
#include <vector>

// Brute-force reference implementations used to cross-check the engine.
// Everything here works on plain std::vector containers and builds full
// Hilbert-space matrices entry by entry from digit decompositions, with no
// shared code (and no shared stride bookkeeping) with the library under test.
namespace oracle {

using cxd = std::complex<double>;
using Vec = std::vector<cxd>;
using Mat = std::vector<std::vector<cxd>>;  // row major

Mat identity(long n);
Mat kron(const Mat& a, const Mat& b);
Vec kron_vec(const Vec& a, const Vec& b);
Mat outer(const Vec& a, const Vec& b);  // |a><b|
Vec mat_vec(const Mat& m, const Vec& v);
cxd inner(const Vec& a, const Vec& b);  // <a|b>
double norm2(const Vec& v);

// Digits of `index` in the mixed-radix system given by dims (first digit
// varies slowest), matching row-major amplitude ordering.
std::vector<int> digits(long index, const std::vector<int>& dims);

// Full-space operator applying `u` to the subsystems listed in `targets`
// (positions into dims, in the given order; the factor basis is row-major
// over that order) and the identity everywhere else.
Mat embed(const Mat& u, const std::vector<int>& targets, const std::vector<int>& dims);

// Reduced density matrix of the `keep` subsystems (row-major over `keep`).
Mat reduced(const Vec& psi, const std::vector<int>& keep, const std::vector<int>& dims);

}  // namespace oracle
