#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace floquet {

/// Base class for all engine failures. Data-level problems (invalid
/// coefficient sets) are reported through ValidationReport instead.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Step control could not reach the requested tolerance.
class IntegratorFailure : public Error {
public:
    IntegratorFailure(const std::string& what, int segment_index, double x_lo, double x_hi)
        : Error(what), segment_index(segment_index), x_lo(x_lo), x_hi(x_hi) {}
    int segment_index;
    double x_lo;
    double x_hi;
};

/// A segment's weight form changes sign strictly inside the segment;
/// the data must be re-segmented at the sign change.
class UnresolvableSign : public Error {
public:
    UnresolvableSign(const std::string& what, int segment_index)
        : Error(what), segment_index(segment_index) {}
    int segment_index;
};

/// Contour counts disagree across refinement of a search box.
class BoxCountUnstable : public Error {
public:
    BoxCountUnstable(const std::string& what, double re_lo, double re_hi, double im_lo, double im_hi)
        : Error(what), re_lo(re_lo), re_hi(re_hi), im_lo(im_lo), im_hi(im_hi) {}
    double re_lo, re_hi, im_lo, im_hi;
};

class MaxRootsExceeded : public Error {
public:
    using Error::Error;
};

/// The verification grid found spectrum not covered by any traced curve.
class SeedExhaustion : public Error {
public:
    SeedExhaustion(const std::string& what, std::vector<std::complex<double>> uncovered)
        : Error(what), uncovered(std::move(uncovered)) {}
    std::vector<std::complex<double>> uncovered;
};

/// sign_type was asked about a point with D outside [-2, 2].
class NotSpectral : public Error {
public:
    using Error::Error;
};

/// |Ddot| is below the decision threshold; use critical_points instead.
class NearCritical : public Error {
public:
    using Error::Error;
};

/// No spectral curve adjacent to the critical point could be continued.
class CurveMissing : public Error {
public:
    using Error::Error;
};

/// Monodromy eigenvector numerically ambiguous (multiplicity > 1).
class DegenerateEigenvector : public Error {
public:
    using Error::Error;
};

/// 2 cos z - D(lambda) vanishes; the resolvent does not exist there.
class ResolventPole : public Error {
public:
    using Error::Error;
};

}  // namespace floquet
