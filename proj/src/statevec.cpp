#include "qadvlab/statevec.hpp"

#include <cmath>

namespace qadvlab::sv {

Gate1Q ry(double theta) {
    const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
    return {cplx(c, 0), cplx(-s, 0), cplx(s, 0), cplx(c, 0)};
}

Gate1Q rz(double theta) {
    return {std::polar(1.0, -theta / 2.0), cplx(0, 0), cplx(0, 0), std::polar(1.0, theta / 2.0)};
}

Gate1Q rot(double a, double b, double c) {
    const Gate1Q za = rz(a), yb = ry(b), zc = rz(c);
    // za * yb * zc with zc applied first; z-gates are diagonal.
    Gate1Q yz{yb[0] * zc[0], yb[1] * zc[3], yb[2] * zc[0], yb[3] * zc[3]};
    return {za[0] * yz[0], za[0] * yz[1], za[3] * yz[2], za[3] * yz[3]};
}

Gate1Q exp_iy(double x) {
    const double c = std::cos(x), s = std::sin(x);
    return {cplx(c, 0), cplx(-s, 0), cplx(s, 0), cplx(c, 0)};
}

Gate1Q exp_iz(double x) {
    return {std::polar(1.0, -x), cplx(0, 0), cplx(0, 0), std::polar(1.0, x)};
}

} // namespace qadvlab::sv
