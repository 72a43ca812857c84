#include "vpfocus/mollifier.hpp"

#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace vpfocus {

double bump_moment()
{
    static const double moment = [] {
        auto radial = [](double u) { return u * u * bump_shape(u * u); };
        const double integral =
            boost::math::quadrature::gauss_kronrod<double, 61>::integrate(radial, 0.0, 1.0, 10, 1e-14);
        return 4.0 * std::numbers::pi * integral;
    }();
    return moment;
}

} // namespace vpfocus
