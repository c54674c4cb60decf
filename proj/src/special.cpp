#include <gsl/gsl_errno.h>
#include <gsl/gsl_fit.h>
#include <gsl/gsl_sf_gamma.h>

#include <cmath>
#include <vector>

#include "dnls/numerics.hpp"
#include "gsl_util.hpp"

namespace dnls {

cplx log_gamma(cplx w) {
    if (w.imag() == 0.0 && w.real() <= 0.0 && w.real() == std::floor(w.real()))
        throw numerical_error("gamma pole");
    detail::quiet_gsl();
    gsl_sf_result lnr, arg;
    const int status = gsl_sf_lngamma_complex_e(w.real(), w.imag(), &lnr, &arg);
    if (status != GSL_SUCCESS) throw numerical_error("log_gamma failed: " + std::string(gsl_strerror(status)));
    return {lnr.val, arg.val};
}

PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& samples) {
    if (samples.size() < 2) throw input_error("degenerate fit input: need at least 2 samples");
    std::vector<double> lt, le;
    for (const auto& [t, e] : samples) {
        if (!(t > 0.0) || !(e > 0.0)) throw input_error("degenerate fit input: nonpositive value");
        lt.push_back(std::log(t));
        le.push_back(std::log(e));
    }
    double c0, c1, cov00, cov01, cov11, sumsq;
    gsl_fit_linear(lt.data(), 1, le.data(), 1, lt.size(), &c0, &c1, &cov00, &cov01, &cov11, &sumsq);
    if (!std::isfinite(c0) || !std::isfinite(c1))
        throw input_error("degenerate fit input: all t values coincide");
    return {std::exp(c0), -c1};
}

}  // namespace dnls
