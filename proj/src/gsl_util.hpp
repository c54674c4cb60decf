#pragma once

#include <gsl/gsl_errno.h>

namespace dnls::detail {

// GSL aborts on errors by default; we check return codes instead.
inline void quiet_gsl() {
    static const bool once = [] {
        gsl_set_error_handler_off();
        return true;
    }();
    (void)once;
}

}  // namespace dnls::detail
