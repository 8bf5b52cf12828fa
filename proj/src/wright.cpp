#include "fracstab/wright.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fracstab/gammafun.hpp"

namespace fracstab::specfun {

double wright_psi(double alpha, double s, const WrightParams& params) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw DomainError("wright_psi: alpha must lie in (0,1]");
    if (!(s >= 0.0)) throw DomainError("wright_psi: s must be >= 0");
    // the alpha -> 1 limit is a unit point mass at s = 1; as a density it
    // reads 0 everywhere, callers integrate the atom themselves
    if (alpha == 1.0) return 0.0;

    // The alternating terms grow to ~exp(c*s^2) before the factorial wins, so
    // the accumulation runs in long double to push the cancellation wall out.
    const long double eps = std::numeric_limits<long double>::epsilon();
    long double sum = 0.0L, comp = 0.0L;
    long double maxmag = 0.0L;
    long double term_base = 1.0L; // (-s)^n / n!
    int decayed = 0;

    for (int n = 0; n <= params.truncation_terms; ++n) {
        const long double x = -(long double)alpha * n + 1.0L - (long double)alpha;
        // reflected 1/Gamma leaves long double range well past any term that
        // can still matter; the decay rule below has always fired by here
        if (x < -1700.0L) break;
        const long double coeff = detail::rgamma_ld(x);
        const long double term = term_base * coeff;
        if (!std::isfinite((double)term)) return 0.0; // far past cancellation point

        const long double y = term - comp;
        const long double t = sum + y;
        comp = (t - sum) - y;
        sum = t;

        const long double tm = fabsl(term);
        maxmag = std::max({maxmag, tm, fabsl(sum)});

        // cancellation floor already exceeds any admissible density value:
        // the result will clamp to 0, stop burning terms
        if (maxmag > 1e18L) return 0.0;

        // tail control: past the factorial turnover (n > s) the term magnitudes
        // decay monotonically apart from exact Gamma-pole zeros; stop once a
        // few consecutive terms sit below the noise-aware threshold
        const long double threshold =
            1e-21L * std::max(1.0L, fabsl(sum)) + 0.25L * eps * maxmag;
        if (n > (int)s + 2 && tm <= threshold) {
            if (++decayed >= 3) break;
        } else {
            decayed = 0;
        }
        if (n == params.truncation_terms)
            throw NonConvergence("wright_psi: truncation_terms reached before tail control");

        term_base *= -(long double)s / (long double)(n + 1);
    }

    // observed summation noise runs one to two decades above eps*maxmag; the
    // wide margin trades a sliver of the resolvable range for never returning
    // cancellation garbage as a density value
    const long double cancel = 64.0L * eps * maxmag;
    if (fabsl(sum) <= cancel) return 0.0; // value below noise floor
    if (sum < 0.0L && sum >= -8.0L * cancel) return 0.0; // tiny negative roundoff
    return (double)sum;
}

} // namespace fracstab::specfun
