#pragma once

#include "oscil/brackets.hpp"
#include "oscil/rat.hpp"

namespace oscil {

/// Conservative rational upper bound of sqrt(x), within 2^-bits of the root.
inline Rat sqrt_upper(const Rat& x, unsigned long bits = 64) {
    return root_bracket(x, 2, bits).hi;
}

/// Hoeffding half-width for the mean of n i.i.d. samples in [0, range]:
///   h = range * sqrt(ln(2/delta) / (2n)),
/// rounded up so the returned rational is a valid half-width at
/// confidence 1 - delta.
inline Rat hoeffding_halfwidth(const Rat& range, long n, const Rat& delta) {
    if (n < 1) throw input_error("hoeffding_halfwidth: n must be >= 1");
    if (!(delta > Rat(0) && delta < Rat(1)))
        throw input_error("hoeffding_halfwidth: delta must be in (0,1)");
    Rat log_hi = ln_bracket(Rat(2) / delta, Rat(1, 1000000)).hi;
    return range * sqrt_upper(log_hi / Rat(2 * n));
}

/// Bernoulli tally with its exact empirical fraction.
struct BernoulliEstimate {
    long hits = 0;
    long samples = 0;

    Rat fraction() const { return samples ? Rat(hits, samples) : Rat(0); }
    Rat ci_halfwidth(const Rat& delta = Rat(1, 1000000)) const {
        return hoeffding_halfwidth(Rat(1), samples, delta);
    }
};

}  // namespace oscil
