#pragma once

#include "oscil/rat.hpp"

namespace oscil {

/// Integer 2x2 matrix ((x1, x2), (y1, y2)) with its exact determinant.
struct Mat2 {
    Int x1, x2, y1, y2;

    Int det() const { return x1 * y2 - x2 * y1; }
    Int abs_det() const {
        Int d = det();
        return d < 0 ? Int(-d) : d;
    }
    bool singular() const { return det() == 0; }
};

}  // namespace oscil
