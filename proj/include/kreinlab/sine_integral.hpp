#pragma once

namespace kreinlab {

// Si(x) = int_0^x sin(t)/t dt, extended oddly to x < 0.
//
// Power series below the crossover, complex exponential-integral continued
// fraction (modified Lentz) above it; absolute error stays below 1e-12
// over the whole working range and Si(x) -> pi/2 from the asymptotic side.
double sine_integral(double x);

}  // namespace kreinlab
