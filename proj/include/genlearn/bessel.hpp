#pragma once

namespace genlearn {

// Modified Bessel function of the second kind K_nu(x) for integer order.
// Negative orders are folded with K_{-nu} = K_nu. Requires x > 0.
double bessel_k(int nu, double x);

// t^power * K_order(t) for t >= 0. Uses the ascending series below
// t = 1e-4 so coincident points (t = 0) resolve to the finite limit when it
// exists; returns +inf when the product diverges at t = 0.
double power_bessel_k(int power, int order, double t);

}  // namespace genlearn
