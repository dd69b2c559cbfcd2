#pragma once

// Closed-form reference objects shared by the tests and the acceptance runner.

#include <cmath>
#include <random>
#include <vector>

#include "magpauli/field.hpp"
#include "magpauli/types.hpp"

namespace oracle {

using magpauli::cplx;
using magpauli::I;
using magpauli::PlanarPoint;

// f = sum_m c_m exp(i(mx x + my y)), 2pi-periodic
struct TrigSum {
  struct Mode {
    int mx, my;
    cplx c;
  };
  std::vector<Mode> modes;

  cplx operator()(PlanarPoint p) const {
    cplx s = 0.0;
    for (const auto& m : modes) s += m.c * std::exp(I * double(m.mx * p.x + m.my * p.y));
    return s;
  }
  cplx fx(PlanarPoint p) const {
    cplx s = 0.0;
    for (const auto& m : modes) s += I * double(m.mx) * m.c * std::exp(I * double(m.mx * p.x + m.my * p.y));
    return s;
  }
  cplx fy(PlanarPoint p) const {
    cplx s = 0.0;
    for (const auto& m : modes) s += I * double(m.my) * m.c * std::exp(I * double(m.mx * p.x + m.my * p.y));
    return s;
  }
  // d^ax/dx^ax d^ay/dy^ay as another sum
  TrigSum deriv(int ax, int ay) const {
    TrigSum t = *this;
    for (auto& m : t.modes) m.c *= std::pow(I * double(m.mx), ax) * std::pow(I * double(m.my), ay);
    return t;
  }
  cplx lap(PlanarPoint p) const {
    cplx s = 0.0;
    for (const auto& m : modes)
      s -= double(m.mx * m.mx + m.my * m.my) * m.c * std::exp(I * double(m.mx * p.x + m.my * p.y));
    return s;
  }
};

inline TrigSum random_trig(std::mt19937_64& rng, int nmodes = 4, int maxk = 3, bool real = false) {
  std::uniform_int_distribution<int> k(-maxk, maxk);
  std::normal_distribution<double> g(0.0, 0.3);
  TrigSum t;
  for (int i = 0; i < nmodes; ++i) {
    const int mx = k(rng), my = k(rng);
    const cplx c{g(rng), g(rng)};
    t.modes.push_back({mx, my, c});
    if (real) t.modes.push_back({-mx, -my, std::conj(c)});
  }
  if (real) t.modes.push_back({0, 0, g(rng)});
  return t;
}

// real nonvanishing 2pi-periodic c = 1 + sum (a e^{l zbar - conj(l) z} + c.c.), sum|a| < 0.45
inline magpauli::field::ExpField random_trig_field(std::mt19937_64& rng, int nterms = 3) {
  std::uniform_int_distribution<int> k(-2, 2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cplx> a, l;
  for (int i = 0; i < nterms; ++i) {
    int mx = k(rng), my = k(rng);
    if (mx == 0 && my == 0) mx = 1;
    // l zbar - conj(l) z = 2i Im(l) x - 2i Re(l) y
    l.push_back(cplx(-0.5 * my, 0.5 * mx));
    a.push_back(cplx(u(rng), u(rng)) * (0.45 / (nterms * std::sqrt(2.0))));
  }
  return magpauli::field::trig_field(a, l);
}

}  // namespace oracle
