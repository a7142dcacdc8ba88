// Convenience umbrella header.
#ifndef TUNNELSPLIT_TUNNELSPLIT_HPP
#define TUNNELSPLIT_TUNNELSPLIT_HPP

#include "barrier.hpp"
#include "basis.hpp"
#include "kernels.hpp"
#include "larmor.hpp"
#include "ode.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "stationary.hpp"
#include "times.hpp"
#include "wavepacket.hpp"

#endif  // TUNNELSPLIT_TUNNELSPLIT_HPP
