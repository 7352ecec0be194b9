#ifndef NLDELAY_TESTS_REFERENCE_LOOP_HPP
#define NLDELAY_TESTS_REFERENCE_LOOP_HPP

#include "nldelay/schemes.hpp"

namespace nldelay::testing {

// Plain non-delayed time loop written out cell by cell, without the history
// buffer, SpeedField or the library step functions. Only valid for h = 0.
Level reference_run(const RunSetup& setup);

}  // namespace nldelay::testing

#endif
