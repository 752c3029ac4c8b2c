#ifndef JUMPKIT_JUMPKIT_HPP
#define JUMPKIT_JUMPKIT_HPP

#include "jumpkit/beables.hpp"
#include "jumpkit/config.hpp"
#include "jumpkit/csv.hpp"
#include "jumpkit/decay.hpp"
#include "jumpkit/errors.hpp"
#include "jumpkit/experiments.hpp"
#include "jumpkit/hilbert.hpp"
#include "jumpkit/ion.hpp"
#include "jumpkit/pilot.hpp"
#include "jumpkit/rng.hpp"
#include "jumpkit/zeno.hpp"

#endif
