#pragma once

// Umbrella header for the moreau library.

#include "moreau/experiments.hpp"
#include "moreau/io.hpp"
#include "moreau/linops.hpp"
#include "moreau/prox.hpp"
#include "moreau/smoothing.hpp"
#include "moreau/solvers.hpp"
