#pragma once

// Umbrella header for the whole library.

#include "connectivity.hpp"
#include "continuity.hpp"
#include "decompose.hpp"
#include "dyadic.hpp"
#include "errors.hpp"
#include "fourier.hpp"
#include "freiman.hpp"
#include "generators.hpp"
#include "gf2.hpp"
#include "io.hpp"
#include "rng.hpp"
#include "sumset.hpp"
