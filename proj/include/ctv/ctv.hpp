#pragma once

// Umbrella header for the complex constrained TV denoising and phase
// retrieval library.

#include "field.hpp"
#include "io.hpp"
#include "matrix.hpp"
#include "propagation.hpp"
#include "prox.hpp"
#include "random.hpp"
#include "retrieval.hpp"
#include "tv_denoise.hpp"
